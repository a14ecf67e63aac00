#include "driftstream/config.hpp"

#include <array>
#include <charconv>
#include <utility>

#include "driftstream/errors.hpp"

namespace driftstream {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  std::string expected;
  for (const auto& [name, value] : table) {
    if (!expected.empty()) expected += '|';
    expected += name;
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(text) + "' (expected " +
                    expected + ")");
}

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, Strategy>, 8> kStrategies{{
    {"cross-val", Strategy::cross_val},
    {"temporal", Strategy::temporal},
    {"iwc", Strategy::iwc},
    {"fnf-update", Strategy::fnf_update},
    {"fnf-retrain", Strategy::fnf_retrain},
    {"static", Strategy::static_baseline},
    {"pool", Strategy::pool},
    {"mts", Strategy::mts},
}};

constexpr std::array<std::pair<std::string_view, DetectorKind>, 5> kDetectors{{
    {"none", DetectorKind::none},
    {"ddm", DetectorKind::ddm},
    {"eddm", DetectorKind::eddm},
    {"adwin", DetectorKind::adwin},
    {"kswin", DetectorKind::kswin},
}};

constexpr std::array<std::pair<std::string_view, ClassifierKind>, 3> kClassifiers{{
    {"sgd", ClassifierKind::sgd},
    {"hoeffding", ClassifierKind::hoeffding},
    {"arf", ClassifierKind::arf},
}};

constexpr std::array<std::pair<std::string_view, UpdateMode>, 2> kUpdateModes{{
    {"replace", UpdateMode::replace},
    {"continue", UpdateMode::continue_training},
}};

constexpr std::array<std::pair<std::string_view, LeafPrediction>, 2> kLeafPredictions{{
    {"majority", LeafPrediction::majority},
    {"naive-bayes", LeafPrediction::naive_bayes},
}};

}  // namespace

Strategy parse_strategy(std::string_view t) { return parse_enum(t, kStrategies, "strategy"); }
DetectorKind parse_detector(std::string_view t) { return parse_enum(t, kDetectors, "detector"); }
ClassifierKind parse_classifier(std::string_view t) {
  return parse_enum(t, kClassifiers, "classifier");
}
UpdateMode parse_update_mode(std::string_view t) {
  return parse_enum(t, kUpdateModes, "update mode");
}
LeafPrediction parse_leaf_prediction(std::string_view t) {
  return parse_enum(t, kLeafPredictions, "leaf prediction");
}
std::string_view to_string(Strategy s) noexcept { return enum_name(s, kStrategies); }
std::string_view to_string(DetectorKind d) noexcept { return enum_name(d, kDetectors); }
std::string_view to_string(ClassifierKind c) noexcept { return enum_name(c, kClassifiers); }
std::string_view to_string(UpdateMode m) noexcept { return enum_name(m, kUpdateModes); }
std::string_view to_string(LeafPrediction p) noexcept { return enum_name(p, kLeafPredictions); }

WarmupSpec WarmupSpec::parse(std::string_view text) {
  WarmupSpec w;
  std::string_view digits = text;
  if (text.rfind("samples:", 0) == 0) {
    digits = text.substr(8);
  } else if (!text.empty() && (text.back() == 'd' || text.back() == 'm' || text.back() == 'y')) {
    w.unit = text.back() == 'd' ? Unit::days : text.back() == 'm' ? Unit::months : Unit::years;
    digits = text.substr(0, text.size() - 1);
  }
  const auto* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(digits.data(), end, w.amount);
  if (digits.empty() || ec != std::errc{} || ptr != end || w.amount <= 0) {
    throw ConfigError("invalid warmup '" + std::string(text) +
                      "' (expected N, samples:N, Nd, Nm or Ny with N > 0)");
  }
  return w;
}

std::string WarmupSpec::to_string() const {
  switch (unit) {
    case Unit::samples:
      return "samples:" + std::to_string(amount);
    case Unit::days:
      return std::to_string(amount) + "d";
    case Unit::months:
      return std::to_string(amount) + "m";
    case Unit::years:
      return std::to_string(amount) + "y";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (vocab_size == 0) throw ConfigError("vocab_size must be at least 1");
  if (cv_folds < 2) throw ConfigError("cross-validation needs k >= 2");
  if (time_span_folds < 2) throw ConfigError("folds must be >= 2");
  if (!(pool.tau0 < pool.tau1)) throw ConfigError("pool thresholds need tau0 < tau1");
  if (pool.steps == 0) throw ConfigError("pool drift-check interval must be >= 1");
  if (train_epochs == 0) throw ConfigError("train_epochs must be >= 1");
  if (metrics_window == 0) throw ConfigError("metrics window must be >= 1");
  if (!(fading > 0.0 && fading <= 1.0)) throw ConfigError("fading must lie in (0, 1]");
  switch (time_span_strategy) {
    case Strategy::fnf_update:
    case Strategy::fnf_retrain:
    case Strategy::static_baseline:
    case Strategy::pool:
      break;
    default:
      throw ConfigError("time-span strategy must be fnf-update, fnf-retrain, static or pool");
  }
  if (!(classifier.sgd.learning_rate > 0.0)) throw ConfigError("sgd learning rate must be > 0");
  if (classifier.sgd.l2 < 0.0) throw ConfigError("sgd l2 must be >= 0");
  // Constructing the components runs their own parameter checks.
  (void)make_detector(detector, seed);
  (void)make_classifier(classifier, 1, seed);
}

std::unique_ptr<OnlineClassifier> make_classifier(const ClassifierConfig& config, std::size_t dim,
                                                  std::uint64_t seed) {
  switch (config.kind) {
    case ClassifierKind::sgd: {
      auto p = config.sgd;
      p.rule = LinearRule::sgd_hinge;
      return std::make_unique<LinearClassifier>(dim, p);
    }
    case ClassifierKind::hoeffding:
      return std::make_unique<HoeffdingTree>(dim, config.hoeffding);
    case ClassifierKind::arf: {
      auto p = config.arf;
      p.seed = seed;
      return std::make_unique<AdaptiveRandomForest>(dim, p);
    }
  }
  throw ConfigError("unknown classifier kind");
}

std::unique_ptr<DriftDetector> make_detector(const DetectorConfig& config, std::uint64_t seed) {
  switch (config.kind) {
    case DetectorKind::none:
      return std::make_unique<NoDetector>();
    case DetectorKind::ddm:
      return std::make_unique<Ddm>(config.ddm);
    case DetectorKind::eddm:
      return std::make_unique<Eddm>(config.eddm);
    case DetectorKind::adwin:
      return std::make_unique<Adwin>(config.adwin);
    case DetectorKind::kswin: {
      auto p = config.kswin;
      p.seed = seed;
      return std::make_unique<Kswin>(p);
    }
  }
  throw ConfigError("unknown detector kind");
}

}  // namespace driftstream
