#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "driftstream/arf.hpp"
#include "driftstream/drift.hpp"
#include "driftstream/hoeffding_tree.hpp"
#include "driftstream/linear.hpp"

namespace driftstream {

enum class Strategy {
  cross_val,
  temporal,
  iwc,
  fnf_update,
  fnf_retrain,
  static_baseline,
  pool,
  mts,
};

enum class DetectorKind { none, ddm, eddm, adwin, kswin };
enum class ClassifierKind { sgd, hoeffding, arf };

/// How the Update strategy builds the classifier after a drift: a new model
/// trained on the buffer, or the current model trained further on it.
enum class UpdateMode { replace, continue_training };

Strategy parse_strategy(std::string_view text);
DetectorKind parse_detector(std::string_view text);
ClassifierKind parse_classifier(std::string_view text);
UpdateMode parse_update_mode(std::string_view text);
LeafPrediction parse_leaf_prediction(std::string_view text);
std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(DetectorKind d) noexcept;
std::string_view to_string(ClassifierKind c) noexcept;
std::string_view to_string(UpdateMode m) noexcept;
std::string_view to_string(LeafPrediction p) noexcept;

/// Initial training period: the first N samples, or every sample whose
/// timestamp falls within the first N days / calendar months / years.
struct WarmupSpec {
  enum class Unit { samples, days, months, years };
  Unit unit = Unit::samples;
  std::int64_t amount = 1000;

  /// Accepts "1000", "samples:1000", "30d", "12m", "1y".
  static WarmupSpec parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const WarmupSpec&) const = default;
};

struct DetectorConfig {
  DetectorKind kind = DetectorKind::adwin;
  DdmParams ddm;
  EddmParams eddm;
  AdwinParams adwin;
  KswinParams kswin;
};

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::arf;
  LinearParams sgd;
  HoeffdingParams hoeffding;
  ArfParams arf;
};

struct PoolConfig {
  double tau0 = 0.3;
  double tau1 = 0.7;
  std::size_t steps = 500;
};

struct ExperimentConfig {
  Strategy strategy = Strategy::fnf_retrain;
  DetectorConfig detector;
  ClassifierConfig classifier;
  std::size_t vocab_size = 100;
  WarmupSpec warmup;
  std::uint64_t seed = 42;
  std::size_t cv_folds = 10;
  std::size_t time_span_folds = 11;
  /// Strategy run inside each multiple-time-span iteration.
  Strategy time_span_strategy = Strategy::fnf_retrain;
  UpdateMode update_mode = UpdateMode::replace;
  PoolConfig pool;
  /// Passes of partial_fit whenever a classifier is trained on a batch.
  std::size_t train_epochs = 1;
  std::size_t metrics_window = 1000;
  double fading = 0.999;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// `seed` overrides the forest's own seed so rebuilt models differ.
std::unique_ptr<OnlineClassifier> make_classifier(const ClassifierConfig& config, std::size_t dim,
                                                  std::uint64_t seed);
std::unique_ptr<DriftDetector> make_detector(const DetectorConfig& config, std::uint64_t seed);

}  // namespace driftstream
