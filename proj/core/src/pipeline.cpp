#include "driftstream/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "driftstream/errors.hpp"
#include "driftstream/linear.hpp"

namespace driftstream {

namespace {

constexpr std::uint64_t kClassifierStream = 100;
constexpr std::uint64_t kDetectorStream = 7;
constexpr std::uint64_t kFoldStream = 11;

void require_labels(std::span<const RawSample> samples) {
  for (const auto& s : samples) {
    if (!s.label) throw UnlabeledSample("sample '" + s.id + "' has no label");
  }
}

bool has_both_classes(std::span<const RawSample> samples) {
  bool seen[2] = {false, false};
  for (const auto& s : samples) seen[to_int(*s.label)] = true;
  return seen[0] && seen[1];
}

std::uint64_t classifier_seed(const ExperimentConfig& config, std::size_t generation) {
  return split_seed(config.seed, kClassifierStream + generation);
}

std::unique_ptr<OnlineClassifier> new_classifier(const ExperimentConfig& config,
                                                 const PipelineHooks& hooks, std::size_t dim,
                                                 std::size_t generation) {
  const auto seed = classifier_seed(config, generation);
  if (hooks.make_classifier) return hooks.make_classifier(dim, seed);
  return make_classifier(config.classifier, dim, seed);
}

EvaluationResult evaluate(const OnlineClassifier& classifier,
                          const FeatureExtractorModel& extractor,
                          std::span<const RawSample> samples) {
  EvaluationResult r;
  std::vector<double> x(extractor.dim());
  for (const auto& s : samples) {
    extractor.transform_into(s, x);
    r.counts.add(classifier.predict(x), *s.label);
  }
  if (r.counts.total() > 0) r.metrics = compute_metrics(r.counts);
  return r;
}

Metrics mean_metrics(const std::vector<Metrics>& all) {
  Metrics m;
  if (all.empty()) return m;
  for (const auto& x : all) {
    m.accuracy += x.accuracy;
    m.precision += x.precision;
    m.recall += x.recall;
    m.f1 += x.f1;
  }
  const double n = static_cast<double>(all.size());
  m.accuracy /= n;
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

std::vector<RawSample> gather(std::span<const RawSample> samples, std::size_t first,
                              std::size_t last) {
  return {samples.begin() + static_cast<std::ptrdiff_t>(first),
          samples.begin() + static_cast<std::ptrdiff_t>(last)};
}

}  // namespace

std::size_t warmup_length(std::span<const RawSample> samples, const WarmupSpec& spec) {
  if (samples.empty()) throw InsufficientData("stream is empty");
  std::size_t n = 0;
  if (spec.unit == WarmupSpec::Unit::samples) {
    n = static_cast<std::size_t>(std::min<std::int64_t>(
        spec.amount, static_cast<std::int64_t>(samples.size())));
  } else {
    const auto first = samples.front().timestamp;
    std::int64_t limit = 0;
    switch (spec.unit) {
      case WarmupSpec::Unit::days:
        limit = first + spec.amount * 86400;
        break;
      case WarmupSpec::Unit::months:
        limit = month_start(month_index(first) + spec.amount);
        break;
      case WarmupSpec::Unit::years:
        limit = month_start(month_index(first) + 12 * spec.amount);
        break;
      case WarmupSpec::Unit::samples:
        break;
    }
    while (n < samples.size() && samples[n].timestamp < limit) ++n;
  }
  if (n == 0) throw InsufficientData("warmup period selects no samples");
  if (n >= samples.size()) {
    throw InsufficientData("warmup period " + spec.to_string() +
                           " covers the whole stream; nothing left to evaluate");
  }
  return n;
}

void train_classifier(OnlineClassifier& classifier, const FeatureExtractorModel& extractor,
                      std::span<const RawSample> samples, std::size_t epochs) {
  std::vector<std::vector<double>> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back(extractor.transform(s).values);
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < samples.size(); ++i) classifier.partial_fit(rows[i], *samples[i].label);
  }
}

// --- F&F loop --------------------------------------------------------------

StreamRunResult run_fnf(const SampleStream& stream, const ExperimentConfig& config,
                        const PipelineHooks& hooks) {
  require_labels(stream.samples());
  const auto n = warmup_length(stream.samples(), config.warmup);
  const auto all = stream.samples();
  return run_fnf(stream.schema(), all.first(n), all.subspan(n), config, hooks);
}

StreamRunResult run_fnf(const StreamSchema& schema, std::span<const RawSample> warmup,
                        std::span<const RawSample> evaluation, const ExperimentConfig& config,
                        const PipelineHooks& hooks) {
  config.validate();
  require_labels(warmup);
  require_labels(evaluation);
  if (warmup.empty() || !has_both_classes(warmup)) {
    throw WarmupTooSmall("warmup must contain both goodware and malware samples");
  }
  const bool frozen = config.strategy == Strategy::static_baseline;
  const bool retrain = config.strategy == Strategy::fnf_retrain;
  if (!frozen && !retrain && config.strategy != Strategy::fnf_update) {
    throw ConfigError("run_fnf needs strategy fnf-update, fnf-retrain or static");
  }

  StreamRunResult result{MetricsTimeline(config.metrics_window, config.fading), {}, {},
                         warmup.size(), 0, {}};
  auto extractor = fit_extractor(schema, warmup, config.vocab_size);
  const auto dim = extractor.dim();
  std::size_t generation = 0;
  auto classifier = new_classifier(config, hooks, dim, generation);
  train_classifier(*classifier, extractor, warmup, config.train_epochs);
  result.extractor_fingerprints.push_back(extractor.fingerprint());

  std::unique_ptr<DriftDetector> detector;
  if (frozen) {
    detector = std::make_unique<NoDetector>();
  } else if (hooks.make_detector) {
    detector = hooks.make_detector();
  } else {
    detector = make_detector(config.detector, split_seed(config.seed, kDetectorStream));
  }
  const std::string detector_name(detector->name());
  const bool warning_based = detector->has_warning_level();

  std::vector<std::size_t> buffer;  // indices into `evaluation`
  DriftLevel previous = DriftLevel::normal;
  std::vector<double> x(dim);

  for (std::size_t i = 0; i < evaluation.size(); ++i) {
    const auto& sample = evaluation[i];
    const Label truth = *sample.label;
    extractor.transform_into(sample, x);
    const Label predicted = classifier->predict(x);
    result.timeline.record(predicted, truth);
    if (frozen) continue;

    const auto level = detector->update(predicted != truth ? 1.0 : 0.0);
    switch (level) {
      case DriftLevel::normal:
        if (warning_based && previous == DriftLevel::warning) buffer.clear();
        classifier->partial_fit(x, truth);
        break;
      case DriftLevel::warning:
        if (previous != DriftLevel::warning) result.timeline.add_event(detector_name, level);
        classifier->partial_fit(x, truth);
        buffer.push_back(i);
        break;
      case DriftLevel::drift: {
        result.timeline.add_event(detector_name, level);
        std::vector<RawSample> batch;
        if (warning_based) {
          buffer.push_back(i);
          for (auto b : buffer) batch.push_back(evaluation[b]);
        } else {
          const auto keep = std::min(detector->retained_size(), i + 1);
          batch = gather(evaluation, i + 1 - keep, i + 1);
        }
        buffer.clear();
        if (batch.empty()) {
          // Nothing to rebuild from: keep the current models.
          result.timeline.count_degenerate_drift();
          classifier->partial_fit(x, truth);
          break;
        }
        ++generation;
        ++result.classifier_rebuilds;
        if (retrain) {
          auto refit = fit_extractor(schema, batch, config.vocab_size);
          result.vocabulary_changes.push_back(
              {result.timeline.steps(), vocabulary_diff(extractor, refit)});
          extractor = std::move(refit);
          result.extractor_fingerprints.push_back(extractor.fingerprint());
          classifier = new_classifier(config, hooks, dim, generation);
        } else if (config.update_mode == UpdateMode::replace) {
          classifier = new_classifier(config, hooks, dim, generation);
        }
        train_classifier(*classifier, extractor, batch, config.train_epochs);
        break;
      }
    }
    previous = level;
  }
  result.final_extractor = std::move(extractor);
  return result;
}

// --- Model pool ------------------------------------------------------------

namespace {

/// Global column registry so the pool's feature set can grow across
/// extractor refits: (attribute, token) -> stable column.
class FeatureRegistry {
 public:
  /// Column of every extractor output dimension (unused columns map to npos).
  std::vector<std::size_t> bind(const FeatureExtractorModel& e) {
    std::vector<std::size_t> map(e.dim(), npos);
    for (std::size_t a = 0; a < e.vocabularies().size(); ++a) {
      const auto& v = e.vocabularies()[a];
      for (std::size_t j = 0; j < v.size(); ++j) {
        auto [it, inserted] = columns_.try_emplace({a, v.tokens[j]}, columns_.size());
        map[a * e.vocab_size() + j] = it->second;
      }
    }
    return map;
  }
  std::size_t size() const noexcept { return columns_.size(); }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::map<std::pair<std::size_t, std::string>, std::size_t> columns_;
};

struct PoolFeatures {
  FeatureExtractorModel extractor;
  std::vector<std::size_t> columns;

  void project(const RawSample& s, std::size_t width, std::vector<double>& scratch,
               std::vector<double>& out) const {
    scratch.resize(extractor.dim());
    extractor.transform_into(s, scratch);
    out.assign(width, 0.0);
    for (std::size_t j = 0; j < scratch.size(); ++j) {
      if (columns[j] != FeatureRegistry::npos) out[columns[j]] = scratch[j];
    }
  }
};

}  // namespace

StreamRunResult run_model_pool(const SampleStream& stream, const ExperimentConfig& config) {
  require_labels(stream.samples());
  const auto n = warmup_length(stream.samples(), config.warmup);
  const auto all = stream.samples();
  return run_model_pool(stream.schema(), all.first(n), all.subspan(n), config);
}

StreamRunResult run_model_pool(const StreamSchema& schema, std::span<const RawSample> warmup,
                               std::span<const RawSample> evaluation,
                               const ExperimentConfig& config) {
  config.validate();
  require_labels(warmup);
  require_labels(evaluation);
  if (warmup.empty() || !has_both_classes(warmup)) {
    throw WarmupTooSmall("warmup must contain both goodware and malware samples");
  }
  StreamRunResult result{MetricsTimeline(config.metrics_window, config.fading), {}, {},
                         warmup.size(), 0, {}};

  FeatureRegistry registry;
  PoolFeatures features{fit_extractor(schema, warmup, config.vocab_size), {}};
  features.columns = registry.bind(features.extractor);
  result.extractor_fingerprints.push_back(features.extractor.fingerprint());

  const LinearRule rules[] = {LinearRule::sgd_hinge, LinearRule::passive_aggressive,
                              LinearRule::perceptron};
  std::vector<LinearClassifier> members;
  for (auto rule : rules) {
    auto p = config.classifier.sgd;
    p.rule = rule;
    members.emplace_back(registry.size(), p);
  }

  std::vector<double> scratch, x;
  std::vector<std::vector<double>> warm_rows;
  for (const auto& s : warmup) {
    features.project(s, registry.size(), scratch, x);
    warm_rows.push_back(x);
  }
  for (auto& m : members) {
    for (std::size_t e = 0; e < config.train_epochs; ++e) {
      for (std::size_t i = 0; i < warmup.size(); ++i) m.partial_fit(warm_rows[i], *warmup[i].label);
    }
  }
  // Vote weight of each member: its accuracy on the warmup data.
  std::vector<double> weights;
  for (const auto& m : members) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < warmup.size(); ++i) correct += m.predict(warm_rows[i]) == *warmup[i].label;
    weights.push_back(static_cast<double>(correct) / static_cast<double>(warmup.size()));
  }
  warm_rows.clear();

  std::vector<std::size_t> agreement(members.size(), 0);
  std::vector<std::pair<std::size_t, Label>> interval;  // (index, pseudo-label)
  std::vector<Label> votes(members.size());

  for (std::size_t i = 0; i < evaluation.size(); ++i) {
    const auto& sample = evaluation[i];
    features.project(sample, registry.size(), scratch, x);
    double score = 0.0;
    for (std::size_t m = 0; m < members.size(); ++m) {
      votes[m] = members[m].predict(x);
      score += weights[m] * (votes[m] == Label::malware ? 1.0 : -1.0);
    }
    const Label pseudo = label_from_bool(score > 0.0);
    result.timeline.record(pseudo, *sample.label);
    for (std::size_t m = 0; m < members.size(); ++m) agreement[m] += votes[m] == pseudo;
    interval.emplace_back(i, pseudo);

    if (interval.size() < config.pool.steps) continue;
    std::vector<std::size_t> aged;
    for (std::size_t m = 0; m < members.size(); ++m) {
      const double ji = static_cast<double>(agreement[m]) / static_cast<double>(interval.size());
      if (ji < config.pool.tau0 || ji > config.pool.tau1) aged.push_back(m);
    }
    if (!aged.empty()) {
      result.timeline.add_event("pool", DriftLevel::drift);
      std::vector<RawSample> batch;
      batch.reserve(interval.size());
      for (const auto& [idx, lab] : interval) batch.push_back(evaluation[idx]);
      auto refit = fit_extractor(schema, batch, config.vocab_size);
      result.vocabulary_changes.push_back(
          {result.timeline.steps(), vocabulary_diff(features.extractor, refit)});
      features.extractor = std::move(refit);
      features.columns = registry.bind(features.extractor);
      result.extractor_fingerprints.push_back(features.extractor.fingerprint());
      for (auto m : aged) members[m].grow(registry.size());
      for (std::size_t b = 0; b < batch.size(); ++b) {
        features.project(batch[b], registry.size(), scratch, x);
        for (auto m : aged) members[m].partial_fit(x, interval[b].second);
      }
      result.classifier_rebuilds += aged.size();
      // Young members still need the wider layout.
      for (auto& m : members) m.grow(registry.size());
    }
    std::fill(agreement.begin(), agreement.end(), 0);
    interval.clear();
  }
  result.final_extractor = std::move(features.extractor);
  return result;
}

// --- Batch protocols -------------------------------------------------------

IwcResult run_iwc(const SampleStream& stream, const ExperimentConfig& config) {
  config.validate();
  const auto samples = stream.samples();
  require_labels(samples);
  // Samples are time-ordered, so each month is a contiguous range.
  std::vector<std::pair<std::int64_t, std::size_t>> starts;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto m = month_index(samples[i].timestamp);
    if (starts.empty() || starts.back().first != m) starts.emplace_back(m, i);
  }
  if (starts.size() < 2) {
    throw InsufficientTimeSpan("incremental windowed evaluation needs at least two months");
  }
  IwcResult result;
  std::vector<Metrics> per_month;
  for (std::size_t k = 1; k < starts.size(); ++k) {
    const auto begin = starts[k].second;
    const auto end = k + 1 < starts.size() ? starts[k + 1].second : samples.size();
    const auto train = samples.first(begin);
    auto extractor = fit_extractor(stream.schema(), train, config.vocab_size);
    auto classifier = make_classifier(config.classifier, extractor.dim(), classifier_seed(config, k));
    train_classifier(*classifier, extractor, train, config.train_epochs);
    auto eval = evaluate(*classifier, extractor, samples.subspan(begin, end - begin));
    result.months.push_back({starts[k].first, begin, eval.counts, eval.metrics});
    per_month.push_back(eval.metrics);
  }
  result.mean = mean_metrics(per_month);
  return result;
}

EvaluationResult run_temporal_split(const SampleStream& stream, const ExperimentConfig& config) {
  config.validate();
  require_labels(stream.samples());
  auto [train, test] = split_temporal(stream, 0.5);
  if (train.empty() || test.empty()) {
    throw InsufficientData("temporal split needs at least two samples");
  }
  auto extractor = fit_extractor(train, config.vocab_size);
  auto classifier = make_classifier(config.classifier, extractor.dim(), classifier_seed(config, 0));
  train_classifier(*classifier, extractor, train.samples(), config.train_epochs);
  return evaluate(*classifier, extractor, test.samples());
}

CrossValidationResult run_cross_validation(const SampleStream& stream,
                                           const ExperimentConfig& config) {
  config.validate();
  const auto samples = stream.samples();
  require_labels(samples);
  const auto k = config.cv_folds;
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < samples.size(); ++i) by_class[to_int(*samples[i].label)].push_back(i);
  for (const auto& c : by_class) {
    if (c.size() < k) {
      throw ClassMissingInFold("each class needs at least k = " + std::to_string(k) +
                               " samples for stratified folds");
    }
  }
  std::mt19937_64 rng(split_seed(config.seed, kFoldStream));
  std::vector<std::size_t> fold_of(samples.size());
  for (auto& c : by_class) {
    std::shuffle(c.begin(), c.end(), rng);
    for (std::size_t j = 0; j < c.size(); ++j) fold_of[c[j]] = j % k;
  }

  CrossValidationResult result;
  std::vector<Metrics> per_fold;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<RawSample> train, test;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      (fold_of[i] == f ? test : train).push_back(samples[i]);
    }
    auto extractor = fit_extractor(stream.schema(), train, config.vocab_size);
    auto classifier = make_classifier(config.classifier, extractor.dim(), classifier_seed(config, f));
    train_classifier(*classifier, extractor, train, config.train_epochs);
    auto eval = evaluate(*classifier, extractor, test);
    result.folds.push_back(eval.counts);
    per_fold.push_back(eval.metrics);
  }
  result.mean = mean_metrics(per_fold);
  return result;
}

TimeSpanResult run_multiple_time_spans(const SampleStream& stream,
                                       const ExperimentConfig& config) {
  config.validate();
  const auto samples = stream.samples();
  require_labels(samples);
  const auto folds = config.time_span_folds;
  const auto n = samples.size();
  if (n < folds) {
    throw InsufficientData("stream has fewer samples than time-span folds");
  }
  auto bound = [&](std::size_t i) { return i * n / folds; };

  ExperimentConfig inner = config;
  inner.strategy = config.time_span_strategy;
  TimeSpanResult result;
  for (std::size_t i = 1; i < folds; ++i) {
    const auto cut = bound(i);
    const auto warm = samples.first(cut);
    const auto rest = samples.subspan(cut);
    auto run = inner.strategy == Strategy::pool
                   ? run_model_pool(stream.schema(), warm, rest, inner)
                   : run_fnf(stream.schema(), warm, rest, inner);
    FoldReport r;
    r.iteration = i;
    r.warmup_size = warm.size();
    r.stream_size = rest.size();
    r.counts = run.timeline.cumulative();
    r.f1 = compute_metrics(r.counts).f1;
    r.drifts = run.timeline.drift_count();
    result.folds.push_back(r);
  }
  double sum = 0.0;
  for (const auto& f : result.folds) sum += f.f1;
  result.mean_f1 = sum / static_cast<double>(result.folds.size());
  double ss = 0.0;
  for (const auto& f : result.folds) ss += (f.f1 - result.mean_f1) * (f.f1 - result.mean_f1);
  result.std_f1 =
      result.folds.size() > 1 ? std::sqrt(ss / static_cast<double>(result.folds.size() - 1)) : 0.0;
  return result;
}

}  // namespace driftstream
