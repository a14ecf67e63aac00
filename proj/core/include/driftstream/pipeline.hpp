#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "driftstream/config.hpp"
#include "driftstream/featurization.hpp"
#include "driftstream/metrics.hpp"
#include "driftstream/stream.hpp"

namespace driftstream {

/// Optional factory overrides, used to instrument runs.
struct PipelineHooks {
  std::function<std::unique_ptr<OnlineClassifier>(std::size_t dim, std::uint64_t seed)>
      make_classifier;
  std::function<std::unique_ptr<DriftDetector>()> make_detector;
};

/// Vocabulary change caused by an extractor refit at `step`.
struct VocabularyChange {
  std::size_t step = 0;
  std::vector<VocabularyDiff> diffs;
};

struct StreamRunResult {
  MetricsTimeline timeline;
  std::vector<VocabularyChange> vocabulary_changes;
  /// Extractor fingerprint after warmup, then after every refit.
  std::vector<std::uint64_t> extractor_fingerprints;
  std::size_t warmup_size = 0;
  std::size_t classifier_rebuilds = 0;
  FeatureExtractorModel final_extractor;
};

struct EvaluationResult {
  ConfusionCounts counts;
  Metrics metrics;
};

struct CrossValidationResult {
  std::vector<ConfusionCounts> folds;
  /// Per-fold metrics averaged over folds.
  Metrics mean;
};

struct IwcMonth {
  std::int64_t month = 0;  // see month_index()
  std::size_t train_size = 0;
  ConfusionCounts counts;
  Metrics metrics;
};

struct IwcResult {
  std::vector<IwcMonth> months;
  /// Per-month metrics averaged over evaluated months.
  Metrics mean;
};

struct FoldReport {
  std::size_t iteration = 0;  // 1-based
  std::size_t warmup_size = 0;
  std::size_t stream_size = 0;
  ConfusionCounts counts;
  double f1 = 0.0;
  std::size_t drifts = 0;
};

struct TimeSpanResult {
  std::vector<FoldReport> folds;
  double mean_f1 = 0.0;
  /// Sample standard deviation (n - 1) of the per-iteration F1.
  double std_f1 = 0.0;
};

/// Samples selected by `spec` as the warmup prefix. Throws InsufficientData
/// if the prefix is empty or covers the whole stream.
std::size_t warmup_length(std::span<const RawSample> samples, const WarmupSpec& spec);

/// Trains `classifier` for `epochs` passes over the transforms of `samples`.
void train_classifier(OnlineClassifier& classifier, const FeatureExtractorModel& extractor,
                      std::span<const RawSample> samples, std::size_t epochs);

/// Drift-aware prequential loop (test-then-train). The strategy comes from
/// `config.strategy`: fnf-update, fnf-retrain or static (warmup model frozen,
/// no detector).
StreamRunResult run_fnf(const SampleStream& stream, const ExperimentConfig& config,
                        const PipelineHooks& hooks = {});
/// Same loop with an explicit warmup/evaluation split.
StreamRunResult run_fnf(const StreamSchema& schema, std::span<const RawSample> warmup,
                        std::span<const RawSample> evaluation, const ExperimentConfig& config,
                        const PipelineHooks& hooks = {});

/// Model-pool baseline: three linear learners (SGD hinge, passive-aggressive,
/// perceptron) vote with per-member weights; the weighted vote serves as the
/// pseudo-label. Every `pool.steps` samples each member's agreement fraction
/// with the vote over the interval is computed; members outside
/// [tau0, tau1] are aged and retrained on the interval's samples with
/// pseudo-labels after the feature set is extended with the interval's
/// vocabulary. Each interval with an aged member counts as one drift.
StreamRunResult run_model_pool(const SampleStream& stream, const ExperimentConfig& config);
StreamRunResult run_model_pool(const StreamSchema& schema, std::span<const RawSample> warmup,
                               std::span<const RawSample> evaluation,
                               const ExperimentConfig& config);

/// Monthly retraining: for every calendar month after the first, extractor
/// and classifier are fit from scratch on all earlier samples and evaluated
/// on that month.
IwcResult run_iwc(const SampleStream& stream, const ExperimentConfig& config);

/// Train on the oldest half, evaluate on the newest half.
EvaluationResult run_temporal_split(const SampleStream& stream, const ExperimentConfig& config);

/// Stratified k-fold cross-validation with a fresh extractor and classifier
/// per fold.
CrossValidationResult run_cross_validation(const SampleStream& stream,
                                           const ExperimentConfig& config);

/// Cuts the stream into `time_span_folds` contiguous chunks; iteration i uses
/// chunks 1..i as warmup and the rest as the stream for
/// `time_span_strategy`.
TimeSpanResult run_multiple_time_spans(const SampleStream& stream,
                                       const ExperimentConfig& config);

}  // namespace driftstream
