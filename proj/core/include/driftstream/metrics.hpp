#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftstream/drift.hpp"
#include "driftstream/stream.hpp"

namespace driftstream {

/// Confusion counts with malware as the positive class.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  void add(Label predicted, Label truth) noexcept;
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept;
  bool operator==(const ConfusionCounts&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision/recall are 0 when their denominator is 0; f1 is 0 when P+R = 0.
/// Throws EmptyCounts when nothing was counted.
Metrics compute_metrics(const ConfusionCounts& c);

/// Faded prequential error e_t = S_t / B_t with S_t = bit_t + phi*S_{t-1}
/// and B_t = 1 + phi*B_{t-1}. phi = 1 gives the running mean.
std::vector<double> prequential_error(std::span<const std::uint8_t> error_bits, double fading);

struct DriftEvent {
  std::size_t step = 0;  // 1-based index of the evaluated sample
  std::string detector;
  DriftLevel level = DriftLevel::drift;
};

struct WindowSnapshot {
  std::size_t step = 0;  // last step covered by the window
  ConfusionCounts counts;
  double prequential_error = 0.0;  // faded
  double running_error = 0.0;      // phi = 1
};

/// Prequential record of one run: every (prediction, truth) pair, cumulative
/// and per-window confusion counts, and detector events.
class MetricsTimeline {
 public:
  explicit MetricsTimeline(std::size_t window = 1000, double fading = 0.999);

  void record(Label predicted, Label truth);
  /// Attaches an event to the most recently recorded step.
  void add_event(std::string detector, DriftLevel level);
  void count_degenerate_drift() noexcept { ++degenerate_drifts_; }

  std::size_t steps() const noexcept { return predictions_.size(); }
  std::size_t window() const noexcept { return window_; }
  double fading() const noexcept { return fading_; }
  const std::vector<std::uint8_t>& predictions() const noexcept { return predictions_; }
  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
  std::vector<std::uint8_t> error_bits() const;
  const ConfusionCounts& cumulative() const noexcept { return cumulative_; }
  const std::vector<DriftEvent>& events() const noexcept { return events_; }
  std::size_t drift_count() const noexcept;
  std::size_t warning_count() const noexcept;
  std::size_t degenerate_drifts() const noexcept { return degenerate_drifts_; }

  /// ceil(steps / window) snapshots; the last one may cover a partial window.
  std::vector<WindowSnapshot> snapshots() const;

 private:
  std::size_t window_;
  double fading_;
  std::vector<std::uint8_t> predictions_;
  std::vector<std::uint8_t> labels_;
  ConfusionCounts cumulative_;
  std::vector<DriftEvent> events_;
  std::size_t degenerate_drifts_ = 0;
};

}  // namespace driftstream
