#include "driftstream/metrics.hpp"

#include <algorithm>

#include "driftstream/errors.hpp"

namespace driftstream {

void ConfusionCounts::add(Label predicted, Label truth) noexcept {
  const bool p = predicted == Label::malware;
  const bool t = truth == Label::malware;
  if (p && t) ++tp;
  else if (p) ++fp;
  else if (t) ++fn;
  else ++tn;
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) noexcept {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Metrics compute_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw EmptyCounts("no predictions were counted");
  auto ratio = [](std::uint64_t a, std::uint64_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  Metrics m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  const double pr = m.precision + m.recall;
  m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
  return m;
}

std::vector<double> prequential_error(std::span<const std::uint8_t> error_bits, double fading) {
  if (!(fading > 0.0 && fading <= 1.0)) throw ConfigError("fading factor must lie in (0, 1]");
  std::vector<double> curve;
  curve.reserve(error_bits.size());
  double s = 0.0, b = 0.0;
  for (auto bit : error_bits) {
    if (bit > 1) throw ValueOutOfRange("error bits must be 0 or 1");
    s = bit + fading * s;
    b = 1.0 + fading * b;
    curve.push_back(s / b);
  }
  return curve;
}

MetricsTimeline::MetricsTimeline(std::size_t window, double fading)
    : window_(window), fading_(fading) {
  if (window_ == 0) throw ConfigError("metrics window must be at least 1");
  if (!(fading_ > 0.0 && fading_ <= 1.0)) throw ConfigError("fading factor must lie in (0, 1]");
}

void MetricsTimeline::record(Label predicted, Label truth) {
  predictions_.push_back(static_cast<std::uint8_t>(to_int(predicted)));
  labels_.push_back(static_cast<std::uint8_t>(to_int(truth)));
  cumulative_.add(predicted, truth);
}

void MetricsTimeline::add_event(std::string detector, DriftLevel level) {
  events_.push_back({steps(), std::move(detector), level});
}

std::vector<std::uint8_t> MetricsTimeline::error_bits() const {
  std::vector<std::uint8_t> bits(predictions_.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = predictions_[i] != labels_[i];
  return bits;
}

std::size_t MetricsTimeline::drift_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      events_.begin(), events_.end(), [](const auto& e) { return e.level == DriftLevel::drift; }));
}

std::size_t MetricsTimeline::warning_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [](const auto& e) {
    return e.level == DriftLevel::warning;
  }));
}

std::vector<WindowSnapshot> MetricsTimeline::snapshots() const {
  const auto bits = error_bits();
  const auto faded = prequential_error(bits, fading_);
  const auto plain = prequential_error(bits, 1.0);
  std::vector<WindowSnapshot> out;
  for (std::size_t start = 0; start < bits.size(); start += window_) {
    const auto end = std::min(start + window_, bits.size());
    WindowSnapshot w;
    w.step = end;
    for (std::size_t i = start; i < end; ++i) {
      w.counts.add(static_cast<Label>(predictions_[i]), static_cast<Label>(labels_[i]));
    }
    w.prequential_error = faded[end - 1];
    w.running_error = plain[end - 1];
    out.push_back(w);
  }
  return out;
}

}  // namespace driftstream
