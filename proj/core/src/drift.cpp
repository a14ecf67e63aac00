#include "driftstream/drift.hpp"

#include <cmath>

#include "driftstream/errors.hpp"
#include "driftstream/ks.hpp"

namespace driftstream {

std::string_view to_string(DriftLevel l) noexcept {
  switch (l) {
    case DriftLevel::normal:
      return "normal";
    case DriftLevel::warning:
      return "warning";
    case DriftLevel::drift:
      return "drift";
  }
  return "?";
}

// --- DDM -------------------------------------------------------------------

DriftLevel ddm_level(double p, double s, double p_min, double s_min,
                     const DdmParams& params) noexcept {
  const double cur = p + s;
  if (!(cur > p_min + s_min)) return DriftLevel::normal;
  if (cur >= p_min + params.drift_level * s_min) return DriftLevel::drift;
  if (cur >= p_min + params.warning_level * s_min) return DriftLevel::warning;
  return DriftLevel::normal;
}

void Ddm::reset() { *this = Ddm(params_); }

DriftLevel Ddm::update(double error) {
  ++n_;
  const double n = static_cast<double>(n_);
  p_ += (error - p_) / n;
  s_ = std::sqrt(p_ * (1.0 - p_) / n);
  if (n_ < params_.min_instances) return DriftLevel::normal;
  if (p_ + s_ <= p_min_ + s_min_) {
    p_min_ = p_;
    s_min_ = s_;
  }
  const auto level = ddm_level(p_, s_, p_min_, s_min_, params_);
  if (level == DriftLevel::drift) reset();
  return level;
}

// --- EDDM ------------------------------------------------------------------

void Eddm::reset() { *this = Eddm(params_); }

double Eddm::std_distance() const noexcept {
  return errors_ ? std::sqrt(m2_ / static_cast<double>(errors_)) : 0.0;
}

DriftLevel Eddm::update(double error) {
  ++n_;
  if (error == 0.0) return warning_ ? DriftLevel::warning : DriftLevel::normal;

  ++errors_;
  const double distance = static_cast<double>(n_ - last_error_);
  last_error_ = n_;
  const double old_mean = mean_;
  mean_ += (distance - mean_) / static_cast<double>(errors_);
  m2_ += (distance - mean_) * (distance - old_mean);
  const double score = mean_ + 2.0 * std_distance();

  warning_ = false;
  if (score > max_score_) {
    max_score_ = score;
    return DriftLevel::normal;
  }
  if (errors_ < params_.min_errors) return DriftLevel::normal;
  const double ratio = score / max_score_;
  if (ratio < params_.drift_ratio) {
    reset();
    return DriftLevel::drift;
  }
  if (ratio < params_.warning_ratio) {
    warning_ = true;
    return DriftLevel::warning;
  }
  return DriftLevel::normal;
}

// --- ADWIN -----------------------------------------------------------------

double adwin_cut_threshold(double n0, double n1, double delta) {
  const double m = 1.0 / (1.0 / n0 + 1.0 / n1);
  const double delta_prime = delta / (n0 + n1);
  return std::sqrt(std::log(4.0 / delta_prime) / (2.0 * m));
}

Adwin::Adwin(AdwinParams params) : params_(params) {
  if (!(params_.delta > 0.0 && params_.delta < 1.0)) {
    throw ConfigError("ADWIN delta must lie in (0, 1)");
  }
  if (params_.check_interval == 0) throw ConfigError("ADWIN check interval must be >= 1");
}

void Adwin::reset() {
  rows_.clear();
  width_ = 0;
  total_ = 0.0;
  since_check_ = 0;
}

std::size_t Adwin::n_buckets() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

bool Adwin::add(double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw ValueOutOfRange("ADWIN input must lie in [0, 1]");
  if (rows_.empty()) rows_.emplace_back();
  rows_[0].push_front(value);
  ++width_;
  total_ += value;
  compress();
  if (++since_check_ < params_.check_interval) return false;
  since_check_ = 0;
  return detect_change();
}

void Adwin::compress() {
  if (params_.max_buckets == 0) return;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() <= params_.max_buckets) break;
    auto& row = rows_[r];
    const double merged = row[row.size() - 1] + row[row.size() - 2];
    row.pop_back();
    row.pop_back();
    if (r + 1 == rows_.size()) rows_.emplace_back();
    rows_[r + 1].push_front(merged);
  }
}

bool Adwin::detect_change() {
  bool changed = false;
  bool cut = true;
  while (cut && width_ > 1) {
    cut = false;
    double n0 = 0.0, s0 = 0.0;
    const double n = static_cast<double>(width_);
    // Walk from the oldest bucket towards the newest; each boundary splits
    // the window into W0 (older) and W1 (newer).
    for (std::size_t r = rows_.size(); r-- > 0 && !cut;) {
      const double size = std::ldexp(1.0, static_cast<int>(r));
      const auto& row = rows_[r];
      for (std::size_t i = row.size(); i-- > 0;) {
        n0 += size;
        s0 += row[i];
        const double n1 = n - n0;
        if (n1 < 1.0) break;
        const double diff = std::abs(s0 / n0 - (total_ - s0) / n1);
        if (diff > adwin_cut_threshold(n0, n1, params_.delta)) {
          cut = true;
          break;
        }
      }
    }
    if (cut) {
      changed = true;
      // Drop the oldest bucket.
      auto r = rows_.size() - 1;
      const auto size = std::size_t{1} << r;
      total_ -= rows_[r].back();
      width_ -= size;
      rows_[r].pop_back();
      while (!rows_.empty() && rows_.back().empty()) rows_.pop_back();
      if (width_ == 0) total_ = 0.0;
    }
  }
  return changed;
}

// --- KSWIN -----------------------------------------------------------------

Kswin::Kswin(KswinParams params) : params_(params), rng_(params.seed) {
  if (params_.stat_size == 0 || params_.stat_size >= params_.window_size) {
    throw ConfigError("KSWIN requires 0 < stat_size < window_size");
  }
  if (!(params_.alpha > 0.0 && params_.alpha < 1.0)) {
    throw ConfigError("KSWIN alpha must lie in (0, 1)");
  }
}

void Kswin::reset() {
  buffer_.clear();
  rng_.seed(params_.seed);
  tests_ = 0;
  last_d_ = 0.0;
  last_p_ = 1.0;
}

DriftLevel Kswin::update(double value) {
  buffer_.push_back(value);
  if (buffer_.size() > params_.window_size) buffer_.pop_front();
  if (buffer_.size() < params_.window_size) return DriftLevel::normal;

  const auto r = params_.stat_size;
  const auto older = params_.window_size - r;
  std::vector<double> recent(buffer_.begin() + static_cast<std::ptrdiff_t>(older), buffer_.end());
  std::vector<double> reference;
  if (params_.sampled) {
    std::uniform_int_distribution<std::size_t> pick(0, older - 1);
    reference.reserve(r);
    for (std::size_t i = 0; i < r; ++i) reference.push_back(buffer_[pick(rng_)]);
  } else {
    reference.assign(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(older));
  }
  ++tests_;
  last_d_ = ks_statistic(reference, recent);
  last_p_ = ks_pvalue(last_d_, reference.size(), recent.size());
  if (last_p_ < params_.alpha) {
    buffer_.assign(recent.begin(), recent.end());
    return DriftLevel::drift;
  }
  return DriftLevel::normal;
}

}  // namespace driftstream
