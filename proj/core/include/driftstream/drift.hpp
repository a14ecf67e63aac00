#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <random>
#include <string_view>
#include <vector>

namespace driftstream {

enum class DriftLevel { normal, warning, drift };

std::string_view to_string(DriftLevel l) noexcept;

/// Per-sample change detector. `update` takes the monitored value (the
/// pipeline feeds the prediction-error bit) and reports the level reached.
/// Detectors reset themselves after reporting Drift.
class DriftDetector {
 public:
  virtual ~DriftDetector() = default;

  virtual DriftLevel update(double value) = 0;
  virtual void reset() = 0;
  virtual std::unique_ptr<DriftDetector> clone_fresh() const = 0;
  virtual std::string_view name() const noexcept = 0;
  virtual bool has_warning_level() const noexcept = 0;
  /// Number of most recent inputs the detector keeps after the last update
  /// (window-based detectors); 0 for detectors without a window.
  virtual std::size_t retained_size() const noexcept { return 0; }
};

/// Never signals. Used for static baselines.
class NoDetector final : public DriftDetector {
 public:
  DriftLevel update(double) override { return DriftLevel::normal; }
  void reset() override {}
  std::unique_ptr<DriftDetector> clone_fresh() const override {
    return std::make_unique<NoDetector>();
  }
  std::string_view name() const noexcept override { return "none"; }
  bool has_warning_level() const noexcept override { return false; }
};

struct DdmParams {
  std::size_t min_instances = 30;
  double warning_level = 2.0;
  double drift_level = 3.0;
};

/// Level for the DDM rule. Signals only when p + s lies strictly above the
/// recorded minimum; then Warning iff p + s >= p_min + w*s_min and Drift iff
/// p + s >= p_min + d*s_min.
DriftLevel ddm_level(double p, double s, double p_min, double s_min,
                     const DdmParams& params) noexcept;

/// Drift Detection Method: monitors the running error rate p and its
/// binomial standard deviation s = sqrt(p(1-p)/i).
class Ddm final : public DriftDetector {
 public:
  explicit Ddm(DdmParams params = {}) : params_(params) {}

  DriftLevel update(double error) override;
  void reset() override;
  std::unique_ptr<DriftDetector> clone_fresh() const override {
    return std::make_unique<Ddm>(params_);
  }
  std::string_view name() const noexcept override { return "ddm"; }
  bool has_warning_level() const noexcept override { return true; }

  std::size_t samples() const noexcept { return n_; }
  double error_rate() const noexcept { return p_; }
  double deviation() const noexcept { return s_; }
  double p_min() const noexcept { return p_min_; }
  double s_min() const noexcept { return s_min_; }

 private:
  DdmParams params_;
  std::size_t n_ = 0;
  double p_ = 0.0;
  double s_ = 0.0;
  double p_min_ = std::numeric_limits<double>::infinity();
  double s_min_ = std::numeric_limits<double>::infinity();
};

struct EddmParams {
  double warning_ratio = 0.95;
  double drift_ratio = 0.90;
  std::size_t min_errors = 30;
};

/// Early Drift Detection Method: tracks the mean p' and standard deviation s'
/// of the distance (in samples) between consecutive errors and compares
/// (p' + 2s') to its recorded maximum. The level is re-evaluated on every
/// error; between errors the last Warning/Normal level is repeated.
class Eddm final : public DriftDetector {
 public:
  explicit Eddm(EddmParams params = {}) : params_(params) {}

  DriftLevel update(double error) override;
  void reset() override;
  std::unique_ptr<DriftDetector> clone_fresh() const override {
    return std::make_unique<Eddm>(params_);
  }
  std::string_view name() const noexcept override { return "eddm"; }
  bool has_warning_level() const noexcept override { return true; }

  std::size_t samples() const noexcept { return n_; }
  std::size_t errors() const noexcept { return errors_; }
  double mean_distance() const noexcept { return mean_; }
  double std_distance() const noexcept;
  double max_score() const noexcept { return max_score_; }

 private:
  EddmParams params_;
  std::size_t n_ = 0;
  std::size_t errors_ = 0;
  std::size_t last_error_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double max_score_ = 0.0;
  bool warning_ = false;
};

struct AdwinParams {
  double delta = 0.002;
  /// Buckets per exponential-histogram row; 0 disables compression.
  std::size_t max_buckets = 5;
  /// Cut points are tested every `check_interval` updates.
  std::size_t check_interval = 1;
};

/// ADWIN cut threshold sqrt(ln(4n/delta) / (2m)) with m = 1/(1/n0 + 1/n1).
double adwin_cut_threshold(double n0, double n1, double delta);

/// Adaptive windowing over values in [0, 1]. The window is stored as an
/// exponential histogram: row r holds buckets summarizing 2^r values each.
/// After every insertion all bucket boundaries are tested; while some
/// boundary splits the window into W0 (older) and W1 with
/// |mean(W0) - mean(W1)| > threshold, the oldest bucket is dropped.
class Adwin final : public DriftDetector {
 public:
  explicit Adwin(AdwinParams params = {});

  /// Returns true when the window shrank. Throws ValueOutOfRange outside [0, 1].
  bool add(double value);
  DriftLevel update(double value) override {
    return add(value) ? DriftLevel::drift : DriftLevel::normal;
  }
  /// Empties the window.
  void reset() override;
  std::unique_ptr<DriftDetector> clone_fresh() const override {
    return std::make_unique<Adwin>(params_);
  }
  std::string_view name() const noexcept override { return "adwin"; }
  bool has_warning_level() const noexcept override { return false; }
  std::size_t retained_size() const noexcept override { return width_; }

  std::size_t width() const noexcept { return width_; }
  double total() const noexcept { return total_; }
  double mean() const noexcept { return width_ ? total_ / static_cast<double>(width_) : 0.0; }
  std::size_t n_buckets() const noexcept;

 private:
  void compress();
  bool detect_change();

  AdwinParams params_;
  std::vector<std::deque<double>> rows_;  // front = newest bucket of the row
  std::size_t width_ = 0;
  double total_ = 0.0;
  std::size_t since_check_ = 0;
};

struct KswinParams {
  std::size_t window_size = 100;
  std::size_t stat_size = 30;
  double alpha = 0.005;
  /// Compare the newest `stat_size` values against `stat_size` values drawn
  /// (with replacement) from the older part instead of the whole older part.
  bool sampled = false;
  std::uint64_t seed = 1;
};

/// Kolmogorov-Smirnov windowing. Once the buffer holds `window_size` values,
/// every update compares the newest `stat_size` values with the older ones;
/// on p < alpha only the newest `stat_size` values are kept.
class Kswin final : public DriftDetector {
 public:
  explicit Kswin(KswinParams params = {});

  DriftLevel update(double value) override;
  void reset() override;
  std::unique_ptr<DriftDetector> clone_fresh() const override {
    return std::make_unique<Kswin>(params_);
  }
  std::string_view name() const noexcept override { return "kswin"; }
  bool has_warning_level() const noexcept override { return false; }
  std::size_t retained_size() const noexcept override { return buffer_.size(); }

  const std::deque<double>& buffer() const noexcept { return buffer_; }
  std::size_t tests() const noexcept { return tests_; }
  double last_statistic() const noexcept { return last_d_; }
  double last_pvalue() const noexcept { return last_p_; }

 private:
  KswinParams params_;
  std::deque<double> buffer_;
  std::mt19937_64 rng_;
  std::size_t tests_ = 0;
  double last_d_ = 0.0;
  double last_p_ = 1.0;
};

}  // namespace driftstream
