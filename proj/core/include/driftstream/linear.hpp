#pragma once

#include <vector>

#include "driftstream/learners.hpp"

namespace driftstream {

enum class LinearRule { sgd_hinge, perceptron, passive_aggressive };

std::string_view to_string(LinearRule r) noexcept;

struct LinearParams {
  LinearRule rule = LinearRule::sgd_hinge;
  double learning_rate = 0.01;  // sgd_hinge only; constant schedule
  double l2 = 1e-4;             // sgd_hinge only
  double aggressiveness = 1.0;  // passive_aggressive (PA-I) cap on the step
};

/// Linear model sign(w.x + b) with labels encoded as -1/+1 internally.
///
/// sgd_hinge:  margin < 1  -> w = (1 - lr*l2) w + lr*y*x, b += lr*y
///             otherwise   -> w = (1 - lr*l2) w
/// perceptron: y(w.x+b) <= 0 -> w += y*x, b += y
/// passive_aggressive (PA-I): step = min(C, hinge / (|x|^2 + 1)), bias
///             treated as a constant feature.
///
/// The weight vector can grow (`grow`) for feature sets that expand over time.
class LinearClassifier final : public OnlineClassifier {
 public:
  LinearClassifier(std::size_t dim, LinearParams params = {});

  std::size_t dim() const noexcept override { return weights_.size(); }
  void partial_fit(std::span<const double> x, Label y) override;
  Label predict(std::span<const double> x) const override;
  void reset() override;
  std::unique_ptr<OnlineClassifier> clone_untrained() const override;
  std::string_view name() const noexcept override { return to_string(params_.rule); }

  double decision(std::span<const double> x) const;
  /// Zero-extends the weights to `new_dim`; shrinking is not allowed.
  void grow(std::size_t new_dim);

  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  const LinearParams& params() const noexcept { return params_; }

 private:
  LinearParams params_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

}  // namespace driftstream
