#include "driftstream/linear.hpp"

#include <algorithm>

#include "driftstream/errors.hpp"

namespace driftstream {

void check_dim(std::span<const double> x, std::size_t expected) {
  if (x.size() != expected) {
    throw DimensionMismatch("expected " + std::to_string(expected) + " features, got " +
                            std::to_string(x.size()));
  }
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string_view to_string(LinearRule r) noexcept {
  switch (r) {
    case LinearRule::sgd_hinge:
      return "sgd";
    case LinearRule::perceptron:
      return "perceptron";
    case LinearRule::passive_aggressive:
      return "passive-aggressive";
  }
  return "?";
}

LinearClassifier::LinearClassifier(std::size_t dim, LinearParams params)
    : params_(params), weights_(dim, 0.0) {}

double LinearClassifier::decision(std::span<const double> x) const {
  check_dim(x, weights_.size());
  double s = bias_;
  for (std::size_t j = 0; j < x.size(); ++j) s += weights_[j] * x[j];
  return s;
}

Label LinearClassifier::predict(std::span<const double> x) const {
  return label_from_bool(decision(x) > 0.0);
}

void LinearClassifier::partial_fit(std::span<const double> x, Label y) {
  const double score = decision(x);
  const double ys = y == Label::malware ? 1.0 : -1.0;
  const double margin = ys * score;
  switch (params_.rule) {
    case LinearRule::sgd_hinge: {
      const double lr = params_.learning_rate;
      const double decay = 1.0 - lr * params_.l2;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < x.size(); ++j) weights_[j] = decay * weights_[j] + lr * ys * x[j];
        bias_ += lr * ys;
      } else if (decay != 1.0) {
        for (auto& w : weights_) w *= decay;
      }
      break;
    }
    case LinearRule::perceptron:
      if (margin <= 0.0) {
        for (std::size_t j = 0; j < x.size(); ++j) weights_[j] += ys * x[j];
        bias_ += ys;
      }
      break;
    case LinearRule::passive_aggressive: {
      const double loss = 1.0 - margin;
      if (loss > 0.0) {
        double sq = 1.0;
        for (double v : x) sq += v * v;
        const double step = std::min(params_.aggressiveness, loss / sq);
        for (std::size_t j = 0; j < x.size(); ++j) weights_[j] += step * ys * x[j];
        bias_ += step * ys;
      }
      break;
    }
  }
}

void LinearClassifier::reset() {
  std::fill(weights_.begin(), weights_.end(), 0.0);
  bias_ = 0.0;
}

std::unique_ptr<OnlineClassifier> LinearClassifier::clone_untrained() const {
  return std::make_unique<LinearClassifier>(weights_.size(), params_);
}

void LinearClassifier::grow(std::size_t new_dim) {
  if (new_dim < weights_.size()) throw DimensionMismatch("linear model cannot shrink");
  weights_.resize(new_dim, 0.0);
}

}  // namespace driftstream
