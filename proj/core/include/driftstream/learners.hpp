#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include "driftstream/stream.hpp"

namespace driftstream {

/// Incremental binary classifier over dense feature vectors of fixed length.
///
/// `predict` never mutates state; an untrained classifier predicts goodware.
class OnlineClassifier {
 public:
  virtual ~OnlineClassifier() = default;

  virtual std::size_t dim() const noexcept = 0;
  virtual void partial_fit(std::span<const double> x, Label y) = 0;
  virtual Label predict(std::span<const double> x) const = 0;
  /// Back to the untrained state (same hyperparameters, same seed).
  virtual void reset() = 0;
  virtual std::unique_ptr<OnlineClassifier> clone_untrained() const = 0;
  virtual std::string_view name() const noexcept = 0;
};

/// Throws DimensionMismatch unless `x.size() == expected`.
void check_dim(std::span<const double> x, std::size_t expected);

/// SplitMix64 step, used to derive independent seeds from one root seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace driftstream
