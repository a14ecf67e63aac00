#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "driftstream/stream.hpp"

namespace driftstream {

enum class DriftKind {
  /// Class-token association inverts at every drift point (P(y|x) flips).
  abrupt,
  /// Malware-indicative tokens are replaced by never-seen tokens at every
  /// drift point; goodware and shared tokens are stationary.
  vocabulary_shift,
};

DriftKind parse_drift_kind(std::string_view text);
std::string_view to_string(DriftKind k) noexcept;

/// Labeled token-stream generator. Each sample draws, per attribute,
/// `tokens_per_attribute` tokens: with probability `indicative_rate` from its
/// class's indicative pool of the active concept, otherwise from a shared
/// pool. Timestamps start at `start_timestamp` and advance by
/// `interval_seconds` per sample.
struct SynthStreamSpec {
  std::size_t n_samples = 10000;
  std::vector<std::size_t> drift_points;
  DriftKind kind = DriftKind::vocabulary_shift;
  double malware_fraction = 0.3;
  std::vector<std::string> attributes{"api_calls", "permissions", "urls"};
  std::size_t tokens_per_attribute = 8;
  std::size_t shared_pool = 30;
  std::size_t indicative_pool = 10;
  double indicative_rate = 0.5;
  /// Probability that a label is flipped after the tokens are drawn.
  double label_noise = 0.0;
  std::int64_t start_timestamp = 1325376000;  // 2012-01-01T00:00:00Z
  std::int64_t interval_seconds = 1;
  std::uint64_t seed = 1;
};

/// Throws InvalidSpec for an inconsistent spec.
void validate(const SynthStreamSpec& spec);

SampleStream generate_synth_stream(const SynthStreamSpec& spec);

/// Bernoulli error-bit sequence whose rate moves from `rate_before` to
/// `rate_after` at index `change_at`.
std::vector<std::uint8_t> generate_error_bits(std::size_t n, std::size_t change_at,
                                              double rate_before, double rate_after,
                                              std::uint64_t seed);

}  // namespace driftstream
