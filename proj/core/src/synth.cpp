#include "driftstream/synth.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "driftstream/errors.hpp"

namespace driftstream {

DriftKind parse_drift_kind(std::string_view text) {
  if (text == "abrupt") return DriftKind::abrupt;
  if (text == "vocabulary-shift") return DriftKind::vocabulary_shift;
  throw InvalidSpec("unknown drift kind '" + std::string(text) +
                    "' (expected abrupt|vocabulary-shift)");
}

std::string_view to_string(DriftKind k) noexcept {
  return k == DriftKind::abrupt ? "abrupt" : "vocabulary-shift";
}

void validate(const SynthStreamSpec& spec) {
  if (spec.n_samples == 0) throw InvalidSpec("n_samples must be positive");
  for (std::size_t i = 0; i < spec.drift_points.size(); ++i) {
    if (spec.drift_points[i] >= spec.n_samples) {
      throw InvalidSpec("drift point " + std::to_string(spec.drift_points[i]) +
                        " is not below n_samples");
    }
    if (i > 0 && spec.drift_points[i] <= spec.drift_points[i - 1]) {
      throw InvalidSpec("drift points must be strictly increasing");
    }
  }
  if (!(spec.malware_fraction > 0.0 && spec.malware_fraction < 1.0)) {
    throw InvalidSpec("malware_fraction must lie in (0, 1)");
  }
  if (spec.attributes.empty()) throw InvalidSpec("at least one attribute is required");
  if (std::set<std::string>(spec.attributes.begin(), spec.attributes.end()).size() !=
      spec.attributes.size()) {
    throw InvalidSpec("attribute names must be unique");
  }
  if (spec.tokens_per_attribute == 0 || spec.shared_pool == 0 || spec.indicative_pool == 0) {
    throw InvalidSpec("token counts and pool sizes must be positive");
  }
  if (!(spec.indicative_rate >= 0.0 && spec.indicative_rate <= 1.0)) {
    throw InvalidSpec("indicative_rate must lie in [0, 1]");
  }
  if (!(spec.label_noise >= 0.0 && spec.label_noise < 0.5)) {
    throw InvalidSpec("label_noise must lie in [0, 0.5)");
  }
  if (spec.start_timestamp < 0 || spec.interval_seconds < 0) {
    throw InvalidSpec("timestamps must be non-negative and non-decreasing");
  }
}

namespace {

std::string pool_token(const std::string& attr, char pool, std::size_t generation,
                       std::size_t j) {
  std::string t = attr;
  t += '_';
  t += pool;
  if (pool != 's') t += std::to_string(generation) + "_";
  t += std::to_string(j);
  return t;
}

}  // namespace

SampleStream generate_synth_stream(const SynthStreamSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution is_malware(spec.malware_fraction);
  std::bernoulli_distribution indicative(spec.indicative_rate);
  std::bernoulli_distribution flip(spec.label_noise);
  std::uniform_int_distribution<std::size_t> shared(0, spec.shared_pool - 1);
  std::uniform_int_distribution<std::size_t> specific(0, spec.indicative_pool - 1);

  std::vector<RawSample> samples;
  samples.reserve(spec.n_samples);
  std::size_t epoch = 0;
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    while (epoch < spec.drift_points.size() && spec.drift_points[epoch] <= i) ++epoch;
    const bool malware = is_malware(rng);

    // Which indicative pool this sample draws from.
    char pool = malware ? 'm' : 'g';
    std::size_t generation = 0;
    if (spec.kind == DriftKind::vocabulary_shift) {
      if (malware) generation = epoch;
    } else if (epoch % 2 == 1) {
      pool = malware ? 'g' : 'm';
    }

    RawSample s;
    auto digits = std::to_string(i);
    s.id = "synth-" + std::string(digits.size() < 9 ? 9 - digits.size() : 0, '0') + digits;
    s.timestamp = spec.start_timestamp + static_cast<std::int64_t>(i) * spec.interval_seconds;
    for (const auto& attr : spec.attributes) {
      Attribute a{attr, {}};
      a.tokens.reserve(spec.tokens_per_attribute);
      for (std::size_t t = 0; t < spec.tokens_per_attribute; ++t) {
        if (indicative(rng)) {
          a.tokens.push_back(pool_token(attr, pool, generation, specific(rng)));
        } else {
          a.tokens.push_back(pool_token(attr, 's', 0, shared(rng)));
        }
      }
      s.attributes.push_back(std::move(a));
    }
    const bool noisy = spec.label_noise > 0.0 && flip(rng);
    s.label = label_from_bool(malware != noisy);
    samples.push_back(std::move(s));
  }
  return SampleStream(StreamSchema(spec.attributes), std::move(samples));
}

std::vector<std::uint8_t> generate_error_bits(std::size_t n, std::size_t change_at,
                                              double rate_before, double rate_after,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    bits[i] = u(rng) < (i < change_at ? rate_before : rate_after) ? 1 : 0;
  }
  return bits;
}

}  // namespace driftstream
