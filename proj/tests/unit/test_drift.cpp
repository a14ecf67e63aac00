#include <cmath>
#include <random>

#include "doctest.h"
#include "driftstream/drift.hpp"
#include "driftstream/errors.hpp"
#include "driftstream/ks.hpp"
#include "driftstream/synth.hpp"
#include "oracles.hpp"

using namespace driftstream;

namespace {

std::vector<DriftLevel> replay(DriftDetector& d, const std::vector<double>& xs) {
  std::vector<DriftLevel> out;
  for (double x : xs) out.push_back(d.update(x));
  return out;
}

std::vector<double> bits(std::size_t n, std::size_t change, double before, double after,
                         std::uint64_t seed) {
  auto b = generate_error_bits(n, change, before, after, seed);
  return {b.begin(), b.end()};
}

}  // namespace

TEST_SUITE("drift") {

TEST_CASE("ddm stays normal on an error-free stream") {
  Ddm d;
  for (int i = 0; i < 1000; ++i) CHECK(d.update(0.0) == DriftLevel::normal);
}

TEST_CASE("ddm recurrences match a scalar replay") {
  const auto xs = bits(200, 100, 0.05, 0.6, 3);
  Ddm d;
  double p = 0, s = 0, pmin = 1e300, smin = 1e300;
  std::size_t i = 0;
  bool drift_seen = false;
  for (double x : xs) {
    const auto level = d.update(x);
    ++i;
    p += (x - p) / double(i);
    s = std::sqrt(p * (1 - p) / double(i));
    DriftLevel want = DriftLevel::normal;
    if (i >= 30) {
      if (p + s <= pmin + smin) {
        pmin = p;
        smin = s;
      }
      if (p + s > pmin + smin) {
        if (p + s >= pmin + 3 * smin) want = DriftLevel::drift;
        else if (p + s >= pmin + 2 * smin) want = DriftLevel::warning;
      }
    }
    CHECK(level == want);
    if (want == DriftLevel::drift) {
      CHECK(i > 100);
      drift_seen = true;
      break;
    }
  }
  CHECK(drift_seen);
}

TEST_CASE("ddm boundary comparisons") {
  DdmParams p;
  // Dyadic values keep the sums exact.
  CHECK(ddm_level(0.5, 0.0, 0.25, 0.125, p) == DriftLevel::warning);  // p_min + 2 s_min
  CHECK(ddm_level(0.625, 0.0, 0.25, 0.125, p) == DriftLevel::drift);  // p_min + 3 s_min
  CHECK(ddm_level(0.49, 0.0, 0.25, 0.125, p) == DriftLevel::normal);
  CHECK(ddm_level(0.0, 0.0, 0.0, 0.0, p) == DriftLevel::normal);
  CHECK(ddm_level(0.1, 0.05, 0.1, 0.05, p) == DriftLevel::normal);
}

TEST_CASE("ddm resets after drift and respects its guard") {
  Ddm d;
  for (int i = 0; i < 29; ++i) CHECK(d.update(1.0) == DriftLevel::normal);
  Ddm e;
  for (double x : bits(5000, 500, 0.05, 0.5, 8)) {
    if (e.update(x) == DriftLevel::drift) {
      CHECK(e.samples() == 0);
      CHECK(std::isinf(e.p_min()));
      return;
    }
  }
  FAIL("no drift");
}

TEST_CASE("eddm ignores correct predictions and fires when spacing collapses") {
  Eddm quiet;
  for (int i = 0; i < 5000; ++i) CHECK(quiet.update(0.0) == DriftLevel::normal);

  Eddm d;
  std::vector<double> xs;
  for (int e = 0; e < 30; ++e) {
    xs.insert(xs.end(), 49, 0.0);
    xs.push_back(1.0);
  }
  const std::size_t change = xs.size();
  for (int e = 0; e < 60; ++e) {
    xs.insert(xs.end(), 4, 0.0);
    xs.push_back(1.0);
  }
  auto levels = replay(d, xs);
  auto it = std::find(levels.begin(), levels.end(), DriftLevel::drift);
  REQUIRE(it != levels.end());
  CHECK(static_cast<std::size_t>(it - levels.begin()) >= change);
}

TEST_CASE("eddm distance statistics match a scalar replay") {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution err(0.2);
  Eddm d;
  std::vector<double> dists;
  std::size_t last = 0;
  for (std::size_t i = 1; i <= 300; ++i) {
    const bool e = err(rng);
    const auto level = d.update(e ? 1.0 : 0.0);
    if (level == DriftLevel::drift) break;
    if (!e) continue;
    dists.push_back(double(i - last));
    last = i;
    double mean = 0;
    for (double v : dists) mean += v;
    mean /= double(dists.size());
    double var = 0;
    for (double v : dists) var += (v - mean) * (v - mean);
    var /= double(dists.size());
    CHECK(d.mean_distance() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(d.std_distance() == doctest::Approx(std::sqrt(var)).epsilon(1e-9));
  }
}

TEST_CASE("eddm stays normal under constant spacing") {
  Eddm d;
  for (int e = 0; e < 500; ++e) {
    for (int i = 0; i < 9; ++i) CHECK(d.update(0.0) == DriftLevel::normal);
    CHECK(d.update(1.0) == DriftLevel::normal);
  }
}

TEST_CASE("replaying the same bits gives the same levels") {
  const auto xs = bits(3000, 1500, 0.1, 0.5, 4);
  Ddm a, b;
  CHECK(replay(a, xs) == replay(b, xs));
  Eddm c, d;
  CHECK(replay(c, xs) == replay(d, xs));
}

TEST_CASE("adwin constant input keeps the whole window") {
  Adwin a;
  for (int i = 0; i < 1000; ++i) CHECK_FALSE(a.add(0.0));
  CHECK(a.width() == 1000);
  CHECK_THROWS_AS(a.add(1.5), ValueOutOfRange);
  CHECK_THROWS_AS(a.add(-0.1), ValueOutOfRange);
}

TEST_CASE("adwin detects a step and keeps the new regime") {
  Adwin a;
  bool fired = false;
  for (int i = 0; i < 500; ++i) fired |= a.add(0.0);
  CHECK_FALSE(fired);
  for (int i = 0; i < 500; ++i) fired |= a.add(1.0);
  CHECK(fired);
  CHECK(a.mean() > 0.9);
}

TEST_CASE("adwin alternating input never cuts") {
  Adwin a;
  oracle::Adwin o(0.002);
  for (int i = 0; i < 2048; ++i) {
    const double v = i % 2;
    CHECK_FALSE(a.add(v));
    if (i < 400) CHECK_FALSE(o.add(v));
  }
}

TEST_CASE("adwin without compression equals the exhaustive oracle") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const double delta = std::array{0.002, 0.05, 0.3}[trial % 3];
    Adwin a({delta, 0, 1});
    oracle::Adwin o(delta);
    const std::size_t n = 1 + rng() % 64;
    const std::size_t change = rng() % (n + 1);
    std::bernoulli_distribution lo(0.1), hi(0.9);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = (i < change ? lo(rng) : hi(rng)) ? 1.0 : 0.0;
      REQUIRE(a.add(v) == o.add(v));
      REQUIRE(a.width() == o.window().size());
      double sum = 0;
      for (double x : o.window()) sum += x;
      REQUIRE(a.total() == sum);
    }
  }
}

TEST_CASE("adwin compressed totals equal the raw window") {
  Adwin a({0.002, 2, 1});
  std::mt19937_64 rng(5);
  std::bernoulli_distribution b(0.3);
  std::size_t n = 0;
  double sum = 0;
  for (int i = 0; i < 1000; ++i) {
    const double v = b(rng) ? 1.0 : 0.0;
    a.add(v);
    ++n;
    sum += v;
    CHECK(a.width() == n);
    CHECK(a.total() == sum);
  }
  CHECK(a.n_buckets() < 40);
}

TEST_CASE("kswin identical segments and disjoint supports") {
  Kswin same;
  for (int i = 0; i < 500; ++i) CHECK(same.update(0.5) == DriftLevel::normal);
  CHECK(same.last_statistic() == 0.0);
  CHECK(same.last_pvalue() == 1.0);

  Kswin j;
  for (int i = 0; i < 70; ++i) j.update(0.0);
  for (int i = 0; i < 29; ++i) CHECK(j.update(1.0) == DriftLevel::normal);
  CHECK(j.update(1.0) == DriftLevel::drift);
  CHECK(j.last_statistic() == 1.0);
  CHECK(j.buffer().size() == 30);
  CHECK(j.retained_size() == 30);
}

TEST_CASE("kswin parameter validation") {
  CHECK_THROWS_AS(Kswin({100, 100, 0.005}), ConfigError);
  CHECK_THROWS_AS(Kswin({100, 0, 0.005}), ConfigError);
  CHECK_THROWS_AS(Kswin({100, 30, 0.0}), ConfigError);
}

TEST_CASE("kswin sampled mode is seeded") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(3000);
  for (auto& x : xs) x = u(rng);
  for (std::size_t i = 1500; i < xs.size(); ++i) xs[i] = 0.5 + 0.5 * xs[i];
  KswinParams p;
  p.sampled = true;
  p.seed = 9;
  Kswin a(p), b(p);
  CHECK(replay(a, xs) == replay(b, xs));
}

TEST_CASE("detectors are silent before their guards") {
  Ddm d;
  Eddm e;
  Kswin k;
  for (int i = 0; i < 29; ++i) {
    CHECK(d.update(i % 2) == DriftLevel::normal);
    CHECK(e.update(1.0) == DriftLevel::normal);
  }
  for (int i = 0; i < 99; ++i) CHECK(k.update(i < 50 ? 0.0 : 1.0) == DriftLevel::normal);
}

TEST_CASE("binary detectors never warn") {
  Adwin a;
  Kswin k;
  for (double x : bits(5000, 2500, 0.05, 0.6, 1)) {
    CHECK(a.update(x) != DriftLevel::warning);
    CHECK(k.update(x) != DriftLevel::warning);
  }
  CHECK_FALSE(a.has_warning_level());
  CHECK_FALSE(k.has_warning_level());
}

TEST_CASE("clone_fresh gives an untouched detector") {
  Ddm d;
  for (int i = 0; i < 100; ++i) d.update(1.0);
  auto fresh = d.clone_fresh();
  const auto xs = bits(1000, 500, 0.1, 0.5, 2);
  Ddm ref;
  CHECK(replay(*fresh, xs) == replay(ref, xs));
  CHECK(to_string(DriftLevel::warning) == "warning");
}

}  // TEST_SUITE

TEST_SUITE("ks") {

TEST_CASE("statistic examples") {
  CHECK(ks_statistic(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(ks_statistic(std::vector<double>{0, 0, 0}, std::vector<double>{1, 1, 1}) == 1.0);
  CHECK(ks_statistic(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 3, 4, 5}) ==
        doctest::Approx(0.25));
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, std::vector<double>{1}), EmptyInput);
}

TEST_CASE("statistic matches brute force with ties") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    std::uniform_int_distribution<int> len(1, 60), val(0, 15);
    std::vector<double> a(len(rng)), b(len(rng));
    for (auto& v : a) v = val(rng) / 4.0;
    for (auto& v : b) v = val(rng) / 4.0;
    CHECK(std::abs(ks_statistic(a, b) - oracle::ks_brute(a, b)) <= 1e-12);
  }
}

TEST_CASE("p-value") {
  CHECK(ks_pvalue(0.0, 30, 30) == 1.0);
  CHECK(ks_pvalue(1.0, 30, 30) < 1e-6);
  // Series by hand for lambda = (sqrt(15) + 0.12 + 0.11/sqrt(15)) * 0.5.
  const double ne = 15.0;
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * 0.5;
  double q = 0;
  for (int k = 1; k < 50; ++k) q += 2 * ((k % 2) ? 1 : -1) * std::exp(-2.0 * k * k * lambda * lambda);
  CHECK(ks_pvalue(0.5, 30, 30) == doctest::Approx(q).epsilon(1e-9));
  // Both series forms agree where both converge well (lambda near 1.18).
  for (double d : {0.25, 0.26, 0.27}) {
    const double ne2 = 70.0 * 30.0 / 100.0;
    const double l = (std::sqrt(ne2) + 0.12 + 0.11 / std::sqrt(ne2)) * d;
    double series = 0;
    for (int k = 1; k < 200; ++k) series += 2 * ((k % 2) ? 1 : -1) * std::exp(-2.0 * k * k * l * l);
    CHECK(ks_pvalue(d, 70, 30) == doctest::Approx(series).epsilon(1e-12));
  }
  double prev = 2.0;
  for (int i = 0; i <= 1000; ++i) {
    const double p = ks_pvalue(i / 1000.0, 70, 30);
    CHECK(p <= prev);
    CHECK((p >= 0.0 && p <= 1.0));
    prev = p;
  }
}

}  // TEST_SUITE
