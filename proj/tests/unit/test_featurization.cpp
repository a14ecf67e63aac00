#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "driftstream/errors.hpp"
#include "driftstream/featurization.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace driftstream;
using testutil::fit_extractor;
using testutil::sample;

namespace {

StreamSchema one_attr() { return StreamSchema({"api"}); }

RawSample doc(std::string id, std::vector<std::string> toks) {
  return sample(std::move(id), 0, 0, {std::move(toks)}, {"api"});
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t distinct,
                                       std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len), tok(0, distinct - 1);
  std::vector<std::string> out(len(rng));
  for (auto& t : out) t = "t" + std::to_string(tok(rng));
  return out;
}

}  // namespace

TEST_SUITE("featurization") {

TEST_CASE("hand example: vocabulary, idf and transform") {
  const std::vector<RawSample> docs{doc("d1", {"a", "a", "b"}), doc("d2", {"b", "c"})};
  auto m = fit_extractor(one_attr(), docs, 2);
  const auto& v = m.vocabularies()[0];
  CHECK(v.tokens == std::vector<std::string>{"a", "b"});
  CHECK(v.idf[0] == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-15));
  CHECK(v.idf[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v.document_frequency == std::vector<std::size_t>{1, 2});
  CHECK(v.n_train_docs == 2);

  // d1 block before MinMax is (2 idf_a, idf_b) / norm.
  const double ia = std::log(1.5) + 1.0;
  const double norm = std::sqrt(4 * ia * ia + 1);
  auto raw = m.tfidf(docs[0]);
  CHECK(raw[0] == doctest::Approx(2 * ia / norm).epsilon(1e-12));
  CHECK(raw[1] == doctest::Approx(1 / norm).epsilon(1e-12));

  // d2 = (0, 1) raw, so d1 maps to the per-dimension max and d2 to the min.
  auto t1 = m.transform(docs[0]).values;
  auto t2 = m.transform(docs[1]).values;
  CHECK(t1[0] == 1.0);
  CHECK(t2[0] == 0.0);
  CHECK(t1[1] == 0.0);
  CHECK(t2[1] == 1.0);
}

TEST_CASE("K beyond the support keeps every distinct token") {
  auto m = fit_extractor(one_attr(), {doc("1", {"x", "y"}), doc("2", {"z"})}, 100);
  CHECK(m.vocabularies()[0].size() == 3);
  CHECK(m.dim() == 100);
  CHECK(m.transform(doc("q", {"x"})).values.size() == 100);
}

TEST_CASE("identical documents give identical transforms and min == max") {
  std::vector<RawSample> docs(5, doc("d", {"a", "b", "b"}));
  auto m = fit_extractor(one_attr(), docs, 3);
  auto first = m.transform(docs[0]).values;
  for (const auto& d : docs) CHECK(m.transform(d).values == first);
  for (std::size_t j = 0; j < 2; ++j) CHECK(m.min()[j] == m.max()[j]);
}

TEST_CASE("out-of-vocabulary sample maps to zero and schema is enforced") {
  auto m = fit_extractor(one_attr(), {doc("1", {"a"}), doc("2", {"a", "b"})}, 2);
  for (double v : m.transform(doc("q", {"zzz", "yyy"})).values) CHECK(v == 0.0);
  CHECK_THROWS_AS(m.transform(sample("q", 0, 0, {{"a"}}, {"perm"})), SchemaMismatch);
  CHECK_THROWS_AS(fit_extractor(one_attr(), std::vector<RawSample>{}, 2), EmptyTrainingSet);
  CHECK_THROWS_AS(fit_extractor(one_attr(), {doc("1", {"a"})}, 0), ConfigError);
}

TEST_CASE("ties in term frequency are broken lexicographically") {
  auto m = fit_extractor(one_attr(), {doc("1", {"d", "c", "b", "a"})}, 2);
  CHECK(m.vocabularies()[0].tokens == std::vector<std::string>{"a", "b"});
}

TEST_CASE("transform matches the naive oracle on random corpora") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    for (std::size_t k : {2u, 5u, 100u}) {
      const std::size_t n_docs = 1 + rng() % 60;
      std::vector<RawSample> docs;
      std::vector<oracle::Doc> odocs;
      for (std::size_t i = 0; i < n_docs; ++i) {
        auto a = random_tokens(rng, 20, 12), b = random_tokens(rng, 8, 5);
        docs.push_back(sample(std::to_string(i), 0, 0, {a, b}));
        odocs.push_back({a, b});
      }
      auto m = fit_extractor(StreamSchema({"api", "perm"}), docs, k);
      auto om = oracle::fit_tfidf(odocs, k);
      for (int q = 0; q < 10; ++q) {
        auto a = random_tokens(rng, 25, 12), b = random_tokens(rng, 10, 5);
        auto got = m.transform(sample("q", 0, 0, {a, b})).values;
        auto want = oracle::transform(om, {a, b});
        REQUIRE(got.size() == want.size());
        for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("training transforms lie in [0, 1]; vocabulary is frequency-monotone") {
  std::mt19937_64 rng(5);
  std::vector<RawSample> docs;
  for (int i = 0; i < 80; ++i) docs.push_back(doc(std::to_string(i), random_tokens(rng, 40, 15)));
  auto m = fit_extractor(one_attr(), docs, 10);
  for (const auto& d : docs) {
    for (double v : m.transform(d).values) CHECK((v >= 0.0 && v <= 1.0));
  }
  std::map<std::string, int> tf;
  for (const auto& d : docs) {
    for (const auto& t : d.attributes[0].tokens) ++tf[t];
  }
  const auto& kept = m.vocabularies()[0].tokens;
  std::set<std::string> in(kept.begin(), kept.end());
  for (const auto& [t_in, c_in] : tf) {
    if (!in.count(t_in)) continue;
    for (const auto& [t_out, c_out] : tf) {
      if (in.count(t_out)) continue;
      CHECK((c_in > c_out || (c_in == c_out && t_in < t_out)));
    }
  }
  for (std::size_t j = 0; j < m.dim(); ++j) CHECK(m.min()[j] <= m.max()[j]);
}

TEST_CASE("json round trip is byte stable") {
  auto m = fit_extractor(StreamSchema({"api", "perm"}),
                         {sample("1", 0, 1, {{"a", "b"}, {"p"}}), sample("2", 0, 0, {{"c"}, {}})}, 4);
  const auto text = m.to_json();
  auto back = FeatureExtractorModel::from_json(text);
  CHECK(back.to_json() == text);
  CHECK(back.fingerprint() == m.fingerprint());
  auto q = sample("q", 0, 0, {{"a", "c"}, {"p"}});
  CHECK(back.transform(q).values == m.transform(q).values);
  CHECK_THROWS(FeatureExtractorModel::from_json("{\"format\":1}"));
  CHECK_THROWS(FeatureExtractorModel::from_json("not json"));
}

TEST_CASE("vocabulary diff") {
  auto old_m = fit_extractor(one_attr(), {doc("1", {"a", "b"})}, 5);
  auto new_m = fit_extractor(one_attr(), {doc("1", {"b", "c"})}, 5);
  auto d = vocabulary_diff(old_m, new_m);
  REQUIRE(d.size() == 1);
  CHECK(d[0].added == std::vector<std::string>{"c"});
  CHECK(d[0].removed == std::vector<std::string>{"a"});
  CHECK(d[0].retained == std::vector<std::string>{"b"});
  CHECK(vocabulary_diff(old_m, old_m)[0].empty());

  auto other = fit_extractor(StreamSchema({"perm"}), {sample("1", 0, 0, {{"a"}}, {"perm"})}, 5);
  CHECK_THROWS_AS(vocabulary_diff(old_m, other), SchemaMismatch);

  const auto json = vocabulary_diffs_to_json(d);
  auto back = vocabulary_diffs_from_json(json);
  REQUIRE(back.size() == 1);
  CHECK(back[0].added == d[0].added);
  CHECK(back[0].removed == d[0].removed);
  CHECK(back[0].retained == d[0].retained);
}

TEST_CASE("diff cardinality identity over random vocabulary pairs") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    auto a = fit_extractor(one_attr(), {doc("1", random_tokens(rng, 30, 20))}, 1 + rng() % 10);
    auto b = fit_extractor(one_attr(), {doc("1", random_tokens(rng, 30, 20))}, 1 + rng() % 10);
    auto d = vocabulary_diff(a, b)[0];
    const long lhs = static_cast<long>(d.added.size()) - static_cast<long>(d.removed.size());
    const long rhs = static_cast<long>(b.vocabularies()[0].size()) -
                     static_cast<long>(a.vocabularies()[0].size());
    CHECK(lhs == rhs);
    std::set<std::string> added(d.added.begin(), d.added.end());
    for (const auto& t : d.removed) CHECK(added.count(t) == 0);
  }
}

}  // TEST_SUITE
