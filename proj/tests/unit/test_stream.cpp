#include <sstream>

#include "doctest.h"
#include "driftstream/errors.hpp"
#include "driftstream/stream.hpp"
#include "driftstream/synth.hpp"
#include "helpers.hpp"

using namespace driftstream;
using testutil::sample;

TEST_SUITE("stream") {

TEST_CASE("jsonl records are ordered by timestamp then id") {
  std::istringstream in(
      R"({"id":"c","timestamp":30,"label":1,"attributes":{"api":["x"],"perm":[]}}
{"id":"a","timestamp":10,"label":0,"attributes":{"api":["y"],"perm":["p"]}}
{"id":"b","timestamp":20,"attributes":{"api":[],"perm":[]}}
)");
  auto s = read_stream(in, StreamFormat::jsonl);
  REQUIRE(s.size() == 3);
  CHECK(s[0].timestamp == 10);
  CHECK(s[1].timestamp == 20);
  CHECK(s[2].timestamp == 30);
  CHECK_FALSE(s[1].label.has_value());
  CHECK(s[2].label == Label::malware);
  CHECK(s.schema().attribute_names() == std::vector<std::string>{"api", "perm"});
}

TEST_CASE("ties on timestamp are broken by id") {
  SampleStream s(StreamSchema({"api", "perm"}),
                 {sample("z", 5, 0, {{}, {}}), sample("b", 5, 1, {{}, {}}),
                  sample("m", 5, 0, {{}, {}})});
  CHECK(s[0].id == "b");
  CHECK(s[1].id == "m");
  CHECK(s[2].id == "z");
}

TEST_CASE("missing attribute is a schema mismatch at its line") {
  std::istringstream in(
      R"({"id":"a","timestamp":1,"label":0,"attributes":{"api":["x"],"perm":[]}}
{"id":"b","timestamp":2,"label":0,"attributes":{"api":["x"]}}
)");
  try {
    read_stream(in, StreamFormat::jsonl);
    FAIL("expected SchemaMismatch");
  } catch (const SchemaMismatch& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("malformed records report their line") {
  std::istringstream bad_json("{\"id\":\"a\",\"timestamp\":1,\"attributes\":{\"api\":[]}}\n{oops\n");
  try {
    read_stream(bad_json, StreamFormat::jsonl);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream bad_label(R"({"id":"a","timestamp":1,"label":2,"attributes":{"api":[]}})");
  CHECK_THROWS_AS(read_stream(bad_label, StreamFormat::jsonl), ParseError);
  std::istringstream negative(R"({"id":"a","timestamp":-1,"attributes":{"api":[]}})");
  CHECK_THROWS_AS(read_stream(negative, StreamFormat::jsonl), ParseError);
  std::istringstream empty("\n\n");
  CHECK_THROWS_AS(read_stream(empty, StreamFormat::jsonl), EmptyStream);
}

TEST_CASE("tokens are lowercased and trimmed; blanks dropped") {
  SampleStream s(StreamSchema({"api", "perm"}),
                 {sample("a", 0, 1, {{"  SendSMS ", "   ", "x"}, {"READ"}})});
  CHECK(s[0].attributes[0].tokens == std::vector<std::string>{"sendsms", "x"});
  CHECK(s[0].attributes[1].tokens == std::vector<std::string>{"read"});
  CHECK(normalize_token("\tAbC\n") == "abc");
}

TEST_CASE("attributes are reordered to schema order") {
  auto r = sample("a", 0, 1, {{"p"}, {"x"}}, {"perm", "api"});
  SampleStream s(StreamSchema({"api", "perm"}), {r});
  CHECK(s[0].attributes[0].name == "api");
  CHECK(s[0].attributes[0].tokens == std::vector<std::string>{"x"});
}

TEST_CASE("invalid samples are rejected") {
  StreamSchema schema({"api", "perm"});
  CHECK_THROWS_AS(SampleStream(schema, {sample("a", -5, 1, {{}, {}})}), ValueOutOfRange);
  CHECK_THROWS_AS(SampleStream(schema, {sample("a", 0, 1, {{}}, {"api"})}), SchemaMismatch);
  CHECK_THROWS_AS(StreamSchema(std::vector<std::string>{}), SchemaMismatch);
  CHECK_THROWS_AS(StreamSchema({"a", "a"}), SchemaMismatch);
}

TEST_CASE("csv with quoted cells") {
  std::istringstream in(
      "id,timestamp,label,api,perm\n"
      "s1,20,1,\"send sms\",read\n"
      "\"s,0\",10,,open,\n");
  auto s = read_stream(in, StreamFormat::csv);
  REQUIRE(s.size() == 2);
  CHECK(s[0].id == "s,0");
  CHECK_FALSE(s[0].label.has_value());
  CHECK(s[0].attributes[1].tokens.empty());
  CHECK(s[1].attributes[0].tokens == std::vector<std::string>{"send", "sms"});

  std::istringstream bad_header("id,ts,label,api\n");
  CHECK_THROWS_AS(read_stream(bad_header, StreamFormat::csv), ParseError);
  std::istringstream short_row("id,timestamp,label,api,perm\ns,1,0,x\n");
  CHECK_THROWS_AS(read_stream(short_row, StreamFormat::csv), SchemaMismatch);
}

TEST_CASE("generated stream round-trips through both formats") {
  SynthStreamSpec spec;
  spec.n_samples = 1000;
  spec.drift_points = {500};
  const auto original = generate_synth_stream(spec);
  for (auto fmt : {StreamFormat::jsonl, StreamFormat::csv}) {
    std::stringstream buf;
    write_stream(buf, original, fmt);
    const auto text = buf.str();
    auto back = read_stream(buf, fmt);
    CHECK(back == original);
    std::stringstream again;
    write_stream(again, back, fmt);
    CHECK(again.str() == text);
  }
}

TEST_CASE("load_stream from disk") {
  auto dir = testutil::temp_dir("stream-load");
  SynthStreamSpec spec;
  spec.n_samples = 50;
  auto s = generate_synth_stream(spec);
  save_stream(dir / "s.jsonl", s, StreamFormat::jsonl);
  CHECK(load_stream(dir / "s.jsonl", StreamFormat::jsonl) == s);
  CHECK_THROWS_AS(load_stream(dir / "missing.jsonl", StreamFormat::jsonl), IoError);
  CHECK(parse_stream_format("csv") == StreamFormat::csv);
  CHECK_THROWS_AS(parse_stream_format("xml"), ConfigError);
}

TEST_CASE("split_temporal sizes follow the floor rule") {
  auto make = [](std::size_t n) {
    std::vector<RawSample> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(sample(std::to_string(i), i, 0, {{}, {}}));
    return SampleStream(StreamSchema({"api", "perm"}), std::move(v));
  };
  auto [a, b] = split_temporal(make(10), 0.5);
  CHECK(a.size() == 5);
  CHECK(b.size() == 5);
  CHECK(a[a.size() - 1].timestamp <= b[0].timestamp);

  auto [c, d] = split_temporal(make(1), 0.5);
  CHECK(c.size() == 0);
  CHECK(d.size() == 1);

  // Counting oracle for the large case: the first part holds n/2 rounded down.
  const std::size_t n = 129013;
  std::size_t first = 0;
  while (2 * (first + 1) <= n) ++first;
  auto [e, f] = split_temporal(make(n), 0.5);
  CHECK(e.size() == first);
  CHECK(e.size() == 64506);
  CHECK(f.size() == 64507);

  CHECK_THROWS_AS(split_temporal(make(3), 0.0), InvalidFraction);
  CHECK_THROWS_AS(split_temporal(make(3), 1.0), InvalidFraction);
  CHECK_THROWS_AS(split_temporal(SampleStream(), 0.5), EmptyStream);
}

TEST_CASE("split parts cover the stream as multisets") {
  SynthStreamSpec spec;
  spec.n_samples = 333;
  auto s = generate_synth_stream(spec);
  for (double f : {0.1, 0.37, 0.5, 0.99}) {
    auto [a, b] = split_temporal(s, f);
    std::vector<RawSample> joined(a.samples().begin(), a.samples().end());
    joined.insert(joined.end(), b.samples().begin(), b.samples().end());
    CHECK(std::equal(joined.begin(), joined.end(), s.samples().begin(), s.samples().end()));
  }
}

TEST_CASE("calendar months") {
  CHECK(month_label(month_index(1325376000)) == "2012-01");
  CHECK(month_label(month_index(1325376000 + 31 * 86400)) == "2012-02");
  CHECK(month_start(month_index(1330000000)) == 1328054400);  // 2012-02-01
  CHECK(month_label(month_index(0)) == "1970-01");
}

}  // TEST_SUITE
