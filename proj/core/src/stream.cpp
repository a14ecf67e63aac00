#include "driftstream/stream.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "driftstream/errors.hpp"
#include "json.hpp"

namespace driftstream {

using ordered_json = nlohmann::ordered_json;

StreamSchema::StreamSchema(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw SchemaMismatch("schema has no attributes");
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw SchemaMismatch("duplicate attribute name '" + n + "'");
  }
}

std::optional<std::size_t> StreamSchema::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::string normalize_token(std::string_view raw) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0, e = raw.size();
  while (b < e && is_space(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out(raw.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

// Reorders attributes into schema order and normalizes tokens in place.
void conform(RawSample& s, const StreamSchema& schema, std::size_t line) {
  if (s.timestamp < 0) {
    throw ValueOutOfRange("sample '" + s.id + "' has a negative timestamp");
  }
  const auto& names = schema.attribute_names();
  if (s.attributes.size() != names.size()) {
    throw SchemaMismatch("sample '" + s.id + "' has " + std::to_string(s.attributes.size()) +
                             " attributes, schema has " + std::to_string(names.size()),
                         line);
  }
  std::vector<Attribute> ordered(names.size());
  std::vector<bool> filled(names.size(), false);
  for (auto& a : s.attributes) {
    auto idx = schema.index_of(a.name);
    if (!idx || filled[*idx]) {
      throw SchemaMismatch("sample '" + s.id + "' has unexpected attribute '" + a.name + "'",
                           line);
    }
    filled[*idx] = true;
    ordered[*idx].name = std::move(a.name);
    auto& dst = ordered[*idx].tokens;
    dst.reserve(a.tokens.size());
    for (const auto& t : a.tokens) {
      auto n = normalize_token(t);
      if (!n.empty()) dst.push_back(std::move(n));
    }
  }
  s.attributes = std::move(ordered);
}

bool sample_less(const RawSample& a, const RawSample& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.id < b.id;
}

}  // namespace

SampleStream::SampleStream(StreamSchema schema, std::vector<RawSample> samples)
    : schema_(std::move(schema)), samples_(std::move(samples)) {
  for (auto& s : samples_) conform(s, schema_, 0);
  std::stable_sort(samples_.begin(), samples_.end(), sample_less);
}

SampleStream SampleStream::slice(std::size_t first, std::size_t last) const {
  last = std::min(last, samples_.size());
  first = std::min(first, last);
  return SampleStream(presorted_t{}, schema_,
                      std::vector<RawSample>(samples_.begin() + static_cast<std::ptrdiff_t>(first),
                                             samples_.begin() + static_cast<std::ptrdiff_t>(last)));
}

StreamFormat parse_stream_format(std::string_view text) {
  if (text == "jsonl") return StreamFormat::jsonl;
  if (text == "csv") return StreamFormat::csv;
  throw ConfigError("unknown stream format '" + std::string(text) + "' (expected jsonl|csv)");
}

std::string_view to_string(StreamFormat f) noexcept {
  return f == StreamFormat::jsonl ? "jsonl" : "csv";
}

namespace {

std::optional<Label> parse_label_value(const ordered_json& v, std::size_t line) {
  if (v.is_null()) return std::nullopt;
  if (v.is_number_integer() || v.is_number_unsigned()) {
    auto i = v.get<std::int64_t>();
    if (i == 0 || i == 1) return label_from_bool(i == 1);
  }
  throw ParseError(line, "label must be 0, 1 or null");
}

RawSample parse_json_record(const std::string& text, std::size_t line) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line, "record is not a JSON object");
  RawSample s;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) throw ParseError(line, "missing string field 'id'");
  s.id = id->get<std::string>();
  auto ts = j.find("timestamp");
  if (ts == j.end() || !(ts->is_number_integer() || ts->is_number_unsigned())) {
    throw ParseError(line, "missing integer field 'timestamp'");
  }
  s.timestamp = ts->get<std::int64_t>();
  if (s.timestamp < 0) throw ParseError(line, "timestamp must be non-negative");
  if (auto lab = j.find("label"); lab != j.end()) s.label = parse_label_value(*lab, line);
  auto attrs = j.find("attributes");
  if (attrs == j.end() || !attrs->is_object()) {
    throw ParseError(line, "missing object field 'attributes'");
  }
  for (const auto& [name, tokens] : attrs->items()) {
    if (!tokens.is_array()) throw ParseError(line, "attribute '" + name + "' is not an array");
    Attribute a{name, {}};
    a.tokens.reserve(tokens.size());
    for (const auto& t : tokens) {
      if (!t.is_string()) throw ParseError(line, "attribute '" + name + "' has a non-string token");
      a.tokens.push_back(t.get<std::string>());
    }
    s.attributes.push_back(std::move(a));
  }
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quoted CSV field");
  cells.push_back(std::move(cur));
  return cells;
}

std::vector<std::string> split_spaces(const std::string& cell) {
  std::vector<std::string> out;
  std::istringstream is(cell);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::int64_t parse_int(const std::string& text, std::size_t line, const char* field) {
  try {
    std::size_t used = 0;
    auto v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("field '") + field + "' is not an integer");
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

SampleStream read_stream(std::istream& in, StreamFormat format) {
  std::vector<RawSample> samples;
  std::optional<StreamSchema> schema;
  std::string line;
  std::size_t line_no = 0;

  if (format == StreamFormat::jsonl) {
    while (std::getline(in, line)) {
      ++line_no;
      strip_cr(line);
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      auto s = parse_json_record(line, line_no);
      if (!schema) {
        std::vector<std::string> names;
        for (const auto& a : s.attributes) names.push_back(a.name);
        try {
          schema.emplace(std::move(names));
        } catch (const SchemaMismatch& e) {
          throw SchemaMismatch(e.what(), line_no);
        }
      }
      conform(s, *schema, line_no);
      samples.push_back(std::move(s));
    }
  } else {
    std::vector<std::string> header;
    while (std::getline(in, line)) {
      ++line_no;
      strip_cr(line);
      if (line.empty()) continue;
      auto cells = split_csv_line(line, line_no);
      if (header.empty()) {
        if (cells.size() < 4 || cells[0] != "id" || cells[1] != "timestamp" || cells[2] != "label") {
          throw ParseError(line_no, "CSV header must be id,timestamp,label,<attributes...>");
        }
        header = cells;
        try {
          schema.emplace(std::vector<std::string>(header.begin() + 3, header.end()));
        } catch (const SchemaMismatch& e) {
          throw SchemaMismatch(e.what(), line_no);
        }
        continue;
      }
      if (cells.size() != header.size()) {
        throw SchemaMismatch("expected " + std::to_string(header.size()) + " columns, got " +
                                 std::to_string(cells.size()),
                             line_no);
      }
      RawSample s;
      s.id = cells[0];
      s.timestamp = parse_int(cells[1], line_no, "timestamp");
      if (s.timestamp < 0) throw ParseError(line_no, "timestamp must be non-negative");
      if (!cells[2].empty()) {
        auto l = parse_int(cells[2], line_no, "label");
        if (l != 0 && l != 1) throw ParseError(line_no, "label must be 0, 1 or empty");
        s.label = label_from_bool(l == 1);
      }
      for (std::size_t c = 3; c < cells.size(); ++c) {
        s.attributes.push_back({header[c], split_spaces(cells[c])});
      }
      conform(s, *schema, line_no);
      samples.push_back(std::move(s));
    }
  }
  if (samples.empty()) throw EmptyStream("stream contains no records");
  return SampleStream(std::move(*schema), std::move(samples));
}

SampleStream load_stream(const std::filesystem::path& path, StreamFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_stream(in, format);
}

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_stream(std::ostream& out, const SampleStream& stream, StreamFormat format) {
  if (format == StreamFormat::jsonl) {
    for (const auto& s : stream.samples()) {
      ordered_json j;
      j["id"] = s.id;
      j["timestamp"] = s.timestamp;
      j["label"] = s.label ? ordered_json(to_int(*s.label)) : ordered_json(nullptr);
      ordered_json attrs = ordered_json::object();
      for (const auto& a : s.attributes) attrs[a.name] = a.tokens;
      j["attributes"] = std::move(attrs);
      out << j.dump() << '\n';
    }
    return;
  }
  out << "id,timestamp,label";
  for (const auto& n : stream.schema().attribute_names()) out << ',' << csv_escape(n);
  out << '\n';
  for (const auto& s : stream.samples()) {
    out << csv_escape(s.id) << ',' << s.timestamp << ',';
    if (s.label) out << to_int(*s.label);
    for (const auto& a : s.attributes) {
      std::string cell;
      for (std::size_t i = 0; i < a.tokens.size(); ++i) {
        if (i) cell.push_back(' ');
        cell += a.tokens[i];
      }
      out << ',' << csv_escape(cell);
    }
    out << '\n';
  }
}

void save_stream(const std::filesystem::path& path, const SampleStream& stream,
                 StreamFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_stream(out, stream, format);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::pair<SampleStream, SampleStream> split_temporal(const SampleStream& stream,
                                                     double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidFraction("split fraction must lie in (0, 1)");
  }
  if (stream.empty()) throw EmptyStream("cannot split an empty stream");
  const auto n = stream.size();
  const auto cut = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  return {stream.slice(0, cut), stream.slice(cut, n)};
}

std::int64_t month_index(std::int64_t timestamp) {
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_seconds{seconds{timestamp}});
  const year_month_day ymd{day};
  return static_cast<std::int64_t>(int(ymd.year())) * 12 + (unsigned(ymd.month()) - 1);
}

std::int64_t month_start(std::int64_t idx) {
  using namespace std::chrono;
  const auto y = static_cast<int>(idx / 12);
  const auto m = static_cast<unsigned>(idx % 12) + 1;
  const sys_days day{year{y} / month{m} / 1};
  return duration_cast<seconds>(day.time_since_epoch()).count();
}

std::string month_label(std::int64_t idx) {
  const auto y = idx / 12;
  const auto m = idx % 12 + 1;
  std::string out = std::to_string(y) + "-";
  if (m < 10) out.push_back('0');
  return out + std::to_string(m);
}

}  // namespace driftstream
