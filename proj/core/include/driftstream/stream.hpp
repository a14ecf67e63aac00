#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace driftstream {

/// Binary class. Malware is the positive class everywhere in the library.
enum class Label : std::uint8_t { goodware = 0, malware = 1 };

constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }
constexpr Label label_from_bool(bool malware) noexcept {
  return malware ? Label::malware : Label::goodware;
}

struct Attribute {
  std::string name;
  std::vector<std::string> tokens;

  bool operator==(const Attribute&) const = default;
};

/// One application: identifier, first-seen timestamp, optional label and its
/// textual attributes, stored in schema order.
struct RawSample {
  std::string id;
  std::int64_t timestamp = 0;
  std::optional<Label> label;
  std::vector<Attribute> attributes;

  bool operator==(const RawSample&) const = default;
};

class StreamSchema {
 public:
  StreamSchema() = default;
  /// Throws SchemaMismatch when `names` is empty or has duplicates.
  explicit StreamSchema(std::vector<std::string> names);

  const std::vector<std::string>& attribute_names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }
  /// Position of `name` in the schema, or nullopt.
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const StreamSchema&) const = default;

 private:
  std::vector<std::string> names_;
};

/// An immutable, (timestamp, id)-ordered sequence of samples sharing a schema.
class SampleStream {
 public:
  SampleStream() = default;
  /// Sorts by (timestamp, id) and validates every sample against `schema`.
  SampleStream(StreamSchema schema, std::vector<RawSample> samples);

  const StreamSchema& schema() const noexcept { return schema_; }
  std::span<const RawSample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const RawSample& operator[](std::size_t i) const { return samples_[i]; }

  /// Copy of samples [first, last) as a new stream; order is kept.
  SampleStream slice(std::size_t first, std::size_t last) const;

  bool operator==(const SampleStream&) const = default;

 private:
  struct presorted_t {};
  SampleStream(presorted_t, StreamSchema schema, std::vector<RawSample> samples)
      : schema_(std::move(schema)), samples_(std::move(samples)) {}

  StreamSchema schema_;
  std::vector<RawSample> samples_;
};

enum class StreamFormat { jsonl, csv };

StreamFormat parse_stream_format(std::string_view text);
std::string_view to_string(StreamFormat f) noexcept;

/// Lowercase and trim surrounding whitespace. May return an empty string.
std::string normalize_token(std::string_view raw);

/// Parse a stream from text. The schema comes from the first record.
SampleStream read_stream(std::istream& in, StreamFormat format);
SampleStream load_stream(const std::filesystem::path& path, StreamFormat format);

void write_stream(std::ostream& out, const SampleStream& stream, StreamFormat format);
void save_stream(const std::filesystem::path& path, const SampleStream& stream,
                 StreamFormat format);

/// First part holds the floor(fraction * n) oldest samples.
std::pair<SampleStream, SampleStream> split_temporal(const SampleStream& stream,
                                                     double fraction);

/// Calendar month (UTC) of an epoch-seconds timestamp, as year * 12 + (month - 1).
std::int64_t month_index(std::int64_t timestamp);
/// Epoch seconds of 00:00:00 UTC on the first day of `month_index`.
std::int64_t month_start(std::int64_t month_index);
/// "YYYY-MM" for a month index.
std::string month_label(std::int64_t month_index);

}  // namespace driftstream
