#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "driftstream/stream.hpp"

namespace driftstream {

/// Top-K vocabulary of one textual attribute with smoothed IDF weights.
struct AttributeVocabulary {
  std::string attribute_name;
  std::vector<std::string> tokens;  // column order, lexicographic
  std::unordered_map<std::string, std::size_t> token_to_index;
  std::vector<std::size_t> document_frequency;
  std::vector<double> idf;
  std::size_t n_train_docs = 0;

  std::size_t size() const noexcept { return tokens.size(); }
};

struct FeatureVector {
  std::vector<double> values;
  std::optional<Label> label;
};

struct VocabularyDiff {
  std::string attribute_name;
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::vector<std::string> retained;

  bool empty() const noexcept { return added.empty() && removed.empty(); }
};

/// Retrainable feature extractor: per-attribute TF-IDF blocks of width K,
/// each block L2-normalized, then per-dimension MinMax scaling with clamping.
///
/// The output layout is `n_attributes * K` columns; attribute `a` owns columns
/// `[a*K, (a+1)*K)`. Columns past a vocabulary's size are always zero.
class FeatureExtractorModel {
 public:
  FeatureExtractorModel() = default;

  const StreamSchema& schema() const noexcept { return schema_; }
  std::size_t vocab_size() const noexcept { return k_; }
  std::size_t dim() const noexcept { return schema_.size() * k_; }
  const std::vector<AttributeVocabulary>& vocabularies() const noexcept { return vocabs_; }
  const std::vector<double>& min() const noexcept { return min_; }
  const std::vector<double>& max() const noexcept { return max_; }

  /// TF-IDF with per-block L2 normalization, before MinMax.
  void tfidf_into(const RawSample& sample, std::span<double> out) const;
  std::vector<double> tfidf(const RawSample& sample) const;

  void transform_into(const RawSample& sample, std::span<double> out) const;
  FeatureVector transform(const RawSample& sample) const;

  /// Stable JSON document; identical models serialize to identical bytes.
  std::string to_json() const;
  static FeatureExtractorModel from_json(std::string_view text);

  /// FNV-1a hash of `to_json()`.
  std::uint64_t fingerprint() const;

  friend FeatureExtractorModel fit_extractor(const StreamSchema&, std::span<const RawSample>,
                                             std::size_t);

 private:
  void check_schema(const RawSample& sample) const;
  void rebuild_index();

  StreamSchema schema_;
  std::size_t k_ = 0;
  std::vector<AttributeVocabulary> vocabs_;
  std::vector<double> min_;
  std::vector<double> max_;
};

/// Per attribute, keeps the K tokens with highest total term frequency (ties:
/// lexicographically smaller first), computes idf = ln((1+n)/(1+df)) + 1 and
/// fits MinMax over the training samples' own TF-IDF vectors.
FeatureExtractorModel fit_extractor(const StreamSchema& schema,
                                    std::span<const RawSample> samples, std::size_t k);
FeatureExtractorModel fit_extractor(const SampleStream& stream, std::size_t k);

std::vector<VocabularyDiff> vocabulary_diff(const FeatureExtractorModel& old_model,
                                            const FeatureExtractorModel& new_model);

std::string vocabulary_diffs_to_json(std::span<const VocabularyDiff> diffs);
std::vector<VocabularyDiff> vocabulary_diffs_from_json(std::string_view text);

}  // namespace driftstream
