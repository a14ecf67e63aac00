#include "driftstream/featurization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "driftstream/errors.hpp"
#include "json.hpp"

namespace driftstream {

using ordered_json = nlohmann::ordered_json;

namespace {

struct TokenStats {
  std::size_t term_frequency = 0;
  std::size_t document_frequency = 0;
  std::size_t last_doc = std::numeric_limits<std::size_t>::max();
};

AttributeVocabulary build_vocabulary(std::string name, std::span<const RawSample> samples,
                                     std::size_t attr, std::size_t k) {
  std::unordered_map<std::string, TokenStats> stats;
  for (std::size_t d = 0; d < samples.size(); ++d) {
    for (const auto& tok : samples[d].attributes[attr].tokens) {
      auto& st = stats[tok];
      ++st.term_frequency;
      if (st.last_doc != d) {
        st.last_doc = d;
        ++st.document_frequency;
      }
    }
  }
  std::vector<std::pair<const std::string*, const TokenStats*>> ranked;
  ranked.reserve(stats.size());
  for (const auto& [tok, st] : stats) ranked.emplace_back(&tok, &st);
  const auto keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), [](const auto& a, const auto& b) {
                      if (a.second->term_frequency != b.second->term_frequency) {
                        return a.second->term_frequency > b.second->term_frequency;
                      }
                      return *a.first < *b.first;
                    });
  ranked.resize(keep);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return *a.first < *b.first; });

  AttributeVocabulary v;
  v.attribute_name = std::move(name);
  v.n_train_docs = samples.size();
  const double n = static_cast<double>(samples.size());
  for (const auto& [tok, st] : ranked) {
    v.token_to_index.emplace(*tok, v.tokens.size());
    v.tokens.push_back(*tok);
    v.document_frequency.push_back(st->document_frequency);
    v.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(st->document_frequency))) +
                    1.0);
  }
  return v;
}

}  // namespace

FeatureExtractorModel fit_extractor(const StreamSchema& schema,
                                    std::span<const RawSample> samples, std::size_t k) {
  if (samples.empty()) throw EmptyTrainingSet("cannot fit a feature extractor on zero samples");
  if (k == 0) throw ConfigError("vocabulary size must be at least 1");
  FeatureExtractorModel m;
  m.schema_ = schema;
  m.k_ = k;
  for (const auto& s : samples) m.check_schema(s);
  for (std::size_t a = 0; a < schema.size(); ++a) {
    m.vocabs_.push_back(build_vocabulary(schema.attribute_names()[a], samples, a, k));
  }
  const auto dim = m.dim();
  m.min_.assign(dim, std::numeric_limits<double>::infinity());
  m.max_.assign(dim, -std::numeric_limits<double>::infinity());
  std::vector<double> row(dim);
  for (const auto& s : samples) {
    m.tfidf_into(s, row);
    for (std::size_t j = 0; j < dim; ++j) {
      m.min_[j] = std::min(m.min_[j], row[j]);
      m.max_[j] = std::max(m.max_[j], row[j]);
    }
  }
  return m;
}

FeatureExtractorModel fit_extractor(const SampleStream& stream, std::size_t k) {
  return fit_extractor(stream.schema(), stream.samples(), k);
}

void FeatureExtractorModel::check_schema(const RawSample& sample) const {
  const auto& names = schema_.attribute_names();
  if (sample.attributes.size() != names.size()) {
    throw SchemaMismatch("sample '" + sample.id + "' does not match the extractor schema");
  }
  for (std::size_t a = 0; a < names.size(); ++a) {
    if (sample.attributes[a].name != names[a]) {
      throw SchemaMismatch("sample '" + sample.id + "' attribute '" + sample.attributes[a].name +
                           "' where '" + names[a] + "' was expected");
    }
  }
}

void FeatureExtractorModel::tfidf_into(const RawSample& sample, std::span<double> out) const {
  check_schema(sample);
  if (out.size() != dim()) throw DimensionMismatch("output buffer has the wrong length");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t a = 0; a < vocabs_.size(); ++a) {
    const auto& vocab = vocabs_[a];
    auto block = out.subspan(a * k_, k_);
    for (const auto& tok : sample.attributes[a].tokens) {
      auto it = vocab.token_to_index.find(tok);
      if (it != vocab.token_to_index.end()) block[it->second] += 1.0;
    }
    double norm2 = 0.0;
    for (std::size_t j = 0; j < vocab.size(); ++j) {
      block[j] *= vocab.idf[j];
      norm2 += block[j] * block[j];
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t j = 0; j < vocab.size(); ++j) block[j] *= inv;
    }
  }
}

std::vector<double> FeatureExtractorModel::tfidf(const RawSample& sample) const {
  std::vector<double> out(dim());
  tfidf_into(sample, out);
  return out;
}

void FeatureExtractorModel::transform_into(const RawSample& sample, std::span<double> out) const {
  tfidf_into(sample, out);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double range = max_[j] - min_[j];
    double v = out[j] - min_[j];
    if (range > 0.0) v /= range;
    out[j] = std::clamp(v, 0.0, 1.0);
  }
}

FeatureVector FeatureExtractorModel::transform(const RawSample& sample) const {
  FeatureVector fv{std::vector<double>(dim()), sample.label};
  transform_into(sample, fv.values);
  return fv;
}

std::string FeatureExtractorModel::to_json() const {
  ordered_json j;
  j["format"] = "driftstream-extractor/1";
  j["k"] = k_;
  j["schema"] = schema_.attribute_names();
  ordered_json vocabs = ordered_json::array();
  for (const auto& v : vocabs_) {
    ordered_json o;
    o["attribute"] = v.attribute_name;
    o["n_train_docs"] = v.n_train_docs;
    o["tokens"] = v.tokens;
    o["document_frequency"] = v.document_frequency;
    o["idf"] = v.idf;
    vocabs.push_back(std::move(o));
  }
  j["vocabularies"] = std::move(vocabs);
  j["minmax"] = {{"min", min_}, {"max", max_}};
  return j.dump(1);
}

FeatureExtractorModel FeatureExtractorModel::from_json(std::string_view text) {
  FeatureExtractorModel m;
  try {
    auto j = ordered_json::parse(text);
    if (j.at("format") != "driftstream-extractor/1") {
      throw ParseError(0, "unsupported extractor format");
    }
    m.k_ = j.at("k").get<std::size_t>();
    m.schema_ = StreamSchema(j.at("schema").get<std::vector<std::string>>());
    for (const auto& o : j.at("vocabularies")) {
      AttributeVocabulary v;
      v.attribute_name = o.at("attribute").get<std::string>();
      v.n_train_docs = o.at("n_train_docs").get<std::size_t>();
      v.tokens = o.at("tokens").get<std::vector<std::string>>();
      v.document_frequency = o.at("document_frequency").get<std::vector<std::size_t>>();
      v.idf = o.at("idf").get<std::vector<double>>();
      if (v.tokens.size() > m.k_ || v.document_frequency.size() != v.tokens.size() ||
          v.idf.size() != v.tokens.size()) {
        throw ParseError(0, "vocabulary '" + v.attribute_name + "' is inconsistent");
      }
      m.vocabs_.push_back(std::move(v));
    }
    m.min_ = j.at("minmax").at("min").get<std::vector<double>>();
    m.max_ = j.at("minmax").at("max").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("invalid extractor document: ") + e.what());
  }
  if (m.vocabs_.size() != m.schema_.size() || m.min_.size() != m.dim() ||
      m.max_.size() != m.dim()) {
    throw ParseError(0, "extractor document dimensions are inconsistent");
  }
  for (std::size_t a = 0; a < m.vocabs_.size(); ++a) {
    if (m.vocabs_[a].attribute_name != m.schema_.attribute_names()[a]) {
      throw ParseError(0, "vocabulary order does not follow the schema");
    }
  }
  m.rebuild_index();
  return m;
}

void FeatureExtractorModel::rebuild_index() {
  for (auto& v : vocabs_) {
    v.token_to_index.clear();
    for (std::size_t i = 0; i < v.tokens.size(); ++i) v.token_to_index.emplace(v.tokens[i], i);
  }
}

std::uint64_t FeatureExtractorModel::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : to_json()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<VocabularyDiff> vocabulary_diff(const FeatureExtractorModel& old_model,
                                            const FeatureExtractorModel& new_model) {
  if (!(old_model.schema() == new_model.schema())) {
    throw SchemaMismatch("vocabulary diff requires extractors with the same schema");
  }
  std::vector<VocabularyDiff> out;
  for (std::size_t a = 0; a < old_model.vocabularies().size(); ++a) {
    const auto& ov = old_model.vocabularies()[a];
    const auto& nv = new_model.vocabularies()[a];
    // Column order is lexicographic, so both token lists are sorted.
    VocabularyDiff d;
    d.attribute_name = ov.attribute_name;
    std::set_difference(nv.tokens.begin(), nv.tokens.end(), ov.tokens.begin(), ov.tokens.end(),
                        std::back_inserter(d.added));
    std::set_difference(ov.tokens.begin(), ov.tokens.end(), nv.tokens.begin(), nv.tokens.end(),
                        std::back_inserter(d.removed));
    std::set_intersection(ov.tokens.begin(), ov.tokens.end(), nv.tokens.begin(),
                          nv.tokens.end(), std::back_inserter(d.retained));
    out.push_back(std::move(d));
  }
  return out;
}

std::string vocabulary_diffs_to_json(std::span<const VocabularyDiff> diffs) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : diffs) {
    arr.push_back({{"attribute", d.attribute_name},
                   {"added", d.added},
                   {"removed", d.removed},
                   {"retained", d.retained}});
  }
  return arr.dump(1);
}

std::vector<VocabularyDiff> vocabulary_diffs_from_json(std::string_view text) {
  std::vector<VocabularyDiff> out;
  try {
    for (const auto& o : ordered_json::parse(text)) {
      out.push_back({o.at("attribute").get<std::string>(),
                     o.at("added").get<std::vector<std::string>>(),
                     o.at("removed").get<std::vector<std::string>>(),
                     o.at("retained").get<std::vector<std::string>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("invalid vocabulary diff document: ") + e.what());
  }
  return out;
}

}  // namespace driftstream
