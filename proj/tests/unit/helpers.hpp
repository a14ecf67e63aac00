#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "driftstream/featurization.hpp"
#include "driftstream/stream.hpp"

namespace testutil {

inline driftstream::RawSample sample(std::string id, std::int64_t ts, int label,
                                     std::vector<std::vector<std::string>> tokens,
                                     std::vector<std::string> names = {"api", "perm"}) {
  driftstream::RawSample s;
  s.id = std::move(id);
  s.timestamp = ts;
  if (label >= 0) s.label = driftstream::label_from_bool(label == 1);
  for (std::size_t a = 0; a < names.size(); ++a) s.attributes.push_back({names[a], tokens[a]});
  return s;
}

/// Accepts a braced list of samples.
inline driftstream::FeatureExtractorModel fit_extractor(const driftstream::StreamSchema& schema,
                                                        const std::vector<driftstream::RawSample>& docs,
                                                        std::size_t k) {
  return driftstream::fit_extractor(schema, std::span<const driftstream::RawSample>(docs), k);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("driftstream-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil
