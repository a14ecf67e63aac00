#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "driftstream/config.hpp"
#include "driftstream/stream.hpp"

namespace driftstream::cli {

struct RunSettings {
  ExperimentConfig experiment;
  std::string input;
  StreamFormat format = StreamFormat::jsonl;
  std::string out = "results";
};

/// Every config-file key with its default, one per line.
std::string describe_config_keys();

/// Applies a JSON object of config keys. Unknown keys throw ConfigError.
void apply_config_json(RunSettings& settings, const std::string& json_text);

/// Effective settings as a JSON document using the config-file keys.
std::string settings_to_json(const RunSettings& settings);

/// Entry point of the driftstream binary. Exit codes: 0 ok, 1 runtime error,
/// 2 configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace driftstream::cli
