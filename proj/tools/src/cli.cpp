#include "cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "driftstream/errors.hpp"
#include "driftstream/pipeline.hpp"
#include "driftstream/report.hpp"
#include "driftstream/synth.hpp"
#include "json.hpp"

namespace driftstream::cli {

namespace {

using json = nlohmann::ordered_json;

enum class Kind { text, count, real, flag };

struct ConfigKey {
  std::string name;
  Kind kind;
  std::string help;
  std::function<json(const RunSettings&)> get;
  std::function<void(RunSettings&, const json&)> set;
};

std::size_t as_count(const json& v) {
  if (!v.is_number_unsigned()) throw ConfigError("expected a non-negative integer");
  return v.get<std::size_t>();
}
double as_real(const json& v) {
  if (!v.is_number()) throw ConfigError("expected a number");
  return v.get<double>();
}
bool as_flag(const json& v) {
  if (!v.is_boolean()) throw ConfigError("expected true or false");
  return v.get<bool>();
}
std::string as_text(const json& v) {
  if (!v.is_string()) throw ConfigError("expected a string");
  return v.get<std::string>();
}

#define DS_KEY(NAME, KIND, HELP, FIELD, CONV)                                  \
  ConfigKey {                                                                   \
    NAME, KIND, HELP, [](const RunSettings& s) { return json(s.FIELD); },       \
        [](RunSettings& s, const json& v) { s.FIELD = CONV(v); }                \
  }
#define DS_ENUM_KEY(NAME, HELP, FIELD, PARSE)                                            \
  ConfigKey {                                                                             \
    NAME, Kind::text, HELP,                                                               \
        [](const RunSettings& s) { return json(std::string(to_string(s.FIELD))); },       \
        [](RunSettings& s, const json& v) { s.FIELD = PARSE(as_text(v)); }                \
  }

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      DS_KEY("input", Kind::text, "labeled sample stream to read", input, as_text),
      DS_ENUM_KEY("format", "input format (jsonl|csv)", format, parse_stream_format),
      DS_KEY("out", Kind::text, "output directory (env DRIFTSTREAM_OUT overrides the file)", out,
             as_text),
      DS_ENUM_KEY("strategy",
                  "cross-val|temporal|iwc|fnf-update|fnf-retrain|static|pool|mts",
                  experiment.strategy, parse_strategy),
      DS_ENUM_KEY("detector", "none|ddm|eddm|adwin|kswin", experiment.detector.kind,
                  parse_detector),
      DS_ENUM_KEY("classifier", "arf|sgd|hoeffding", experiment.classifier.kind,
                  parse_classifier),
      DS_KEY("vocab_size", Kind::count, "tokens kept per attribute (K)", experiment.vocab_size,
             as_count),
      ConfigKey{"warmup", Kind::text, "initial training period: N, samples:N, Nd, Nm or Ny",
                [](const RunSettings& s) { return json(s.experiment.warmup.to_string()); },
                [](RunSettings& s, const json& v) {
                  s.experiment.warmup = WarmupSpec::parse(as_text(v));
                }},
      DS_KEY("seed", Kind::count, "root random seed", experiment.seed, as_count),
      DS_KEY("k", Kind::count, "cross-validation folds", experiment.cv_folds, as_count),
      DS_KEY("folds", Kind::count, "multiple-time-span chunks", experiment.time_span_folds,
             as_count),
      DS_ENUM_KEY("time_span_strategy", "strategy run inside each time span",
                  experiment.time_span_strategy, parse_strategy),
      DS_ENUM_KEY("update_mode", "classifier after a drift under fnf-update (replace|continue)",
                  experiment.update_mode, parse_update_mode),
      DS_KEY("train_epochs", Kind::count, "passes when training on a batch",
             experiment.train_epochs, as_count),
      DS_KEY("metrics_window", Kind::count, "steps per metrics.csv row",
             experiment.metrics_window, as_count),
      DS_KEY("fading", Kind::real, "prequential error fading factor", experiment.fading, as_real),
      DS_KEY("pool_tau0", Kind::real, "model pool lower agreement threshold",
             experiment.pool.tau0, as_real),
      DS_KEY("pool_tau1", Kind::real, "model pool upper agreement threshold",
             experiment.pool.tau1, as_real),
      DS_KEY("pool_steps", Kind::count, "model pool drift-check interval", experiment.pool.steps,
             as_count),
      DS_KEY("ddm_min_samples", Kind::count, "DDM samples before signalling",
             experiment.detector.ddm.min_instances, as_count),
      DS_KEY("ddm_warning", Kind::real, "DDM warning multiplier",
             experiment.detector.ddm.warning_level, as_real),
      DS_KEY("ddm_drift", Kind::real, "DDM drift multiplier", experiment.detector.ddm.drift_level,
             as_real),
      DS_KEY("eddm_warning", Kind::real, "EDDM warning ratio",
             experiment.detector.eddm.warning_ratio, as_real),
      DS_KEY("eddm_drift", Kind::real, "EDDM drift ratio", experiment.detector.eddm.drift_ratio,
             as_real),
      DS_KEY("eddm_min_errors", Kind::count, "EDDM errors before signalling",
             experiment.detector.eddm.min_errors, as_count),
      DS_KEY("adwin_delta", Kind::real, "ADWIN confidence", experiment.detector.adwin.delta,
             as_real),
      DS_KEY("adwin_max_buckets", Kind::count, "ADWIN buckets per row (0 = exact)",
             experiment.detector.adwin.max_buckets, as_count),
      DS_KEY("adwin_check_interval", Kind::count, "ADWIN updates between cut checks",
             experiment.detector.adwin.check_interval, as_count),
      DS_KEY("kswin_window", Kind::count, "KSWIN window size",
             experiment.detector.kswin.window_size, as_count),
      DS_KEY("kswin_stat_size", Kind::count, "KSWIN recent sub-window size",
             experiment.detector.kswin.stat_size, as_count),
      DS_KEY("kswin_alpha", Kind::real, "KSWIN significance", experiment.detector.kswin.alpha,
             as_real),
      DS_KEY("kswin_sampled", Kind::flag, "KSWIN samples the reference window",
             experiment.detector.kswin.sampled, as_flag),
      DS_KEY("sgd_learning_rate", Kind::real, "SGD step size",
             experiment.classifier.sgd.learning_rate, as_real),
      DS_KEY("sgd_l2", Kind::real, "SGD L2 penalty", experiment.classifier.sgd.l2, as_real),
      DS_KEY("hoeffding_grace_period", Kind::real, "Hoeffding tree grace period",
             experiment.classifier.hoeffding.grace_period, as_real),
      DS_KEY("hoeffding_delta", Kind::real, "Hoeffding tree split confidence",
             experiment.classifier.hoeffding.split_confidence, as_real),
      DS_KEY("hoeffding_tau", Kind::real, "Hoeffding tree tie threshold",
             experiment.classifier.hoeffding.tie_threshold, as_real),
      DS_KEY("hoeffding_bins", Kind::count, "Hoeffding tree histogram bins",
             experiment.classifier.hoeffding.n_bins, as_count),
      DS_ENUM_KEY("hoeffding_leaf", "Hoeffding tree leaf prediction (majority|naive-bayes)",
                  experiment.classifier.hoeffding.leaf_prediction, parse_leaf_prediction),
      DS_KEY("arf_trees", Kind::count, "ARF ensemble size", experiment.classifier.arf.n_trees,
             as_count),
      DS_KEY("arf_lambda", Kind::real, "ARF Poisson weight mean", experiment.classifier.arf.lambda,
             as_real),
      DS_KEY("arf_subspace", Kind::count, "ARF features per tree (0 = sqrt of dim)",
             experiment.classifier.arf.subspace_size, as_count),
      DS_KEY("arf_grace_period", Kind::real, "ARF tree grace period",
             experiment.classifier.arf.tree.grace_period, as_real),
      DS_KEY("arf_delta", Kind::real, "ARF tree split confidence",
             experiment.classifier.arf.tree.split_confidence, as_real),
      DS_KEY("arf_tau", Kind::real, "ARF tree tie threshold",
             experiment.classifier.arf.tree.tie_threshold, as_real),
      DS_KEY("arf_bins", Kind::count, "ARF tree histogram bins",
             experiment.classifier.arf.tree.n_bins, as_count),
      DS_ENUM_KEY("arf_leaf", "ARF leaf prediction (majority|naive-bayes)",
                  experiment.classifier.arf.tree.leaf_prediction, parse_leaf_prediction),
  };
  return keys;
}

#undef DS_KEY
#undef DS_ENUM_KEY

std::string flag_name(std::string key) {
  for (auto& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

json parse_flag_value(const ConfigKey& key, const std::string& text) {
  switch (key.kind) {
    case Kind::text:
      return json(text);
    case Kind::count: {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size()) {
        throw ConfigError(flag_name(key.name) + ": expected a non-negative integer, got '" +
                          text + "'");
      }
      return json(v);
    }
    case Kind::real: {
      double v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size()) {
        throw ConfigError(flag_name(key.name) + ": expected a number, got '" + text + "'");
      }
      return json(v);
    }
    case Kind::flag:
      if (text == "true" || text == "1") return json(true);
      if (text == "false" || text == "0") return json(false);
      throw ConfigError(flag_name(key.name) + ": expected true or false, got '" + text + "'");
  }
  return {};
}

void apply_key(RunSettings& s, const ConfigKey& key, const json& v) {
  try {
    key.set(s, v);
  } catch (const ConfigError& e) {
    throw ConfigError(key.name + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(key.name + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> env_out() {
  const char* v = std::getenv("DRIFTSTREAM_OUT");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

void print_table(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  for (const auto& r : rows) out << fmt::format("{:<{}}  {}\n", r.first, width, r.second);
}

RunInfo run_info(const RunSettings& s) {
  const auto& e = s.experiment;
  RunInfo info{{"strategy", std::string(to_string(e.strategy))}};
  const bool streaming = e.strategy == Strategy::fnf_update ||
                         e.strategy == Strategy::fnf_retrain || e.strategy == Strategy::mts;
  if (streaming) info.emplace_back("detector", std::string(to_string(e.detector.kind)));
  if (e.strategy != Strategy::pool) {
    info.emplace_back("classifier", std::string(to_string(e.classifier.kind)));
  }
  info.emplace_back("vocab_size", std::to_string(e.vocab_size));
  if (e.strategy == Strategy::fnf_update || e.strategy == Strategy::fnf_retrain ||
      e.strategy == Strategy::static_baseline || e.strategy == Strategy::pool) {
    info.emplace_back("warmup", e.warmup.to_string());
  }
  info.emplace_back("seed", std::to_string(e.seed));
  return info;
}

std::vector<std::pair<std::string, std::string>> metric_rows(const Metrics& m) {
  return {{"accuracy", format_fixed(m.accuracy)},
          {"f1", format_fixed(m.f1)},
          {"recall", format_fixed(m.recall)},
          {"precision", format_fixed(m.precision)}};
}

/// Runs one experiment, writes its reports and prints the summary table.
void execute(const RunSettings& s, const SampleStream& stream, std::ostream& out) {
  namespace fs = std::filesystem;
  const auto& cfg = s.experiment;
  const fs::path dir = s.out;
  const auto info = run_info(s);
  std::vector<std::pair<std::string, std::string>> rows(info.begin(), info.end());

  switch (cfg.strategy) {
    case Strategy::fnf_update:
    case Strategy::fnf_retrain:
    case Strategy::static_baseline:
    case Strategy::pool: {
      auto result = cfg.strategy == Strategy::pool ? run_model_pool(stream, cfg)
                                                   : run_fnf(stream, cfg);
      export_reports(result, dir, info);
      write_file(dir / "extractor.json", result.final_extractor.to_json());
      const auto& t = result.timeline;
      for (auto& r : metric_rows(t.steps() ? compute_metrics(t.cumulative()) : Metrics{})) {
        rows.push_back(r);
      }
      rows.emplace_back("drifts", std::to_string(t.drift_count()));
      rows.emplace_back("warnings", std::to_string(t.warning_count()));
      rows.emplace_back("steps", std::to_string(t.steps()));
      break;
    }
    case Strategy::cross_val: {
      auto result = run_cross_validation(stream, cfg);
      export_reports(result, dir, info);
      for (auto& r : metric_rows(result.mean)) rows.push_back(r);
      break;
    }
    case Strategy::temporal: {
      auto result = run_temporal_split(stream, cfg);
      export_reports(result, dir, info);
      for (auto& r : metric_rows(result.metrics)) rows.push_back(r);
      break;
    }
    case Strategy::iwc: {
      auto result = run_iwc(stream, cfg);
      export_reports(result, dir, info);
      for (auto& r : metric_rows(result.mean)) rows.push_back(r);
      rows.emplace_back("months", std::to_string(result.months.size()));
      break;
    }
    case Strategy::mts: {
      auto result = run_multiple_time_spans(stream, cfg);
      export_reports(result, dir, info);
      rows.emplace_back("f1_mean", format_fixed(result.mean_f1));
      rows.emplace_back("f1_std", format_fixed(result.std_f1));
      for (const auto& f : result.folds) {
        rows.emplace_back(fmt::format("f1[{}]", f.iteration), format_fixed(f.f1));
      }
      break;
    }
  }
  write_file(dir / "config.json", settings_to_json(s));
  rows.emplace_back("output", dir.string());
  print_table(out, rows);
}

int config_failure(std::ostream& err, const std::string& what) {
  err << "configuration error: " << what << "\n";
  return 2;
}

}  // namespace

std::string describe_config_keys() {
  const RunSettings defaults;
  std::string text = "Config file keys (JSON object; flags use --key-with-dashes):\n";
  std::size_t width = 0;
  for (const auto& k : config_keys()) width = std::max(width, k.name.size());
  for (const auto& k : config_keys()) {
    text += fmt::format("  {:<{}}  default {:<16} {}\n", k.name, width, k.get(defaults).dump(),
                        k.help);
  }
  return text;
}

void apply_config_json(RunSettings& settings, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [name, value] : doc.items()) {
    const auto& keys = config_keys();
    auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return k.name == name; });
    if (it == keys.end()) throw ConfigError("unknown config key '" + name + "'");
    apply_key(settings, *it, value);
  }
}

std::string settings_to_json(const RunSettings& settings) {
  json doc = json::object();
  for (const auto& k : config_keys()) {
    if (k.name == "out") continue;  // keeps reruns into other directories identical
    doc[k.name] = k.get(settings);
  }
  return doc.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drift-aware malware detection experiments on sample streams", "driftstream"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment and write its reports");
  std::string config_path, grid_path;
  run->add_option("--config", config_path, "JSON config file (flags take precedence)");
  run->add_option("--grid", grid_path,
                  "JSON array of config objects applied on top of the base settings; each runs "
                  "in its own worker and writes to <out>/<index>");
  std::map<std::string, std::string> flag_text;
  std::vector<std::pair<const ConfigKey*, CLI::Option*>> flag_opts;
  for (const auto& k : config_keys()) {
    flag_opts.emplace_back(&k, run->add_option(flag_name(k.name), flag_text[k.name], k.help));
  }
  run->footer(describe_config_keys());

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic drifting sample stream");
  SynthStreamSpec spec;
  std::string kind_text(to_string(spec.kind)), gen_out, gen_format = "jsonl";
  gen->add_option("--n", spec.n_samples, "number of samples")->capture_default_str();
  gen->add_option("--drift-at", spec.drift_points, "drift points (repeat or comma separated)")
      ->delimiter(',');
  gen->add_option("--kind", kind_text, "abrupt|vocabulary-shift")->capture_default_str();
  gen->add_option("--seed", spec.seed, "random seed")->capture_default_str();
  gen->add_option("--malware-fraction", spec.malware_fraction)->capture_default_str();
  gen->add_option("--attributes", spec.attributes, "attribute names")
      ->delimiter(',')
      ->capture_default_str();
  gen->add_option("--tokens-per-attribute", spec.tokens_per_attribute)->capture_default_str();
  gen->add_option("--shared-pool", spec.shared_pool)->capture_default_str();
  gen->add_option("--indicative-pool", spec.indicative_pool)->capture_default_str();
  gen->add_option("--indicative-rate", spec.indicative_rate)->capture_default_str();
  gen->add_option("--label-noise", spec.label_noise)->capture_default_str();
  gen->add_option("--start-timestamp", spec.start_timestamp)->capture_default_str();
  gen->add_option("--interval", spec.interval_seconds, "seconds between samples")
      ->capture_default_str();
  gen->add_option("--format", gen_format, "jsonl|csv")->capture_default_str();
  gen->add_option("--out,-o", gen_out, "output file (standard output when omitted)");

  // diff-vocab
  auto* diff = app.add_subcommand("diff-vocab", "Compare two saved feature extractors");
  std::string old_path, new_path, diff_out;
  diff->add_option("old", old_path, "earlier extractor JSON")->required();
  diff->add_option("new", new_path, "later extractor JSON")->required();
  diff->add_option("--out", diff_out, "directory for vocab_diffs.json (default: DRIFTSTREAM_OUT or .)");

  std::vector<const char*> argv{"driftstream"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) {
    RunSettings settings;
    SampleStream stream;
    std::vector<RunSettings> grid;
    try {
      if (!config_path.empty()) apply_config_json(settings, read_text(config_path));
      if (auto env = env_out()) settings.out = *env;
      for (const auto& [key, opt] : flag_opts) {
        if (opt->count() > 0) apply_key(settings, *key, parse_flag_value(*key, flag_text[key->name]));
      }
      if (settings.input.empty()) throw ConfigError("no input stream given (--input)");
      settings.experiment.validate();
      if (!grid_path.empty()) {
        json doc;
        try {
          doc = json::parse(read_text(grid_path));
        } catch (const json::exception& e) {
          throw ConfigError(std::string("grid file is not valid JSON: ") + e.what());
        }
        if (!doc.is_array() || doc.empty()) {
          throw ConfigError("grid file must hold a non-empty JSON array");
        }
        for (std::size_t i = 0; i < doc.size(); ++i) {
          RunSettings g = settings;
          apply_config_json(g, doc[i].dump());
          g.experiment.validate();
          g.out = (std::filesystem::path(settings.out) / std::to_string(i)).string();
          grid.push_back(std::move(g));
        }
      }
    } catch (const ConfigError& e) {
      return config_failure(err, e.what());
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
    try {
      stream = load_stream(settings.input, settings.format);
      if (grid.empty()) {
        execute(settings, stream, out);
        return 0;
      }
      std::vector<std::string> outputs(grid.size()), failures(grid.size());
      const std::size_t workers =
          std::max<std::size_t>(1, std::min<std::size_t>(grid.size(), std::thread::hardware_concurrency()));
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < grid.size(); i = next++) {
            std::ostringstream os;
            try {
              execute(grid[i], stream, os);
            } catch (const std::exception& e) {
              failures[i] = e.what();
            }
            outputs[i] = os.str();
          }
        });
      }
      for (auto& t : pool) t.join();
      int code = 0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        out << "[" << i << "]\n" << outputs[i];
        if (!failures[i].empty()) {
          err << "error in grid entry " << i << ": " << failures[i] << "\n";
          code = 1;
        }
      }
      return code;
    } catch (const ConfigError& e) {
      return config_failure(err, e.what());
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }

  if (gen->parsed()) {
    SampleStream stream;
    StreamFormat format{};
    try {
      spec.kind = parse_drift_kind(kind_text);
      format = parse_stream_format(gen_format);
      stream = generate_synth_stream(spec);
    } catch (const Error& e) {
      return config_failure(err, e.what());
    }
    try {
      if (gen_out.empty()) {
        write_stream(out, stream, format);
      } else {
        save_stream(gen_out, stream, format);
      }
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
    return 0;
  }

  if (diff->parsed()) {
    try {
      const auto a = FeatureExtractorModel::from_json(read_text(old_path));
      const auto b = FeatureExtractorModel::from_json(read_text(new_path));
      std::vector<VocabularyDiff> diffs;
      try {
        diffs = vocabulary_diff(a, b);
      } catch (const SchemaMismatch& e) {
        err << "schema mismatch: " << e.what() << "\n";
        return 2;
      }
      std::filesystem::path dir = !diff_out.empty() ? diff_out : env_out().value_or(".");
      std::filesystem::create_directories(dir);
      write_file(dir / "vocab_diffs.json", vocabulary_diffs_to_json(diffs) + "\n");
      bool any = false;
      for (const auto& d : diffs) {
        if (d.empty()) continue;
        any = true;
        out << d.attribute_name << ":\n";
        out << fmt::format("  added ({}):", d.added.size());
        for (const auto& t : d.added) out << ' ' << t;
        out << fmt::format("\n  removed ({}):", d.removed.size());
        for (const auto& t : d.removed) out << ' ' << t;
        out << '\n';
      }
      if (!any) out << "no changes\n";
      return 0;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}

}  // namespace driftstream::cli
