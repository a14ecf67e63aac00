#include "driftstream/report.hpp"

#include <fmt/format.h>

#include <fstream>

#include "driftstream/errors.hpp"
#include "json.hpp"

namespace driftstream {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

Metrics safe_metrics(const ConfusionCounts& c) {
  return c.total() == 0 ? Metrics{} : compute_metrics(c);
}

// Hand-written so floats keep six decimals.
class SummaryWriter {
 public:
  void number(std::string_view key, double v) { field(key, format_fixed(v)); }
  void integer(std::string_view key, std::uint64_t v) { field(key, std::to_string(v)); }
  void metrics(const Metrics& m) {
    number("accuracy", m.accuracy);
    number("f1", m.f1);
    number("recall", m.recall);
    number("precision", m.precision);
  }
  void counts(const ConfusionCounts& c) {
    integer("tp", c.tp);
    integer("fp", c.fp);
    integer("tn", c.tn);
    integer("fn", c.fn);
  }
  void info(const RunInfo& info) {
    if (info.empty()) return;
    std::string obj = "{";
    for (std::size_t i = 0; i < info.size(); ++i) {
      obj += fmt::format("{}\n    {}: {}", i ? "," : "", quote(info[i].first),
                         quote(info[i].second));
    }
    obj += "\n  }";
    field("run", obj);
  }
  std::string str() const { return "{" + body_ + "\n}\n"; }

 private:
  void field(std::string_view key, const std::string& value) {
    body_ += fmt::format("{}\n  {}: {}", body_.empty() ? "" : ",", quote(key), value);
  }
  std::string body_;
};

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

Metrics mean_of(const std::vector<Metrics>& all) {
  Metrics m;
  for (const auto& x : all) {
    m.accuracy += x.accuracy;
    m.precision += x.precision;
    m.recall += x.recall;
    m.f1 += x.f1;
  }
  if (!all.empty()) {
    const double n = static_cast<double>(all.size());
    m.accuracy /= n;
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
  }
  return m;
}

}  // namespace

std::string format_fixed(double v) { return fmt::format("{:.6f}", v); }

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string metrics_csv(const MetricsTimeline& timeline) {
  std::string out =
      "step,prequential_error,window_accuracy,window_precision,window_recall,window_f1\n";
  for (const auto& w : timeline.snapshots()) {
    const auto m = safe_metrics(w.counts);
    out += fmt::format("{},{},{},{},{},{}\n", w.step, format_fixed(w.prequential_error),
                       format_fixed(m.accuracy), format_fixed(m.precision),
                       format_fixed(m.recall), format_fixed(m.f1));
  }
  return out;
}

std::string prequential_csv(const MetricsTimeline& timeline) {
  const auto bits = timeline.error_bits();
  const auto faded = prequential_error(bits, timeline.fading());
  const auto plain = prequential_error(bits, 1.0);
  std::string out = "step,faded_error,running_error\n";
  for (std::size_t i = 0; i < bits.size(); ++i) {
    out += fmt::format("{},{},{}\n", i + 1, format_fixed(faded[i]), format_fixed(plain[i]));
  }
  return out;
}

std::string events_jsonl(const MetricsTimeline& timeline) {
  std::string out;
  for (const auto& e : timeline.events()) {
    out += fmt::format("{{\"step\":{},\"detector\":{},\"level\":{}}}\n", e.step, quote(e.detector),
                       quote(to_string(e.level)));
  }
  return out;
}

std::string vocabulary_changes_json(std::span<const VocabularyChange> changes) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : changes) {
    ordered_json o;
    o["step"] = c.step;
    o["diffs"] = ordered_json::parse(vocabulary_diffs_to_json(c.diffs));
    arr.push_back(std::move(o));
  }
  return arr.dump(1) + "\n";
}

std::string stream_summary_json(const MetricsTimeline& timeline, const RunInfo& info) {
  SummaryWriter w;
  w.metrics(safe_metrics(timeline.cumulative()));
  w.integer("drifts", timeline.drift_count());
  w.integer("warnings", timeline.warning_count());
  w.integer("degenerate_drifts", timeline.degenerate_drifts());
  w.integer("steps", timeline.steps());
  w.counts(timeline.cumulative());
  w.info(info);
  return w.str();
}

std::string stream_summary_json(const StreamRunResult& result, const RunInfo& info) {
  SummaryWriter w;
  const auto& t = result.timeline;
  w.metrics(safe_metrics(t.cumulative()));
  w.integer("drifts", t.drift_count());
  w.integer("warnings", t.warning_count());
  w.integer("degenerate_drifts", t.degenerate_drifts());
  w.integer("steps", t.steps());
  w.integer("warmup_size", result.warmup_size);
  w.integer("classifier_rebuilds", result.classifier_rebuilds);
  w.integer("extractor_refits", result.vocabulary_changes.size());
  w.counts(t.cumulative());
  w.info(info);
  return w.str();
}

void export_reports(const MetricsTimeline& timeline, std::span<const VocabularyChange> changes,
                    const fs::path& out_dir, const RunInfo& info) {
  prepare_dir(out_dir);
  write_file(out_dir / "metrics.csv", metrics_csv(timeline));
  write_file(out_dir / "prequential.csv", prequential_csv(timeline));
  write_file(out_dir / "events.jsonl", events_jsonl(timeline));
  write_file(out_dir / "vocab_diffs.json", vocabulary_changes_json(changes));
  write_file(out_dir / "summary.json", stream_summary_json(timeline, info));
}

void export_reports(const StreamRunResult& result, const fs::path& out_dir, const RunInfo& info) {
  export_reports(result.timeline, result.vocabulary_changes, out_dir, info);
  write_file(out_dir / "summary.json", stream_summary_json(result, info));
}

void export_reports(const EvaluationResult& result, const fs::path& out_dir, const RunInfo& info) {
  prepare_dir(out_dir);
  SummaryWriter w;
  w.metrics(result.metrics);
  w.integer("drifts", 0);
  w.counts(result.counts);
  w.info(info);
  write_file(out_dir / "summary.json", w.str());
}

void export_reports(const CrossValidationResult& result, const fs::path& out_dir,
                    const RunInfo& info) {
  prepare_dir(out_dir);
  std::string csv = "fold,tp,fp,tn,fn,accuracy,precision,recall,f1\n";
  ConfusionCounts total;
  for (std::size_t i = 0; i < result.folds.size(); ++i) {
    const auto& c = result.folds[i];
    const auto m = safe_metrics(c);
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", i + 1, c.tp, c.fp, c.tn, c.fn,
                       format_fixed(m.accuracy), format_fixed(m.precision),
                       format_fixed(m.recall), format_fixed(m.f1));
    total += c;
  }
  write_file(out_dir / "folds.csv", csv);
  SummaryWriter w;
  w.metrics(result.mean);
  w.integer("drifts", 0);
  w.integer("folds", result.folds.size());
  w.counts(total);
  w.info(info);
  write_file(out_dir / "summary.json", w.str());
}

void export_reports(const IwcResult& result, const fs::path& out_dir, const RunInfo& info) {
  prepare_dir(out_dir);
  std::string csv = "month,train_size,tp,fp,tn,fn,accuracy,precision,recall,f1\n";
  ConfusionCounts total;
  for (const auto& m : result.months) {
    const auto& c = m.counts;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", month_label(m.month), m.train_size,
                       c.tp, c.fp, c.tn, c.fn, format_fixed(m.metrics.accuracy),
                       format_fixed(m.metrics.precision), format_fixed(m.metrics.recall),
                       format_fixed(m.metrics.f1));
    total += c;
  }
  write_file(out_dir / "iwc.csv", csv);
  SummaryWriter w;
  w.metrics(result.mean);
  w.integer("drifts", 0);
  w.integer("months", result.months.size());
  w.counts(total);
  w.info(info);
  write_file(out_dir / "summary.json", w.str());
}

void export_reports(const TimeSpanResult& result, const fs::path& out_dir, const RunInfo& info) {
  prepare_dir(out_dir);
  std::string csv = "iteration,warmup_size,stream_size,tp,fp,tn,fn,f1,drifts\n";
  std::vector<Metrics> per;
  ConfusionCounts total;
  std::size_t drifts = 0;
  for (const auto& f : result.folds) {
    const auto& c = f.counts;
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", f.iteration, f.warmup_size, f.stream_size,
                       c.tp, c.fp, c.tn, c.fn, format_fixed(f.f1), f.drifts);
    per.push_back(safe_metrics(c));
    total += c;
    drifts += f.drifts;
  }
  write_file(out_dir / "time_spans.csv", csv);
  SummaryWriter w;
  auto m = mean_of(per);
  m.f1 = result.mean_f1;
  w.metrics(m);
  w.integer("drifts", drifts);
  w.number("f1_std", result.std_f1);
  w.integer("iterations", result.folds.size());
  w.counts(total);
  w.info(info);
  write_file(out_dir / "summary.json", w.str());
}

}  // namespace driftstream
