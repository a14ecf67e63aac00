#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftstream/metrics.hpp"
#include "driftstream/pipeline.hpp"

namespace driftstream {

/// Ordered string fields copied into summary.json under "run".
using RunInfo = std::vector<std::pair<std::string, std::string>>;

/// Fixed six-decimal rendering used by every report file.
std::string format_fixed(double v);

std::string metrics_csv(const MetricsTimeline& timeline);
/// Step plus faded and plain (phi = 1) prequential error for every step.
std::string prequential_csv(const MetricsTimeline& timeline);
std::string events_jsonl(const MetricsTimeline& timeline);
std::string vocabulary_changes_json(std::span<const VocabularyChange> changes);
std::string stream_summary_json(const StreamRunResult& result, const RunInfo& info = {});
std::string stream_summary_json(const MetricsTimeline& timeline, const RunInfo& info = {});

/// Writes metrics.csv, prequential.csv, events.jsonl, vocab_diffs.json and
/// summary.json into `out_dir`, creating it if needed. Throws IoError.
void export_reports(const MetricsTimeline& timeline, std::span<const VocabularyChange> changes,
                    const std::filesystem::path& out_dir, const RunInfo& info = {});
void export_reports(const StreamRunResult& result, const std::filesystem::path& out_dir,
                    const RunInfo& info = {});

/// Batch protocols write summary.json plus a per-period table.
void export_reports(const EvaluationResult& result, const std::filesystem::path& out_dir,
                    const RunInfo& info = {});
void export_reports(const CrossValidationResult& result, const std::filesystem::path& out_dir,
                    const RunInfo& info = {});
void export_reports(const IwcResult& result, const std::filesystem::path& out_dir,
                    const RunInfo& info = {});
void export_reports(const TimeSpanResult& result, const std::filesystem::path& out_dir,
                    const RunInfo& info = {});

/// Writes `content` to `path` in binary mode. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace driftstream
