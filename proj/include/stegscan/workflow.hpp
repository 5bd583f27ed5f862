#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stegscan/evaluation.hpp"
#include "stegscan/pipeline.hpp"
#include "stegscan/recovery.hpp"

namespace stegscan {

/// True when `child` is `parent` or lies below it (after resolving symlinks
/// of the existing prefix).
bool path_within(const std::filesystem::path& child, const std::filesystem::path& parent);

using LogSink = std::function<void(const std::string&)>;

struct ScanOptions {
    std::optional<std::filesystem::path> db;
    std::optional<std::filesystem::path> reference_dir;  // same-named clean originals for FCA
    std::optional<std::filesystem::path> signature_file;  // appended to the builtin table
    PipelineConfig config{};
    std::string copy_dir = "original_copy";
    LogSink log;
};

struct ScanSummary {
    std::vector<DetectionReport> reports;                   // sorted by file name
    std::vector<std::pair<std::string, std::string>> failures;  // file, reason
};

/// Copies every regular file of input_dir (not recursive) to
/// `<out_dir>/<copy_dir>/`, scans the copies and writes
/// `<out_dir>/reports/<file>.report.json` plus `<out_dir>/scan_index.csv`.
ScanSummary scan_directory(const std::filesystem::path& input_dir, const std::filesystem::path& out_dir,
                           const ScanOptions& options = {});

std::vector<DetectionReport> load_reports(const std::filesystem::path& scan_out);

struct ExtractSummary {
    std::vector<ExtractedArtifact> artifacts;
    std::vector<std::string> errors;
};

/// extract_all over every report under scan_out, then `<scan_out>/extraction_log.csv`.
ExtractSummary extract_directory(const std::filesystem::path& scan_out, const ExtractOptions& options = {},
                                 const std::string& copy_dir = "original_copy", const LogSink& log = {});

struct EvalRun {
    std::filesystem::path run_dir;
    EvalSummary summary;
};

/// Evaluates a scan (and its extraction log, when present) against a manifest
/// and writes CSV and .dat files into `<eval_out>/run_<hash>/`.
EvalRun evaluate_directory(const std::filesystem::path& manifest_path, const std::filesystem::path& scan_out,
                           const std::filesystem::path& eval_out);

}  // namespace stegscan
