#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stegscan/corpus.hpp"
#include "stegscan/pipeline.hpp"
#include "stegscan/recovery.hpp"

namespace stegscan {

struct FormatCounts {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    std::size_t true_negatives = 0;
    std::size_t detected = 0;         // files flagged, clean or not
    std::size_t extracted_exact = 0;  // true positives whose payload came back bit-exact

    bool operator==(const FormatCounts&) const = default;
};

/// One row of the detection-count series: hidden objects at one carrier duration.
struct DurationRow {
    double duration = 0.0;
    std::size_t detected = 0;  // stego files flagged
    std::size_t total = 0;     // stego files
    std::size_t extracted_exact = 0;

    bool operator==(const DurationRow&) const = default;
};

struct BucketRow {
    AudioFormat format = AudioFormat::wav;
    double bucket_start = 0.0;
    double bucket_end = 0.0;
    std::size_t detected = 0;
    std::size_t false_negatives = 0;
    std::optional<double> fn_rate;  // FN / stego count, absent without stego files

    bool operator==(const BucketRow&) const = default;
};

struct EvalSummary {
    std::array<FormatCounts, 2> per_format{};  // indexed by AudioFormat
    std::array<std::vector<DurationRow>, 2> per_duration;
    std::vector<BucketRow> buckets;  // wav buckets then mp3, ascending
    nlohmann::json run_metadata = nlohmann::json::object();

    const FormatCounts& counts(AudioFormat f) const { return per_format[static_cast<int>(f)]; }
    const std::vector<DurationRow>& durations(AudioFormat f) const { return per_duration[static_cast<int>(f)]; }

    /// Everything except run_metadata.
    bool same_counts(const EvalSummary& o) const {
        return per_format == o.per_format && per_duration == o.per_duration && buckets == o.buckets;
    }
};

/// Throws ManifestReportMismatch unless every manifest entry has exactly one report.
EvalSummary evaluate(const CorpusManifest& manifest, const std::vector<DetectionReport>& reports,
                     const std::vector<ExtractionLogRow>& artifacts, double bucket_width = 50.0);

/// detections_wav.csv, detections_mp3.csv, fn_distribution.csv, summary.csv.
void emit_csv(const EvalSummary& summary, const std::filesystem::path& dir);
/// Whitespace-separated .dat mirrors of the CSV files.
void emit_plot_data(const EvalSummary& summary, const std::filesystem::path& dir);
/// Rebuilds the counts from files written by emit_csv.
EvalSummary read_eval_csv(const std::filesystem::path& dir, double bucket_width = 50.0);

/// `run_<12 hex>` from the manifest digest and the threshold set.
std::string run_dir_name(const std::string& manifest_sha256, const nlohmann::json& thresholds);

}  // namespace stegscan
