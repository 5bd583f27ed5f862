#include "stegscan/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "stegscan/csv.hpp"
#include "stegscan/digest.hpp"
#include "stegscan/error.hpp"

namespace fs = std::filesystem;

namespace stegscan {
namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double to_double(const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(Errc::invalid_argument, "bad number '" + s + "'");
    return v;
}

std::size_t to_count(const std::string& s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(Errc::invalid_argument, "bad count '" + s + "'");
    return v;
}

AudioFormat to_format(const std::string& s) {
    if (s == "wav") return AudioFormat::wav;
    if (s == "mp3") return AudioFormat::mp3;
    throw Error(Errc::invalid_argument, "bad format '" + s + "'");
}

std::string detections_file(AudioFormat f) { return "detections_" + std::string(format_name(f)) + ".csv"; }

std::string dat_name(const std::string& csv_name) { return csv_name.substr(0, csv_name.size() - 4) + ".dat"; }

}  // namespace

EvalSummary evaluate(const CorpusManifest& manifest, const std::vector<DetectionReport>& reports,
                     const std::vector<ExtractionLogRow>& artifacts, double bucket_width) {
    if (!(bucket_width > 0)) throw Error(Errc::invalid_argument, "bucket width must be positive");
    std::map<std::string, const DetectionReport*> by_file;
    for (const auto& r : reports) {
        if (!manifest.find(r.file))
            throw Error(Errc::manifest_report_mismatch, "report for '" + r.file + "' has no manifest entry");
        if (!by_file.emplace(r.file, &r).second)
            throw Error(Errc::manifest_report_mismatch, "duplicate report for '" + r.file + "'");
    }
    std::map<std::string, std::vector<std::string>> digests_by_source;
    for (const auto& a : artifacts) digests_by_source[a.source].push_back(a.sha256);

    EvalSummary s;
    std::array<std::map<double, DurationRow>, 2> durations;
    std::map<std::pair<int, double>, BucketRow> buckets;

    for (const auto& e : manifest.entries) {
        auto it = by_file.find(e.filename);
        if (it == by_file.end())
            throw Error(Errc::manifest_report_mismatch, "no report for manifest entry '" + e.filename + "'");
        const bool flagged = it->second->final_verdict == FinalVerdict::stego_detected;
        const int f = static_cast<int>(e.format);
        FormatCounts& c = s.per_format[f];

        bool exact = false;
        if (e.is_stego && flagged) {
            const auto& found = digests_by_source[e.filename];
            exact = std::find(found.begin(), found.end(), e.payload_sha256) != found.end();
        }
        if (flagged) ++c.detected;
        if (e.is_stego) (flagged ? c.true_positives : c.false_negatives)++;
        else (flagged ? c.false_positives : c.true_negatives)++;
        if (exact) ++c.extracted_exact;

        DurationRow& d = durations[f][e.duration];
        d.duration = e.duration;
        const double start = std::floor(e.duration / bucket_width) * bucket_width;
        BucketRow& b = buckets[{f, start}];
        b.format = e.format;
        b.bucket_start = start;
        b.bucket_end = start + bucket_width;
        if (e.is_stego) {
            ++d.total;
            if (flagged) ++d.detected, ++b.detected;
            else ++b.false_negatives;
            if (exact) ++d.extracted_exact;
        }
    }

    for (int f = 0; f < 2; ++f)
        for (const auto& [dur, row] : durations[f]) s.per_duration[f].push_back(row);
    for (auto& [key, b] : buckets) {
        const std::size_t stego = b.detected + b.false_negatives;
        if (stego) b.fn_rate = static_cast<double>(b.false_negatives) / static_cast<double>(stego);
        s.buckets.push_back(b);
    }
    s.run_metadata["manifest_sha256"] = manifest.manifest_sha256;
    s.run_metadata["thresholds"] = reports.empty() ? nlohmann::json::object() : reports.front().thresholds;
    s.run_metadata["bucket_width"] = bucket_width;
    return s;
}

void emit_csv(const EvalSummary& s, const fs::path& dir) {
    fs::create_directories(dir);
    for (AudioFormat f : {AudioFormat::wav, AudioFormat::mp3}) {
        std::string text = "duration_s,detected,total,extracted_exact\n";
        for (const auto& r : s.durations(f))
            text += csv::join({num(r.duration), std::to_string(r.detected), std::to_string(r.total),
                               std::to_string(r.extracted_exact)}) +
                    "\n";
        write_text_file(dir / detections_file(f), text);
    }
    std::string fn = "format,bucket_start,fn_rate\n";
    for (const auto& b : s.buckets)
        fn += csv::join({std::string(format_name(b.format)), num(b.bucket_start), b.fn_rate ? num(*b.fn_rate) : ""}) +
              "\n";
    write_text_file(dir / "fn_distribution.csv", fn);

    std::string summary = "format,tp,fp,fn,tn,detected,extracted_exact\n";
    for (AudioFormat f : {AudioFormat::wav, AudioFormat::mp3}) {
        const auto& c = s.counts(f);
        summary += csv::join({std::string(format_name(f)), std::to_string(c.true_positives),
                              std::to_string(c.false_positives), std::to_string(c.false_negatives),
                              std::to_string(c.true_negatives), std::to_string(c.detected),
                              std::to_string(c.extracted_exact)}) +
                   "\n";
    }
    write_text_file(dir / "summary.csv", summary);
}

void emit_plot_data(const EvalSummary& s, const fs::path& dir) {
    fs::create_directories(dir);
    for (AudioFormat f : {AudioFormat::wav, AudioFormat::mp3}) {
        std::string text = "# duration_s detected total extracted_exact\n";
        for (const auto& r : s.durations(f))
            text += num(r.duration) + " " + std::to_string(r.detected) + " " + std::to_string(r.total) + " " +
                    std::to_string(r.extracted_exact) + "\n";
        write_text_file(dir / dat_name(detections_file(f)), text);
    }
    // one gnuplot index block per format
    std::string fn;
    for (AudioFormat f : {AudioFormat::wav, AudioFormat::mp3}) {
        if (!fn.empty()) fn += "\n\n";
        fn += "# " + std::string(format_name(f)) + ": bucket_start fn_rate\n";
        for (const auto& b : s.buckets)
            if (b.format == f) fn += num(b.bucket_start) + " " + (b.fn_rate ? num(*b.fn_rate) : "NaN") + "\n";
    }
    write_text_file(dir / "fn_distribution.dat", fn);

    std::string summary = "# format tp fp fn tn detected extracted_exact\n";
    for (AudioFormat f : {AudioFormat::wav, AudioFormat::mp3}) {
        const auto& c = s.counts(f);
        summary += std::string(format_name(f)) + " " + std::to_string(c.true_positives) + " " +
                   std::to_string(c.false_positives) + " " + std::to_string(c.false_negatives) + " " +
                   std::to_string(c.true_negatives) + " " + std::to_string(c.detected) + " " +
                   std::to_string(c.extracted_exact) + "\n";
    }
    write_text_file(dir / "summary.dat", summary);
}

EvalSummary read_eval_csv(const fs::path& dir, double bucket_width) {
    EvalSummary s;
    for (AudioFormat f : {AudioFormat::wav, AudioFormat::mp3}) {
        const auto t = csv::read_table(dir / detections_file(f));
        for (const auto& r : t.rows)
            s.per_duration[static_cast<int>(f)].push_back({to_double(t.at(r, "duration_s")),
                                                           to_count(t.at(r, "detected")), to_count(t.at(r, "total")),
                                                           to_count(t.at(r, "extracted_exact"))});
    }
    const auto summary = csv::read_table(dir / "summary.csv");
    for (const auto& r : summary.rows) {
        FormatCounts& c = s.per_format[static_cast<int>(to_format(summary.at(r, "format")))];
        c.true_positives = to_count(summary.at(r, "tp"));
        c.false_positives = to_count(summary.at(r, "fp"));
        c.false_negatives = to_count(summary.at(r, "fn"));
        c.true_negatives = to_count(summary.at(r, "tn"));
        c.detected = to_count(summary.at(r, "detected"));
        c.extracted_exact = to_count(summary.at(r, "extracted_exact"));
    }
    // bucket detected/FN counts are not in fn_distribution.csv; rebuild them from the duration rows
    const auto fn = csv::read_table(dir / "fn_distribution.csv");
    for (const auto& r : fn.rows) {
        BucketRow b;
        b.format = to_format(fn.at(r, "format"));
        b.bucket_start = to_double(fn.at(r, "bucket_start"));
        b.bucket_end = b.bucket_start + bucket_width;
        for (const auto& d : s.durations(b.format))
            if (d.duration >= b.bucket_start && d.duration < b.bucket_end) {
                b.detected += d.detected;
                b.false_negatives += d.total - d.detected;
            }
        if (!fn.at(r, "fn_rate").empty()) b.fn_rate = to_double(fn.at(r, "fn_rate"));
        s.buckets.push_back(b);
    }
    return s;
}

std::string run_dir_name(const std::string& manifest_sha256, const nlohmann::json& thresholds) {
    return "run_" + sha256_hex(to_bytes(manifest_sha256 + thresholds.dump())).substr(0, 12);
}

}  // namespace stegscan
