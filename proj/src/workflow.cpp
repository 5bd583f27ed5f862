#include "stegscan/workflow.hpp"

#include <algorithm>
#include <ctime>

#include "stegscan/corpus.hpp"
#include "stegscan/csv.hpp"
#include "stegscan/error.hpp"
#include "stegscan/hashdb.hpp"
#include "stegscan/mac.hpp"

namespace fs = std::filesystem;

namespace stegscan {
namespace {

void make_dirs(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_failure, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<fs::path> regular_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(Errc::io_failure, "not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

bool path_within(const fs::path& child, const fs::path& parent) {
    const fs::path c = fs::weakly_canonical(fs::absolute(child));
    const fs::path p = fs::weakly_canonical(fs::absolute(parent));
    auto ci = c.begin();
    for (auto pi = p.begin(); pi != p.end(); ++pi, ++ci) {
        if (pi->empty() && std::next(pi) == p.end()) break;  // trailing separator
        if (ci == c.end() || *ci != *pi) return false;
    }
    return true;
}

ScanSummary scan_directory(const fs::path& input_dir, const fs::path& out_dir, const ScanOptions& options) {
    if (path_within(out_dir, input_dir))
        throw Error(Errc::invalid_argument, "output directory must not lie inside the input directory");
    const auto files = regular_files(input_dir);

    std::optional<HashDb> db;
    if (options.db) db = HashDb::open(*options.db);
    std::optional<SignatureTable> table;
    if (options.signature_file) {
        table = SignatureTable::builtin();
        table->load(*options.signature_file);
    }

    const fs::path copies = out_dir / options.copy_dir;
    const fs::path reports_dir = out_dir / "reports";
    make_dirs(copies);
    make_dirs(reports_dir);

    const std::int64_t scan_time = static_cast<std::int64_t>(std::time(nullptr));
    ScanSummary summary;
    for (const auto& original : files) {
        const std::string name = original.filename().string();
        try {
            PipelineInputs inputs;
            inputs.reference_db = db ? &*db : nullptr;
            inputs.scan_time = scan_time;
            inputs.signatures = table ? &*table : nullptr;
            inputs.times = read_file_times(original);
            if (options.reference_dir && fs::is_regular_file(*options.reference_dir / name))
                inputs.reference_audio = *options.reference_dir / name;

            const fs::path copy = copies / name;
            std::error_code ec;
            fs::copy_file(original, copy, fs::copy_options::overwrite_existing, ec);
            if (ec) throw Error(Errc::io_failure, "copy failed: " + ec.message());

            DetectionReport report = run_pipeline(copy, inputs, options.config);
            write_text_file(reports_dir / (name + ".report.json"), report_text(report));
            summary.reports.push_back(std::move(report));
        } catch (const Error& e) {
            if (e.code() == Errc::io_failure && !fs::exists(original)) throw;
            summary.failures.emplace_back(name, e.what());
            if (options.log) options.log("skipped " + name + ": " + e.what());
        }
    }

    std::string index = report_csv_header() + "\n";
    for (const auto& r : summary.reports) index += report_csv_row(r) + "\n";
    write_text_file(out_dir / "scan_index.csv", index);
    return summary;
}

std::vector<DetectionReport> load_reports(const fs::path& scan_out) {
    const fs::path dir = scan_out / "reports";
    std::vector<DetectionReport> reports;
    for (const auto& file : regular_files(dir)) {
        if (file.string().ends_with(".report.json")) {
            const Bytes raw = read_file(file);
            const auto j = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
            if (j.is_discarded()) throw Error(Errc::invalid_argument, "unparseable report " + file.string());
            reports.push_back(report_from_json(j));
        }
    }
    return reports;
}

ExtractSummary extract_directory(const fs::path& scan_out, const ExtractOptions& options, const std::string& copy_dir,
                                 const LogSink& log) {
    ExtractSummary summary;
    make_dirs(scan_out / options.extracted_dir);
    for (const auto& report : load_reports(scan_out)) {
        if (report.final_verdict != FinalVerdict::stego_detected && !options.force) continue;
        try {
            auto artifacts = extract_all(report, scan_out / copy_dir / report.file, scan_out, options);
            for (const auto& a : artifacts)
                if (!a.note.empty() && log) log(report.file + " @" + std::to_string(a.carve_offset) + ": " + a.note);
            summary.artifacts.insert(summary.artifacts.end(), std::make_move_iterator(artifacts.begin()),
                                     std::make_move_iterator(artifacts.end()));
        } catch (const Error& e) {
            summary.errors.push_back(report.file + ": " + e.what());
            if (log) log(summary.errors.back());
        }
    }
    write_extraction_log(scan_out / "extraction_log.csv", summary.artifacts);
    return summary;
}

EvalRun evaluate_directory(const fs::path& manifest_path, const fs::path& scan_out, const fs::path& eval_out) {
    const CorpusManifest manifest = read_manifest(manifest_path);
    const auto reports = load_reports(scan_out);
    std::vector<ExtractionLogRow> artifacts;
    if (fs::exists(scan_out / "extraction_log.csv")) artifacts = read_extraction_log(scan_out / "extraction_log.csv");

    EvalRun run;
    run.summary = evaluate(manifest, reports, artifacts);
    const nlohmann::json thresholds = reports.empty() ? nlohmann::json::object() : reports.front().thresholds;
    run.run_dir = eval_out / run_dir_name(manifest.manifest_sha256, thresholds);
    make_dirs(run.run_dir);
    emit_csv(run.summary, run.run_dir);
    emit_plot_data(run.summary, run.run_dir);
    nlohmann::json meta = run.summary.run_metadata;
    meta["evaluated_time"] = static_cast<std::int64_t>(std::time(nullptr));
    write_text_file(run.run_dir / "run_metadata.json", meta.dump(2) + "\n");
    return run;
}

}  // namespace stegscan
