// Command-line front end: hash database, corpus generation, scan, extract,
// brute force and evaluation. Exit status 0 = ok, 1 = findings, 2 = error.
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stegscan/corpus.hpp"
#include "stegscan/csv.hpp"
#include "stegscan/error.hpp"
#include "stegscan/hashdb.hpp"
#include "stegscan/recovery.hpp"
#include "stegscan/workflow.hpp"

namespace fs = std::filesystem;
using namespace stegscan;

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kError = 2;

void log_line(const std::string& line) { std::cerr << line << std::endl; }

int cmd_hashdb_build(const fs::path& source, const fs::path& db) {
    if (path_within(db, source)) throw Error(Errc::invalid_argument, "database must not be written inside " + source.string());
    const HashDb built = build_db(source, db);
    std::cout << "recorded " << built.records.size() << " files in " << db.string() << "\n";
    return kOk;
}

int cmd_hashdb_verify(const fs::path& dir, const fs::path& db, const std::string& digest, const std::string& format) {
    const auto findings =
        verify_against_db(HashDb::open(db), dir, digest == "md5" ? DigestChoice::md5 : DigestChoice::sha256);
    bool mismatch = false;
    if (format == "csv") std::cout << "name,status,expected,actual\n";
    for (const auto& f : findings) {
        mismatch = mismatch || f.status == FindingStatus::mismatch;
        if (format == "csv")
            std::cout << csv::join({f.name, std::string(finding_status_name(f.status)), f.expected, f.actual}) << "\n";
        else
            std::cout << finding_status_name(f.status) << " " << f.name << "\n";
    }
    return mismatch ? kFindings : kOk;
}

int cmd_hashdb_filter(const fs::path& dir, const fs::path& db, const std::string& format) {
    const auto findings = classify_known(HashDb::open(db), dir);
    if (format == "csv") std::cout << "name,status,sha256\n";
    for (const auto& f : findings) {
        const char* status = f.status == FindingStatus::match ? "known" : "unknown";
        if (format == "csv") std::cout << csv::join({f.name, status, f.actual}) << "\n";
        else std::cout << status << " " << f.name << "\n";
    }
    return kOk;
}

int cmd_gen_corpus(const fs::path& out, const std::string& config_file, const std::vector<std::string>& sets,
                   const std::optional<std::uint64_t>& seed, bool full_scale) {
    CorpusConfig cfg = full_scale ? CorpusConfig::full_scale() : CorpusConfig{};
    if (!config_file.empty()) {
        const Bytes raw = read_file(config_file);
        cfg.load_text(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
    }
    for (const auto& s : sets) cfg.load_text(s);
    if (seed) cfg.seed = *seed;
    const CorpusManifest m = generate_corpus(cfg, out);
    std::cout << "wrote " << m.entries.size() << " files to " << (out / "original").string() << "\n"
              << "manifest_sha256=" << m.manifest_sha256 << "\n";
    return kOk;
}

int cmd_scan(const fs::path& input, const fs::path& out, const ScanOptions& opts, const std::string& format) {
    const ScanSummary s = scan_directory(input, out, opts);
    if (format == "csv") {
        std::cout << report_csv_header() << "\n";
        for (const auto& r : s.reports) std::cout << report_csv_row(r) << "\n";
    } else {
        for (const auto& r : s.reports)
            std::cout << (r.final_verdict == FinalVerdict::stego_detected ? "stego_detected " : "clean          ")
                      << r.file << "\n";
        std::cout << s.reports.size() << " scanned, " << s.failures.size() << " skipped\n";
    }
    if (s.reports.empty() && !s.failures.empty()) return kError;
    return kOk;
}

int cmd_extract(const fs::path& scan_out, const std::string& wordlist_path, bool force, std::size_t budget,
                const std::string& format) {
    std::optional<Wordlist> words;
    if (!wordlist_path.empty()) words = Wordlist::load(wordlist_path);
    ExtractOptions opts;
    opts.wordlist = words ? &*words : nullptr;
    opts.force = force;
    opts.budget = budget;
    const ExtractSummary s = extract_directory(scan_out, opts, "original_copy", log_line);
    if (format == "csv") {
        std::cout << extraction_log_header() << "\n";
        for (const auto& a : s.artifacts)
            std::cout << csv::join({a.source_file, std::string(plane_name(a.plane)), std::to_string(a.carve_offset),
                                    a.type_id, std::to_string(a.length), a.sha256, a.decrypted ? "true" : "false",
                                    a.password ? "true" : "false", a.truncated ? "true" : "false", a.note})
                      << "\n";
    } else {
        for (const auto& a : s.artifacts)
            std::cout << a.output_path.string() << " (" << a.type_id << ", " << a.length << " bytes"
                      << (a.decrypted ? ", decrypted" : "") << ")\n";
        std::cout << s.artifacts.size() << " artifacts\n";
    }
    return kOk;
}

int cmd_bruteforce(const fs::path& zip, const std::string& wordlist_path, std::size_t budget, const std::string& out) {
    const Bytes bytes = read_file(zip);
    try {
        const BruteForceResult r = zip_brute_force(bytes, Wordlist::load(wordlist_path), budget);
        std::cout << "password: " << r.password << " (attempt " << r.attempts << ")\n";
        if (!out.empty()) {
            if (path_within(out, zip.parent_path()))
                throw Error(Errc::invalid_argument, "output must not lie inside the archive's directory");
            for (const auto& m : r.members) {
                const fs::path target = fs::path(out) / fs::path(m.name).filename();
                fs::create_directories(target.parent_path());
                write_file(target, m.data);
            }
        }
        return kOk;
    } catch (const Error& e) {
        if (e.code() != Errc::exhausted) throw;
        std::cout << "no password found: " << e.what() << "\n";
        return kFindings;
    }
}

int cmd_eval(const fs::path& manifest, const fs::path& scan_out, const std::string& out) {
    const fs::path eval_out = out.empty() ? scan_out / "eval" : fs::path(out);
    const EvalRun run = evaluate_directory(manifest, scan_out, eval_out);
    for (AudioFormat f : {AudioFormat::wav, AudioFormat::mp3}) {
        const auto& c = run.summary.counts(f);
        std::cout << format_name(f) << ": tp=" << c.true_positives << " fp=" << c.false_positives
                  << " fn=" << c.false_negatives << " tn=" << c.true_negatives
                  << " extracted_exact=" << c.extracted_exact << "\n";
    }
    std::cout << "results in " << run.run_dir.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audio steganalysis toolkit: hash database, corpus generation, scanning, extraction, evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv"}));

    auto* hashdb = app.add_subcommand("hashdb", "Build or check the reference hash database");
    hashdb->require_subcommand(1);
    hashdb->fallthrough();
    std::string db, dir, digest = "sha256";
    auto* build = hashdb->add_subcommand("build", "Hash every file of a directory into the database");
    build->add_option("source_dir", dir, "Evidence directory")->required();
    build->add_option("--db", db, "SQLite database path")->required();
    auto* verify = hashdb->add_subcommand("verify", "Compare a directory against the database");
    verify->add_option("working_dir", dir, "Directory to check")->required();
    verify->add_option("--db", db, "SQLite database path")->required();
    verify->add_option("--digest", digest, "Digest to compare")->check(CLI::IsMember({"sha256", "md5"}));
    auto* filter = hashdb->add_subcommand("filter", "Split a directory into known and unknown files");
    filter->add_option("dir", dir, "Directory to classify")->required();
    filter->add_option("--db", db, "Known-file database")->required();

    auto* gen = app.add_subcommand("gen-corpus", "Generate a ground-truth corpus");
    std::string out, config_file;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    bool full_scale = false;
    gen->add_option("--out", out, "Output directory")->required();
    gen->add_option("--config", config_file, "key=value configuration file");
    gen->add_option("--set", sets, "Configuration override key=value");
    gen->add_option("--seed", seed, "Random seed");
    gen->add_flag("--full-scale", full_scale, "320 files, 10-1600 s");

    auto* scan = app.add_subcommand("scan", "Run the detection pipeline over a directory");
    std::string input, reference, signatures;
    std::vector<std::string> thresholds;
    scan->add_option("input_dir", input, "Directory of audio files")->required();
    scan->add_option("--out", out, "Output directory")->required();
    scan->add_option("--db", db, "Reference hash database");
    scan->add_option("--reference", reference, "Directory of same-named clean reference audio");
    scan->add_option("--signatures", signatures, "Extra signature table (type<TAB>hex per line)");
    scan->add_option("--threshold", thresholds, "Threshold override <stage>=<value> or <stage>.<key>=<value>");

    auto* extract = app.add_subcommand("extract", "Carve hidden payloads out of positive scan results");
    std::string wordlist;
    bool force = false;
    std::size_t budget = std::numeric_limits<std::size_t>::max();
    extract->add_option("scan_out", dir, "Scan output directory")->required();
    extract->add_option("--wordlist", wordlist, "Wordlist for encrypted archives");
    extract->add_option("--budget", budget, "Maximum password attempts per archive");
    extract->add_flag("--force", force, "Extract from clean reports too");

    auto* brute = app.add_subcommand("bruteforce", "Dictionary attack on a ZipCrypto archive");
    std::string zip;
    brute->add_option("zip", zip, "Archive")->required();
    brute->add_option("--wordlist", wordlist, "Wordlist")->required();
    brute->add_option("--budget", budget, "Maximum attempts");
    brute->add_option("--out", out, "Write decrypted members here");

    auto* eval = app.add_subcommand("eval", "Score scan results against a corpus manifest");
    std::string manifest;
    eval->add_option("--manifest", manifest, "manifest.csv")->required();
    eval->add_option("--scan-out", dir, "Scan output directory")->required();
    eval->add_option("--out", out, "Evaluation output directory (default <scan-out>/eval)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kError;
    }

    try {
        if (build->parsed()) return cmd_hashdb_build(dir, db);
        if (verify->parsed()) return cmd_hashdb_verify(dir, db, digest, format);
        if (filter->parsed()) return cmd_hashdb_filter(dir, db, format);
        if (gen->parsed()) return cmd_gen_corpus(out, config_file, sets, seed, full_scale);
        if (scan->parsed()) {
            ScanOptions opts;
            if (!db.empty()) opts.db = db;
            if (!reference.empty()) opts.reference_dir = reference;
            if (!signatures.empty()) opts.signature_file = signatures;
            for (const auto& t : thresholds) opts.config.apply_override(t);
            opts.log = log_line;
            return cmd_scan(input, out, opts, format);
        }
        if (extract->parsed()) return cmd_extract(dir, wordlist, force, budget, format);
        if (brute->parsed()) return cmd_bruteforce(zip, wordlist, budget, out);
        if (eval->parsed()) return cmd_eval(manifest, dir, out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
