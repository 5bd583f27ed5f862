#include <doctest.h>

#include <algorithm>
#include <random>

#include "../support/check_errc.hpp"
#include "../support/temp_dir.hpp"
#include "stegscan/evaluation.hpp"

using namespace stegscan;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    CorpusManifest manifest;
    std::vector<DetectionReport> reports;
    std::vector<ExtractionLogRow> artifacts;

    void add(AudioFormat fmt, double duration, bool stego, bool flagged, bool exact = false) {
        ManifestEntry e;
        e.filename = std::string(format_name(fmt)) + "_" + std::to_string(manifest.entries.size());
        e.format = fmt;
        e.duration = duration;
        e.is_stego = stego;
        if (stego) e.payload_sha256 = std::string(64, 'a' + static_cast<char>(manifest.entries.size() % 6));
        manifest.entries.push_back(e);

        DetectionReport r;
        r.file = e.filename;
        r.format = fmt;
        r.final_verdict = flagged ? FinalVerdict::stego_detected : FinalVerdict::clean;
        reports.push_back(r);

        if (exact) {
            ExtractionLogRow a;
            a.source = e.filename;
            a.sha256 = e.payload_sha256;
            artifacts.push_back(a);
        }
    }

    EvalSummary run() const { return evaluate(manifest, reports, artifacts); }
};

std::string slurp(const fs::path& p) {
    const Bytes b = read_file(p);
    return std::string(b.begin(), b.end());
}

}  // namespace

TEST_CASE("all stego found, no clean flagged") {
    Fixture f;
    for (int i = 0; i < 4; ++i) f.add(AudioFormat::wav, 10 + 10 * i, true, true, true);
    f.add(AudioFormat::wav, 50, false, false);
    const auto c = f.run().counts(AudioFormat::wav);
    CHECK(c.true_positives == 4);
    CHECK(c.false_negatives == 0);
    CHECK(c.false_positives == 0);
    CHECK(c.true_negatives == 1);
    CHECK(c.extracted_exact == 4);
    CHECK(c.detected == 4);
}

TEST_CASE("one clean file flagged moves TN to FP") {
    Fixture f;
    f.add(AudioFormat::mp3, 10, false, false);
    f.add(AudioFormat::mp3, 20, false, false);
    const auto before = f.run().counts(AudioFormat::mp3);
    f.reports[1].final_verdict = FinalVerdict::stego_detected;
    const auto after = f.run().counts(AudioFormat::mp3);
    CHECK(before.true_negatives == 2);
    CHECK(after.false_positives == 1);
    CHECK(after.true_negatives == 1);
}

TEST_CASE("extracted_exact needs a matching digest on a detected file") {
    Fixture f;
    f.add(AudioFormat::wav, 10, true, true, false);
    f.artifacts.push_back({f.manifest.entries[0].filename, "lsb_plane", 0, "zip", 10, std::string(64, 'f')});
    f.add(AudioFormat::wav, 20, true, false, true);  // digest matches but the file was missed
    const auto c = f.run().counts(AudioFormat::wav);
    CHECK(c.extracted_exact == 0);
    CHECK(c.true_positives == 1);
}

TEST_CASE("MP3 misses concentrated in long buckets: fn_rate rises") {
    Fixture f;
    for (double d : {10.0, 30.0, 60.0, 90.0, 120.0, 140.0, 160.0, 190.0}) f.add(AudioFormat::mp3, d, true, d < 130);
    const EvalSummary s = f.run();
    std::vector<double> rates;
    for (const auto& b : s.buckets) {
        REQUIRE(b.fn_rate);
        rates.push_back(*b.fn_rate);
    }
    REQUIRE(rates.size() == 4);
    CHECK(rates[0] == 0.0);
    CHECK(rates[1] == 0.0);
    CHECK(rates[2] == doctest::Approx(0.5));
    CHECK(rates[3] == 1.0);
    CHECK(std::is_sorted(rates.begin(), rates.end()));
    CHECK(rates.back() > rates.front());
}

TEST_CASE("property: accounting identities and permutation invariance") {
    std::mt19937_64 rng(101);
    for (int iter = 0; iter < 100; ++iter) {
        Fixture f;
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            const bool stego = rng() % 4 != 0;
            const bool flagged = rng() % 5 != 0;
            f.add(rng() % 2 ? AudioFormat::wav : AudioFormat::mp3, 10.0 * (1 + rng() % 40), stego, flagged,
                  stego && flagged && rng() % 2);
        }
        const EvalSummary s = f.run();
        for (AudioFormat fmt : {AudioFormat::wav, AudioFormat::mp3}) {
            const auto& c = s.counts(fmt);
            std::size_t files = 0, stego = 0;
            for (const auto& e : f.manifest.entries)
                if (e.format == fmt) ++files, stego += e.is_stego;
            CHECK(c.true_positives + c.false_positives + c.false_negatives + c.true_negatives == files);
            CHECK(c.true_positives + c.false_negatives == stego);
            CHECK(c.extracted_exact <= c.true_positives);
            CHECK(c.detected == c.true_positives + c.false_positives);
        }
        Fixture g = f;
        std::shuffle(g.reports.begin(), g.reports.end(), rng);
        std::shuffle(g.artifacts.begin(), g.artifacts.end(), rng);
        CHECK(g.run().same_counts(s));
    }
}

TEST_CASE("missing, duplicate and stray reports") {
    Fixture f;
    f.add(AudioFormat::wav, 10, true, true);
    f.add(AudioFormat::wav, 20, true, true);
    Fixture missing = f;
    missing.reports.pop_back();
    CHECK_ERRC(missing.run(), Errc::manifest_report_mismatch);
    Fixture dup = f;
    dup.reports.push_back(dup.reports[0]);
    CHECK_ERRC(dup.run(), Errc::manifest_report_mismatch);
    Fixture stray = f;
    stray.reports[0].file = "elsewhere.wav";
    CHECK_ERRC(stray.run(), Errc::manifest_report_mismatch);
}

TEST_CASE("CSV layout, headers and round trip") {
    TempDir t("eval");
    Fixture f;
    for (int i = 0; i < 6; ++i) f.add(AudioFormat::wav, 25.0 * (i + 1), i != 2, i % 3 != 1, i == 0);
    for (int i = 0; i < 6; ++i) f.add(AudioFormat::mp3, 25.0 * (i + 1), i != 4, i != 5);
    const EvalSummary s = f.run();
    emit_csv(s, t.path());
    emit_plot_data(s, t.path());

    const std::string wav = slurp(t / "detections_wav.csv");
    CHECK(wav.rfind("duration_s,detected,total,extracted_exact\n", 0) == 0);
    CHECK(std::count(wav.begin(), wav.end(), '\n') == 1 + 6);
    const std::string fn = slurp(t / "fn_distribution.csv");
    CHECK(fn.rfind("format,bucket_start,fn_rate\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(fn.begin(), fn.end(), '\n')) == 1 + s.buckets.size());
    CHECK(slurp(t / "summary.csv").rfind("format,tp,fp,fn,tn,detected,extracted_exact\n", 0) == 0);
    for (const char* dat : {"detections_wav.dat", "detections_mp3.dat", "fn_distribution.dat", "summary.dat"})
        CHECK(fs::exists(t / dat));

    const EvalSummary back = read_eval_csv(t.path());
    CHECK(back.same_counts(s));
}

TEST_CASE("empty summary writes headers only") {
    TempDir t("eval");
    emit_csv(EvalSummary{}, t.path());
    CHECK(slurp(t / "detections_wav.csv") == "duration_s,detected,total,extracted_exact\n");
    CHECK(slurp(t / "detections_mp3.csv") == "duration_s,detected,total,extracted_exact\n");
    CHECK(slurp(t / "fn_distribution.csv") == "format,bucket_start,fn_rate\n");
}

TEST_CASE("run directory names follow manifest and thresholds") {
    const nlohmann::json a = {{"saf", 0.5}}, b = {{"saf", 0.6}};
    const std::string n = run_dir_name("abc", a);
    CHECK(n.size() == 4 + 12);
    CHECK(n.rfind("run_", 0) == 0);
    CHECK(run_dir_name("abc", a) == n);
    CHECK(run_dir_name("abd", a) != n);
    CHECK(run_dir_name("abc", b) != n);
}
