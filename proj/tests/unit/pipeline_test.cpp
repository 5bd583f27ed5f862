#include <doctest.h>

#include <random>

#include "../support/check_errc.hpp"
#include "../support/temp_dir.hpp"
#include "stegscan/corpus.hpp"
#include "stegscan/pipeline.hpp"
#include "stegscan/stego.hpp"
#include "stegscan/zip.hpp"

using namespace stegscan;
namespace fs = std::filesystem;

namespace {

StageResult result(Stage s, Verdict v, double score = 0.0) {
    StageResult r;
    r.stage = s;
    r.verdict = v;
    if (v != Verdict::not_run) r.score = score;
    return r;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

// Stored (incompressible) member sized to fill the carrier's LSB plane.
Bytes zip_filling(std::size_t capacity_bytes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Bytes probe = write_zip({{"fill.bin", Bytes(1, 0), false}});
    return write_zip({{"fill.bin", random_bytes(rng, capacity_bytes - probe.size() + 1), false}});
}

}  // namespace

TEST_CASE("verdict rule truth table") {
    const auto run = [](Verdict saf, Verdict spectro, Verdict fsa, bool hash) {
        return decide_verdict({result(Stage::SAF, saf, 1), result(Stage::SPECTRO, spectro, 1),
                               result(Stage::FSA, fsa, 1)},
                              hash) == FinalVerdict::stego_detected;
    };
    CHECK(run(Verdict::clean, Verdict::clean, Verdict::positive, false));
    CHECK_FALSE(run(Verdict::clean, Verdict::clean, Verdict::suspicious, false));
    CHECK(run(Verdict::positive, Verdict::suspicious, Verdict::clean, false));
    CHECK(run(Verdict::positive, Verdict::not_run, Verdict::clean, false));
    CHECK_FALSE(run(Verdict::positive, Verdict::clean, Verdict::clean, false));
    CHECK(run(Verdict::positive, Verdict::clean, Verdict::clean, true));
    CHECK_FALSE(run(Verdict::suspicious, Verdict::clean, Verdict::clean, true));
    CHECK_FALSE(run(Verdict::not_run, Verdict::not_run, Verdict::clean, true));
}

TEST_CASE("clean synthesized WAV: every run stage clean") {
    TempDir t("pipe");
    CorpusConfig cfg;
    for (auto kind : {CarrierKind::sine_tone, CarrierKind::swept_tone, CarrierKind::shaped_noise}) {
        CAPTURE(carrier_kind_name(kind));
        const fs::path file = t / (std::string(carrier_kind_name(kind)) + ".wav");
        write_file(file, encode_wav(synthesize_carrier(kind, 10, cfg)));
        const DetectionReport r = run_pipeline(file);
        CHECK(r.final_verdict == FinalVerdict::clean);
        for (const auto& s : r.stages)
            if (s.verdict != Verdict::not_run) CHECK(s.verdict == Verdict::clean);
        CHECK(r.stage(Stage::SAF).verdict == Verdict::clean);
        CHECK(r.stage(Stage::SPECTRO).verdict == Verdict::clean);
        CHECK(r.stage(Stage::HASH).verdict == Verdict::not_run);
        CHECK(r.stage(Stage::FCA).verdict == Verdict::not_run);
    }
}

TEST_CASE("full-capacity LSB zip: FSA positive on the LSB plane at offset 0") {
    TempDir t("pipe");
    const PcmAudio carrier = synthesize_carrier(CarrierKind::sine_tone, 5, CorpusConfig{});
    const Bytes zip = zip_filling(capacity_bits(carrier, {}) / 8, 3);
    const PcmAudio stego = embed_wav_lsb(carrier, {zip, PayloadType::zip, EmbedMode::raw}, {});
    write_file(t / "s.wav", encode_wav(stego));
    const DetectionReport r = run_pipeline(t / "s.wav");
    CHECK(r.final_verdict == FinalVerdict::stego_detected);
    CHECK(r.stage(Stage::FSA).verdict == Verdict::positive);
    CHECK(r.stage(Stage::SAF).verdict == Verdict::positive);
    // SAF positive, so the spectrogram stage is skipped
    CHECK(r.stage(Stage::SPECTRO).verdict == Verdict::not_run);
    bool found = false;
    for (const auto& h : r.signature_hits)
        found = found || (h.plane == SourcePlane::lsb_plane && h.offset == 0 && h.type_id == "zip" && h.validated);
    CHECK(found);
    CHECK(r.confidence == doctest::Approx(1.0));
}

TEST_CASE("MP3 trailing payload: SAF not run, FSA positive on trailing") {
    TempDir t("pipe");
    const Bytes mp3 = synthesize_mp3_carrier(10, CorpusConfig{});
    const Bytes zip = write_zip({{"notes.txt", to_bytes("rendezvous"), true}});
    write_file(t / "s.mp3", embed_mp3_meta(parse_mp3(mp3), {zip, PayloadType::zip, EmbedMode::raw},
                                           Mp3Location::trailing_append));
    const DetectionReport r = run_pipeline(t / "s.mp3");
    CHECK(r.format == AudioFormat::mp3);
    CHECK(r.stage(Stage::SAF).verdict == Verdict::not_run);
    CHECK(r.stage(Stage::FSA).verdict == Verdict::positive);
    REQUIRE_FALSE(r.signature_hits.empty());
    CHECK(r.signature_hits[0].plane == SourcePlane::trailing);
    CHECK(r.final_verdict == FinalVerdict::stego_detected);

    write_file(t / "c.mp3", mp3);
    const DetectionReport c = run_pipeline(t / "c.mp3");
    CHECK(c.final_verdict == FinalVerdict::clean);
    CHECK(c.signature_hits.empty());
}

TEST_CASE("hash stage, FCA with a reference, and report round trip") {
    TempDir t("pipe");
    fs::create_directories(t / "orig");
    fs::create_directories(t / "work");
    const PcmAudio carrier = synthesize_carrier(CarrierKind::shaped_noise, 3, CorpusConfig{});
    write_file(t / "orig" / "a.wav", encode_wav(carrier));
    const HashDb db = build_db(t / "orig", t / "db.sqlite");

    PcmAudio touched = carrier;
    touched.samples[100] += 2;
    write_file(t / "work" / "a.wav", encode_wav(touched));
    PipelineInputs in;
    in.reference_db = &db;
    in.reference_audio = t / "orig" / "a.wav";
    const DetectionReport r = run_pipeline(t / "work" / "a.wav", in);
    CHECK(r.hash_mismatch);
    CHECK(r.stage(Stage::HASH).verdict == Verdict::positive);
    CHECK(r.stage(Stage::FCA).verdict == Verdict::clean);
    CHECK(r.final_verdict == FinalVerdict::clean);  // a digest change alone is not stego
    CHECK(r.confidence == doctest::Approx(1.0));

    const DetectionReport back = report_from_json(report_to_json(r));
    CHECK(report_text(back) == report_text(r));

    write_file(t / "work" / "other.wav", encode_wav(carrier));
    const DetectionReport o = run_pipeline(t / "work" / "other.wav", in);
    CHECK(o.stage(Stage::HASH).verdict == Verdict::not_run);
}

TEST_CASE("reports are deterministic apart from the scan time") {
    TempDir t("pipe");
    write_file(t / "x.wav", encode_wav(synthesize_carrier(CarrierKind::swept_tone, 4, CorpusConfig{})));
    PipelineInputs a, b;
    a.scan_time = 100;
    b.scan_time = 200;
    DetectionReport ra = run_pipeline(t / "x.wav", a), rb = run_pipeline(t / "x.wav", b);
    CHECK(ra.scanned_at != rb.scanned_at);
    rb.scanned_at = ra.scanned_at;
    CHECK(report_text(ra) == report_text(rb));
}

TEST_CASE("threshold overrides") {
    PipelineConfig cfg;
    cfg.apply_override("saf=0.7");
    cfg.apply_override("FCA.snr_low=30");
    cfg.apply_override("saf.min_pairs=1");
    CHECK(cfg.saf.thresholds.positive == 0.7);
    CHECK(cfg.fca.snr_low_db == 30);
    CHECK(cfg.saf.min_pair_count == 1);
    CHECK(cfg.to_json()["saf"]["positive"] == 0.7);
    CHECK_ERRC(cfg.apply_override("bogus=1"), Errc::invalid_argument);
    CHECK_ERRC(cfg.apply_override("saf"), Errc::invalid_argument);
    CHECK_ERRC(cfg.apply_override("saf=abc"), Errc::invalid_argument);
}

TEST_CASE("garbage input is a malformed container") {
    TempDir t("pipe");
    write_file(t / "junk.wav", Bytes(5000, 0x42));
    CHECK_ERRC(run_pipeline(t / "junk.wav"), Errc::malformed_container);
}
