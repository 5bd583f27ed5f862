#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/check_errc.hpp"
#include "../support/oracles.hpp"
#include "stegscan/fca.hpp"
#include "stegscan/mac.hpp"
#include "stegscan/saf.hpp"
#include "stegscan/signatures.hpp"
#include "stegscan/spectrogram.hpp"
#include "stegscan/stego.hpp"

using namespace stegscan;

namespace {

PcmAudio sine(double freq, double amplitude, std::size_t n, bool even_grid = false) {
    PcmAudio a;
    a.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto v = static_cast<std::int32_t>(std::lround(amplitude * std::sin(2 * M_PI * freq * i / 44100.0)));
        if (even_grid) v &= ~1;
        a.samples[i] = v;
    }
    return a;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

PcmAudio fill(const PcmAudio& carrier, int bps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    EmbedPlan plan;
    plan.bits_per_sample = bps;
    const PayloadSpec p{random_bytes(rng, capacity_bits(carrier, plan) / 8), PayloadType::unknown, EmbedMode::raw};
    return embed_wav_lsb(carrier, p, plan);
}

}  // namespace

TEST_CASE("SAF: chi-square matches the histogram oracle") {
    std::mt19937_64 rng(51);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = 1 + rng() % 4096;
        const std::int32_t spread = 1 + static_cast<std::int32_t>(rng() % 400);
        std::vector<std::int32_t> block(n);
        for (auto& v : block) v = static_cast<std::int32_t>(rng() % (2 * spread)) - spread;
        for (long min_pairs : {1L, 2L}) {
            const auto mine = pair_chi_square(block, static_cast<std::size_t>(min_pairs));
            const auto ref = oracle::histogram_chi_square(block, min_pairs);
            CHECK(mine.dof == static_cast<std::size_t>(ref.dof));
            CHECK(mine.statistic == doctest::Approx(ref.statistic).epsilon(1e-9));
            const double tail = oracle::chi_square_upper_tail(ref.statistic, ref.dof);
            CHECK(mine.p_value == doctest::Approx(tail).epsilon(1e-7));
        }
    }
}

TEST_CASE("SAF: constant LSB is clean") {
    PcmAudio a = sine(440, 12000, 44100, true);
    const auto chi = pair_chi_square(a.samples);
    CHECK(chi.p_value < 1e-6);
    CHECK(lsb_entropy(a.samples) == 0.0);
    const StageResult r = saf_statistics(a);
    CHECK(r.verdict == Verdict::clean);
    CHECK(*r.score == 0.0);
}

TEST_CASE("SAF: full 1-bit embedding looks embedded in >= 90% of windows") {
    const PcmAudio carrier = sine(440, 12000, 44100 * 3, true);
    const PcmAudio stego = fill(carrier, 1, 52);
    const SafConfig cfg;
    const std::size_t windows = stego.samples.size() / cfg.window;
    std::size_t embedded = 0;
    for (std::size_t w = 0; w < windows; ++w) {
        std::vector<std::int32_t> block(stego.samples.begin() + static_cast<std::ptrdiff_t>(w * cfg.window),
                                        stego.samples.begin() + static_cast<std::ptrdiff_t>((w + 1) * cfg.window));
        const auto ref = oracle::histogram_chi_square(block, 2);
        embedded += oracle::chi_square_upper_tail(ref.statistic, ref.dof) > 0.95;
    }
    CHECK(embedded >= (9 * windows + 9) / 10);
    const StageResult r = saf_statistics(stego, cfg);
    CHECK(r.verdict == Verdict::positive);
    CHECK(r.detail["embedded_like_windows"].get<std::size_t>() == embedded);
}

TEST_CASE("SAF: bits per sample never lowers the score") {
    const PcmAudio carrier = sine(1000, 9000, 44100 * 2, true);
    const double s1 = *saf_statistics(fill(carrier, 1, 7)).score;
    const double s2 = *saf_statistics(fill(carrier, 2, 7)).score;
    CHECK(s2 >= s1);
}

TEST_CASE("SAF: too short and bad window") {
    CHECK_ERRC(saf_statistics(sine(440, 1000, 100)), Errc::too_short);
    SafConfig cfg;
    cfg.window = 128;
    CHECK_ERRC(saf_statistics(sine(440, 1000, 10000), cfg), Errc::invalid_argument);
}

TEST_CASE("SAF: entropy band deviation") {
    const SafConfig cfg;
    CHECK(entropy_band_deviation(0.5, cfg) == 0.0);
    CHECK(entropy_band_deviation(0.9, cfg) == 0.0);
    CHECK(entropy_band_deviation(0.945, cfg) == doctest::Approx(0.5));
    CHECK(entropy_band_deviation(1.0, cfg) == 1.0);
    const std::vector<std::int32_t> half = {0, 1, 2, 3};
    CHECK(lsb_entropy(half) == doctest::Approx(1.0));
}

TEST_CASE("spectrogram: frame count and 440 Hz peak bin") {
    const PcmAudio a = sine(440, 16000, 44100);
    const Spectrogram s = compute_spectrogram(a);
    CHECK(s.bins == 513);
    CHECK(s.frames == (44100 - 1024) / 512 + 1);
    for (std::size_t f = 0; f < s.frames; ++f) {
        const auto m = s.frame(f);
        const auto peak = std::max_element(m.begin(), m.end()) - m.begin();
        CHECK(peak == std::lround(440.0 * 1024 / 44100));
    }
}

TEST_CASE("spectrogram: rectangular window matches the naive DFT and Parseval") {
    std::mt19937_64 rng(61);
    std::normal_distribution<double> g(0, 0.2);
    std::vector<double> signal(4096);
    for (auto& v : signal) v = g(rng);
    const Spectrogram s = compute_spectrogram(signal, 256, 128, WindowFunction::rectangular);
    REQUIRE(s.frames == 31);
    for (std::size_t f = 0; f < s.frames; f += 5) {
        const std::vector<double> frame(signal.begin() + static_cast<std::ptrdiff_t>(f * 128),
                                        signal.begin() + static_cast<std::ptrdiff_t>(f * 128 + 256));
        const auto ref = oracle::dft_magnitudes(frame);
        for (std::size_t k = 0; k < s.bins; ++k) CHECK(s.at(f, k) == doctest::Approx(ref[k]).epsilon(1e-9));
        double energy = 0;
        for (double v : frame) energy += v * v;
        CHECK(frame_spectral_energy(s, f) == doctest::Approx(energy).epsilon(1e-6));
    }
}

TEST_CASE("spectrogram: zeros, shapes, errors") {
    const Spectrogram z = compute_spectrogram(std::vector<double>(4096, 0.0));
    CHECK(std::all_of(z.magnitudes.begin(), z.magnitudes.end(), [](double m) { return m == 0.0; }));
    CHECK_ERRC(compute_spectrogram(std::vector<double>(1000, 0.0)), Errc::too_short);
    CHECK_ERRC(compute_spectrogram(std::vector<double>(4096, 0.0), 1000), Errc::invalid_argument);

    const Spectrogram a = compute_spectrogram(std::vector<double>(8192, 0.1), 1024, 512);
    const Spectrogram b = compute_spectrogram(std::vector<double>(8192, 0.1), 512, 256);
    CHECK_ERRC(spectro_anomaly(a, &b), Errc::shape_mismatch);
}

TEST_CASE("spectrogram: mono averaging") {
    PcmAudio st;
    st.channels = 2;
    st.samples = {100, 300, -200, 0};
    const auto m = to_mono(st);
    REQUIRE(m.size() == 2);
    CHECK(m[0] == doctest::Approx(200.0 / 32768));
    CHECK(m[1] == doctest::Approx(-100.0 / 32768));
}

TEST_CASE("spectro anomaly: identity is clean, embedding moves the top quartile") {
    const PcmAudio carrier = sine(440, 16000, 44100 * 2, true);
    const Spectrogram clean = compute_spectrogram(carrier);
    const StageResult self = spectro_anomaly(clean, &clean);
    CHECK(*self.score == 0.0);
    CHECK(self.verdict == Verdict::clean);

    const Spectrogram stego = compute_spectrogram(fill(carrier, 2, 62));
    const StageResult vs = spectro_anomaly(stego, &clean);
    CHECK(*vs.score > *self.score);
    // LSB noise lifts the high band above the clean tone's leakage floor
    CHECK(top_quartile_mean_magnitude(stego) > top_quartile_mean_magnitude(clean));
}

TEST_CASE("FCA: SNR arithmetic and score mapping") {
    const PcmAudio ref = sine(440, 32767, 44100);
    CHECK(std::isinf(snr_db(ref, ref)));
    const StageResult same = fca_quality(ref, ref);
    CHECK(*same.score == 0.0);
    CHECK(same.verdict == Verdict::clean);

    CHECK(fca_score_from_snr(40.0) == 1.0);
    CHECK(fca_score_from_snr(20.0) == 1.0);
    CHECK(fca_score_from_snr(90.0) == 0.0);
    CHECK(fca_score_from_snr(65.0) == doctest::Approx(0.5));

    PcmAudio shorter = ref;
    shorter.samples.pop_back();
    CHECK_ERRC(fca_quality(shorter, ref), Errc::shape_mismatch);
}

TEST_CASE("FCA: 1-bit embed on a full-scale sine, 2-bit is worse") {
    const PcmAudio ref = sine(440, 32767, 44100 * 2);
    const PcmAudio s1 = fill(ref, 1, 71);
    const PcmAudio s2 = fill(ref, 2, 71);

    // direct computation of the expected value: P = 32767^2 / 2, E[d^2] = 1/2
    const double expected = 10 * std::log10((32767.0 * 32767.0 / 2) / 0.5);
    CHECK(expected == doctest::Approx(90.3).epsilon(0.001));
    const double snr1 = snr_db(ref, s1);
    CHECK(snr1 == doctest::Approx(expected).epsilon(0.002));
    CHECK(fca_quality(s1, ref).verdict == Verdict::clean);

    const double snr2 = snr_db(ref, s2);
    CHECK(snr2 < snr1);
}

TEST_CASE("MAC timestamp rules") {
    const std::int64_t day = 86400, jan1 = 1672531200, now = 1700000000;
    CHECK(mac_anomaly_check({jan1 + day, jan1, jan1 + day}, now).verdict == Verdict::positive);
    CHECK(mac_anomaly_check({jan1, jan1, jan1}, now).verdict == Verdict::clean);
    CHECK(mac_anomaly_check({jan1, jan1 + 3650 * day, jan1 + 3650 * day}, jan1 + 3651 * day).verdict ==
          Verdict::clean);
    CHECK(mac_anomaly_check({jan1, jan1, now + 2}, now).verdict == Verdict::clean);
    CHECK(mac_anomaly_check({jan1, jan1, now + 3}, now).verdict == Verdict::positive);
    CHECK(mac_anomaly_check({jan1, jan1 + day, jan1 - 1}, now).verdict == Verdict::positive);
    const StageResult missing = mac_anomaly_check({std::nullopt, jan1, jan1}, now);
    CHECK(missing.verdict == Verdict::not_run);
    CHECK_FALSE(missing.score);
}

TEST_CASE("FSA: table hits, planes, empty input") {
    Bytes raw(40, 0x00);
    const Bytes pk = {0x50, 0x4B, 0x03, 0x04};
    std::copy(pk.begin(), pk.end(), raw.begin() + 12);
    const auto hits = fsa_scan({{SourcePlane::raw_bytes, raw}});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].offset == 12);
    CHECK(hits[0].type_id == "zip");
    CHECK(hits[0].plane == SourcePlane::raw_bytes);
    CHECK_FALSE(hits[0].validated);  // zero name length

    // 7z start header: magic, version 0.4, CRC over the next 20 bytes
    Bytes sz = {0x37, 0x7A, 0xBC, 0xAF, 0x27, 0x1C, 0x00, 0x04};
    Bytes tail(20, 0);
    tail[0] = 5;
    put_le32(sz, oracle::bitwise_crc32(tail));
    sz.insert(sz.end(), tail.begin(), tail.end());
    const auto h7 = fsa_scan({{SourcePlane::lsb_plane, sz}});
    REQUIRE(h7.size() == 1);
    CHECK(h7[0] == SignatureHit{0, "sevenz", SourcePlane::lsb_plane, true});

    CHECK(fsa_scan({}).empty());
    const StageResult none = fsa_stage({});
    CHECK(none.verdict == Verdict::clean);
    CHECK(fsa_stage(h7).verdict == Verdict::positive);
}

TEST_CASE("FSA: user signature file extends the table") {
    SignatureTable t = SignatureTable::builtin();
    t.load_text("# comment\nmidi\t4D 54 68 64\n");
    const Bytes data = to_bytes("xxMThdyy");
    const auto hits = fsa_scan({{SourcePlane::trailing, data}}, t);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].type_id == "midi");
    CHECK(hits[0].offset == 2);
    CHECK(hits[0].validated);
    CHECK_ERRC(t.load_text("broken line\n"), Errc::invalid_argument);
}

TEST_CASE("FSA property: every hit literally matches its signature") {
    std::mt19937_64 rng(81);
    const SignatureTable table = SignatureTable::builtin();
    for (int iter = 0; iter < 50; ++iter) {
        Bytes data = random_bytes(rng, 2000);
        // plant a few magics
        for (int k = 0; k < 5; ++k) {
            const auto& sig = table.entries()[rng() % table.entries().size()];
            const std::size_t at = rng() % (data.size() - sig.magic.size());
            std::copy(sig.magic.begin(), sig.magic.end(), data.begin() + static_cast<std::ptrdiff_t>(at));
        }
        const auto hits = fsa_scan({{SourcePlane::raw_bytes, data}, {SourcePlane::lsb_plane, data}}, table);
        CHECK(hits.size() >= 10);
        for (std::size_t i = 0; i < hits.size(); ++i) {
            if (i) CHECK(std::tie(hits[i - 1].plane, hits[i - 1].offset) <= std::tie(hits[i].plane, hits[i].offset));
            bool matched = false;
            for (const auto& sig : table.entries())
                if (sig.type_id == hits[i].type_id && hits[i].offset + sig.magic.size() <= data.size() &&
                    std::equal(sig.magic.begin(), sig.magic.end(),
                               data.begin() + static_cast<std::ptrdiff_t>(hits[i].offset)))
                    matched = true;
            CHECK(matched);
        }
    }
}
