#include "stegscan/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stegscan/error.hpp"

namespace stegscan {
namespace {

bool is_power_of_two(std::size_t n) { return n && (n & (n - 1)) == 0; }

constexpr double kLogEpsilon = 1e-12;

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw Error(Errc::invalid_argument, "FFT size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> step(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= step;
            }
        }
    }
}

std::vector<double> to_mono(const PcmAudio& audio) {
    const double scale = 1.0 / static_cast<double>(std::int64_t{1} << (audio.bit_depth - 1));
    const std::size_t frames = audio.frame_count();
    std::vector<double> mono(frames, 0.0);
    for (std::size_t f = 0; f < frames; ++f) {
        double sum = 0.0;
        for (std::size_t c = 0; c < audio.channels; ++c) sum += audio.samples[f * audio.channels + c];
        mono[f] = sum * scale / audio.channels;
    }
    return mono;
}

Spectrogram compute_spectrogram(std::span<const double> signal, std::size_t window_size, std::size_t hop,
                                WindowFunction window) {
    if (!is_power_of_two(window_size)) throw Error(Errc::invalid_argument, "window size must be a power of two");
    if (hop == 0) throw Error(Errc::invalid_argument, "hop must be positive");
    if (signal.size() < window_size)
        throw Error(Errc::too_short, std::to_string(signal.size()) + " samples, window is " +
                                         std::to_string(window_size));

    std::vector<double> taps(window_size, 1.0);
    if (window == WindowFunction::hann)
        for (std::size_t i = 0; i < window_size; ++i)
            taps[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                           static_cast<double>(window_size));

    Spectrogram spec;
    spec.window_size = window_size;
    spec.hop = hop;
    spec.window = window;
    spec.frames = (signal.size() - window_size) / hop + 1;
    spec.bins = window_size / 2 + 1;
    spec.magnitudes.resize(spec.frames * spec.bins);

    std::vector<std::complex<double>> buf(window_size);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        const std::size_t start = f * hop;
        for (std::size_t i = 0; i < window_size; ++i) buf[i] = {signal[start + i] * taps[i], 0.0};
        fft_inplace(buf);
        for (std::size_t k = 0; k < spec.bins; ++k) spec.magnitudes[f * spec.bins + k] = std::abs(buf[k]);
    }
    return spec;
}

Spectrogram compute_spectrogram(const PcmAudio& audio, std::size_t window_size, std::size_t hop,
                                WindowFunction window) {
    const auto mono = to_mono(audio);
    return compute_spectrogram(mono, window_size, hop, window);
}

double frame_spectral_energy(const Spectrogram& spec, std::size_t frame) {
    const auto m = spec.frame(frame);
    double sum = 0.0;
    for (std::size_t k = 0; k < spec.bins; ++k) {
        const double p = m[k] * m[k];
        sum += (k == 0 || k == spec.bins - 1) ? p : 2.0 * p;
    }
    return sum / static_cast<double>(spec.window_size);
}

std::size_t top_quartile_start(std::size_t bins) {
    return static_cast<std::size_t>(std::ceil(0.75 * static_cast<double>(bins - 1)));
}

double top_quartile_mean_magnitude(const Spectrogram& spec) {
    const std::size_t lo = top_quartile_start(spec.bins);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t f = 0; f < spec.frames; ++f)
        for (std::size_t k = lo; k < spec.bins; ++k, ++count) sum += spec.at(f, k);
    return count ? sum / static_cast<double>(count) : 0.0;
}

std::optional<double> top_quartile_flatness(const Spectrogram& spec) {
    const std::size_t lo = top_quartile_start(spec.bins);
    const double n = static_cast<double>(spec.bins - lo);
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t f = 0; f < spec.frames; ++f) {
        double log_sum = 0.0, sum = 0.0;
        for (std::size_t k = lo; k < spec.bins; ++k) {
            const double p = spec.at(f, k) * spec.at(f, k);
            sum += p;
            log_sum += std::log(p + kLogEpsilon);
        }
        if (sum <= kLogEpsilon * n) continue;
        total += std::exp(log_sum / n) / (sum / n);
        ++used;
    }
    if (used == 0) return std::nullopt;
    return total / static_cast<double>(used);
}

StageResult spectro_anomaly(const Spectrogram& spec, const Spectrogram* baseline, const SpectroConfig& cfg) {
    StageResult r;
    r.stage = Stage::SPECTRO;
    const std::size_t lo = top_quartile_start(spec.bins);

    if (baseline) {
        if (baseline->window_size != spec.window_size || baseline->hop != spec.hop ||
            baseline->frames != spec.frames || baseline->bins != spec.bins)
            throw Error(Errc::shape_mismatch, "baseline spectrogram dimensions differ");
        double diff = 0.0;
        std::size_t count = 0;
        for (std::size_t f = 0; f < spec.frames; ++f)
            for (std::size_t k = lo; k < spec.bins; ++k, ++count)
                diff += std::abs(std::log(spec.at(f, k) + kLogEpsilon) - std::log(baseline->at(f, k) + kLogEpsilon));
        const double mean = count ? diff / static_cast<double>(count) : 0.0;
        r.score = std::clamp(mean / cfg.log_diff_scale, 0.0, 1.0);
        r.detail = {{"mode", "baseline"}, {"mean_abs_log_diff", mean}};
    } else {
        const auto flatness = top_quartile_flatness(spec);
        double deviation = 0.0;
        if (flatness) {
            if (*flatness > cfg.flatness_band_hi)
                deviation = (*flatness - cfg.flatness_band_hi) / std::max(1e-12, 1.0 - cfg.flatness_band_hi);
            else if (*flatness < cfg.flatness_band_lo)
                deviation = (cfg.flatness_band_lo - *flatness) / std::max(1e-12, cfg.flatness_band_lo);
        }
        r.score = std::clamp(deviation, 0.0, 1.0);
        r.detail = {{"mode", "calibration_band"},
                    {"top_quartile_flatness", flatness ? nlohmann::json(*flatness) : nlohmann::json(nullptr)},
                    {"band", {cfg.flatness_band_lo, cfg.flatness_band_hi}}};
    }
    r.detail["top_quartile_mean_magnitude"] = top_quartile_mean_magnitude(spec);
    r.detail["frames"] = spec.frames;
    r.verdict = cfg.thresholds.classify(*r.score);
    return r;
}

}  // namespace stegscan
