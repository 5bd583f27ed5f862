#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stegscan/stage.hpp"
#include "stegscan/wav.hpp"

namespace stegscan {

/// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

enum class WindowFunction { hann, rectangular };

struct Spectrogram {
    std::size_t window_size = 1024;
    std::size_t hop = 512;
    WindowFunction window = WindowFunction::hann;
    std::size_t frames = 0;
    std::size_t bins = 0;            // window_size / 2 + 1
    std::vector<double> magnitudes;  // frames x bins, row-major

    double at(std::size_t frame, std::size_t bin) const { return magnitudes[frame * bins + bin]; }
    std::span<const double> frame(std::size_t f) const {
        return std::span<const double>(magnitudes).subspan(f * bins, bins);
    }
};

/// Short-time transform of a mono signal. Multi-channel audio is averaged to
/// mono first; sample values are scaled to full scale = 1.0.
Spectrogram compute_spectrogram(std::span<const double> signal, std::size_t window_size = 1024,
                                std::size_t hop = 512, WindowFunction window = WindowFunction::hann);
Spectrogram compute_spectrogram(const PcmAudio& audio, std::size_t window_size = 1024, std::size_t hop = 512,
                                WindowFunction window = WindowFunction::hann);

std::vector<double> to_mono(const PcmAudio& audio);

/// Energy of one frame recovered from its one-sided magnitudes (Parseval).
double frame_spectral_energy(const Spectrogram& spec, std::size_t frame);

struct SpectroConfig {
    std::size_t window_size = 1024;
    std::size_t hop = 512;
    double log_diff_scale = 1.0;  // mean |ln-magnitude difference| that maps to score 1
    double flatness_band_lo = 0.0;
    double flatness_band_hi = 0.9;
    Thresholds thresholds{};
};

/// First bin of the top frequency quartile.
std::size_t top_quartile_start(std::size_t bins);

/// Mean magnitude of the top-quartile bins over all frames.
double top_quartile_mean_magnitude(const Spectrogram& spec);

/// Mean per-frame spectral flatness (geometric / arithmetic mean of power) of
/// the top-quartile bins; frames with no energy in that band are skipped.
std::optional<double> top_quartile_flatness(const Spectrogram& spec);

StageResult spectro_anomaly(const Spectrogram& spec, const Spectrogram* baseline, const SpectroConfig& cfg = {});

}  // namespace stegscan
