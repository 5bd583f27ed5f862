#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "stegscan/stage.hpp"
#include "stegscan/wav.hpp"

namespace stegscan {

/// Pair-of-values chi-square over one block of samples. Categories are the
/// value pairs (2k, 2k+1) that occur at least once; the statistic sums
/// (n_2k - e)^2 / e with e the pair mean, and dof is (categories - 1).
/// Pairs holding fewer than `min_pair_count` samples are left out: a pair
/// seen once adds exactly 0.5 whether or not its LSB was overwritten.
/// p_value is the upper tail: near 1 means the pairs are as balanced as
/// sequential LSB replacement makes them.
struct PairChiSquare {
    double statistic = 0.0;
    std::size_t occupied_pairs = 0;
    std::size_t categories = 0;
    std::size_t dof = 0;
    double p_value = 0.0;
};

PairChiSquare pair_chi_square(std::span<const std::int32_t> block, std::size_t min_pair_count = 1);

/// Survival function of the chi-square distribution.
double chi_square_sf(double statistic, std::size_t dof);

/// Binary entropy (bits) of the least significant bit over a block.
double lsb_entropy(std::span<const std::int32_t> block);

struct SafConfig {
    std::size_t window = 4096;
    double p_threshold = 0.95;      // a window with p above this looks embedded
    std::size_t min_pair_count = 2;  // see pair_chi_square
    double chi_weight = 0.7;
    double entropy_weight = 0.3;
    double entropy_band_lo = 0.0;   // clean-reference band for LSB entropy
    double entropy_band_hi = 0.9;
    double entropy_saturation = 0.99;  // full deviation from here up; random LSBs sit above it
    Thresholds thresholds{};
};

/// Deviation of an LSB entropy value from the clean band, scaled to [0, 1].
double entropy_band_deviation(double entropy, const SafConfig& cfg);

StageResult saf_statistics(const PcmAudio& audio, const SafConfig& cfg = {});

}  // namespace stegscan
