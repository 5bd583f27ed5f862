#include "stegscan/saf.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "stegscan/error.hpp"

namespace stegscan {

PairChiSquare pair_chi_square(std::span<const std::int32_t> block, std::size_t min_pair_count) {
    std::vector<std::int32_t> sorted(block.begin(), block.end());
    std::sort(sorted.begin(), sorted.end());

    PairChiSquare r;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const std::int32_t pair = sorted[i] >> 1;  // floor(v / 2), also for negatives
        std::size_t even = 0, odd = 0;
        for (; i < sorted.size() && (sorted[i] >> 1) == pair; ++i) ((sorted[i] & 1) ? odd : even)++;
        ++r.occupied_pairs;
        if (even + odd < min_pair_count) continue;
        const double expected = 0.5 * static_cast<double>(even + odd);
        const double diff = static_cast<double>(even) - expected;
        r.statistic += diff * diff / expected;
        ++r.categories;
    }
    r.dof = r.categories > 0 ? r.categories - 1 : 0;
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

double chi_square_sf(double statistic, std::size_t dof) {
    if (dof == 0) return statistic > 0.0 ? 0.0 : 1.0;
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

double lsb_entropy(std::span<const std::int32_t> block) {
    if (block.empty()) return 0.0;
    const auto ones = std::count_if(block.begin(), block.end(), [](std::int32_t v) { return (v & 1) != 0; });
    const double p = static_cast<double>(ones) / static_cast<double>(block.size());
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double entropy_band_deviation(double entropy, const SafConfig& cfg) {
    if (entropy > cfg.entropy_band_hi) {
        const double span = cfg.entropy_saturation - cfg.entropy_band_hi;
        return span > 0.0 ? std::min(1.0, (entropy - cfg.entropy_band_hi) / span) : 1.0;
    }
    if (entropy < cfg.entropy_band_lo)
        return cfg.entropy_band_lo > 0.0 ? std::min(1.0, (cfg.entropy_band_lo - entropy) / cfg.entropy_band_lo) : 0.0;
    return 0.0;
}

StageResult saf_statistics(const PcmAudio& audio, const SafConfig& cfg) {
    if (cfg.window < 256) throw Error(Errc::invalid_argument, "SAF window must be at least 256 samples");
    if (audio.samples.size() < cfg.window)
        throw Error(Errc::too_short, std::to_string(audio.samples.size()) + " samples, window is " +
                                         std::to_string(cfg.window));

    const std::size_t windows = audio.samples.size() / cfg.window;
    const std::span<const std::int32_t> all(audio.samples);
    std::size_t embedded_like = 0;
    double deviation_sum = 0.0, entropy_sum = 0.0, min_p = 1.0, max_p = 0.0;
    nlohmann::json flagged = nlohmann::json::array();

    for (std::size_t w = 0; w < windows; ++w) {
        const auto block = all.subspan(w * cfg.window, cfg.window);
        const auto chi = pair_chi_square(block, cfg.min_pair_count);
        const double h = lsb_entropy(block);
        entropy_sum += h;
        deviation_sum += entropy_band_deviation(h, cfg);
        min_p = std::min(min_p, chi.p_value);
        max_p = std::max(max_p, chi.p_value);
        if (chi.p_value > cfg.p_threshold) {
            ++embedded_like;
            if (flagged.size() < 64) flagged.push_back(w);
        }
    }

    const double fraction = static_cast<double>(embedded_like) / static_cast<double>(windows);
    const double mean_deviation = deviation_sum / static_cast<double>(windows);
    const double score = std::clamp(cfg.chi_weight * fraction + cfg.entropy_weight * mean_deviation, 0.0, 1.0);

    StageResult r;
    r.stage = Stage::SAF;
    r.score = score;
    r.verdict = cfg.thresholds.classify(score);
    r.detail = {{"window", cfg.window},
                {"windows", windows},
                {"embedded_like_windows", embedded_like},
                {"embedded_like_fraction", fraction},
                {"mean_lsb_entropy", entropy_sum / static_cast<double>(windows)},
                {"mean_entropy_deviation", mean_deviation},
                {"min_p_value", min_p},
                {"max_p_value", max_p},
                {"flagged_windows", flagged}};
    return r;
}

}  // namespace stegscan
