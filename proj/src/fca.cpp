#include "stegscan/fca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stegscan/error.hpp"

namespace stegscan {
namespace {

void require_same_shape(const PcmAudio& a, const PcmAudio& b) {
    if (a.sample_rate != b.sample_rate || a.channels != b.channels || a.samples.size() != b.samples.size())
        throw Error(Errc::shape_mismatch, "suspect and reference differ in rate, channels or length");
}

}  // namespace

double snr_db(const PcmAudio& reference, const PcmAudio& suspect) {
    require_same_shape(reference, suspect);
    long double signal = 0.0L, noise = 0.0L;
    for (std::size_t i = 0; i < reference.samples.size(); ++i) {
        const long double r = reference.samples[i];
        const long double d = r - suspect.samples[i];
        signal += r * r;
        noise += d * d;
    }
    if (noise == 0.0L) return std::numeric_limits<double>::infinity();
    if (signal == 0.0L) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(10.0L * std::log10(signal / noise));
}

double fca_score_from_snr(double snr, const FcaConfig& cfg) {
    if (snr >= cfg.snr_high_db) return 0.0;
    if (snr <= cfg.snr_low_db) return 1.0;
    return (cfg.snr_high_db - snr) / (cfg.snr_high_db - cfg.snr_low_db);
}

StageResult fca_quality(const PcmAudio& suspect, const PcmAudio& reference, const FcaConfig& cfg) {
    const double snr = snr_db(reference, suspect);
    StageResult r;
    r.stage = Stage::FCA;
    r.score = fca_score_from_snr(snr, cfg);
    r.verdict = cfg.thresholds.classify(*r.score);
    if (std::isinf(snr))
        r.detail["snr_db"] = snr > 0 ? "inf" : "-inf";
    else
        r.detail["snr_db"] = snr;
    r.detail["identical"] = std::isinf(snr) && snr > 0;
    return r;
}

}  // namespace stegscan
