#pragma once

#include "stegscan/stage.hpp"
#include "stegscan/wav.hpp"

namespace stegscan {

struct FcaConfig {
    double snr_low_db = 40.0;   // at or below: score 1
    double snr_high_db = 90.0;  // at or above: score 0
    Thresholds thresholds{};
};

/// SNR of suspect against reference in dB; +inf when identical.
double snr_db(const PcmAudio& reference, const PcmAudio& suspect);

double fca_score_from_snr(double snr, const FcaConfig& cfg = {});

StageResult fca_quality(const PcmAudio& suspect, const PcmAudio& reference, const FcaConfig& cfg = {});

}  // namespace stegscan
