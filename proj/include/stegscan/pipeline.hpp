#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stegscan/fca.hpp"
#include "stegscan/hashdb.hpp"
#include "stegscan/mac.hpp"
#include "stegscan/mp3.hpp"
#include "stegscan/saf.hpp"
#include "stegscan/signatures.hpp"
#include "stegscan/spectrogram.hpp"
#include "stegscan/wav.hpp"

namespace stegscan {

enum class AudioFormat { wav, mp3 };
std::string_view format_name(AudioFormat f);

/// A parsed carrier plus the derived byte planes the signature scan reads.
struct Carrier {
    AudioFormat format = AudioFormat::wav;
    std::optional<WavFile> wav;
    std::optional<PcmAudio> pcm;
    std::optional<Mp3Stream> mp3;
    Bytes lsb1;  // 1 bit per sample, all channels
    Bytes lsb2;  // 2 bits per sample, all channels

    /// RIFF goes to the WAV parser, everything else to the MP3 parser.
    static Carrier load(Bytes bytes);

    ByteView raw() const { return wav ? ByteView(wav->raw_bytes) : ByteView(mp3->raw_bytes); }
    ByteView plane(SourcePlane p) const;
    std::vector<ScanStream> streams() const;
};

struct PipelineConfig {
    SafConfig saf{};
    SpectroConfig spectro{};
    FsaConfig fsa{};
    FcaConfig fca{};

    /// Applies `stage=value` (positive threshold) or `stage.key=value`.
    /// Keys: saf.{suspicious,window,p,entropy_hi,min_pairs}, spectro.{suspicious,flatness_hi,log_scale},
    /// fsa.suspicious, fca.{suspicious,snr_low,snr_high}. Throws invalid_argument.
    void apply_override(std::string_view assignment);

    nlohmann::json to_json() const;
};

struct PipelineInputs {
    const HashDb* reference_db = nullptr;
    std::optional<std::filesystem::path> reference_audio;
    std::optional<FileTimes> times;
    std::int64_t scan_time = 0;
    const SignatureTable* signatures = nullptr;  // builtin table when null
};

enum class FinalVerdict { clean, stego_detected };

struct DetectionReport {
    std::string file;
    AudioFormat format = AudioFormat::wav;
    std::vector<StageResult> stages;  // HASH, SAF, SPECTRO, FSA, FCA, MAC
    std::vector<SignatureHit> signature_hits;
    FinalVerdict final_verdict = FinalVerdict::clean;
    double confidence = 0.0;
    bool hash_mismatch = false;
    bool mac_anomaly = false;
    std::vector<std::string> notes;
    nlohmann::json thresholds;
    std::int64_t scanned_at = 0;

    const StageResult& stage(Stage s) const;
};

/// Final verdict rule: FSA positive, or SAF positive with SPECTRO not clean,
/// or a hash mismatch together with SAF positive.
FinalVerdict decide_verdict(const std::vector<StageResult>& stages, bool hash_mismatch);

DetectionReport run_pipeline(const std::filesystem::path& file, const PipelineInputs& inputs = {},
                             const PipelineConfig& cfg = {});
DetectionReport run_pipeline(const std::string& name, const Carrier& carrier, const PipelineInputs& inputs,
                             const PipelineConfig& cfg);

nlohmann::json report_to_json(const DetectionReport& report);
DetectionReport report_from_json(const nlohmann::json& j);
/// Pretty-printed JSON text, trailing newline included.
std::string report_text(const DetectionReport& report);

std::string report_csv_header();
std::string report_csv_row(const DetectionReport& report);

}  // namespace stegscan
