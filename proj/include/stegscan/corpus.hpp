#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stegscan/bytes.hpp"
#include "stegscan/pipeline.hpp"
#include "stegscan/stego.hpp"
#include "stegscan/wav.hpp"

namespace stegscan {

enum class CarrierKind { sine_tone, swept_tone, shaped_noise };
std::string_view carrier_kind_name(CarrierKind k);

enum class DurationSchedule { linear, geometric };

/// Payload kinds a corpus can carry. The encrypted variants share the
/// container type of their plain counterparts.
inline constexpr std::string_view kPayloadKinds[] = {"txt", "txt_encrypted", "docx", "png", "zip", "zip_encrypted"};

struct CorpusConfig {
    std::size_t total_files = 32;
    double min_duration = 10.0;
    double max_duration = 160.0;
    DurationSchedule duration_schedule = DurationSchedule::linear;
    double payload_rate = 100.0;  // bytes per second of carrier
    std::vector<std::pair<std::string, double>> payload_mix = {
        {"txt", 0.2}, {"docx", 0.2}, {"png", 0.2}, {"zip", 0.2}, {"zip_encrypted", 0.2}, {"txt_encrypted", 0.0}};
    double clean_fraction = 0.25;
    std::uint64_t seed = 20240917;
    std::uint32_t sample_rate = 44100;
    std::uint16_t bit_depth = 16;
    // Clean carriers are quantized to this many bits so their LSB plane is constant.
    int carrier_resolution_bits = 15;
    int bits_per_sample = 1;
    // auto: framed for payloads without a magic number, raw otherwise
    std::string embed_mode = "auto";
    std::size_t wordlist_size = 1000;

    static CorpusConfig full_scale();

    /// key=value; unknown keys and bad values throw invalid_argument.
    void set(std::string_view key, std::string_view value);
    /// Flat key=value text, '#' comments.
    void load_text(std::string_view text);
    static CorpusConfig load(const std::filesystem::path& path);
    std::string to_text() const;

    void validate() const;
};

PcmAudio synthesize_carrier(CarrierKind kind, double duration, const CorpusConfig& config);
std::size_t mp3_frame_count(double duration);
Bytes synthesize_mp3_carrier(double duration, const CorpusConfig& config);

struct GeneratedPayload {
    PayloadSpec spec;
    std::optional<std::string> password;
};

/// `kind` is one of kPayloadKinds. zip_encrypted draws its password from
/// `wordlist`. Throws SizeTooSmall below the type's structural minimum.
GeneratedPayload generate_payload(std::string_view kind, std::size_t size, std::uint64_t seed,
                                  const std::vector<std::string>& wordlist = {});

std::vector<std::string> generate_wordlist(std::uint64_t seed, std::size_t count);

struct ManifestEntry {
    std::string filename;
    AudioFormat format = AudioFormat::wav;
    double duration = 0.0;
    std::string carrier;  // carrier_kind_name, or "template" for MP3
    bool is_stego = false;
    std::string payload_type;
    std::size_t payload_bytes = 0;
    std::string embed_mode;
    std::string embed_location;  // lsb_plane, id3_padding, trailing_append
    int bits_per_sample = 0;
    std::optional<std::string> zip_password;
    std::string payload_sha256;

    bool operator==(const ManifestEntry&) const = default;
};

struct CorpusManifest {
    CorpusConfig config;
    std::vector<ManifestEntry> entries;
    std::string manifest_sha256;  // of the header + entry rows text

    const ManifestEntry* find(std::string_view filename) const;
};

std::string manifest_entries_csv(const std::vector<ManifestEntry>& entries);
std::string manifest_text(const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::filesystem::path& path);

/// Writes `<out_dir>/original/*`, `<out_dir>/manifest.csv` and `<out_dir>/wordlist.txt`.
CorpusManifest generate_corpus(const CorpusConfig& config, const std::filesystem::path& out_dir);

}  // namespace stegscan
