#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "stegscan/bytes.hpp"
#include "stegscan/mp3.hpp"
#include "stegscan/wav.hpp"

namespace stegscan {

enum class PayloadType : std::uint8_t { txt = 0, docx = 1, png = 2, zip = 3, unknown = 255 };
enum class EmbedMode { raw, framed };

std::string_view payload_type_name(PayloadType t);
std::optional<PayloadType> parse_payload_type(std::string_view name);
std::optional<PayloadType> payload_type_from_code(std::uint8_t code);

struct PayloadSpec {
    Bytes data;
    PayloadType declared_type = PayloadType::unknown;
    EmbedMode mode = EmbedMode::raw;

    // Non-empty data whose magic agrees with the declared type (txt/unknown carry no magic).
    void validate() const;

    bool operator==(const PayloadSpec&) const = default;
};

enum class ChannelPolicy { all_channels, channel_0_only };

struct EmbedPlan {
    int bits_per_sample = 1;  // 1 or 2
    std::size_t start_sample = 0;  // index into the samples eligible under channel_policy
    ChannelPolicy channel_policy = ChannelPolicy::all_channels;
};

// Frame layout: "SGH1" | type u8 | length u64-LE | body | crc32 u32-LE.
inline constexpr std::size_t kFrameOverhead = 17;
inline constexpr std::size_t kFrameHeaderSize = 13;

Bytes frame_payload(const PayloadSpec& payload);
PayloadSpec deframe_payload(ByteView bytes);
/// Total frame length announced by a frame header, if the header is present and sane.
std::optional<std::size_t> framed_length(ByteView bytes);

/// Bytes actually written into a carrier for this payload (frame included in framed mode).
Bytes serialize_payload(const PayloadSpec& payload);

std::size_t capacity_bits(const PcmAudio& carrier, const EmbedPlan& plan);
PcmAudio embed_wav_lsb(const PcmAudio& carrier, const PayloadSpec& payload, const EmbedPlan& plan);
Bytes extract_wav_lsb(const PcmAudio& carrier, const EmbedPlan& plan);

enum class Mp3Location { id3_padding, trailing_append };
std::string_view mp3_location_name(Mp3Location loc);

Bytes embed_mp3_meta(const Mp3Stream& stream, const PayloadSpec& payload, Mp3Location location);

}  // namespace stegscan
