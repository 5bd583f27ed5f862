#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stegscan/bytes.hpp"

namespace stegscan {

/// Decoded integer PCM, samples interleaved by channel. 8-bit WAV data is
/// re-centred to signed on decode, so every bit depth is signed here.
struct PcmAudio {
    std::uint32_t sample_rate = 44100;
    std::uint16_t channels = 1;
    std::uint16_t bit_depth = 16;
    std::vector<std::int32_t> samples;

    std::size_t frame_count() const { return channels ? samples.size() / channels : 0; }
    double duration_seconds() const {
        return sample_rate ? static_cast<double>(frame_count()) / sample_rate : 0.0;
    }
    std::int32_t min_value() const { return -(std::int32_t{1} << (bit_depth - 1)); }
    std::int32_t max_value() const { return (std::int32_t{1} << (bit_depth - 1)) - 1; }

    // Throws invalid_argument when an invariant is broken.
    void validate() const;

    bool operator==(const PcmAudio&) const = default;
};

struct ChunkEntry {
    std::string id;
    std::size_t offset = 0;  // of the chunk header
    std::size_t length = 0;  // payload length as declared

    bool operator==(const ChunkEntry&) const = default;
};

struct WavFormat {
    std::uint16_t audio_format = 1;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bit_depth = 0;
};

struct Span {
    std::size_t offset = 0;
    std::size_t length = 0;

    std::size_t end() const { return offset + length; }
    bool operator==(const Span&) const = default;
};

struct WavFile {
    std::vector<ChunkEntry> chunk_index;  // top-level chunks after the RIFF header
    WavFormat format_info;
    Span data_span;  // payload of the `data` chunk
    Bytes raw_bytes;
    std::vector<std::string> warnings;

    ByteView data() const { return ByteView(raw_bytes).subspan(data_span.offset, data_span.length); }
};

WavFile parse_wav(Bytes bytes);
PcmAudio decode_pcm(const WavFile& wav);
Bytes encode_wav(const PcmAudio& audio);

}  // namespace stegscan
