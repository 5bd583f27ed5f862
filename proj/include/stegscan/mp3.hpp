#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stegscan/bytes.hpp"
#include "stegscan/wav.hpp"

namespace stegscan {

struct Id3v2Tag {
    std::uint8_t version = 3;  // major version: 3 or 4
    std::uint8_t flags = 0;
    std::uint32_t tag_size = 0;  // synchsafe size field, excludes the 10-byte header and footer
    Span padding_span;           // from the end of the last ID3 frame to the end of the tag body

    std::size_t total_size() const { return 10 + tag_size + ((version == 4 && (flags & 0x10)) ? 10 : 0); }
};

struct FrameHeader {
    int bitrate_kbps = 0;
    int sample_rate = 0;
    int padding_bit = 0;
    std::size_t frame_length = 0;
};

struct Mp3Frame {
    std::size_t offset = 0;
    std::size_t length = 0;
    int bitrate_kbps = 0;
    int sample_rate = 0;
    int padding_bit = 0;

    bool operator==(const Mp3Frame&) const = default;
};

struct Mp3Stream {
    std::optional<Id3v2Tag> id3v2;
    std::vector<Mp3Frame> frames;
    Span trailing_span;
    std::optional<Span> id3v1;
    std::vector<Span> resync_skips;  // garbage skipped while hunting for the next frame
    std::vector<std::string> anomalies;
    Bytes raw_bytes;

    ByteView id3_padding() const {
        if (!id3v2) return {};
        return ByteView(raw_bytes).subspan(id3v2->padding_span.offset, id3v2->padding_span.length);
    }
    ByteView trailing() const {
        return ByteView(raw_bytes).subspan(trailing_span.offset, trailing_span.length);
    }
};

/// Decodes an MPEG-1 Layer III frame header at `p` (4 bytes available).
/// Other MPEG versions and layers are rejected.
std::optional<FrameHeader> decode_frame_header(const std::uint8_t* p);

std::uint32_t decode_synchsafe(const std::uint8_t* p);
void put_synchsafe(Bytes& out, std::uint32_t value);

Mp3Stream parse_mp3(Bytes bytes);

}  // namespace stegscan
