#include "stegscan/mp3.hpp"

#include "stegscan/error.hpp"

namespace stegscan {
namespace {

constexpr int kBitratesKbps[16] = {0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320, 0};
constexpr int kSampleRates[4] = {44100, 48000, 32000, 0};

bool is_frame_id_char(std::uint8_t c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

// Offset where ID3 frames stop and padding begins.
std::size_t scan_id3_frames(const Bytes& b, const Id3v2Tag& tag, std::size_t body_end) {
    std::size_t pos = 10;
    if (tag.flags & 0x40) {  // extended header
        if (pos + 4 > body_end) return body_end;
        const std::uint32_t ext = tag.version == 4 ? decode_synchsafe(b.data() + pos) : load_be32(b.data() + pos) + 4;
        pos = ext > body_end - pos ? body_end : pos + ext;
    }
    while (pos + 10 <= body_end) {
        const std::uint8_t* h = b.data() + pos;
        bool id_ok = true;
        for (int i = 0; i < 4; ++i) id_ok = id_ok && is_frame_id_char(h[i]);
        if (!id_ok) break;
        const std::uint32_t size = tag.version == 4 ? decode_synchsafe(h + 4) : load_be32(h + 4);
        if (size == 0 || size > body_end - pos - 10) break;
        pos += 10 + size;
    }
    return pos;
}

}  // namespace

std::uint32_t decode_synchsafe(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0] & 0x7F) << 21) | (static_cast<std::uint32_t>(p[1] & 0x7F) << 14) |
           (static_cast<std::uint32_t>(p[2] & 0x7F) << 7) | static_cast<std::uint32_t>(p[3] & 0x7F);
}

void put_synchsafe(Bytes& out, std::uint32_t value) {
    for (int shift = 21; shift >= 0; shift -= 7) out.push_back(static_cast<std::uint8_t>((value >> shift) & 0x7F));
}

std::optional<FrameHeader> decode_frame_header(const std::uint8_t* p) {
    if (p[0] != 0xFF || (p[1] & 0xE0) != 0xE0) return std::nullopt;
    if (((p[1] >> 3) & 0x3) != 0x3) return std::nullopt;  // MPEG-1
    if (((p[1] >> 1) & 0x3) != 0x1) return std::nullopt;  // Layer III
    const int bitrate = kBitratesKbps[p[2] >> 4];
    const int rate = kSampleRates[(p[2] >> 2) & 0x3];
    if (bitrate == 0 || rate == 0 || (p[3] & 0x3) == 0x2) return std::nullopt;
    FrameHeader h;
    h.bitrate_kbps = bitrate;
    h.sample_rate = rate;
    h.padding_bit = (p[2] >> 1) & 0x1;
    h.frame_length = static_cast<std::size_t>(144000 * bitrate / rate + h.padding_bit);
    return h;
}

Mp3Stream parse_mp3(Bytes bytes) {
    if (bytes.empty()) throw Error(Errc::malformed_container, "empty input");
    Mp3Stream s;
    std::size_t pos = 0;

    if (starts_with(bytes, 0, "ID3")) {
        if (bytes.size() < 10) throw Error(Errc::malformed_container, "truncated ID3v2 header");
        Id3v2Tag tag;
        tag.version = bytes[3];
        tag.flags = bytes[5];
        if (tag.version == 2) throw Error(Errc::unsupported_format, "ID3v2.2 tags are not supported");
        if (tag.version != 3 && tag.version != 4)
            throw Error(Errc::unsupported_format, "ID3v2." + std::to_string(tag.version));
        for (int i = 6; i < 10; ++i)
            if (bytes[i] & 0x80) throw Error(Errc::malformed_container, "ID3v2 size is not synchsafe");
        tag.tag_size = decode_synchsafe(bytes.data() + 6);
        if (tag.total_size() > bytes.size()) throw Error(Errc::malformed_container, "ID3v2 tag runs past end of file");
        const std::size_t body_end = 10 + tag.tag_size;
        const std::size_t pad_start = scan_id3_frames(bytes, tag, body_end);
        tag.padding_span = {pad_start, body_end - pad_start};
        pos = tag.total_size();
        s.id3v2 = tag;
    }

    std::size_t audio_end = bytes.size();
    if (bytes.size() >= pos + 128 && starts_with(bytes, bytes.size() - 128, "TAG")) {
        s.id3v1 = Span{bytes.size() - 128, 128};
        audio_end = bytes.size() - 128;
    }

    auto frame_at = [&](std::size_t at) -> std::optional<FrameHeader> {
        if (at + 4 > audio_end) return std::nullopt;
        auto h = decode_frame_header(bytes.data() + at);
        if (!h || h->frame_length > audio_end - at) return std::nullopt;
        return h;
    };
    // A resync candidate must chain into another frame (or end the audio region
    // exactly) so that stray sync bytes inside trailing data are not taken as frames.
    auto chained = [&](std::size_t at, const FrameHeader& h) {
        const std::size_t next = at + h.frame_length;
        return next == audio_end || frame_at(next).has_value();
    };

    const std::size_t audio_start = pos;
    while (pos < audio_end) {
        const bool in_sequence =
            s.frames.empty() ? pos == audio_start : pos == s.frames.back().offset + s.frames.back().length;
        if (auto h = frame_at(pos); h && (in_sequence || chained(pos, *h))) {
            s.frames.push_back({pos, h->frame_length, h->bitrate_kbps, h->sample_rate, h->padding_bit});
            pos += h->frame_length;
            continue;
        }
        std::size_t next = pos + 1;
        std::optional<FrameHeader> found;
        for (; next + 4 <= audio_end; ++next) {
            if (bytes[next] != 0xFF) continue;
            auto h = frame_at(next);
            if (h && chained(next, *h)) {
                found = h;
                break;
            }
        }
        if (!found) break;
        s.resync_skips.push_back({pos, next - pos});
        s.anomalies.push_back("resync: skipped " + std::to_string(next - pos) + " bytes at offset " +
                              std::to_string(pos));
        pos = next;
    }

    if (s.frames.empty() && !s.id3v2) throw Error(Errc::malformed_container, "no MPEG frame and no ID3 tag");
    s.trailing_span = {pos, audio_end - pos};
    s.raw_bytes = std::move(bytes);
    return s;
}

}  // namespace stegscan
