#include "stegscan/stego.hpp"

#include <algorithm>

#include "stegscan/error.hpp"

namespace stegscan {

std::string_view payload_type_name(PayloadType t) {
    switch (t) {
        case PayloadType::txt: return "txt";
        case PayloadType::docx: return "docx";
        case PayloadType::png: return "png";
        case PayloadType::zip: return "zip";
        case PayloadType::unknown: return "unknown";
    }
    return "unknown";
}

std::optional<PayloadType> parse_payload_type(std::string_view name) {
    for (auto t : {PayloadType::txt, PayloadType::docx, PayloadType::png, PayloadType::zip, PayloadType::unknown})
        if (payload_type_name(t) == name) return t;
    return std::nullopt;
}

std::optional<PayloadType> payload_type_from_code(std::uint8_t code) {
    switch (code) {
        case 0: return PayloadType::txt;
        case 1: return PayloadType::docx;
        case 2: return PayloadType::png;
        case 3: return PayloadType::zip;
        case 255: return PayloadType::unknown;
        default: return std::nullopt;
    }
}

void PayloadSpec::validate() const {
    if (data.empty()) throw Error(Errc::invalid_argument, "payload is empty");
    bool ok = true;
    switch (declared_type) {
        case PayloadType::png: ok = starts_with(data, 0, "\x89PNG\r\n\x1a\n"); break;
        case PayloadType::zip:
        case PayloadType::docx:
            ok = starts_with(data, 0, "PK\x03\x04") || starts_with(data, 0, "PK\x05\x06");
            break;
        default: break;
    }
    if (!ok)
        throw Error(Errc::invalid_argument,
                    "payload magic does not match declared type " + std::string(payload_type_name(declared_type)));
}

Bytes frame_payload(const PayloadSpec& payload) {
    Bytes out;
    out.reserve(kFrameOverhead + payload.data.size());
    put_ascii(out, "SGH1");
    out.push_back(static_cast<std::uint8_t>(payload.declared_type));
    put_le64(out, payload.data.size());
    out.insert(out.end(), payload.data.begin(), payload.data.end());
    put_le32(out, crc32(payload.data));
    return out;
}

std::optional<std::size_t> framed_length(ByteView bytes) {
    if (bytes.size() < kFrameHeaderSize || !starts_with(bytes, 0, "SGH1")) return std::nullopt;
    if (!payload_type_from_code(bytes[4])) return std::nullopt;
    const std::uint64_t len = load_le64(bytes.data() + 5);
    if (len > bytes.size()) return std::nullopt;  // cannot possibly fit in what follows
    return static_cast<std::size_t>(len) + kFrameOverhead;
}

PayloadSpec deframe_payload(ByteView bytes) {
    if (bytes.size() < 4) throw Error(Errc::truncated_frame, "fewer than 4 bytes");
    if (!starts_with(bytes, 0, "SGH1")) throw Error(Errc::bad_magic, "frame does not begin with SGH1");
    if (bytes.size() < kFrameHeaderSize) throw Error(Errc::truncated_frame, "frame header incomplete");
    auto type = payload_type_from_code(bytes[4]);
    if (!type) throw Error(Errc::bad_magic, "unknown type code " + std::to_string(bytes[4]));
    const std::uint64_t len = load_le64(bytes.data() + 5);
    if (len > bytes.size() - kFrameOverhead || bytes.size() < kFrameOverhead)
        throw Error(Errc::truncated_frame, "declared length " + std::to_string(len) + " exceeds available bytes");
    const ByteView body = bytes.subspan(kFrameHeaderSize, static_cast<std::size_t>(len));
    const std::uint32_t stored = load_le32(bytes.data() + kFrameHeaderSize + len);
    if (crc32(body) != stored) throw Error(Errc::crc_mismatch, "frame body CRC-32 mismatch");
    return PayloadSpec{Bytes(body.begin(), body.end()), *type, EmbedMode::framed};
}

Bytes serialize_payload(const PayloadSpec& payload) {
    return payload.mode == EmbedMode::framed ? frame_payload(payload) : payload.data;
}

namespace {

void check_plan(const EmbedPlan& plan) {
    if (plan.bits_per_sample != 1 && plan.bits_per_sample != 2)
        throw Error(Errc::invalid_argument, "bits_per_sample must be 1 or 2");
}

std::size_t eligible_samples(const PcmAudio& carrier, ChannelPolicy policy) {
    return policy == ChannelPolicy::all_channels ? carrier.samples.size() : carrier.frame_count();
}

// Storage index of the i-th eligible sample.
std::size_t storage_index(const PcmAudio& carrier, ChannelPolicy policy, std::size_t i) {
    return policy == ChannelPolicy::all_channels ? i : i * carrier.channels;
}

}  // namespace

std::size_t capacity_bits(const PcmAudio& carrier, const EmbedPlan& plan) {
    check_plan(plan);
    const std::size_t eligible = eligible_samples(carrier, plan.channel_policy);
    if (plan.start_sample >= eligible) return 0;
    return (eligible - plan.start_sample) * static_cast<std::size_t>(plan.bits_per_sample);
}

PcmAudio embed_wav_lsb(const PcmAudio& carrier, const PayloadSpec& payload, const EmbedPlan& plan) {
    payload.validate();
    const Bytes stream = serialize_payload(payload);
    const std::size_t needed = stream.size() * 8;
    const std::size_t capacity = capacity_bits(carrier, plan);
    if (needed > capacity)
        throw Error(Errc::capacity_exceeded,
                    std::to_string(needed) + " bits needed, " + std::to_string(capacity) + " available");

    PcmAudio out = carrier;
    const int bps = plan.bits_per_sample;
    const std::int32_t mask = (1 << bps) - 1;
    std::size_t bit = 0;
    for (std::size_t i = plan.start_sample; bit < needed; ++i) {
        std::int32_t bits = 0;
        for (int k = 0; k < bps && bit < needed; ++k, ++bit)
            bits |= ((stream[bit / 8] >> (bit % 8)) & 1) << k;
        auto& s = out.samples[storage_index(carrier, plan.channel_policy, i)];
        s = (s & ~mask) | bits;
    }
    return out;
}

Bytes extract_wav_lsb(const PcmAudio& carrier, const EmbedPlan& plan) {
    const std::size_t total_bits = capacity_bits(carrier, plan);
    Bytes out(total_bits / 8, 0);
    const int bps = plan.bits_per_sample;
    const std::size_t usable = out.size() * 8;
    std::size_t bit = 0;
    for (std::size_t i = plan.start_sample; bit < usable; ++i) {
        const std::int32_t s = carrier.samples[storage_index(carrier, plan.channel_policy, i)];
        for (int k = 0; k < bps && bit < usable; ++k, ++bit)
            out[bit / 8] |= static_cast<std::uint8_t>(((s >> k) & 1) << (bit % 8));
    }
    return out;
}

std::string_view mp3_location_name(Mp3Location loc) {
    return loc == Mp3Location::id3_padding ? "id3_padding" : "trailing_append";
}

Bytes embed_mp3_meta(const Mp3Stream& stream, const PayloadSpec& payload, Mp3Location location) {
    payload.validate();
    const Bytes data = serialize_payload(payload);
    Bytes out = stream.raw_bytes;
    if (location == Mp3Location::id3_padding) {
        if (!stream.id3v2) throw Error(Errc::no_id3_tag, "stream has no ID3v2 tag");
        const Span pad = stream.id3v2->padding_span;
        if (data.size() > pad.length)
            throw Error(Errc::capacity_exceeded, std::to_string(data.size()) + " bytes into " +
                                                     std::to_string(pad.length) + " bytes of ID3 padding");
        std::copy(data.begin(), data.end(), out.begin() + static_cast<std::ptrdiff_t>(pad.offset));
    } else {
        // after the last frame (and any existing trailing bytes), before ID3v1
        const std::size_t at = stream.trailing_span.end();
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), data.begin(), data.end());
    }
    return out;
}

}  // namespace stegscan
