#include "stegscan/wav.hpp"

#include "stegscan/error.hpp"

namespace stegscan {

void PcmAudio::validate() const {
    if (channels == 0) throw Error(Errc::invalid_argument, "channel count must be >= 1");
    if (sample_rate == 0) throw Error(Errc::invalid_argument, "sample rate must be > 0");
    if (bit_depth != 8 && bit_depth != 16 && bit_depth != 24)
        throw Error(Errc::unsupported_format, "bit depth " + std::to_string(bit_depth));
    if (samples.size() % channels != 0)
        throw Error(Errc::invalid_argument, "sample count not divisible by channel count");
    const auto lo = min_value(), hi = max_value();
    for (auto s : samples)
        if (s < lo || s > hi) throw Error(Errc::invalid_argument, "sample out of range for bit depth");
}

WavFile parse_wav(Bytes bytes) {
    if (bytes.size() < 44) throw Error(Errc::malformed_container, "file shorter than 44 bytes");
    if (!starts_with(bytes, 0, "RIFF")) throw Error(Errc::malformed_container, "missing RIFF magic");
    if (!starts_with(bytes, 8, "WAVE")) throw Error(Errc::malformed_container, "missing WAVE form type");

    WavFile wav;
    const std::uint64_t declared = load_le32(bytes.data() + 4);
    if (declared != bytes.size() - 8) {
        wav.warnings.push_back("RIFF size " + std::to_string(declared) + " differs from file length - 8 (" +
                               std::to_string(bytes.size() - 8) + ")");
    }

    bool have_fmt = false, have_data = false;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        ChunkEntry chunk;
        chunk.id.assign(reinterpret_cast<const char*>(bytes.data() + pos), 4);
        chunk.offset = pos;
        chunk.length = load_le32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (chunk.length > bytes.size() - body)
            throw Error(Errc::malformed_container, "chunk '" + chunk.id + "' at " + std::to_string(pos) +
                                                       " runs past end of file");
        if (chunk.id == "fmt ") {
            if (chunk.length < 16) throw Error(Errc::malformed_container, "fmt chunk shorter than 16 bytes");
            const std::uint8_t* f = bytes.data() + body;
            wav.format_info.audio_format = load_le16(f);
            wav.format_info.channels = load_le16(f + 2);
            wav.format_info.sample_rate = load_le32(f + 4);
            wav.format_info.bit_depth = load_le16(f + 14);
            have_fmt = true;
        } else if (chunk.id == "data" && !have_data) {
            wav.data_span = {body, chunk.length};
            have_data = true;
        }
        wav.chunk_index.push_back(chunk);
        pos = body + chunk.length;
        if (chunk.length % 2 == 1 && pos < bytes.size()) ++pos;  // RIFF pad byte
    }
    if (pos < bytes.size())
        wav.warnings.push_back(std::to_string(bytes.size() - pos) + " trailing bytes after last chunk");

    if (!have_fmt) throw Error(Errc::malformed_container, "no fmt chunk");
    if (!have_data) throw Error(Errc::malformed_container, "no data chunk");
    if (wav.format_info.audio_format != 1)
        throw Error(Errc::unsupported_format,
                    "audio format code " + std::to_string(wav.format_info.audio_format) + " (only PCM = 1)");
    if (wav.format_info.channels == 0) throw Error(Errc::malformed_container, "zero channels");
    const auto bd = wav.format_info.bit_depth;
    if (bd == 0 || bd % 8 != 0) throw Error(Errc::unsupported_format, "bit depth " + std::to_string(bd));
    const std::size_t frame_bytes = static_cast<std::size_t>(wav.format_info.channels) * (bd / 8);
    if (wav.data_span.length % frame_bytes != 0)
        throw Error(Errc::malformed_container, "data length not a multiple of the block size");

    wav.raw_bytes = std::move(bytes);
    return wav;
}

PcmAudio decode_pcm(const WavFile& wav) {
    const auto& fmt = wav.format_info;
    if (fmt.bit_depth != 8 && fmt.bit_depth != 16 && fmt.bit_depth != 24)
        throw Error(Errc::unsupported_format, "bit depth " + std::to_string(fmt.bit_depth));

    PcmAudio audio;
    audio.sample_rate = fmt.sample_rate;
    audio.channels = fmt.channels;
    audio.bit_depth = fmt.bit_depth;

    const ByteView data = wav.data();
    const std::size_t width = fmt.bit_depth / 8;
    audio.samples.resize(data.size() / width);
    const std::uint8_t* p = data.data();
    switch (fmt.bit_depth) {
        case 8:
            for (auto& s : audio.samples) s = static_cast<std::int32_t>(*p++) - 128;
            break;
        case 16:
            for (auto& s : audio.samples) {
                s = static_cast<std::int16_t>(load_le16(p));
                p += 2;
            }
            break;
        case 24:
            for (auto& s : audio.samples) {
                std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
                if (v & 0x800000) v -= 0x1000000;
                s = v;
                p += 3;
            }
            break;
    }
    return audio;
}

Bytes encode_wav(const PcmAudio& audio) {
    audio.validate();
    const std::uint32_t width = audio.bit_depth / 8u;
    const auto data_len = static_cast<std::uint32_t>(audio.samples.size() * width);
    const std::uint32_t pad = data_len % 2;

    Bytes out;
    out.reserve(44 + data_len + pad);
    put_ascii(out, "RIFF");
    put_le32(out, 36 + data_len + pad);
    put_ascii(out, "WAVE");
    put_ascii(out, "fmt ");
    put_le32(out, 16);
    put_le16(out, 1);
    put_le16(out, audio.channels);
    put_le32(out, audio.sample_rate);
    put_le32(out, audio.sample_rate * audio.channels * width);
    put_le16(out, static_cast<std::uint16_t>(audio.channels * width));
    put_le16(out, audio.bit_depth);
    put_ascii(out, "data");
    put_le32(out, data_len);
    for (auto s : audio.samples) {
        switch (audio.bit_depth) {
            case 8: out.push_back(static_cast<std::uint8_t>(s + 128)); break;
            case 16: put_le16(out, static_cast<std::uint16_t>(s)); break;
            default:
                out.push_back(static_cast<std::uint8_t>(s));
                out.push_back(static_cast<std::uint8_t>(s >> 8));
                out.push_back(static_cast<std::uint8_t>(s >> 16));
                break;
        }
    }
    if (pad) out.push_back(0);
    return out;
}

}  // namespace stegscan
