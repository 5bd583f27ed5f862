#include <doctest.h>

#include <random>

#include "../support/check_errc.hpp"
#include "../support/oracles.hpp"
#include "stegscan/stego.hpp"

using namespace stegscan;

namespace {

PcmAudio silence(std::size_t n, std::uint32_t rate = 44100, std::uint16_t channels = 1) {
    PcmAudio a;
    a.sample_rate = rate;
    a.channels = channels;
    a.samples.assign(n * channels, 0);
    return a;
}

PcmAudio noise(std::mt19937_64& rng, std::size_t n, std::uint16_t channels) {
    PcmAudio a = silence(n, 44100, channels);
    std::uniform_int_distribution<std::int32_t> d(-32768, 32767);
    for (auto& s : a.samples) s = d(rng);
    return a;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

// Tiny stored frame: 64-byte trailing region after one 417-byte frame, ID3 tag with 1024 bytes padding.
Bytes tagged_stream() {
    Bytes b = {'I', 'D', '3', 3, 0, 0};
    put_synchsafe(b, 1024);
    b.resize(10 + 1024, 0);
    for (int i = 0; i < 4; ++i) {
        Bytes f(417, 0x22);
        f[0] = 0xFF, f[1] = 0xFB, f[2] = 0x90, f[3] = 0;
        b.insert(b.end(), f.begin(), f.end());
    }
    return b;
}

}  // namespace

TEST_CASE("capacity arithmetic") {
    const PcmAudio ten_s = silence(441000);
    CHECK(capacity_bits(ten_s, {}) == 441000);
    CHECK(capacity_bits(ten_s, {1, 441000, ChannelPolicy::all_channels}) == 0);
    const PcmAudio stereo = silence(16000, 8000, 2);
    CHECK(capacity_bits(stereo, {2, 0, ChannelPolicy::channel_0_only}) == 32000);
    CHECK(capacity_bits(stereo, {2, 0, ChannelPolicy::all_channels}) == 64000);
    CHECK_ERRC(capacity_bits(stereo, {3, 0, ChannelPolicy::all_channels}), Errc::invalid_argument);
}

TEST_CASE("'A' into zero samples, LSB first") {
    const PcmAudio out = embed_wav_lsb(silence(16), {to_bytes("A"), PayloadType::txt, EmbedMode::raw}, {});
    const std::vector<std::int32_t> first(out.samples.begin(), out.samples.begin() + 8);
    CHECK(first == std::vector<std::int32_t>{1, 0, 0, 0, 0, 0, 1, 0});
    CHECK(extract_wav_lsb(out, {})[0] == 0x41);
}

TEST_CASE("extract floors to whole bytes, zeros stay zeros") {
    CHECK(extract_wav_lsb(silence(9), {}).size() == 1);
    CHECK(extract_wav_lsb(silence(800), {}) == Bytes(100, 0));
    CHECK(extract_wav_lsb(silence(9), {2, 0, ChannelPolicy::all_channels}).size() == 2);
}

TEST_CASE("capacity exceeded counts the frame overhead") {
    const PcmAudio c = silence(8 * 20);
    PayloadSpec p{Bytes(20, 'x'), PayloadType::txt, EmbedMode::raw};
    CHECK_NOTHROW(embed_wav_lsb(c, p, {}));
    p.mode = EmbedMode::framed;
    CHECK_ERRC(embed_wav_lsb(c, p, {}), Errc::capacity_exceeded);
}

TEST_CASE("empty frame of type txt") {
    const Bytes f = frame_payload({Bytes{}, PayloadType::txt, EmbedMode::framed});
    REQUIRE(f.size() == 17);
    CHECK(f[4] == 0);
    CHECK(load_le64(f.data() + 5) == 0u);
    CHECK(load_le32(f.data() + 13) == oracle::bitwise_crc32({}));
    CHECK(load_le32(f.data() + 13) == 0u);
}

TEST_CASE("frame wire format and errors") {
    const PayloadSpec p{to_bytes("hello"), PayloadType::unknown, EmbedMode::framed};
    Bytes f = frame_payload(p);
    CHECK(f.size() == 17 + 5);
    CHECK(f[4] == 255);
    CHECK(load_le32(f.data() + 18) == oracle::bitwise_crc32(to_bytes("hello")));
    CHECK(deframe_payload(f) == p);
    CHECK(framed_length(f) == std::optional<std::size_t>(22));

    Bytes corrupt = f;
    corrupt[14] ^= 0x01;
    CHECK_ERRC(deframe_payload(corrupt), Errc::crc_mismatch);
    Bytes magic = f;
    magic[0] = 'X';
    CHECK_ERRC(deframe_payload(magic), Errc::bad_magic);
    CHECK_FALSE(framed_length(magic));
    CHECK_ERRC(deframe_payload(ByteView(f).first(20)), Errc::truncated_frame);
    CHECK_ERRC(deframe_payload(ByteView(f).first(8)), Errc::truncated_frame);
}

TEST_CASE("declared type must match magic") {
    CHECK_ERRC(PayloadSpec({to_bytes("not a png"), PayloadType::png, EmbedMode::raw}).validate(),
               Errc::invalid_argument);
    CHECK_ERRC(PayloadSpec({Bytes{}, PayloadType::txt, EmbedMode::raw}).validate(), Errc::invalid_argument);
    CHECK_NOTHROW(PayloadSpec({to_bytes("PK\x03\x04rest"), PayloadType::zip, EmbedMode::raw}).validate());
}

TEST_CASE("property: round trip, bounded change, untouched tail") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint16_t channels = static_cast<std::uint16_t>(1 + rng() % 2);
        const PcmAudio carrier = noise(rng, 200 + rng() % 2000, channels);
        EmbedPlan plan;
        plan.bits_per_sample = 1 + static_cast<int>(rng() % 2);
        plan.channel_policy = rng() % 2 ? ChannelPolicy::all_channels : ChannelPolicy::channel_0_only;
        plan.start_sample = rng() % 64;
        const EmbedMode mode = rng() % 2 ? EmbedMode::raw : EmbedMode::framed;
        const std::size_t cap = capacity_bits(carrier, plan) / 8;
        const std::size_t overhead = mode == EmbedMode::framed ? kFrameOverhead : 0;
        if (cap <= overhead + 1) continue;
        const std::size_t n = 1 + rng() % (cap - overhead);
        const PayloadSpec p{random_bytes(rng, n), PayloadType::unknown, mode};

        const PcmAudio out = embed_wav_lsb(carrier, p, plan);
        CHECK(out.samples.size() == carrier.samples.size());
        CHECK(out.sample_rate == carrier.sample_rate);
        CHECK(out.channels == carrier.channels);
        CHECK(out.bit_depth == carrier.bit_depth);

        const Bytes extracted = extract_wav_lsb(out, plan);
        const Bytes written = serialize_payload(p);
        REQUIRE(extracted.size() >= written.size());
        CHECK(std::equal(written.begin(), written.end(), extracted.begin()));
        if (mode == EmbedMode::framed) CHECK(deframe_payload(extracted) == p);

        std::size_t changed = 0;
        const std::int32_t bound = plan.bits_per_sample == 1 ? 1 : 3;
        for (std::size_t i = 0; i < out.samples.size(); ++i) {
            const auto d = std::abs(out.samples[i] - carrier.samples[i]);
            CHECK(d <= bound);
            changed += d != 0;
        }
        const std::size_t bits = 8 * written.size();
        CHECK(changed <= (bits + plan.bits_per_sample - 1) / plan.bits_per_sample);
    }
}

TEST_CASE("MP3 ID3 padding overwrite in place") {
    const Mp3Stream s = parse_mp3(tagged_stream());
    REQUIRE(s.id3v2);
    REQUIRE(s.id3v2->padding_span.length == 1024);
    std::mt19937_64 rng(41);
    const PayloadSpec p{random_bytes(rng, 300), PayloadType::unknown, EmbedMode::raw};
    const Bytes out = embed_mp3_meta(s, p, Mp3Location::id3_padding);
    CHECK(out.size() == s.raw_bytes.size());
    CHECK(std::equal(p.data.begin(), p.data.end(), out.begin() + 10));
    const Mp3Stream again = parse_mp3(out);
    CHECK(again.frames == s.frames);

    const PayloadSpec big{Bytes(1025, 'x'), PayloadType::txt, EmbedMode::raw};
    CHECK_ERRC(embed_mp3_meta(s, big, Mp3Location::id3_padding), Errc::capacity_exceeded);
}

TEST_CASE("MP3 trailing append") {
    const Mp3Stream s = parse_mp3(tagged_stream());
    const PayloadSpec p{Bytes(64, 'z'), PayloadType::txt, EmbedMode::raw};
    const Bytes out = embed_mp3_meta(s, p, Mp3Location::trailing_append);
    CHECK(out.size() == s.raw_bytes.size() + 64);
    const Mp3Stream again = parse_mp3(out);
    CHECK(again.trailing_span.length == s.trailing_span.length + 64);
    CHECK(again.frames == s.frames);
}

TEST_CASE("MP3 padding embed without a tag") {
    Bytes b(417, 0);
    b[0] = 0xFF, b[1] = 0xFB, b[2] = 0x90;
    const Mp3Stream s = parse_mp3(b);
    CHECK_ERRC(embed_mp3_meta(s, {to_bytes("x"), PayloadType::txt, EmbedMode::raw}, Mp3Location::id3_padding),
               Errc::no_id3_tag);
}

TEST_CASE("property: MP3 frames survive both locations") {
    std::mt19937_64 rng(42);
    const Mp3Stream s = parse_mp3(tagged_stream());
    for (int iter = 0; iter < 100; ++iter) {
        const bool framed = rng() % 2;
        const PayloadSpec p{random_bytes(rng, 1 + rng() % 900), PayloadType::unknown,
                            framed ? EmbedMode::framed : EmbedMode::raw};
        for (auto loc : {Mp3Location::id3_padding, Mp3Location::trailing_append}) {
            const Bytes out = embed_mp3_meta(s, p, loc);
            const Mp3Stream again = parse_mp3(out);
            CHECK(again.frames == s.frames);
            for (const auto& f : s.frames)
                CHECK(std::equal(out.begin() + static_cast<std::ptrdiff_t>(f.offset),
                                 out.begin() + static_cast<std::ptrdiff_t>(f.offset + f.length),
                                 s.raw_bytes.begin() + static_cast<std::ptrdiff_t>(f.offset)));
        }
    }
}
