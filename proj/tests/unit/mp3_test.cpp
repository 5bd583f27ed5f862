#include <doctest.h>

#include <random>

#include "../support/check_errc.hpp"
#include "stegscan/mp3.hpp"

using namespace stegscan;

namespace {

Bytes frame_128k(int padding = 0) {
    const std::size_t len = 417 + padding;
    Bytes f(len, 0x11);
    f[0] = 0xFF;
    f[1] = 0xFB;
    f[2] = static_cast<std::uint8_t>(0x90 | (padding << 1));
    f[3] = 0x00;
    return f;
}

Bytes id3_tag(std::size_t frame_body, std::size_t padding) {
    Bytes t;
    put_ascii(t, "ID3");
    t.push_back(3);
    t.push_back(0);
    t.push_back(0);
    put_synchsafe(t, static_cast<std::uint32_t>(10 + frame_body + padding));
    put_ascii(t, "TIT2");
    put_be32(t, static_cast<std::uint32_t>(frame_body));
    t.push_back(0);
    t.push_back(0);
    for (std::size_t i = 0; i < frame_body; ++i) t.push_back('a' + i % 26);
    t.insert(t.end(), padding, 0);
    return t;
}

std::size_t accounted(const Mp3Stream& s) {
    std::size_t total = s.trailing_span.length;
    if (s.id3v2) total += s.id3v2->total_size();
    if (s.id3v1) total += s.id3v1->length;
    for (const auto& f : s.frames) total += f.length;
    for (const auto& r : s.resync_skips) total += r.length;
    return total;
}

}  // namespace

TEST_CASE("synchsafe size") {
    const std::uint8_t size[] = {0x00, 0x00, 0x02, 0x01};
    CHECK(decode_synchsafe(size) == 257u);
    Bytes out;
    put_synchsafe(out, 257);
    CHECK(out == Bytes{0, 0, 2, 1});

    Bytes hdr = to_bytes("ID3");
    hdr.insert(hdr.end(), {0x03, 0x00, 0x00, 0x00, 0x00, 0x02, 0x01});
    hdr.resize(10 + 257, 0);
    const Mp3Stream s = parse_mp3(hdr);
    REQUIRE(s.id3v2);
    CHECK(s.id3v2->tag_size == 257u);
    CHECK(s.id3v2->padding_span == Span{10, 257});
}

TEST_CASE("128 kbps 44.1 kHz frame is 417 bytes") {
    const Bytes f = frame_128k();
    const auto h = decode_frame_header(f.data());
    REQUIRE(h);
    CHECK(h->bitrate_kbps == 128);
    CHECK(h->sample_rate == 44100);
    CHECK(h->padding_bit == 0);
    // independent arithmetic: 144 * 128000 / 44100 = 417.96 -> 417
    CHECK(h->frame_length == static_cast<std::size_t>(144.0 * 128000.0 / 44100.0));
    CHECK(h->frame_length == 417);

    const Bytes padded = frame_128k(1);
    CHECK(decode_frame_header(padded.data())->frame_length == 418);

    const std::uint8_t mpeg2[] = {0xFF, 0xF3, 0x90, 0x00};
    CHECK_FALSE(decode_frame_header(mpeg2));
    const std::uint8_t bad_rate[] = {0xFF, 0xFB, 0xF0, 0x00};
    CHECK_FALSE(decode_frame_header(bad_rate));
}

TEST_CASE("one frame plus 64 trailing bytes") {
    Bytes b = frame_128k();
    b.insert(b.end(), 64, 0xAB);
    const Mp3Stream s = parse_mp3(b);
    REQUIRE(s.frames.size() == 1);
    CHECK(s.frames[0] == Mp3Frame{0, 417, 128, 44100, 0});
    CHECK(s.trailing_span == Span{417, 64});
    CHECK_FALSE(s.id3v1);
}

TEST_CASE("ID3v1 is kept out of the trailing span") {
    Bytes b = frame_128k();
    b.insert(b.end(), 10, 0xAB);
    Bytes v1 = to_bytes("TAG");
    v1.resize(128, ' ');
    b.insert(b.end(), v1.begin(), v1.end());
    const Mp3Stream s = parse_mp3(b);
    REQUIRE(s.id3v1);
    CHECK(*s.id3v1 == Span{427, 128});
    CHECK(s.trailing_span.length == 10);
    CHECK(accounted(s) == b.size());
}

TEST_CASE("ID3 padding span starts after the last frame") {
    Bytes b = id3_tag(20, 300);
    for (int i = 0; i < 3; ++i) {
        const Bytes f = frame_128k(i % 2);
        b.insert(b.end(), f.begin(), f.end());
    }
    const Mp3Stream s = parse_mp3(b);
    REQUIRE(s.id3v2);
    CHECK(s.id3v2->padding_span == Span{10 + 10 + 20, 300});
    CHECK(s.id3_padding().size() == 300);
    REQUIRE(s.frames.size() == 3);
    CHECK(s.frames[0].offset == 10 + 330);
    CHECK(s.frames[1].length == 418);
    CHECK(s.trailing_span.length == 0);
    CHECK(accounted(s) == b.size());
}

TEST_CASE("ID3v2.2 is unsupported, garbage is malformed") {
    Bytes b = id3_tag(0, 16);
    b[3] = 2;
    CHECK_ERRC(parse_mp3(b), Errc::unsupported_format);
    CHECK_ERRC(parse_mp3(Bytes(1000, 0x42)), Errc::malformed_container);
    CHECK_ERRC(parse_mp3(Bytes{}), Errc::malformed_container);
}

TEST_CASE("resync over garbage is recorded") {
    Bytes b = frame_128k();
    b.insert(b.end(), 37, 0x00);
    for (int i = 0; i < 3; ++i) {
        const Bytes f = frame_128k();
        b.insert(b.end(), f.begin(), f.end());
    }
    const Mp3Stream s = parse_mp3(b);
    CHECK(s.frames.size() == 4);
    REQUIRE(s.resync_skips.size() == 1);
    CHECK(s.resync_skips[0] == Span{417, 37});
    CHECK_FALSE(s.anomalies.empty());
    CHECK(accounted(s) == b.size());
}

TEST_CASE("property: frames tile the audio region") {
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 100; ++iter) {
        Bytes b;
        if (rng() % 2) b = id3_tag(rng() % 50, rng() % 500);
        const std::size_t n = 1 + rng() % 20;
        for (std::size_t i = 0; i < n; ++i) {
            const Bytes f = frame_128k(static_cast<int>(rng() % 2));
            b.insert(b.end(), f.begin(), f.end());
        }
        const std::size_t tail = rng() % 200;
        for (std::size_t i = 0; i < tail; ++i) b.push_back(static_cast<std::uint8_t>(rng() % 0xF0));
        const Mp3Stream s = parse_mp3(b);
        CHECK(s.frames.size() == n);
        CHECK(s.resync_skips.empty());
        std::size_t pos = s.id3v2 ? s.id3v2->total_size() : 0;
        for (const auto& f : s.frames) {
            CHECK(f.offset == pos);
            pos += f.length;
        }
        CHECK(s.trailing_span.offset == pos);
        CHECK(accounted(s) == b.size());
    }
}
