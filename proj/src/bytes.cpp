#include "stegscan/bytes.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "stegscan/error.hpp"

namespace stegscan {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::malformed_container: return "MalformedContainer";
        case Errc::unsupported_format: return "UnsupportedFormat";
        case Errc::capacity_exceeded: return "CapacityExceeded";
        case Errc::no_id3_tag: return "NoId3Tag";
        case Errc::bad_magic: return "BadMagic";
        case Errc::crc_mismatch: return "CrcMismatch";
        case Errc::truncated_frame: return "TruncatedFrame";
        case Errc::io_failure: return "IoFailure";
        case Errc::duplicate_name: return "DuplicateName";
        case Errc::too_short: return "TooShort";
        case Errc::shape_mismatch: return "ShapeMismatch";
        case Errc::unsupported_encryption: return "UnsupportedEncryption";
        case Errc::not_encrypted: return "NotEncrypted";
        case Errc::exhausted: return "Exhausted";
        case Errc::size_too_small: return "SizeTooSmall";
        case Errc::manifest_report_mismatch: return "ManifestReportMismatch";
        case Errc::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(Errc::io_failure, "read failed: " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, ByteView data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_failure, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(Errc::io_failure, "write failed: " + path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(ByteView data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Bytes out;
    int high = -1;
    for (char c : hex) {
        if (c == ' ' || c == '\t' || c == ':') continue;
        int v = nibble(c);
        if (v < 0) throw Error(Errc::invalid_argument, "bad hex digit in '" + std::string(hex) + "'");
        if (high < 0) {
            high = v;
        } else {
            out.push_back(static_cast<std::uint8_t>((high << 4) | v));
            high = -1;
        }
    }
    if (high >= 0) throw Error(Errc::invalid_argument, "odd hex digit count in '" + std::string(hex) + "'");
    return out;
}

std::uint32_t crc32(ByteView data) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths
    std::size_t pos = 0;
    while (pos < data.size()) {
        auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
        crc = ::crc32(crc, data.data() + pos, chunk);
        pos += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace stegscan
