#include "stegscan/zip.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <random>

#include <zlib.h>

#include "stegscan/error.hpp"

namespace stegscan {
namespace {

constexpr std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

inline std::uint32_t crc_step(std::uint32_t crc, std::uint8_t b) { return kCrcTable[(crc ^ b) & 0xFF] ^ (crc >> 8); }

constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = ((2023 - 1980) << 9) | (1 << 5) | 1;

std::size_t local_data_offset(ByteView bytes, std::size_t local) {
    if (local > bytes.size() || bytes.size() - local < 30 || !starts_with(bytes, local, "PK\x03\x04"))
        throw Error(Errc::malformed_container, "bad local header at " + std::to_string(local));
    const std::size_t data = local + 30 + load_le16(bytes.data() + local + 26) + load_le16(bytes.data() + local + 28);
    if (data > bytes.size()) throw Error(Errc::malformed_container, "local header runs past end");
    return data;
}

}  // namespace

ZipCryptoKeys::ZipCryptoKeys(std::string_view password) : keys_{0x12345678u, 0x23456789u, 0x34567890u} {
    for (char c : password) update(static_cast<std::uint8_t>(c));
}

void ZipCryptoKeys::update(std::uint8_t c) {
    keys_[0] = crc_step(keys_[0], c);
    keys_[1] = (keys_[1] + (keys_[0] & 0xFF)) * 134775813u + 1;
    keys_[2] = crc_step(keys_[2], static_cast<std::uint8_t>(keys_[1] >> 24));
}

std::uint8_t zipcrypto_check_byte(const ZipEntry& entry) {
    // with a data descriptor the CRC is not known up front; the time field stands in
    return (entry.flags & 0x8) ? static_cast<std::uint8_t>(entry.mod_time >> 8)
                               : static_cast<std::uint8_t>(entry.crc >> 24);
}

std::optional<std::size_t> find_eocd(ByteView bytes) {
    if (bytes.size() < kEocdFixedSize) return std::nullopt;
    const std::uint8_t* base = bytes.data();
    const std::size_t last = bytes.size() - kEocdFixedSize;
    std::size_t pos = 0;
    while (pos <= last) {
        const void* hit = std::memchr(base + pos, 'P', last - pos + 1);
        if (!hit) break;
        pos = static_cast<std::size_t>(static_cast<const std::uint8_t*>(hit) - base);
        if (std::memcmp(base + pos, "PK\x05\x06", 4) == 0) {
            const std::uint64_t cd_size = load_le32(base + pos + 12);
            const std::uint64_t cd_offset = load_le32(base + pos + 16);
            const std::size_t comment = load_le16(base + pos + 20);
            if (cd_offset + cd_size == pos && pos + kEocdFixedSize + comment <= bytes.size()) return pos;
        }
        ++pos;
    }
    return std::nullopt;
}

std::vector<ZipEntry> read_zip_entries(ByteView bytes) {
    std::vector<ZipEntry> entries;
    if (auto eocd = find_eocd(bytes)) {
        const std::uint8_t* e = bytes.data() + *eocd;
        const std::size_t count = load_le16(e + 10);
        std::size_t pos = load_le32(e + 16);
        for (std::size_t i = 0; i < count; ++i) {
            if (pos + 46 > *eocd || !starts_with(bytes, pos, "PK\x01\x02"))
                throw Error(Errc::malformed_container, "bad central directory entry " + std::to_string(i));
            const std::uint8_t* c = bytes.data() + pos;
            ZipEntry z;
            z.flags = load_le16(c + 8);
            z.method = load_le16(c + 10);
            z.mod_time = load_le16(c + 12);
            z.mod_date = load_le16(c + 14);
            z.crc = load_le32(c + 16);
            z.compressed_size = load_le32(c + 20);
            z.uncompressed_size = load_le32(c + 24);
            const std::size_t name_len = load_le16(c + 28);
            const std::size_t extra_len = load_le16(c + 30);
            const std::size_t comment_len = load_le16(c + 32);
            z.local_offset = load_le32(c + 42);
            if (pos + 46 + name_len > *eocd) throw Error(Errc::malformed_container, "central directory name overflow");
            z.name.assign(reinterpret_cast<const char*>(c + 46), name_len);
            z.data_offset = local_data_offset(bytes, z.local_offset);
            if (z.compressed_size > bytes.size() - z.data_offset)
                throw Error(Errc::malformed_container, "entry '" + z.name + "' data runs past end");
            entries.push_back(std::move(z));
            pos += 46 + name_len + extra_len + comment_len;
        }
        return entries;
    }

    std::size_t pos = 0;
    while (starts_with(bytes, pos, "PK\x03\x04")) {
        if (bytes.size() - pos < 30) throw Error(Errc::malformed_container, "truncated local header");
        const std::uint8_t* l = bytes.data() + pos;
        ZipEntry z;
        z.flags = load_le16(l + 6);
        z.method = load_le16(l + 8);
        z.mod_time = load_le16(l + 10);
        z.mod_date = load_le16(l + 12);
        z.crc = load_le32(l + 14);
        z.compressed_size = load_le32(l + 18);
        z.uncompressed_size = load_le32(l + 22);
        const std::size_t name_len = load_le16(l + 26);
        z.local_offset = pos;
        z.data_offset = local_data_offset(bytes, pos);
        z.name.assign(reinterpret_cast<const char*>(l + 30), std::min(name_len, bytes.size() - pos - 30));
        if (z.flags & 0x8) throw Error(Errc::malformed_container, "data descriptor without central directory");
        if (z.compressed_size > bytes.size() - z.data_offset)
            throw Error(Errc::malformed_container, "entry '" + z.name + "' data runs past end");
        pos = z.data_offset + static_cast<std::size_t>(z.compressed_size);
        entries.push_back(std::move(z));
    }
    if (entries.empty()) throw Error(Errc::malformed_container, "no ZIP entries");
    return entries;
}

Bytes inflate_raw(ByteView compressed, std::size_t expected_size) {
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error(Errc::malformed_container, "inflateInit2 failed");
    Bytes out(expected_size);
    zs.next_in = const_cast<Bytef*>(compressed.data());
    zs.avail_in = static_cast<uInt>(compressed.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    const std::size_t produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != expected_size)
        throw Error(Errc::malformed_container, "deflate stream did not inflate to the declared size");
    return out;
}

Bytes deflate_raw(ByteView data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw Error(Errc::io_failure, "deflateInit2 failed");
    Bytes out(deflateBound(&zs, static_cast<uLong>(data.size())));
    zs.next_in = const_cast<Bytef*>(data.data());
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error(Errc::io_failure, "deflate failed");
    return out;
}

Bytes write_zip(const std::vector<ZipMember>& members, const std::optional<std::string>& password,
                std::uint64_t header_seed) {
    std::mt19937_64 rng(header_seed);
    Bytes out, central;
    for (const auto& m : members) {
        const std::uint32_t crc = crc32(m.data);
        Bytes body = m.deflate ? deflate_raw(m.data) : m.data;
        const std::uint16_t method = m.deflate ? 8 : 0;
        std::uint16_t flags = 0;
        if (password) {
            flags |= 0x1;
            ZipCryptoKeys keys(*password);
            Bytes enc;
            enc.reserve(kZipCryptoHeaderSize + body.size());
            for (std::size_t i = 0; i + 1 < kZipCryptoHeaderSize; ++i)
                enc.push_back(keys.encrypt(static_cast<std::uint8_t>(rng())));
            enc.push_back(keys.encrypt(static_cast<std::uint8_t>(crc >> 24)));
            for (auto b : body) enc.push_back(keys.encrypt(b));
            body = std::move(enc);
        }
        const auto local_offset = static_cast<std::uint32_t>(out.size());
        const auto name_len = static_cast<std::uint16_t>(m.name.size());

        put_ascii(out, "PK\x03\x04");
        put_le16(out, 20);
        put_le16(out, flags);
        put_le16(out, method);
        put_le16(out, kDosTime);
        put_le16(out, kDosDate);
        put_le32(out, crc);
        put_le32(out, static_cast<std::uint32_t>(body.size()));
        put_le32(out, static_cast<std::uint32_t>(m.data.size()));
        put_le16(out, name_len);
        put_le16(out, 0);
        put_ascii(out, m.name);
        out.insert(out.end(), body.begin(), body.end());

        put_ascii(central, "PK\x01\x02");
        put_le16(central, 20);
        put_le16(central, 20);
        put_le16(central, flags);
        put_le16(central, method);
        put_le16(central, kDosTime);
        put_le16(central, kDosDate);
        put_le32(central, crc);
        put_le32(central, static_cast<std::uint32_t>(body.size()));
        put_le32(central, static_cast<std::uint32_t>(m.data.size()));
        put_le16(central, name_len);
        put_le16(central, 0);  // extra
        put_le16(central, 0);  // comment
        put_le16(central, 0);  // disk
        put_le16(central, 0);  // internal attributes
        put_le32(central, 0);  // external attributes
        put_le32(central, local_offset);
        put_ascii(central, m.name);
    }
    const auto cd_offset = static_cast<std::uint32_t>(out.size());
    out.insert(out.end(), central.begin(), central.end());
    put_ascii(out, "PK\x05\x06");
    put_le16(out, 0);
    put_le16(out, 0);
    put_le16(out, static_cast<std::uint16_t>(members.size()));
    put_le16(out, static_cast<std::uint16_t>(members.size()));
    put_le32(out, static_cast<std::uint32_t>(central.size()));
    put_le32(out, cd_offset);
    put_le16(out, 0);
    return out;
}

}  // namespace stegscan
