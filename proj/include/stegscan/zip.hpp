#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stegscan/bytes.hpp"

namespace stegscan {

struct ZipEntry {
    std::string name;
    std::uint16_t flags = 0;
    std::uint16_t method = 0;  // 0 stored, 8 deflate, 99 AES
    std::uint16_t mod_time = 0;
    std::uint16_t mod_date = 0;
    std::uint32_t crc = 0;
    std::uint64_t compressed_size = 0;
    std::uint64_t uncompressed_size = 0;
    std::size_t local_offset = 0;
    std::size_t data_offset = 0;

    bool encrypted() const { return flags & 0x1; }
    bool aes() const { return method == 99; }
};

inline constexpr std::size_t kEocdFixedSize = 22;

/// Offset of the End-Of-Central-Directory record that closes an archive
/// starting at offset 0 of `bytes`. Candidates whose directory offset/size
/// do not line up with their own position are skipped.
std::optional<std::size_t> find_eocd(ByteView bytes);

/// Entries from the central directory (or a local-header walk when there is
/// none). Throws malformed_container on structural damage.
std::vector<ZipEntry> read_zip_entries(ByteView bytes);

Bytes inflate_raw(ByteView compressed, std::size_t expected_size);
Bytes deflate_raw(ByteView data);

/// Traditional PKWARE stream cipher.
class ZipCryptoKeys {
public:
    explicit ZipCryptoKeys(std::string_view password);

    std::uint8_t decrypt(std::uint8_t c) {
        const std::uint8_t p = c ^ stream_byte();
        update(p);
        return p;
    }
    std::uint8_t encrypt(std::uint8_t p) {
        const std::uint8_t c = p ^ stream_byte();
        update(p);
        return c;
    }

private:
    std::uint8_t stream_byte() const {
        const std::uint16_t t = static_cast<std::uint16_t>(keys_[2] | 2);
        return static_cast<std::uint8_t>((t * (t ^ 1)) >> 8);
    }
    void update(std::uint8_t c);

    std::uint32_t keys_[3];
};

inline constexpr std::size_t kZipCryptoHeaderSize = 12;

/// Byte the last encryption-header byte must decrypt to.
std::uint8_t zipcrypto_check_byte(const ZipEntry& entry);

struct ZipMember {
    std::string name;
    Bytes data;
    bool deflate = true;
};

/// Deterministic archive writer. Encrypted members use ZipCrypto with
/// header bytes drawn from `header_seed`.
Bytes write_zip(const std::vector<ZipMember>& members, const std::optional<std::string>& password = std::nullopt,
                std::uint64_t header_seed = 0);

}  // namespace stegscan
