#pragma once

#include <optional>
#include <string>

#include "stegscan/bytes.hpp"

namespace stegscan {

struct Digests {
    std::string md5;                  // 32 lowercase hex chars
    std::optional<std::string> sha1;  // 40
    std::string sha256;               // 64

    bool operator==(const Digests&) const = default;
};

std::string md5_hex(ByteView data);
std::string sha1_hex(ByteView data);
std::string sha256_hex(ByteView data);

Digests compute_digests(ByteView data, bool with_sha1 = true);

}  // namespace stegscan
