#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stegscan {

enum class Errc {
    malformed_container,
    unsupported_format,
    capacity_exceeded,
    no_id3_tag,
    bad_magic,
    crc_mismatch,
    truncated_frame,
    io_failure,
    duplicate_name,
    too_short,
    shape_mismatch,
    unsupported_encryption,
    not_encrypted,
    exhausted,
    size_too_small,
    manifest_report_mismatch,
    invalid_argument,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace stegscan
