#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "stegscan/stage.hpp"

namespace stegscan {

/// File timeline in unix seconds. Filesystems that do not record a birth
/// time leave `created` empty.
struct FileTimes {
    std::optional<std::int64_t> created;
    std::optional<std::int64_t> modified;
    std::optional<std::int64_t> accessed;
};

FileTimes read_file_times(const std::filesystem::path& path);

inline constexpr std::int64_t kClockSkewSeconds = 2;

/// Flags modified < created, accessed < created, or any time later than
/// scan_time + skew. Missing timestamps yield not_run.
StageResult mac_anomaly_check(const FileTimes& times, std::int64_t scan_time);

}  // namespace stegscan
