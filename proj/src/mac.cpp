#include "stegscan/mac.hpp"

#include <fcntl.h>
#include <sys/stat.h>

#include "stegscan/error.hpp"

namespace stegscan {

FileTimes read_file_times(const std::filesystem::path& path) {
    struct statx st {};
    if (::statx(AT_FDCWD, path.c_str(), 0, STATX_BASIC_STATS | STATX_BTIME, &st) != 0)
        throw Error(Errc::io_failure, "cannot stat " + path.string());
    FileTimes t;
    if (st.stx_mask & STATX_BTIME) t.created = st.stx_btime.tv_sec;
    if (st.stx_mask & STATX_MTIME) t.modified = st.stx_mtime.tv_sec;
    if (st.stx_mask & STATX_ATIME) t.accessed = st.stx_atime.tv_sec;
    return t;
}

StageResult mac_anomaly_check(const FileTimes& times, std::int64_t scan_time) {
    if (!times.created || !times.modified || !times.accessed)
        return StageResult::not_run(Stage::MAC, "MissingTimestamps");

    nlohmann::json reasons = nlohmann::json::array();
    if (*times.modified < *times.created) reasons.push_back("modified before created");
    if (*times.accessed < *times.created) reasons.push_back("accessed before created");
    const std::int64_t limit = scan_time + kClockSkewSeconds;
    if (*times.created > limit || *times.modified > limit || *times.accessed > limit)
        reasons.push_back("timestamp in the future");

    StageResult r;
    r.stage = Stage::MAC;
    r.score = reasons.empty() ? 0.0 : 1.0;
    r.verdict = reasons.empty() ? Verdict::clean : Verdict::positive;
    r.detail["anomalies"] = reasons;
    r.detail["created_time"] = *times.created;
    r.detail["modified_time"] = *times.modified;
    r.detail["accessed_time"] = *times.accessed;
    return r;
}

}  // namespace stegscan
