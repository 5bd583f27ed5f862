#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stegscan {

struct HashRecord {
    std::int64_t id = 0;
    std::string name;
    std::string md5;
    std::string sha256;
    std::int64_t recorded_at = 0;  // unix seconds

    bool same_content(const HashRecord& o) const {
        return id == o.id && name == o.name && md5 == o.md5 && sha256 == o.sha256;
    }
};

/// Snapshot of a single-file SQLite hash database with one table:
/// hashes(id INTEGER, name TEXT, md5 TEXT, sha256 TEXT, recorded_at INTEGER).
struct HashDb {
    std::filesystem::path path;
    std::vector<HashRecord> records;  // ordered by id

    static HashDb open(const std::filesystem::path& db_path);
    const HashRecord* find(std::string_view name) const;
};

/// Hashes every regular file under source_dir (recursively, keyed by file
/// name) and replaces the database contents in one transaction. A second
/// writer holding the database fails with IoFailure instead of waiting.
HashDb build_db(const std::filesystem::path& source_dir, const std::filesystem::path& db_path);

enum class FindingStatus { match, mismatch, missing, unknown };
std::string_view finding_status_name(FindingStatus s);

enum class DigestChoice { sha256, md5 };

struct VerificationFinding {
    std::string name;
    FindingStatus status = FindingStatus::match;
    std::string expected;  // digest from the database, empty for unknown
    std::string actual;    // digest of the working file, empty for missing
};

std::vector<VerificationFinding> verify_against_db(const HashDb& db, const std::filesystem::path& working_dir,
                                                   DigestChoice digest = DigestChoice::sha256);

/// Known-file filtering: files whose content digest appears anywhere in a
/// known-benign database are `match`, everything else `unknown`.
std::vector<VerificationFinding> classify_known(const HashDb& known, const std::filesystem::path& dir);

}  // namespace stegscan
