#include "stegscan/hashdb.hpp"

#include <algorithm>
#include <ctime>
#include <map>
#include <memory>
#include <set>

#include <sqlite3.h>

#include "stegscan/bytes.hpp"
#include "stegscan/digest.hpp"
#include "stegscan/error.hpp"

namespace fs = std::filesystem;

namespace stegscan {
namespace {

constexpr const char* kSchema =
    "CREATE TABLE IF NOT EXISTS hashes ("
    " id INTEGER PRIMARY KEY,"
    " name TEXT NOT NULL UNIQUE,"
    " md5 TEXT NOT NULL,"
    " sha256 TEXT NOT NULL,"
    " recorded_at INTEGER NOT NULL)";

class Database {
public:
    Database(const fs::path& path, int flags) {
        if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
            std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
            sqlite3_close(db_);
            throw Error(Errc::io_failure, "cannot open database " + path.string() + ": " + msg);
        }
    }
    ~Database() { sqlite3_close(db_); }
    Database(const Database&) = delete;
    Database& operator=(const Database&) = delete;

    void exec(const char* sql) {
        char* err = nullptr;
        if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "unknown error";
            sqlite3_free(err);
            throw Error(Errc::io_failure, std::string(sql) + ": " + msg);
        }
    }

    sqlite3* get() const { return db_; }

private:
    sqlite3* db_ = nullptr;
};

using Statement = std::unique_ptr<sqlite3_stmt, decltype(&sqlite3_finalize)>;

Statement prepare(Database& db, const char* sql) {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db.get(), sql, -1, &stmt, nullptr) != SQLITE_OK)
        throw Error(Errc::io_failure, std::string("prepare failed: ") + sqlite3_errmsg(db.get()));
    return Statement(stmt, &sqlite3_finalize);
}

std::string column_text(sqlite3_stmt* stmt, int col) {
    auto* p = sqlite3_column_text(stmt, col);
    return p ? reinterpret_cast<const char*>(p) : "";
}

// name -> path for every regular file below dir.
std::map<std::string, fs::path> index_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(Errc::io_failure, "not a readable directory: " + dir.string());
    std::map<std::string, fs::path> files;
    fs::recursive_directory_iterator it(dir, ec), end;
    if (ec) throw Error(Errc::io_failure, "cannot list " + dir.string() + ": " + ec.message());
    for (; it != end; it.increment(ec)) {
        if (ec) throw Error(Errc::io_failure, "cannot list " + dir.string() + ": " + ec.message());
        if (!it->is_regular_file()) continue;
        auto name = it->path().filename().string();
        auto [pos, inserted] = files.emplace(name, it->path());
        if (!inserted)
            throw Error(Errc::duplicate_name,
                        "'" + name + "' found at " + pos->second.string() + " and " + it->path().string());
    }
    return files;
}

}  // namespace

HashDb HashDb::open(const fs::path& db_path) {
    if (!fs::exists(db_path)) throw Error(Errc::io_failure, "no database at " + db_path.string());
    Database db(db_path, SQLITE_OPEN_READONLY);
    HashDb out;
    out.path = db_path;
    auto stmt = prepare(db, "SELECT id, name, md5, sha256, recorded_at FROM hashes ORDER BY id");
    int rc;
    while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
        HashRecord r;
        r.id = sqlite3_column_int64(stmt.get(), 0);
        r.name = column_text(stmt.get(), 1);
        r.md5 = column_text(stmt.get(), 2);
        r.sha256 = column_text(stmt.get(), 3);
        r.recorded_at = sqlite3_column_int64(stmt.get(), 4);
        out.records.push_back(std::move(r));
    }
    if (rc != SQLITE_DONE) throw Error(Errc::io_failure, std::string("read failed: ") + sqlite3_errmsg(db.get()));
    return out;
}

const HashRecord* HashDb::find(std::string_view name) const {
    auto it = std::find_if(records.begin(), records.end(), [&](const HashRecord& r) { return r.name == name; });
    return it == records.end() ? nullptr : &*it;
}

HashDb build_db(const fs::path& source_dir, const fs::path& db_path) {
    const auto files = index_files(source_dir);
    const auto now = static_cast<std::int64_t>(std::time(nullptr));

    HashDb out;
    out.path = db_path;
    std::int64_t id = 0;
    for (const auto& [name, path] : files) {
        const Bytes data = read_file(path);
        out.records.push_back({++id, name, md5_hex(data), sha256_hex(data), now});
    }

    Database db(db_path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
    db.exec(kSchema);
    db.exec("BEGIN IMMEDIATE");  // no busy timeout: a concurrent writer is an error
    try {
        db.exec("DELETE FROM hashes");
        auto insert = prepare(db, "INSERT INTO hashes (id, name, md5, sha256, recorded_at) VALUES (?, ?, ?, ?, ?)");
        for (const auto& r : out.records) {
            sqlite3_reset(insert.get());
            sqlite3_bind_int64(insert.get(), 1, r.id);
            sqlite3_bind_text(insert.get(), 2, r.name.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_text(insert.get(), 3, r.md5.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_text(insert.get(), 4, r.sha256.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_int64(insert.get(), 5, r.recorded_at);
            if (sqlite3_step(insert.get()) != SQLITE_DONE)
                throw Error(Errc::io_failure, std::string("insert failed: ") + sqlite3_errmsg(db.get()));
        }
        db.exec("COMMIT");
    } catch (...) {
        sqlite3_exec(db.get(), "ROLLBACK", nullptr, nullptr, nullptr);
        throw;
    }
    return out;
}

std::string_view finding_status_name(FindingStatus s) {
    switch (s) {
        case FindingStatus::match: return "match";
        case FindingStatus::mismatch: return "mismatch";
        case FindingStatus::missing: return "missing";
        case FindingStatus::unknown: return "unknown";
    }
    return "unknown";
}

std::vector<VerificationFinding> verify_against_db(const HashDb& db, const fs::path& working_dir,
                                                   DigestChoice digest) {
    auto files = index_files(working_dir);
    std::vector<VerificationFinding> findings;
    for (const auto& rec : db.records) {
        VerificationFinding f;
        f.name = rec.name;
        f.expected = digest == DigestChoice::sha256 ? rec.sha256 : rec.md5;
        auto it = files.find(rec.name);
        if (it == files.end()) {
            f.status = FindingStatus::missing;
        } else {
            const Bytes data = read_file(it->second);
            f.actual = digest == DigestChoice::sha256 ? sha256_hex(data) : md5_hex(data);
            f.status = f.actual == f.expected ? FindingStatus::match : FindingStatus::mismatch;
            files.erase(it);
        }
        findings.push_back(std::move(f));
    }
    for (const auto& [name, path] : files) {
        VerificationFinding f;
        f.name = name;
        f.status = FindingStatus::unknown;
        f.actual = digest == DigestChoice::sha256 ? sha256_hex(read_file(path)) : md5_hex(read_file(path));
        findings.push_back(std::move(f));
    }
    std::sort(findings.begin(), findings.end(),
              [](const VerificationFinding& a, const VerificationFinding& b) { return a.name < b.name; });
    return findings;
}

std::vector<VerificationFinding> classify_known(const HashDb& known, const fs::path& dir) {
    std::set<std::string> digests;
    for (const auto& r : known.records) digests.insert(r.sha256);
    std::vector<VerificationFinding> findings;
    for (const auto& [name, path] : index_files(dir)) {
        VerificationFinding f;
        f.name = name;
        f.actual = sha256_hex(read_file(path));
        f.status = digests.count(f.actual) ? FindingStatus::match : FindingStatus::unknown;
        if (f.status == FindingStatus::match) f.expected = f.actual;
        findings.push_back(std::move(f));
    }
    return findings;
}

}  // namespace stegscan
