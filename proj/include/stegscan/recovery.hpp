#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stegscan/bytes.hpp"
#include "stegscan/pipeline.hpp"
#include "stegscan/signatures.hpp"
#include "stegscan/zip.hpp"

namespace stegscan {

struct CarveResult {
    Bytes bytes;
    bool truncated = false;  // no end boundary found, carved to end of stream
    std::string note;
};

/// Cuts the object starting at hit.offset out of `stream` using the
/// boundary rule for hit.type_id.
CarveResult carve(const SignatureHit& hit, ByteView stream);

/// Longest-prefix match against the table. A ZIP whose first entry is
/// "[Content_Types].xml" or lives under "word/" is reported as docx.
FileType identify_type(ByteView bytes, const SignatureTable& table = SignatureTable::builtin());

struct Wordlist {
    std::vector<std::string> entries;  // attempt order = file order
    std::filesystem::path source;

    /// One candidate per line; blank lines are skipped, CR stripped.
    static Wordlist load(const std::filesystem::path& path);
};

struct BruteForceResult {
    std::string password;
    std::size_t attempts = 0;        // 1-based index of the winning candidate
    std::size_t check_byte_hits = 0;  // candidates that reached full CRC confirmation
    std::vector<ZipMember> members;   // every entry, decrypted and inflated
};

/// Decrypts and inflates every entry with `password`; nullopt unless all
/// check bytes and CRCs agree.
std::optional<std::vector<ZipMember>> try_password(ByteView zip, const std::vector<ZipEntry>& entries,
                                                   std::string_view password, bool* passed_check_bytes = nullptr);

/// Dictionary attack on ZipCrypto entries. Throws UnsupportedEncryption,
/// NotEncrypted or Exhausted.
BruteForceResult zip_brute_force(ByteView zip, const Wordlist& wordlist,
                                 std::size_t budget = std::numeric_limits<std::size_t>::max());

struct ExtractedArtifact {
    std::string source_file;
    SourcePlane plane = SourcePlane::raw_bytes;
    std::size_t carve_offset = 0;
    std::string type_id;
    std::size_t length = 0;
    std::filesystem::path output_path;
    bool decrypted = false;
    std::optional<std::string> password;
    std::string sha256;
    bool truncated = false;
    std::string note;
};

struct ExtractOptions {
    const Wordlist* wordlist = nullptr;  // brute force only when given
    bool force = false;                  // extract even when the verdict is clean
    std::size_t budget = std::numeric_limits<std::size_t>::max();
    std::string extracted_dir = "extracted";
};

/// Carves every validated hit (and unexplained slack data) of the report
/// out of `carrier_file` into `<out_dir>/<extracted_dir>/`.
std::vector<ExtractedArtifact> extract_all(const DetectionReport& report, const std::filesystem::path& carrier_file,
                                           const std::filesystem::path& out_dir, const ExtractOptions& options = {});

std::string extraction_log_header();
void write_extraction_log(const std::filesystem::path& path, const std::vector<ExtractedArtifact>& artifacts);

struct ExtractionLogRow {
    std::string source;
    std::string plane;
    std::size_t offset = 0;
    std::string type;
    std::size_t length = 0;
    std::string sha256;
    bool decrypted = false;
    bool password_present = false;
    bool truncated = false;
    std::string note;
};
std::vector<ExtractionLogRow> read_extraction_log(const std::filesystem::path& path);

}  // namespace stegscan
