#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stegscan/bytes.hpp"
#include "stegscan/stage.hpp"

namespace stegscan {

/// Byte streams a scan looks at. lsb2_plane is the two-bit-per-sample plane.
enum class SourcePlane { raw_bytes, lsb_plane, lsb2_plane, id3_padding, trailing };

std::string_view plane_name(SourcePlane p);
std::optional<SourcePlane> parse_plane(std::string_view name);

/// Types the carving and identification code understands. A signature-file
/// entry with any other name still produces hits, typed by its own name.
enum class FileType { unknown, zip, docx, png, sevenz, pdf, gzip, rar, riff_wav, framed };

std::string_view file_type_name(FileType t);
FileType file_type_from_name(std::string_view name);
std::string_view file_type_extension(FileType t);

struct Signature {
    std::string type_id;
    Bytes magic;
};

class SignatureTable {
public:
    /// zip, png, sevenz, pdf, gzip, rar, riff_wav, plus the SGH1 frame header.
    static SignatureTable builtin();

    /// Appends entries from a `type_id<TAB>hex-bytes` file; '#' starts a comment.
    void load(const std::filesystem::path& path);
    void load_text(std::string_view text);
    void add(std::string type_id, Bytes magic);

    const std::vector<Signature>& entries() const { return entries_; }

private:
    std::vector<Signature> entries_;
};

struct SignatureHit {
    std::size_t offset = 0;
    std::string type_id;
    SourcePlane plane = SourcePlane::raw_bytes;
    bool validated = false;  // the bytes after the magic parse as that format's header

    bool operator==(const SignatureHit&) const = default;
};

struct ScanStream {
    SourcePlane plane;
    ByteView bytes;
};

/// Header sanity check for a magic match at `offset`. Unknown (user) types pass.
bool validate_signature(std::string_view type_id, ByteView stream, std::size_t offset);

/// Every occurrence of every table signature, ordered by (plane, offset, type).
std::vector<SignatureHit> fsa_scan(const std::vector<ScanStream>& streams,
                                   const SignatureTable& table = SignatureTable::builtin());

struct FsaConfig {
    double validated_score = 1.0;
    double unvalidated_score = 0.3;  // magic bytes only, or unexplained slack data
    Thresholds thresholds{};
};

StageResult fsa_stage(const std::vector<SignatureHit>& hits, const FsaConfig& cfg = {});

}  // namespace stegscan
