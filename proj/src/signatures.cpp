#include "stegscan/signatures.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <sstream>

#include "stegscan/error.hpp"
#include "stegscan/stego.hpp"

namespace stegscan {

std::string_view plane_name(SourcePlane p) {
    switch (p) {
        case SourcePlane::raw_bytes: return "raw_bytes";
        case SourcePlane::lsb_plane: return "lsb_plane";
        case SourcePlane::lsb2_plane: return "lsb2_plane";
        case SourcePlane::id3_padding: return "id3_padding";
        case SourcePlane::trailing: return "trailing";
    }
    return "?";
}

std::optional<SourcePlane> parse_plane(std::string_view name) {
    for (auto p : {SourcePlane::raw_bytes, SourcePlane::lsb_plane, SourcePlane::lsb2_plane, SourcePlane::id3_padding,
                   SourcePlane::trailing})
        if (plane_name(p) == name) return p;
    return std::nullopt;
}

std::string_view file_type_name(FileType t) {
    switch (t) {
        case FileType::unknown: return "unknown";
        case FileType::zip: return "zip";
        case FileType::docx: return "docx";
        case FileType::png: return "png";
        case FileType::sevenz: return "sevenz";
        case FileType::pdf: return "pdf";
        case FileType::gzip: return "gzip";
        case FileType::rar: return "rar";
        case FileType::riff_wav: return "riff_wav";
        case FileType::framed: return "framed";
    }
    return "unknown";
}

FileType file_type_from_name(std::string_view name) {
    for (auto t : {FileType::zip, FileType::docx, FileType::png, FileType::sevenz, FileType::pdf, FileType::gzip,
                   FileType::rar, FileType::riff_wav, FileType::framed})
        if (file_type_name(t) == name) return t;
    return FileType::unknown;
}

std::string_view file_type_extension(FileType t) {
    switch (t) {
        case FileType::zip: return "zip";
        case FileType::docx: return "docx";
        case FileType::png: return "png";
        case FileType::sevenz: return "7z";
        case FileType::pdf: return "pdf";
        case FileType::gzip: return "gz";
        case FileType::rar: return "rar";
        case FileType::riff_wav: return "wav";
        case FileType::framed: return "sgh";
        case FileType::unknown: return "bin";
    }
    return "bin";
}

SignatureTable SignatureTable::builtin() {
    SignatureTable t;
    t.add("zip", from_hex("504B0304"));
    t.add("png", from_hex("89504E470D0A1A0A"));
    t.add("sevenz", from_hex("377ABCAF271C"));
    t.add("pdf", from_hex("255044462D"));
    t.add("gzip", from_hex("1F8B"));
    t.add("rar", from_hex("526172211A07"));
    t.add("riff_wav", from_hex("52494646"));
    t.add("framed", from_hex("53474831"));
    return t;
}

void SignatureTable::add(std::string type_id, Bytes magic) {
    if (type_id.empty() || magic.empty()) throw Error(Errc::invalid_argument, "signature needs a type and bytes");
    entries_.push_back({std::move(type_id), std::move(magic)});
}

void SignatureTable::load_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(Errc::invalid_argument, "signature line " + std::to_string(lineno) + ": expected type<TAB>hex");
        std::string type = line.substr(0, tab);
        type.erase(type.find_last_not_of(" \r") + 1);
        std::string hex = line.substr(tab + 1);
        hex.erase(std::remove(hex.begin(), hex.end(), '\r'), hex.end());
        add(std::move(type), from_hex(hex));
    }
}

void SignatureTable::load(const std::filesystem::path& path) {
    const Bytes raw = read_file(path);
    load_text(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
}

bool validate_signature(std::string_view type, ByteView s, std::size_t off) {
    const std::size_t avail = off < s.size() ? s.size() - off : 0;
    const std::uint8_t* p = s.data() + off;
    if (type == "zip") {
        if (avail < 30) return false;
        const auto version = load_le16(p + 4);
        const auto method = load_le16(p + 8);
        const auto name_len = load_le16(p + 26);
        const bool method_ok = method == 0 || method == 8 || method == 9 || method == 12 || method == 14 ||
                               method == 93 || method == 95 || method == 99;
        return version <= 63 && method_ok && name_len > 0 && name_len <= 4096 && 30u + name_len <= avail;
    }
    if (type == "png") return avail >= 16 && starts_with(s, off + 8, std::string_view("\0\0\0\x0DIHDR", 8));
    if (type == "sevenz") {
        if (avail < 32 || p[6] != 0 || p[7] > 4) return false;
        return load_le32(p + 8) == crc32(s.subspan(off + 12, 20));
    }
    if (type == "pdf") return avail >= 8 && std::isdigit(p[5]) && p[6] == '.' && std::isdigit(p[7]);
    if (type == "gzip") {
        if (avail < 10 || p[2] != 8 || (p[3] & 0xE0) != 0) return false;
        return (p[8] == 0 || p[8] == 2 || p[8] == 4) && (p[9] <= 13 || p[9] == 255);
    }
    if (type == "rar") return avail >= 7 && (p[6] == 0 || (avail >= 8 && p[6] == 1 && p[7] == 0));
    if (type == "riff_wav") return avail >= 16 && starts_with(s, off + 8, "WAVEfmt ");
    if (type == "framed") {
        auto total = framed_length(s.subspan(off));
        return total && *total <= avail;
    }
    return true;
}

std::vector<SignatureHit> fsa_scan(const std::vector<ScanStream>& streams, const SignatureTable& table) {
    std::vector<SignatureHit> hits;
    for (const auto& stream : streams) {
        const ByteView data = stream.bytes;
        for (const auto& sig : table.entries()) {
            const std::size_t n = sig.magic.size();
            if (data.size() < n) continue;
            const std::uint8_t first = sig.magic[0];
            const std::uint8_t* base = data.data();
            const std::size_t last = data.size() - n;
            std::size_t pos = 0;
            while (pos <= last) {
                const void* found = std::memchr(base + pos, first, last - pos + 1);
                if (!found) break;
                pos = static_cast<std::size_t>(static_cast<const std::uint8_t*>(found) - base);
                if (std::memcmp(base + pos, sig.magic.data(), n) == 0)
                    hits.push_back({pos, sig.type_id, stream.plane, validate_signature(sig.type_id, data, pos)});
                ++pos;
            }
        }
    }
    std::sort(hits.begin(), hits.end(), [](const SignatureHit& a, const SignatureHit& b) {
        if (a.plane != b.plane) return a.plane < b.plane;
        if (a.offset != b.offset) return a.offset < b.offset;
        return a.type_id < b.type_id;
    });
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    return hits;
}

StageResult fsa_stage(const std::vector<SignatureHit>& hits, const FsaConfig& cfg) {
    const auto validated = std::count_if(hits.begin(), hits.end(), [](const SignatureHit& h) { return h.validated; });
    StageResult r;
    r.stage = Stage::FSA;
    r.score = validated > 0 ? cfg.validated_score : hits.empty() ? 0.0 : cfg.unvalidated_score;
    r.verdict = cfg.thresholds.classify(*r.score);
    r.detail["hits"] = hits.size();
    r.detail["validated_hits"] = validated;
    if (hits.empty()) r.detail["comment"] = "No match";
    return r;
}

}  // namespace stegscan
