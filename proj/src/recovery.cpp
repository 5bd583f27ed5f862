#include "stegscan/recovery.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "stegscan/csv.hpp"
#include "stegscan/digest.hpp"
#include "stegscan/error.hpp"
#include "stegscan/stego.hpp"

namespace fs = std::filesystem;

namespace stegscan {
namespace {

CarveResult to_end(ByteView rest, std::string note) {
    return {Bytes(rest.begin(), rest.end()), true, std::move(note)};
}

CarveResult carve_png(ByteView rest) {
    std::size_t pos = 8;
    while (rest.size() >= pos + 12) {
        const std::uint64_t len = load_be32(rest.data() + pos);
        const bool iend = starts_with(rest, pos + 4, "IEND");
        const std::uint64_t next = pos + 12 + len;
        if (next > rest.size()) break;
        pos = static_cast<std::size_t>(next);
        if (iend) return {Bytes(rest.begin(), rest.begin() + pos), false, {}};
    }
    return to_end(rest, "PNG IEND chunk not found");
}

CarveResult carve_7z(ByteView rest) {
    if (rest.size() < 32) return to_end(rest, "7z start header incomplete");
    const std::uint64_t next_offset = load_le64(rest.data() + 12);
    const std::uint64_t next_size = load_le64(rest.data() + 20);
    if (next_offset > rest.size() || next_size > rest.size() || 32 + next_offset + next_size > rest.size())
        return to_end(rest, "7z next header lies past end of stream");
    return {Bytes(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(32 + next_offset + next_size)), false, {}};
}

std::string extension_for(std::string_view type_id) {
    if (type_id == "txt") return "txt";
    const FileType t = file_type_from_name(type_id);
    return std::string(file_type_extension(t));
}

// Member paths come from untrusted archives: keep them below the output directory.
fs::path safe_member_path(const std::string& name) {
    fs::path out;
    for (const auto& part : fs::path(name).relative_path()) {
        if (part == ".." || part == "." || part.empty()) continue;
        out /= part;
    }
    return out.empty() ? fs::path("member") : out;
}

bool inside_any(const std::vector<Span>& spans, std::size_t offset) {
    return std::any_of(spans.begin(), spans.end(),
                       [&](const Span& s) { return offset >= s.offset && offset < s.end(); });
}

void append_note(std::string& note, std::string_view more) {
    if (!note.empty()) note += "; ";
    note += more;
}

}  // namespace

CarveResult carve(const SignatureHit& hit, ByteView stream) {
    if (hit.offset >= stream.size()) throw Error(Errc::invalid_argument, "hit offset past end of stream");
    const ByteView rest = stream.subspan(hit.offset);
    const std::string& type = hit.type_id;
    if (type == "zip" || type == "docx") {
        if (auto eocd = find_eocd(rest)) {
            const std::size_t end = *eocd + kEocdFixedSize + load_le16(rest.data() + *eocd + 20);
            return {Bytes(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(end)), false, {}};
        }
        return to_end(rest, "BoundaryNotFound: no end-of-central-directory record");
    }
    if (type == "png") return carve_png(rest);
    if (type == "sevenz") return carve_7z(rest);
    if (type == "framed") {
        if (auto len = framed_length(rest); len && *len <= rest.size())
            return {Bytes(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(*len)), false, {}};
        return to_end(rest, "frame length exceeds stream");
    }
    return to_end(rest, "no end boundary rule for type " + type);
}

FileType identify_type(ByteView bytes, const SignatureTable& table) {
    const Signature* best = nullptr;
    for (const auto& sig : table.entries()) {
        if (sig.magic.size() > bytes.size() || !std::equal(sig.magic.begin(), sig.magic.end(), bytes.begin())) continue;
        if (!best || sig.magic.size() > best->magic.size()) best = &sig;
    }
    if (!best) return FileType::unknown;
    const FileType t = file_type_from_name(best->type_id);
    if (t == FileType::zip && bytes.size() >= 30) {
        const std::size_t name_len = load_le16(bytes.data() + 26);
        const std::string name(reinterpret_cast<const char*>(bytes.data()) + 30,
                               std::min(name_len, bytes.size() - 30));
        if (name.rfind("[Content_Types].xml", 0) == 0 || name.find("word/") != std::string::npos)
            return FileType::docx;
    }
    return t;
}

Wordlist Wordlist::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_failure, "cannot open wordlist " + path.string());
    Wordlist w;
    w.source = path;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) w.entries.push_back(std::move(line));
    }
    if (w.entries.empty()) throw Error(Errc::invalid_argument, "wordlist is empty: " + path.string());
    return w;
}

std::optional<std::vector<ZipMember>> try_password(ByteView zip, const std::vector<ZipEntry>& entries,
                                                   std::string_view password, bool* passed_check_bytes) {
    if (passed_check_bytes) *passed_check_bytes = false;
    const ZipCryptoKeys initial(password);

    // cheap screen first: the last header byte of every encrypted entry
    for (const auto& e : entries) {
        if (!e.encrypted()) continue;
        if (e.compressed_size < kZipCryptoHeaderSize) return std::nullopt;
        ZipCryptoKeys keys = initial;
        std::uint8_t last = 0;
        for (std::size_t i = 0; i < kZipCryptoHeaderSize; ++i) last = keys.decrypt(zip[e.data_offset + i]);
        if (last != zipcrypto_check_byte(e)) return std::nullopt;
    }
    if (passed_check_bytes) *passed_check_bytes = true;

    std::vector<ZipMember> members;
    for (const auto& e : entries) {
        ByteView body = zip.subspan(e.data_offset, static_cast<std::size_t>(e.compressed_size));
        Bytes plain;
        if (e.encrypted()) {
            ZipCryptoKeys keys = initial;
            plain.reserve(body.size() - kZipCryptoHeaderSize);
            for (std::size_t i = 0; i < kZipCryptoHeaderSize; ++i) keys.decrypt(body[i]);
            for (std::size_t i = kZipCryptoHeaderSize; i < body.size(); ++i) plain.push_back(keys.decrypt(body[i]));
        } else {
            plain.assign(body.begin(), body.end());
        }
        if (e.method == 8) {
            try {
                plain = inflate_raw(plain, static_cast<std::size_t>(e.uncompressed_size));
            } catch (const Error&) {
                return std::nullopt;
            }
        } else if (e.method != 0) {
            throw Error(Errc::unsupported_format, "compression method " + std::to_string(e.method));
        }
        if (plain.size() != e.uncompressed_size || crc32(plain) != e.crc) return std::nullopt;
        members.push_back({e.name, std::move(plain), e.method == 8});
    }
    return members;
}

BruteForceResult zip_brute_force(ByteView zip, const Wordlist& wordlist, std::size_t budget) {
    const auto entries = read_zip_entries(zip);
    if (std::any_of(entries.begin(), entries.end(), [](const ZipEntry& e) { return e.aes(); }))
        throw Error(Errc::unsupported_encryption, "AES-encrypted ZIP entries cannot be attacked");
    if (std::none_of(entries.begin(), entries.end(), [](const ZipEntry& e) { return e.encrypted(); }))
        throw Error(Errc::not_encrypted, "archive has no encrypted entries");

    BruteForceResult result;
    const std::size_t limit = std::min(budget, wordlist.entries.size());
    for (std::size_t i = 0; i < limit; ++i) {
        bool screened = false;
        auto members = try_password(zip, entries, wordlist.entries[i], &screened);
        if (screened) ++result.check_byte_hits;
        if (members) {
            result.password = wordlist.entries[i];
            result.attempts = i + 1;
            result.members = std::move(*members);
            return result;
        }
    }
    throw Error(Errc::exhausted, "no password among " + std::to_string(limit) + " candidates");
}

std::vector<ExtractedArtifact> extract_all(const DetectionReport& report, const fs::path& carrier_file,
                                           const fs::path& out_dir, const ExtractOptions& options) {
    std::vector<ExtractedArtifact> artifacts;
    if (report.final_verdict != FinalVerdict::stego_detected && !options.force) return artifacts;

    const Carrier carrier = Carrier::load(read_file(carrier_file));
    const fs::path dir = out_dir / options.extracted_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_failure, "cannot create " + dir.string() + ": " + ec.message());

    const std::string stem = carrier_file.stem().string();
    std::map<SourcePlane, std::vector<Span>> carved;

    for (const auto& hit : report.signature_hits) {
        if (!hit.validated && hit.type_id != "unknown") continue;
        const ByteView stream = carrier.plane(hit.plane);
        if (hit.offset >= stream.size() || inside_any(carved[hit.plane], hit.offset)) continue;

        CarveResult cut = carve(hit, stream);
        carved[hit.plane].push_back({hit.offset, cut.bytes.size()});

        ExtractedArtifact art;
        art.source_file = carrier_file.filename().string();
        art.plane = hit.plane;
        art.carve_offset = hit.offset;
        art.truncated = cut.truncated;
        art.note = cut.note;
        art.type_id = hit.type_id;

        Bytes content = std::move(cut.bytes);
        if (hit.type_id == "framed" && !cut.truncated) {
            try {
                PayloadSpec spec = deframe_payload(content);
                content = std::move(spec.data);
                art.type_id = payload_type_name(spec.declared_type);
            } catch (const Error& e) {
                append_note(art.note, e.what());
            }
        }
        if (art.type_id == "zip" || art.type_id == "unknown") {
            const FileType t = identify_type(content);
            if (t == FileType::docx || (art.type_id == "unknown" && t != FileType::unknown))
                art.type_id = file_type_name(t);
        }

        const std::string base = stem + "_" + std::string(plane_name(hit.plane)) + "_" + std::to_string(hit.offset);
        art.output_path = dir / (base + "." + extension_for(art.type_id));
        art.length = content.size();
        write_file(art.output_path, content);
        art.sha256 = sha256_hex(content);

        if (art.type_id == "zip" || art.type_id == "docx") {
            try {
                const auto entries = read_zip_entries(content);
                const bool encrypted =
                    std::any_of(entries.begin(), entries.end(), [](const ZipEntry& e) { return e.encrypted(); });
                if (encrypted && !options.wordlist) {
                    append_note(art.note, "encrypted archive; no wordlist supplied, not decrypted");
                } else if (encrypted) {
                    const auto found = zip_brute_force(content, *options.wordlist, options.budget);
                    const fs::path member_dir = dir / (base + "_decrypted");
                    for (const auto& m : found.members) {
                        const fs::path target = member_dir / safe_member_path(m.name);
                        fs::create_directories(target.parent_path());
                        write_file(target, m.data);
                    }
                    art.decrypted = true;
                    art.password = found.password;
                }
            } catch (const Error& e) {
                if (e.code() == Errc::io_failure) throw;
                append_note(art.note, e.what());
            }
        }
        artifacts.push_back(std::move(art));
    }
    return artifacts;
}

std::string extraction_log_header() {
    return "source,plane,offset,type,length,sha256,decrypted,password_present,truncated,note";
}

void write_extraction_log(const fs::path& path, const std::vector<ExtractedArtifact>& artifacts) {
    std::string text = extraction_log_header() + "\n";
    for (const auto& a : artifacts) {
        text += csv::join({a.source_file, std::string(plane_name(a.plane)), std::to_string(a.carve_offset), a.type_id,
                           std::to_string(a.length), a.sha256, a.decrypted ? "true" : "false",
                           a.password ? "true" : "false", a.truncated ? "true" : "false", a.note});
        text += "\n";
    }
    write_text_file(path, text);
}

std::vector<ExtractionLogRow> read_extraction_log(const fs::path& path) {
    const csv::Table t = csv::read_table(path);
    std::vector<ExtractionLogRow> rows;
    for (const auto& r : t.rows) {
        ExtractionLogRow row;
        row.source = t.at(r, "source");
        row.plane = t.at(r, "plane");
        row.offset = std::stoull(t.at(r, "offset"));
        row.type = t.at(r, "type");
        row.length = std::stoull(t.at(r, "length"));
        row.sha256 = t.at(r, "sha256");
        row.decrypted = t.at(r, "decrypted") == "true";
        row.password_present = t.at(r, "password_present") == "true";
        row.truncated = t.at(r, "truncated") == "true";
        row.note = t.at(r, "note");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace stegscan
