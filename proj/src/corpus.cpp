#include "stegscan/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <zlib.h>

#include "stegscan/csv.hpp"
#include "stegscan/digest.hpp"
#include "stegscan/error.hpp"
#include "stegscan/mp3.hpp"
#include "stegscan/zip.hpp"

namespace fs = std::filesystem;

namespace stegscan {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix(splitmix(seed ^ splitmix(a)) + b);
}

// Raw engine output only: std distributions are not portable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <class T>
void shuffle(std::vector<T>& v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(rng, i)]);
}

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_num(std::string_view s, std::string_view key) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(Errc::invalid_argument, "bad value '" + std::string(s) + "' for " + std::string(key));
    return v;
}

std::uint64_t parse_u64(std::string_view s, std::string_view key) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(Errc::invalid_argument, "bad integer '" + std::string(s) + "' for " + std::string(key));
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool known_kind(std::string_view k) {
    return std::find(std::begin(kPayloadKinds), std::end(kPayloadKinds), k) != std::end(kPayloadKinds);
}

// Lower-case words and spaces only, so no file signature can appear by accident.
std::string seeded_text(std::size_t size, std::mt19937_64& rng) {
    static constexpr std::string_view kSyllables[] = {"ka", "lo", "mi", "ne", "su", "ta", "ri", "po", "da", "ve",
                                                     "sho", "ren", "tal", "mor", "gin", "bel"};
    std::string text;
    std::size_t line = 0;
    while (text.size() < size) {
        const std::size_t n = 1 + below(rng, 3);
        for (std::size_t i = 0; i < n; ++i) text += kSyllables[below(rng, std::size(kSyllables))];
        line += n * 2 + 1;
        if (line > 64) {
            text += '\n';
            line = 0;
        } else {
            text += ' ';
        }
    }
    text.resize(size);
    return text;
}

void png_chunk(Bytes& out, std::string_view type, ByteView data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    Bytes typed = to_bytes(type);
    typed.insert(typed.end(), data.begin(), data.end());
    out.insert(out.end(), typed.begin(), typed.end());
    put_be32(out, crc32(typed));
}

Bytes make_png(std::size_t size, std::mt19937_64& rng) {
    constexpr std::uint32_t kSide = 16;
    Bytes ihdr;
    put_be32(ihdr, kSide);
    put_be32(ihdr, kSide);
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit greyscale

    Bytes raw;
    for (std::uint32_t y = 0; y < kSide; ++y) {
        raw.push_back(0);  // filter: none
        for (std::uint32_t x = 0; x < kSide; ++x) raw.push_back(static_cast<std::uint8_t>(rng()));
    }
    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    Bytes idat(zlen);
    if (compress2(idat.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw Error(Errc::io_failure, "zlib compress failed");
    idat.resize(zlen);

    Bytes out = to_bytes("\x89PNG\r\n\x1a\n");
    png_chunk(out, "IHDR", ihdr);
    png_chunk(out, "IDAT", idat);
    const std::size_t base = out.size() + 12;  // + IEND
    if (size >= base + 12) {
        png_chunk(out, "paDd", Bytes(size - base - 12, 0));
    } else if (size + 64 < base) {
        throw Error(Errc::size_too_small, "png needs at least " + std::to_string(base - 64) + " bytes");
    }
    png_chunk(out, "IEND", {});
    return out;
}

// Archive with the given members plus a stored filler sized to land on `size` exactly.
Bytes sized_zip(std::vector<ZipMember> members, const std::string& filler_name, std::size_t size,
                const std::optional<std::string>& password, std::uint64_t seed, std::mt19937_64& rng) {
    members.push_back({filler_name, {}, false});
    const std::size_t base = write_zip(members, password, seed).size();
    if (size + 64 < base)
        throw Error(Errc::size_too_small, "archive needs at least " + std::to_string(base - 64) + " bytes");
    if (size > base) members.back().data = to_bytes(seeded_text(size - base, rng));
    return write_zip(members, password, seed);
}

constexpr std::string_view kContentTypes =
    "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
    "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
    "<Default Extension=\"rels\" ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>"
    "<Default Extension=\"xml\" ContentType=\"application/xml\"/>"
    "<Default Extension=\"bin\" ContentType=\"application/octet-stream\"/>"
    "<Override PartName=\"/word/document.xml\" "
    "ContentType=\"application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml\"/>"
    "</Types>";

constexpr std::string_view kRels =
    "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
    "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">"
    "<Relationship Id=\"rId1\" "
    "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument\" "
    "Target=\"word/document.xml\"/></Relationships>";

std::string document_xml(std::mt19937_64& rng) {
    std::string xml =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
        "<w:document xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\"><w:body>";
    for (int p = 0; p < 3; ++p) {
        std::string text = seeded_text(80, rng);
        std::replace(text.begin(), text.end(), '\n', ' ');
        xml += "<w:p><w:r><w:t>" + text + "</w:t></w:r></w:p>";
    }
    return xml + "</w:body></w:document>";
}

constexpr std::uint8_t kMp3FrameHeader[4] = {0xFF, 0xFB, 0x90, 0x00};  // MPEG-1 L3, 128 kbps, 44100 Hz
constexpr std::size_t kMp3FrameLength = 417;
constexpr std::size_t kId3Padding = 4096;

std::string manifest_header() {
    return "filename,format,duration_s,carrier,is_stego,payload_type,payload_bytes,embed_mode,embed_location,"
           "bits_per_sample,zip_password,payload_sha256";
}

}  // namespace

std::string_view carrier_kind_name(CarrierKind k) {
    switch (k) {
        case CarrierKind::sine_tone: return "sine_tone";
        case CarrierKind::swept_tone: return "swept_tone";
        case CarrierKind::shaped_noise: return "shaped_noise";
    }
    return "?";
}

CorpusConfig CorpusConfig::full_scale() {
    CorpusConfig c;
    c.total_files = 320;
    c.min_duration = 10;
    c.max_duration = 1600;
    return c;
}

void CorpusConfig::set(std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "total_files") total_files = parse_u64(value, key);
    else if (key == "min_duration") min_duration = parse_num(value, key);
    else if (key == "max_duration") max_duration = parse_num(value, key);
    else if (key == "duration_schedule") {
        if (value == "linear") duration_schedule = DurationSchedule::linear;
        else if (value == "geometric") duration_schedule = DurationSchedule::geometric;
        else throw Error(Errc::invalid_argument, "duration_schedule must be linear or geometric");
    } else if (key == "payload_rate") payload_rate = parse_num(value, key);
    else if (key == "payload_mix") {
        // txt:0.2,docx:0.2,... ; kinds not listed get weight 0
        std::vector<std::pair<std::string, double>> mix;
        for (auto k : kPayloadKinds) mix.emplace_back(std::string(k), 0.0);
        std::size_t start = 0;
        while (start <= value.size()) {
            const auto comma = std::min(value.find(',', start), value.size());
            const auto item = trim(value.substr(start, comma - start));
            const auto colon = item.find(':');
            if (colon == std::string_view::npos)
                throw Error(Errc::invalid_argument, "payload_mix item must be kind:weight");
            const auto kind = trim(item.substr(0, colon));
            auto it = std::find_if(mix.begin(), mix.end(), [&](const auto& p) { return p.first == kind; });
            if (it == mix.end()) throw Error(Errc::invalid_argument, "unknown payload kind '" + std::string(kind) + "'");
            it->second = parse_num(trim(item.substr(colon + 1)), key);
            start = comma + 1;
        }
        payload_mix = std::move(mix);
    } else if (key == "clean_fraction") clean_fraction = parse_num(value, key);
    else if (key == "seed") seed = parse_u64(value, key);
    else if (key == "sample_rate") sample_rate = static_cast<std::uint32_t>(parse_u64(value, key));
    else if (key == "bit_depth") bit_depth = static_cast<std::uint16_t>(parse_u64(value, key));
    else if (key == "carrier_resolution_bits") carrier_resolution_bits = static_cast<int>(parse_u64(value, key));
    else if (key == "bits_per_sample") bits_per_sample = static_cast<int>(parse_u64(value, key));
    else if (key == "embed_mode") embed_mode = std::string(value);
    else if (key == "wordlist_size") wordlist_size = parse_u64(value, key);
    else throw Error(Errc::invalid_argument, "unknown corpus config key '" + std::string(key) + "'");
}

void CorpusConfig::load_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw Error(Errc::invalid_argument, "expected key=value: " + std::string(t));
        set(trim(t.substr(0, eq)), t.substr(eq + 1));
    }
}

CorpusConfig CorpusConfig::load(const fs::path& path) {
    const Bytes raw = read_file(path);
    CorpusConfig c;
    c.load_text(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
    return c;
}

std::string CorpusConfig::to_text() const {
    std::string mix;
    for (const auto& [k, w] : payload_mix) {
        if (!mix.empty()) mix += ',';
        mix += k + ":" + num(w);
    }
    std::string t;
    t += "total_files=" + std::to_string(total_files) + "\n";
    t += "min_duration=" + num(min_duration) + "\n";
    t += "max_duration=" + num(max_duration) + "\n";
    t += std::string("duration_schedule=") + (duration_schedule == DurationSchedule::linear ? "linear" : "geometric") +
         "\n";
    t += "payload_rate=" + num(payload_rate) + "\n";
    t += "payload_mix=" + mix + "\n";
    t += "clean_fraction=" + num(clean_fraction) + "\n";
    t += "seed=" + std::to_string(seed) + "\n";
    t += "sample_rate=" + std::to_string(sample_rate) + "\n";
    t += "bit_depth=" + std::to_string(bit_depth) + "\n";
    t += "carrier_resolution_bits=" + std::to_string(carrier_resolution_bits) + "\n";
    t += "bits_per_sample=" + std::to_string(bits_per_sample) + "\n";
    t += "embed_mode=" + embed_mode + "\n";
    t += "wordlist_size=" + std::to_string(wordlist_size) + "\n";
    return t;
}

void CorpusConfig::validate() const {
    auto fail = [](const std::string& m) { throw Error(Errc::invalid_argument, m); };
    if (total_files < 2 || total_files % 2) fail("total_files must be even and at least 2");
    if (!(min_duration > 0) || !(min_duration < max_duration)) fail("need 0 < min_duration < max_duration");
    if (!(payload_rate > 0)) fail("payload_rate must be positive");
    double sum = 0;
    for (const auto& [k, w] : payload_mix) {
        if (!known_kind(k)) fail("unknown payload kind '" + k + "'");
        if (w < 0) fail("negative weight for " + k);
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("payload_mix weights must sum to 1");
    if (!(clean_fraction >= 0 && clean_fraction < 1)) fail("clean_fraction must lie in [0,1)");
    if (sample_rate == 0) fail("sample_rate must be positive");
    if (bit_depth != 8 && bit_depth != 16 && bit_depth != 24) fail("bit_depth must be 8, 16 or 24");
    if (carrier_resolution_bits < 2 || carrier_resolution_bits > bit_depth)
        fail("carrier_resolution_bits must lie in [2, bit_depth]");
    if (bits_per_sample != 1 && bits_per_sample != 2) fail("bits_per_sample must be 1 or 2");
    if (embed_mode != "auto" && embed_mode != "raw" && embed_mode != "framed")
        fail("embed_mode must be auto, raw or framed");
    if (wordlist_size == 0) fail("wordlist_size must be positive");
}

PcmAudio synthesize_carrier(CarrierKind kind, double duration, const CorpusConfig& config) {
    if (!(duration > 0)) throw Error(Errc::invalid_argument, "duration must be positive");
    PcmAudio pcm;
    pcm.sample_rate = config.sample_rate;
    pcm.bit_depth = config.bit_depth;
    pcm.channels = 1;
    const auto n = static_cast<std::size_t>(std::llround(duration * config.sample_rate));
    pcm.samples.resize(n);

    const double full = pcm.max_value();
    const double amp = 0.5 * full;
    const int drop = std::max(0, static_cast<int>(config.bit_depth) - config.carrier_resolution_bits);
    const double step = std::ldexp(1.0, drop);
    auto quantize = [&](double x) {
        const double v = std::round(std::round(x * amp) / step) * step;
        return static_cast<std::int32_t>(std::clamp(v, -full - 1, full));
    };
    const double rate = config.sample_rate;
    constexpr double two_pi = 2 * std::numbers::pi;

    switch (kind) {
        case CarrierKind::sine_tone:
            for (std::size_t i = 0; i < n; ++i) pcm.samples[i] = quantize(std::sin(two_pi * 440.0 * i / rate));
            break;
        case CarrierKind::swept_tone: {
            const double f0 = 100.0, f1 = std::min(5000.0, rate / 4);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = i / rate;
                pcm.samples[i] = quantize(std::sin(two_pi * (f0 * t + (f1 - f0) * t * t / (2 * duration))));
            }
            break;
        }
        case CarrierKind::shaped_noise: {
            std::mt19937_64 rng(derive(config.seed, 0x6E6F697365, static_cast<std::uint64_t>(duration * 1000)));
            std::vector<double> x(n);
            double y = 0, peak = 0;
            for (std::size_t i = 0; i < n; ++i) {
                y = 0.9 * y + 0.1 * (2 * unit(rng) - 1);
                x[i] = y;
                peak = std::max(peak, std::abs(y));
            }
            if (peak == 0) peak = 1;
            for (std::size_t i = 0; i < n; ++i) pcm.samples[i] = quantize(x[i] / peak);
            break;
        }
    }
    return pcm;
}

std::size_t mp3_frame_count(double duration) {
    return static_cast<std::size_t>(std::ceil(duration * 44100.0 / 1152.0 - 1e-9));
}

Bytes synthesize_mp3_carrier(double duration, const CorpusConfig& config) {
    if (!(duration > 0)) throw Error(Errc::invalid_argument, "duration must be positive");
    const std::string title = "synthetic carrier seed " + std::to_string(config.seed) + " duration " + num(duration);
    Bytes body;
    put_ascii(body, "TIT2");
    put_be32(body, static_cast<std::uint32_t>(title.size() + 1));
    body.insert(body.end(), {0, 0, 0});  // flags, ISO-8859-1
    put_ascii(body, title);
    body.resize(body.size() + kId3Padding, 0);

    Bytes out = to_bytes("ID3");
    out.insert(out.end(), {3, 0, 0});
    put_synchsafe(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());

    Bytes frame(kMp3FrameLength, 0);
    std::copy(std::begin(kMp3FrameHeader), std::end(kMp3FrameHeader), frame.begin());
    const std::size_t count = mp3_frame_count(duration);
    out.reserve(out.size() + count * kMp3FrameLength);
    for (std::size_t i = 0; i < count; ++i) out.insert(out.end(), frame.begin(), frame.end());
    return out;
}

GeneratedPayload generate_payload(std::string_view kind, std::size_t size, std::uint64_t seed,
                                  const std::vector<std::string>& wordlist) {
    if (size == 0) throw Error(Errc::size_too_small, "payload size must be positive");
    std::mt19937_64 rng(seed);
    GeneratedPayload g;
    if (kind == "txt") {
        g.spec.declared_type = PayloadType::txt;
        g.spec.data = to_bytes(seeded_text(size, rng));
    } else if (kind == "txt_encrypted") {
        g.spec.declared_type = PayloadType::txt;
        g.spec.data = to_bytes(seeded_text(size, rng));
        for (auto& b : g.spec.data) b ^= static_cast<std::uint8_t>(rng() >> 56);
    } else if (kind == "png") {
        g.spec.declared_type = PayloadType::png;
        g.spec.data = make_png(size, rng);
    } else if (kind == "zip" || kind == "zip_encrypted") {
        g.spec.declared_type = PayloadType::zip;
        if (kind == "zip_encrypted") {
            if (wordlist.empty()) throw Error(Errc::invalid_argument, "zip_encrypted needs a wordlist");
            g.password = wordlist[below(rng, wordlist.size())];
        }
        std::vector<ZipMember> members{{"notes.txt", to_bytes(seeded_text(256, rng)), true}};
        g.spec.data = sized_zip(std::move(members), "pad.bin", size, g.password, rng(), rng);
    } else if (kind == "docx") {
        g.spec.declared_type = PayloadType::docx;
        std::vector<ZipMember> members{{"[Content_Types].xml", to_bytes(kContentTypes), true},
                                       {"_rels/.rels", to_bytes(kRels), true},
                                       {"word/document.xml", to_bytes(document_xml(rng)), true}};
        g.spec.data = sized_zip(std::move(members), "word/pad.bin", size, std::nullopt, rng(), rng);
    } else {
        throw Error(Errc::invalid_argument, "unknown payload kind '" + std::string(kind) + "'");
    }
    return g;
}

std::vector<std::string> generate_wordlist(std::uint64_t seed, std::size_t count) {
    static constexpr std::string_view kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v",
                                                   "z", "ch", "sh", "tr", "gr"};
    static constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
    std::mt19937_64 rng(seed);
    std::vector<std::string> words;
    std::set<std::string> seen;
    while (words.size() < count) {
        std::string w;
        const std::size_t syllables = 2 + below(rng, 3);
        for (std::size_t i = 0; i < syllables; ++i) {
            w += kOnsets[below(rng, std::size(kOnsets))];
            w += kVowels[below(rng, std::size(kVowels))];
        }
        if (below(rng, 3) == 0) w += std::to_string(below(rng, 100));
        if (seen.insert(w).second) words.push_back(std::move(w));
    }
    return words;
}

const ManifestEntry* CorpusManifest::find(std::string_view filename) const {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const ManifestEntry& e) { return e.filename == filename; });
    return it == entries.end() ? nullptr : &*it;
}

std::string manifest_entries_csv(const std::vector<ManifestEntry>& entries) {
    std::string text = manifest_header() + "\n";
    for (const auto& e : entries) {
        text += csv::join({e.filename, std::string(format_name(e.format)), num(e.duration), e.carrier,
                           e.is_stego ? "true" : "false", e.payload_type,
                           e.is_stego ? std::to_string(e.payload_bytes) : "", e.embed_mode, e.embed_location,
                           e.is_stego ? std::to_string(e.bits_per_sample) : "", e.zip_password.value_or(""),
                           e.payload_sha256});
        text += "\n";
    }
    return text;
}

std::string manifest_text(const CorpusManifest& m) {
    std::string text = manifest_entries_csv(m.entries);
    std::istringstream cfg(m.config.to_text());
    std::string line;
    while (std::getline(cfg, line)) text += "# config " + line + "\n";
    text += "# manifest_sha256=" + m.manifest_sha256 + "\n";
    return text;
}

CorpusManifest read_manifest(const fs::path& path) {
    const Bytes raw = read_file(path);
    const std::string_view text(reinterpret_cast<const char*>(raw.data()), raw.size());
    CorpusManifest m;
    std::istringstream in{std::string(text)};
    std::string line, config_text;
    while (std::getline(in, line)) {
        if (line.rfind("# config ", 0) == 0) config_text += line.substr(9) + "\n";
        else if (line.rfind("# manifest_sha256=", 0) == 0) m.manifest_sha256 = std::string(trim(line.substr(18)));
    }
    m.config.load_text(config_text);

    auto rows = csv::parse(text);
    if (rows.empty() || csv::join(rows.front()) != manifest_header())
        throw Error(Errc::invalid_argument, "not a corpus manifest: " + path.string());
    csv::Table t{rows.front(), {rows.begin() + 1, rows.end()}};
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw Error(Errc::invalid_argument, "ragged manifest row");
        ManifestEntry e;
        e.filename = t.at(r, "filename");
        e.format = t.at(r, "format") == "mp3" ? AudioFormat::mp3 : AudioFormat::wav;
        e.duration = parse_num(t.at(r, "duration_s"), "duration_s");
        e.carrier = t.at(r, "carrier");
        e.is_stego = t.at(r, "is_stego") == "true";
        e.payload_type = t.at(r, "payload_type");
        if (e.is_stego) {
            e.payload_bytes = parse_u64(t.at(r, "payload_bytes"), "payload_bytes");
            e.bits_per_sample = static_cast<int>(parse_u64(t.at(r, "bits_per_sample"), "bits_per_sample"));
        }
        e.embed_mode = t.at(r, "embed_mode");
        e.embed_location = t.at(r, "embed_location");
        if (!t.at(r, "zip_password").empty()) e.zip_password = t.at(r, "zip_password");
        e.payload_sha256 = t.at(r, "payload_sha256");
        m.entries.push_back(std::move(e));
    }
    const std::string digest = sha256_hex(to_bytes(manifest_entries_csv(m.entries)));
    if (!m.manifest_sha256.empty() && digest != m.manifest_sha256)
        throw Error(Errc::invalid_argument, "manifest_sha256 does not match entries in " + path.string());
    m.manifest_sha256 = digest;
    return m;
}

CorpusManifest generate_corpus(const CorpusConfig& config, const fs::path& out_dir) {
    config.validate();
    const fs::path original = out_dir / "original";
    std::error_code ec;
    fs::create_directories(original, ec);
    if (ec) throw Error(Errc::io_failure, "cannot create " + original.string() + ": " + ec.message());

    CorpusManifest manifest;
    manifest.config = config;
    const std::vector<std::string> wordlist = generate_wordlist(derive(config.seed, 0x776F726473), config.wordlist_size);
    std::string words;
    for (const auto& w : wordlist) words += w + "\n";
    write_text_file(out_dir / "wordlist.txt", words);

    const std::size_t per_format = config.total_files / 2;
    std::vector<double> durations(per_format);
    for (std::size_t i = 0; i < per_format; ++i) {
        const double f = per_format == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(per_format - 1);
        const double d = config.duration_schedule == DurationSchedule::linear
                             ? config.min_duration + f * (config.max_duration - config.min_duration)
                             : config.min_duration * std::pow(config.max_duration / config.min_duration, f);
        durations[i] = std::round(d * 1000.0) / 1000.0;
    }

    const auto clean_count = static_cast<std::size_t>(std::llround(config.clean_fraction * per_format));
    const std::size_t stego_count = per_format - clean_count;

    for (AudioFormat fmt : {AudioFormat::wav, AudioFormat::mp3}) {
        const std::uint64_t fmt_tag = fmt == AudioFormat::wav ? 1 : 2;

        std::vector<std::size_t> order(per_format);
        for (std::size_t i = 0; i < per_format; ++i) order[i] = i;
        shuffle(order, derive(config.seed, fmt_tag, 0x636C65616E));
        std::vector<bool> clean(per_format, false);
        for (std::size_t i = 0; i < clean_count; ++i) clean[order[i]] = true;

        // largest-remainder quotas over the mix, then a seeded shuffle
        std::vector<std::string> kinds;
        std::vector<std::pair<double, std::size_t>> remainders;
        for (std::size_t k = 0; k < config.payload_mix.size(); ++k) {
            const double exact = config.payload_mix[k].second * static_cast<double>(stego_count);
            const auto whole = static_cast<std::size_t>(std::floor(exact));
            kinds.insert(kinds.end(), whole, config.payload_mix[k].first);
            remainders.emplace_back(exact - static_cast<double>(whole), k);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t r = 0; kinds.size() < stego_count; ++r)
            kinds.push_back(config.payload_mix[remainders[r % remainders.size()].second].first);
        shuffle(kinds, derive(config.seed, fmt_tag, 0x6B696E6473));

        std::size_t stego_ordinal = 0;
        for (std::size_t i = 0; i < per_format; ++i) {
            ManifestEntry e;
            char name[32];
            std::snprintf(name, sizeof name, "%s_%03zu.%s", std::string(format_name(fmt)).c_str(), i,
                          std::string(format_name(fmt)).c_str());
            e.filename = name;
            e.format = fmt;
            e.duration = durations[i];
            e.is_stego = !clean[i];
            const std::uint64_t entry_seed = derive(config.seed, fmt_tag, i + 1);

            std::optional<GeneratedPayload> payload;
            if (e.is_stego) {
                e.payload_type = kinds[stego_ordinal];
                auto size = static_cast<std::size_t>(std::llround(config.payload_rate * e.duration));
                // short carriers can ask for less than a docx/zip skeleton; grow to the smallest that fits
                while (!payload) {
                    try {
                        payload = generate_payload(e.payload_type, size, entry_seed, wordlist);
                    } catch (const Error& err) {
                        if (err.code() != Errc::size_too_small) throw;
                        size += 64;
                    }
                }
                const bool magicless = e.payload_type == "txt" || e.payload_type == "txt_encrypted";
                const bool framed = config.embed_mode == "framed" || (config.embed_mode == "auto" && magicless);
                payload->spec.mode = framed ? EmbedMode::framed : EmbedMode::raw;
                e.embed_mode = framed ? "framed" : "raw";
                e.payload_bytes = payload->spec.data.size();
                e.payload_sha256 = sha256_hex(payload->spec.data);
                e.zip_password = payload->password;
            }

            Bytes file;
            if (fmt == AudioFormat::wav) {
                const auto kind = static_cast<CarrierKind>(i % 3);
                e.carrier = carrier_kind_name(kind);
                CorpusConfig carrier_cfg = config;
                carrier_cfg.seed = entry_seed;
                PcmAudio pcm = synthesize_carrier(kind, e.duration, carrier_cfg);
                if (payload) {
                    std::mt19937_64 rng(derive(entry_seed, 0x7374617274));
                    EmbedPlan plan{config.bits_per_sample, 8 * below(rng, 512), ChannelPolicy::all_channels};
                    pcm = embed_wav_lsb(pcm, payload->spec, plan);
                    e.bits_per_sample = config.bits_per_sample;
                    e.embed_location = config.bits_per_sample == 1 ? "lsb_plane" : "lsb2_plane";
                }
                file = encode_wav(pcm);
            } else {
                e.carrier = "template";
                file = synthesize_mp3_carrier(e.duration, config);
                if (payload) {
                    const Mp3Stream stream = parse_mp3(file);
                    Mp3Location loc = stego_ordinal % 2 == 0 ? Mp3Location::id3_padding : Mp3Location::trailing_append;
                    if (loc == Mp3Location::id3_padding &&
                        serialize_payload(payload->spec).size() > stream.id3v2->padding_span.length)
                        loc = Mp3Location::trailing_append;
                    file = embed_mp3_meta(stream, payload->spec, loc);
                    e.bits_per_sample = 0;
                    e.embed_location = mp3_location_name(loc);
                }
            }
            if (e.is_stego) ++stego_ordinal;
            write_file(original / e.filename, file);
            manifest.entries.push_back(std::move(e));
        }
    }

    manifest.manifest_sha256 = sha256_hex(to_bytes(manifest_entries_csv(manifest.entries)));
    write_text_file(out_dir / "manifest.csv", manifest_text(manifest));
    return manifest;
}

}  // namespace stegscan
