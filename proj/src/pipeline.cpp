#include "stegscan/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "stegscan/csv.hpp"
#include "stegscan/digest.hpp"
#include "stegscan/error.hpp"
#include "stegscan/stego.hpp"

namespace fs = std::filesystem;

namespace stegscan {
namespace {

double parse_double(std::string_view text, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw Error(Errc::invalid_argument, "bad number '" + std::string(text) + "' for " + std::string(what));
    return v;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

bool in_span(std::size_t offset, const Span& span) { return offset >= span.offset && offset < span.end(); }

// Alerts for non-zero bytes in a slack region that no validated signature explains.
void add_slack_alert(std::vector<SignatureHit>& hits, SourcePlane plane, ByteView bytes,
                     std::vector<std::string>& notes) {
    auto first = std::find_if(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b != 0; });
    if (first == bytes.end()) return;
    const bool explained = std::any_of(hits.begin(), hits.end(),
                                       [&](const SignatureHit& h) { return h.plane == plane && h.validated; });
    if (explained) return;
    const auto offset = static_cast<std::size_t>(first - bytes.begin());
    hits.push_back({offset, "unknown", plane, false});
    notes.push_back("unidentified data in " + std::string(plane_name(plane)) + " at offset " +
                    std::to_string(offset) + " (No match in signature table)");
}

}  // namespace

std::string_view format_name(AudioFormat f) { return f == AudioFormat::wav ? "wav" : "mp3"; }

Carrier Carrier::load(Bytes bytes) {
    Carrier c;
    if (starts_with(bytes, 0, "RIFF")) {
        c.format = AudioFormat::wav;
        c.wav = parse_wav(std::move(bytes));
        c.pcm = decode_pcm(*c.wav);
        c.lsb1 = extract_wav_lsb(*c.pcm, EmbedPlan{1, 0, ChannelPolicy::all_channels});
        c.lsb2 = extract_wav_lsb(*c.pcm, EmbedPlan{2, 0, ChannelPolicy::all_channels});
    } else {
        c.format = AudioFormat::mp3;
        c.mp3 = parse_mp3(std::move(bytes));
    }
    return c;
}

ByteView Carrier::plane(SourcePlane p) const {
    switch (p) {
        case SourcePlane::raw_bytes: return raw();
        case SourcePlane::lsb_plane: return lsb1;
        case SourcePlane::lsb2_plane: return lsb2;
        case SourcePlane::id3_padding: return mp3 ? mp3->id3_padding() : ByteView{};
        case SourcePlane::trailing: return mp3 ? mp3->trailing() : ByteView{};
    }
    return {};
}

std::vector<ScanStream> Carrier::streams() const {
    if (format == AudioFormat::wav)
        return {{SourcePlane::raw_bytes, raw()}, {SourcePlane::lsb_plane, lsb1}, {SourcePlane::lsb2_plane, lsb2}};
    std::vector<ScanStream> s{{SourcePlane::raw_bytes, raw()}};
    if (mp3->id3v2) s.push_back({SourcePlane::id3_padding, mp3->id3_padding()});
    s.push_back({SourcePlane::trailing, mp3->trailing()});
    return s;
}

void PipelineConfig::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw Error(Errc::invalid_argument, "threshold override must be <stage>=<value>: " + std::string(assignment));
    std::string key(assignment.substr(0, eq));
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    const double v = parse_double(assignment.substr(eq + 1), key);

    if (key == "saf") saf.thresholds.positive = v;
    else if (key == "saf.suspicious") saf.thresholds.suspicious = v;
    else if (key == "saf.window") saf.window = static_cast<std::size_t>(v);
    else if (key == "saf.p") saf.p_threshold = v;
    else if (key == "saf.entropy_hi") saf.entropy_band_hi = v;
    else if (key == "saf.min_pairs") saf.min_pair_count = static_cast<std::size_t>(v);
    else if (key == "spectro") spectro.thresholds.positive = v;
    else if (key == "spectro.suspicious") spectro.thresholds.suspicious = v;
    else if (key == "spectro.flatness_hi") spectro.flatness_band_hi = v;
    else if (key == "spectro.log_scale") spectro.log_diff_scale = v;
    else if (key == "fsa") fsa.thresholds.positive = v;
    else if (key == "fsa.suspicious") fsa.thresholds.suspicious = v;
    else if (key == "fca") fca.thresholds.positive = v;
    else if (key == "fca.suspicious") fca.thresholds.suspicious = v;
    else if (key == "fca.snr_low") fca.snr_low_db = v;
    else if (key == "fca.snr_high") fca.snr_high_db = v;
    else throw Error(Errc::invalid_argument, "unknown threshold key '" + key + "'");
}

nlohmann::json PipelineConfig::to_json() const {
    return {{"saf",
             {{"positive", saf.thresholds.positive},
              {"suspicious", saf.thresholds.suspicious},
              {"window", saf.window},
              {"p_threshold", saf.p_threshold},
              {"min_pair_count", saf.min_pair_count},
              {"chi_weight", saf.chi_weight},
              {"entropy_weight", saf.entropy_weight},
              {"entropy_band", {saf.entropy_band_lo, saf.entropy_band_hi}},
              {"entropy_saturation", saf.entropy_saturation}}},
            {"spectro",
             {{"positive", spectro.thresholds.positive},
              {"suspicious", spectro.thresholds.suspicious},
              {"window_size", spectro.window_size},
              {"hop", spectro.hop},
              {"log_diff_scale", spectro.log_diff_scale},
              {"flatness_band", {spectro.flatness_band_lo, spectro.flatness_band_hi}}}},
            {"fsa",
             {{"positive", fsa.thresholds.positive},
              {"suspicious", fsa.thresholds.suspicious},
              {"validated_score", fsa.validated_score},
              {"unvalidated_score", fsa.unvalidated_score}}},
            {"fca",
             {{"positive", fca.thresholds.positive},
              {"suspicious", fca.thresholds.suspicious},
              {"snr_low_db", fca.snr_low_db},
              {"snr_high_db", fca.snr_high_db}}}};
}

const StageResult& DetectionReport::stage(Stage s) const {
    auto it = std::find_if(stages.begin(), stages.end(), [&](const StageResult& r) { return r.stage == s; });
    if (it == stages.end()) throw Error(Errc::invalid_argument, "report has no stage " + std::string(stage_name(s)));
    return *it;
}

FinalVerdict decide_verdict(const std::vector<StageResult>& stages, bool hash_mismatch) {
    auto verdict_of = [&](Stage s) {
        auto it = std::find_if(stages.begin(), stages.end(), [&](const StageResult& r) { return r.stage == s; });
        return it == stages.end() ? Verdict::not_run : it->verdict;
    };
    const bool fsa = verdict_of(Stage::FSA) == Verdict::positive;
    const bool saf = verdict_of(Stage::SAF) == Verdict::positive;
    const bool spectro_not_clean = verdict_of(Stage::SPECTRO) != Verdict::clean;
    return (fsa || (saf && spectro_not_clean) || (hash_mismatch && saf)) ? FinalVerdict::stego_detected
                                                                        : FinalVerdict::clean;
}

DetectionReport run_pipeline(const fs::path& file, const PipelineInputs& inputs, const PipelineConfig& cfg) {
    const Carrier carrier = Carrier::load(read_file(file));
    return run_pipeline(file.filename().string(), carrier, inputs, cfg);
}

DetectionReport run_pipeline(const std::string& name, const Carrier& carrier, const PipelineInputs& inputs,
                             const PipelineConfig& cfg) {
    DetectionReport report;
    report.file = name;
    report.format = carrier.format;
    report.thresholds = cfg.to_json();
    report.scanned_at = inputs.scan_time;

    // HASH
    StageResult hash = StageResult::not_run(Stage::HASH, "no reference database");
    if (inputs.reference_db) {
        if (const HashRecord* rec = inputs.reference_db->find(name)) {
            const std::string actual = sha256_hex(carrier.raw());
            hash = StageResult{};
            hash.stage = Stage::HASH;
            report.hash_mismatch = actual != rec->sha256;
            hash.score = report.hash_mismatch ? 1.0 : 0.0;
            hash.verdict = report.hash_mismatch ? Verdict::positive : Verdict::clean;
            hash.detail = {{"expected_sha256", rec->sha256}, {"actual_sha256", actual}};
            if (report.hash_mismatch) report.notes.push_back("digest differs from reference database: file tampered");
        } else {
            hash = StageResult::not_run(Stage::HASH, "file not in reference database");
        }
    }
    report.stages.push_back(hash);

    std::optional<PcmAudio> reference;
    std::string reference_problem = "no reference audio";
    if (inputs.reference_audio && carrier.pcm) {
        try {
            const Carrier ref = Carrier::load(read_file(*inputs.reference_audio));
            if (ref.pcm) reference = *ref.pcm;
            else reference_problem = "reference audio is not PCM";
        } catch (const Error& e) {
            reference_problem = std::string("reference unusable: ") + e.what();
        }
    }

    // SAF
    StageResult saf = StageResult::not_run(Stage::SAF, "statistic is defined on PCM samples only");
    if (carrier.pcm) {
        try {
            saf = saf_statistics(*carrier.pcm, cfg.saf);
        } catch (const Error& e) {
            if (e.code() != Errc::too_short) throw;
            saf = StageResult::not_run(Stage::SAF, "TooShort");
        }
    }
    report.stages.push_back(saf);

    // SPECTRO runs only when the statistical stage came back negative
    StageResult spectro = StageResult::not_run(Stage::SPECTRO, "SAF not clean");
    if (saf.verdict == Verdict::clean) {
        try {
            const auto spec = compute_spectrogram(*carrier.pcm, cfg.spectro.window_size, cfg.spectro.hop);
            std::optional<Spectrogram> base;
            if (reference && reference->sample_rate == carrier.pcm->sample_rate &&
                reference->channels == carrier.pcm->channels &&
                reference->samples.size() == carrier.pcm->samples.size())
                base = compute_spectrogram(*reference, cfg.spectro.window_size, cfg.spectro.hop);
            spectro = spectro_anomaly(spec, base ? &*base : nullptr, cfg.spectro);
        } catch (const Error& e) {
            if (e.code() != Errc::too_short) throw;
            spectro = StageResult::not_run(Stage::SPECTRO, "TooShort");
        }
    }
    report.stages.push_back(spectro);

    // FSA
    const SignatureTable builtin = inputs.signatures ? SignatureTable{} : SignatureTable::builtin();
    const SignatureTable& table = inputs.signatures ? *inputs.signatures : builtin;
    auto hits = fsa_scan(carrier.streams(), table);
    if (carrier.format == AudioFormat::wav) {
        std::erase_if(hits, [](const SignatureHit& h) {
            return h.plane == SourcePlane::raw_bytes && h.offset == 0 && h.type_id == "riff_wav";
        });
    } else {
        const auto& m = *carrier.mp3;
        std::erase_if(hits, [&](const SignatureHit& h) {
            return h.plane == SourcePlane::raw_bytes &&
                   ((m.id3v2 && in_span(h.offset, m.id3v2->padding_span)) || in_span(h.offset, m.trailing_span));
        });
        if (m.id3v2) add_slack_alert(hits, SourcePlane::id3_padding, m.id3_padding(), report.notes);
        add_slack_alert(hits, SourcePlane::trailing, m.trailing(), report.notes);
        for (const auto& a : m.anomalies) report.notes.push_back(a);
    }
    report.signature_hits = hits;
    report.stages.push_back(fsa_stage(hits, cfg.fsa));

    // FCA
    StageResult fca = StageResult::not_run(Stage::FCA, reference_problem);
    if (reference) {
        try {
            fca = fca_quality(*carrier.pcm, *reference, cfg.fca);
        } catch (const Error& e) {
            if (e.code() != Errc::shape_mismatch) throw;
            fca = StageResult::not_run(Stage::FCA, "ShapeMismatch");
        }
    }
    report.stages.push_back(fca);

    // MAC
    StageResult mac = StageResult::not_run(Stage::MAC, "no file timestamps supplied");
    if (inputs.times) mac = mac_anomaly_check(*inputs.times, inputs.scan_time);
    report.mac_anomaly = mac.verdict == Verdict::positive;
    if (report.mac_anomaly) report.notes.push_back("MAC timestamps inconsistent: investigative lead");
    report.stages.push_back(mac);

    report.final_verdict = decide_verdict(report.stages, report.hash_mismatch);
    for (const auto& s : report.stages)
        if (s.score) report.confidence = std::max(report.confidence, *s.score);

    const bool any_validated =
        std::any_of(hits.begin(), hits.end(), [](const SignatureHit& h) { return h.validated; });
    if (saf.verdict == Verdict::positive && !any_validated)
        report.notes.push_back(
            "statistical evidence of LSB embedding without a recognised file signature: payload may be encrypted or "
            "unframed text and is not extractable");
    return report;
}

nlohmann::json report_to_json(const DetectionReport& r) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : r.stages) {
        nlohmann::json js = {{"stage", stage_name(s.stage)}, {"verdict", verdict_name(s.verdict)}, {"detail", s.detail}};
        js["score"] = s.score ? nlohmann::json(*s.score) : nlohmann::json(nullptr);
        stages.push_back(std::move(js));
    }
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& h : r.signature_hits)
        hits.push_back({{"plane", plane_name(h.plane)}, {"offset", h.offset}, {"type", h.type_id},
                        {"validated", h.validated}});
    return {{"file", r.file},
            {"format", format_name(r.format)},
            {"final_verdict", r.final_verdict == FinalVerdict::stego_detected ? "stego_detected" : "clean"},
            {"confidence", r.confidence},
            {"hash_mismatch", r.hash_mismatch},
            {"mac_anomaly", r.mac_anomaly},
            {"stages", stages},
            {"signature_hits", hits},
            {"notes", r.notes},
            {"thresholds", r.thresholds},
            {"scanned_at", r.scanned_at}};
}

DetectionReport report_from_json(const nlohmann::json& j) {
    try {
        DetectionReport r;
        r.file = j.at("file").get<std::string>();
        r.format = j.at("format").get<std::string>() == "wav" ? AudioFormat::wav : AudioFormat::mp3;
        r.final_verdict =
            j.at("final_verdict").get<std::string>() == "stego_detected" ? FinalVerdict::stego_detected : FinalVerdict::clean;
        r.confidence = j.at("confidence").get<double>();
        r.hash_mismatch = j.at("hash_mismatch").get<bool>();
        r.mac_anomaly = j.at("mac_anomaly").get<bool>();
        for (const auto& js : j.at("stages")) {
            StageResult s;
            auto stage = parse_stage(js.at("stage").get<std::string>());
            auto verdict = parse_verdict(js.at("verdict").get<std::string>());
            if (!stage || !verdict) throw Error(Errc::invalid_argument, "bad stage entry");
            s.stage = *stage;
            s.verdict = *verdict;
            if (!js.at("score").is_null()) s.score = js.at("score").get<double>();
            s.detail = js.at("detail");
            r.stages.push_back(std::move(s));
        }
        for (const auto& jh : j.at("signature_hits")) {
            auto plane = parse_plane(jh.at("plane").get<std::string>());
            if (!plane) throw Error(Errc::invalid_argument, "bad plane");
            r.signature_hits.push_back(
                {jh.at("offset").get<std::size_t>(), jh.at("type").get<std::string>(), *plane, jh.at("validated").get<bool>()});
        }
        r.notes = j.at("notes").get<std::vector<std::string>>();
        r.thresholds = j.at("thresholds");
        r.scanned_at = j.at("scanned_at").get<std::int64_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("malformed report: ") + e.what());
    }
}

std::string report_text(const DetectionReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string report_csv_header() {
    return "file,format,final_verdict,confidence,hash_mismatch,mac_anomaly,HASH,SAF,SPECTRO,FSA,FCA,MAC,"
           "signature_hits,validated_hits";
}

std::string report_csv_row(const DetectionReport& r) {
    csv::Row row{r.file, std::string(format_name(r.format)),
                 r.final_verdict == FinalVerdict::stego_detected ? "stego_detected" : "clean", fixed6(r.confidence),
                 r.hash_mismatch ? "true" : "false", r.mac_anomaly ? "true" : "false"};
    for (auto s : {Stage::HASH, Stage::SAF, Stage::SPECTRO, Stage::FSA, Stage::FCA, Stage::MAC})
        row.emplace_back(verdict_name(r.stage(s).verdict));
    row.push_back(std::to_string(r.signature_hits.size()));
    row.push_back(std::to_string(
        std::count_if(r.signature_hits.begin(), r.signature_hits.end(), [](const SignatureHit& h) { return h.validated; })));
    return csv::join(row);
}

}  // namespace stegscan
