#include "stegscan/stage.hpp"

namespace stegscan {

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::HASH: return "HASH";
        case Stage::SAF: return "SAF";
        case Stage::SPECTRO: return "SPECTRO";
        case Stage::FSA: return "FSA";
        case Stage::FCA: return "FCA";
        case Stage::MAC: return "MAC";
    }
    return "?";
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::clean: return "clean";
        case Verdict::suspicious: return "suspicious";
        case Verdict::positive: return "positive";
        case Verdict::not_run: return "not_run";
    }
    return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
    for (auto s : {Stage::HASH, Stage::SAF, Stage::SPECTRO, Stage::FSA, Stage::FCA, Stage::MAC})
        if (stage_name(s) == name) return s;
    return std::nullopt;
}

std::optional<Verdict> parse_verdict(std::string_view name) {
    for (auto v : {Verdict::clean, Verdict::suspicious, Verdict::positive, Verdict::not_run})
        if (verdict_name(v) == name) return v;
    return std::nullopt;
}

}  // namespace stegscan
