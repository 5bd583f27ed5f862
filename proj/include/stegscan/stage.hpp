#pragma once

#include <optional>
#include <string_view>

#include <json.hpp>

namespace stegscan {

enum class Stage { HASH, SAF, SPECTRO, FSA, FCA, MAC };
enum class Verdict { clean, suspicious, positive, not_run };

std::string_view stage_name(Stage s);
std::string_view verdict_name(Verdict v);
std::optional<Stage> parse_stage(std::string_view name);
std::optional<Verdict> parse_verdict(std::string_view name);

struct Thresholds {
    double positive = 0.5;
    double suspicious = 0.2;

    Verdict classify(double score) const {
        return score >= positive ? Verdict::positive : score >= suspicious ? Verdict::suspicious : Verdict::clean;
    }
};

struct StageResult {
    Stage stage = Stage::SAF;
    std::optional<double> score;  // absent iff not_run
    Verdict verdict = Verdict::not_run;
    nlohmann::json detail = nlohmann::json::object();

    static StageResult not_run(Stage stage, std::string_view reason) {
        StageResult r;
        r.stage = stage;
        r.detail["reason"] = reason;
        return r;
    }
};

}  // namespace stegscan
