#pragma once

#include "pshenv/berman.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace pshenv {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    std::string preset = "smooth";
    int nx1 = 32;
    int nx2 = 32;
    int nt = 33;
    bool offset = true;
    std::vector<double> eps_list = {1.0 / 32, 1.0 / 64};
    std::vector<double> beta_list = {256.0, 512.0, 1024.0, 2048.0, 4096.0};
    double beta0 = 1.0;
    NewtonOptions newton;
    std::vector<double> B_ladder = {0.0, 1.0, 2.0, 4.0, 8.0};
    double mask_cells = 4.0;
    bool tilde_variant = false;
    bool csv = true;
    std::filesystem::path out = "out";
};

/// ε = 2^-first, ..., 2^-(first + levels - 1).
std::vector<double> eps_levels(int first, int levels);
/// β = 2^lo, ..., 2^hi (empty when hi < lo).
std::vector<double> beta_powers(int lo, int hi);

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep their defaults. Throws InputError on a malformed value.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

enum class RunStages {
    solve,  ///< model, family, obstacles, continuation, envelope
    full,   ///< solve plus estimate scan and oracle comparison
};

struct RunManifest {
    nlohmann::json doc;
    bool complete = false;
    std::vector<std::string> failures;
};

/// Runs the pipeline and persists everything under cfg.out:
///   manifest.json      config, status, content hashes, wall-times
///   fields/            .bin + .json (and .csv) per field
///   reports/           per-solve JSON, continuation summary, scans, comparisons
/// Stage failures are recorded rather than thrown; the manifest is marked
/// INCOMPLETE and keeps every artifact completed before the failure.
RunManifest run(const RunConfig& cfg, RunStages stages = RunStages::full);

/// Re-runs the estimate scan over the solves recorded in an existing run
/// directory and rewrites reports/estimates.{json,csv}. An empty ladder keeps
/// the recorded one.
RunManifest rescan(const std::filesystem::path& dir, const std::vector<double>& B_ladder, bool tilde_variant);

nlohmann::json to_json(const SolveReport& r);

}  // namespace pshenv
