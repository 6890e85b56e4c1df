#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace sslab {

// One experiment: everything needed to reproduce a run from a flat record.
struct RunConfig {
    std::string subcommand;           // geometry|profile-check|operator-check|
                                      // spectrum|evolve
    std::string model = "wm";         // wm | ym
    int d = 5;
    std::string height = "standard";  // standard | hyperboloidal | flattened-cone
    double height_p1 = 1.0;           // alpha | kappa-bar
    double height_p2 = 1.0;           // beta | r-bar
    double height_p3 = 0.25;          // (unused) | eps
    int N = 32;
    int N_check = 64;
    double R = 0.0;                   // <= 0: derived from the light cone
    int k = 3;
    double eps1 = 0.5;
    double delta = 1e-3;
    double r = 0.5;
    double tau_max = 5.0;
    double dtau = 0.0;                // <= 0: automatic
    bool tune = false;
    std::string outdir = ".";
    unsigned long long seed = 1;
    int index = 0;                    // position within a sweep
};

RunConfig config_from_json(const nlohmann::json& j);

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 check failure, 2 configuration error
    nlohmann::ordered_json summary;
    // Written files (relative to outdir) for the record.
    std::vector<std::string> artifacts;
};

// Executes one config, writing artifacts under config.outdir.
RunResult run(const RunConfig& config);

// Runs the configs concurrently (isolated tasks), merges the summaries in
// config order, writes sweep.json, and returns the worst exit code.
RunResult sweep(const std::vector<RunConfig>& configs,
                const std::string& outdir);

}  // namespace sslab
