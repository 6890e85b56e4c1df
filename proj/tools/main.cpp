#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sslab/runner.hpp"

namespace {

using sslab::RunConfig;

// Attaches the shared experiment flags to a subcommand; flags given on the
// command line override config-file values.
void add_common_flags(CLI::App* cmd, RunConfig* c) {
    cmd->add_option("--model", c->model, "Model kind: wm | ym");
    cmd->add_option("--d", c->d, "Spatial dimension");
    cmd->add_option("--height", c->height,
                    "Height kind: standard | hyperboloidal | flattened-cone");
    cmd->add_option("--height-p1", c->height_p1, "alpha / kappa-bar");
    cmd->add_option("--height-p2", c->height_p2, "beta / r-bar");
    cmd->add_option("--height-p3", c->height_p3, "mollification width");
    cmd->add_option("--N", c->N, "Radial resolution (even)");
    cmd->add_option("--N-check", c->N_check, "Cross-check resolution");
    cmd->add_option("--R", c->R, "Domain radius (<=0: light-cone derived)");
    cmd->add_option("--k", c->k, "Energy grading order");
    cmd->add_option("--eps1", c->eps1, "Base boundary weight");
    cmd->add_option("--delta", c->delta, "Perturbation amplitude");
    cmd->add_option("--r", c->r, "Perturbation support radius");
    cmd->add_option("--tau-max", c->tau_max, "Final similarity time");
    cmd->add_option("--dtau", c->dtau, "Time step override (<=0: automatic)");
    cmd->add_flag("--tune", c->tune, "Shoot for the blowup time");
    cmd->add_option("--outdir", c->outdir, "Output directory");
    cmd->add_option("--seed", c->seed, "Random seed");
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw CLI::ValidationError("--config", "cannot open " + path);
    }
    nlohmann::json j;
    in >> j;
    return sslab::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for self-similar blowup stability"};
    app.require_subcommand(1);

    const std::vector<std::string> kinds = {"geometry", "profile-check",
                                            "operator-check", "spectrum",
                                            "evolve"};
    struct SubState {
        CLI::App* cmd;
        RunConfig cfg;
        std::string config_path;
    };
    std::vector<SubState> subs;
    subs.reserve(kinds.size());
    for (const auto& kind : kinds) {
        subs.push_back({app.add_subcommand(kind), RunConfig{}, ""});
        SubState& s = subs.back();
        s.cfg.subcommand = kind;
        s.cmd->add_option("--config", s.config_path,
                          "JSON config file (flags override)");
        add_common_flags(s.cmd, &s.cfg);
    }

    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Run a JSON array of configs concurrently");
    std::string sweep_config;
    std::string sweep_outdir = ".";
    sweep_cmd->add_option("--config", sweep_config, "JSON array of configs")
        ->required();
    sweep_cmd->add_option("--outdir", sweep_outdir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sweep_cmd->parsed()) {
            std::ifstream in(sweep_config);
            if (!in) {
                std::cerr << "cannot open " << sweep_config << "\n";
                return 2;
            }
            nlohmann::json arr;
            in >> arr;
            if (!arr.is_array()) {
                std::cerr << "sweep config must be a JSON array\n";
                return 2;
            }
            std::vector<RunConfig> configs;
            for (const auto& j : arr) {
                configs.push_back(sslab::config_from_json(j));
            }
            const sslab::RunResult res = sslab::sweep(configs, sweep_outdir);
            std::cout << res.summary.dump(2) << "\n";
            return res.exit_code;
        }
        for (SubState& s : subs) {
            if (!s.cmd->parsed()) {
                continue;
            }
            RunConfig cfg = s.cfg;
            if (!s.config_path.empty()) {
                RunConfig file_cfg = load_config_file(s.config_path);
                file_cfg.subcommand = s.cfg.subcommand;
                // Copy file values only for options the user did not set on
                // the command line; explicit flags win.
                const auto keep = [&](const char* flag) {
                    const CLI::Option* o = s.cmd->get_option(flag);
                    return o != nullptr && o->count() > 0;
                };
                if (!keep("--model")) s.cfg.model = file_cfg.model;
                if (!keep("--d")) s.cfg.d = file_cfg.d;
                if (!keep("--height")) s.cfg.height = file_cfg.height;
                if (!keep("--height-p1")) s.cfg.height_p1 = file_cfg.height_p1;
                if (!keep("--height-p2")) s.cfg.height_p2 = file_cfg.height_p2;
                if (!keep("--height-p3")) s.cfg.height_p3 = file_cfg.height_p3;
                if (!keep("--N")) s.cfg.N = file_cfg.N;
                if (!keep("--N-check")) s.cfg.N_check = file_cfg.N_check;
                if (!keep("--R")) s.cfg.R = file_cfg.R;
                if (!keep("--k")) s.cfg.k = file_cfg.k;
                if (!keep("--eps1")) s.cfg.eps1 = file_cfg.eps1;
                if (!keep("--delta")) s.cfg.delta = file_cfg.delta;
                if (!keep("--r")) s.cfg.r = file_cfg.r;
                if (!keep("--tau-max")) s.cfg.tau_max = file_cfg.tau_max;
                if (!keep("--dtau")) s.cfg.dtau = file_cfg.dtau;
                if (!keep("--tune")) s.cfg.tune = file_cfg.tune;
                if (!keep("--outdir")) s.cfg.outdir = file_cfg.outdir;
                if (!keep("--seed")) s.cfg.seed = file_cfg.seed;
                cfg = s.cfg;
            }
            const sslab::RunResult res = sslab::run(cfg);
            std::cout << res.summary.dump(2) << "\n";
            return res.exit_code;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
