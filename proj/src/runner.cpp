#include "sslab/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <stdexcept>

#include "sslab/chart.hpp"
#include "sslab/energy.hpp"
#include "sslab/evolve.hpp"
#include "sslab/grid.hpp"
#include "sslab/height.hpp"
#include "sslab/model.hpp"
#include "sslab/operators.hpp"
#include "sslab/spectrum.hpp"

namespace sslab {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

HeightFunction make_height(const RunConfig& c) {
    if (c.height == "standard") {
        return HeightFunction::standard();
    }
    if (c.height == "hyperboloidal") {
        return HeightFunction::hyperboloidal(c.height_p1, c.height_p2);
    }
    if (c.height == "flattened-cone") {
        return HeightFunction::flattened_cone(c.height_p1, c.height_p2,
                                              c.height_p3);
    }
    throw std::invalid_argument("unknown height kind: " + c.height);
}

Model make_model(const RunConfig& c) {
    if (c.model == "wm") {
        return Model::wave_maps(c.d);
    }
    if (c.model == "ym") {
        return Model::yang_mills(c.d);
    }
    throw std::invalid_argument("unknown model kind: " + c.model);
}

std::string artifact_name(const RunConfig& c, const std::string& stem,
                          const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run%03d-", c.index);
    return std::string(buf) + stem + "." + ext;
}

void write_json(const fs::path& p, const ordered_json& j) {
    std::ofstream out(p);
    out << j.dump(2) << "\n";
}

ordered_json run_geometry(const RunConfig& c, const HeightFunction& h) {
    const double R0 = light_cone_radius(h);
    const double R = c.R > 0.0 ? c.R : R0;
    const ImageSlopes sl = image_slopes(h, R);
    const HeightValidation v = validate_height(h, 512);
    const CoordChart chart(h, 1.0, R);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> utau(0.0, 3.0), urho(0.0, R);
    double max_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double tau = utau(rng);
        const double rho = urho(rng);
        const Event ev = chart.to_physical(tau, rho);
        const SimCoords back = chart.from_physical(ev);
        max_err = std::max(max_err, std::abs(back.tau - tau));
        max_err = std::max(max_err, std::abs(back.rho - rho));
    }
    ordered_json j;
    j["R0"] = R0;
    j["R"] = R;
    j["kappa"] = sl.kappa;
    j["kappa_R"] = sl.kappa_R;
    j["height_geometric"] = v.all_geometric();
    j["roundtrip_max_err"] = max_err;
    j["pass"] = v.all_geometric() && max_err < 1e-10;
    return j;
}

ordered_json run_profile_check(const RunConfig& c, const Model& m,
                               const HeightFunction& h) {
    const double R = c.R > 0.0 ? c.R : light_cone_radius(h);
    const RadialGrid g(R, c.N);
    const double sup = profile_residual(g, m, h).lpNorm<Eigen::Infinity>();
    ordered_json j;
    j["model"] = m.name();
    j["d"] = m.d();
    j["N"] = c.N;
    j["residual_sup"] = sup;
    j["pass"] = sup < 1e-7;
    return j;
}

ordered_json run_operator_check(const RunConfig& c, const Model& m,
                                const HeightFunction& h) {
    const double R = c.R > 0.0 ? c.R : light_cone_radius(h);
    const RadialGrid g(R, c.N);
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Tests are even-Chebyshev coefficient pairs with a decaying envelope.
    const int deg = std::max(2, c.N / 6);
    std::vector<Eigen::VectorXd> tests;
    for (int t = 0; t < 8; ++t) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * g.size());
        double envelope = 1.0;
        for (int mm = 0; mm <= deg; ++mm) {
            u[mm] = envelope * gauss(rng);
            u[g.size() + mm] = envelope * gauss(rng);
            envelope *= 0.6;
        }
        tests.push_back(u);
    }
    const CommutatorReport com = commutator_defect(g, m, h, tests);
    const DissipativityReport dis =
        dissipativity_check(g, m, h, c.k, c.eps1, 100, c.seed);
    ordered_json j;
    j["commutator_defect_time"] = com.defect_time;
    j["commutator_defect_space"] = com.defect_space;
    j["dissipativity_max_violation"] = dis.max_violation;
    j["pass"] = com.max_defect < 1e-8 && dis.max_violation <= 1e-8;
    return j;
}

ordered_json run_spectrum(const RunConfig& c, const Model& m,
                          const HeightFunction& h) {
    const double R = c.R > 0.0 ? c.R : light_cone_radius(h);
    const SpectrumReport rep = solve_spectrum(m, h, R, c.N, c.N_check);
    ordered_json j;
    j["model"] = m.name();
    j["d"] = m.d();
    j["lambda_sym_re"] = rep.lambda_sym.real();
    j["lambda_sym_im"] = rep.lambda_sym.imag();
    j["symmetry_found"] = rep.symmetry_found;
    j["symmetry_simple"] = rep.symmetry_simple;
    j["unstable_count"] = rep.unstable_count;
    j["omega_gap"] = rep.omega_gap;
    j["projector_idempotency"] = rep.projector_idempotency;
    j["trusted_count"] = static_cast<int>(rep.trusted.size());
    j["pass"] = rep.symmetry_found && rep.symmetry_simple &&
                rep.unstable_count == 0 && rep.omega_gap > 0.0;
    return j;
}

ordered_json run_evolve(const RunConfig& c, const Model& m,
                        const HeightFunction& h, const fs::path& outdir,
                        std::vector<std::string>* artifacts) {
    const double R = c.R > 0.0 ? c.R : light_cone_radius(h);
    const RadialGrid g(R, c.N);
    PerturbationSpec p;
    p.family = c.delta == 0.0 ? PerturbationSpec::Family::Zero
                              : PerturbationSpec::Family::Bump;
    p.delta = c.delta;
    p.r = c.r;

    const SpectrumReport spec = solve_spectrum(m, h, R, c.N, c.N);
    const Eigen::VectorXd& g1 = spec.left_sym;

    Trajectory traj;
    double T_star = 1.0;
    double phi = 0.0;
    bool tuned_ok = true;
    if (c.tune) {
        const TuneResult t = tune_blowup_time(g, m, h, p, c.tau_max, g1);
        traj = t.trajectory;
        T_star = t.T_star;
        phi = t.phi;
        tuned_ok = t.success;
    } else {
        const Eigen::MatrixXd L = assemble_L(g, m, h);
        const Eigen::VectorXd u0 = initial_data(m, h, p, 1.0, g);
        traj = integrate(g, m, h, L, u0, c.tau_max, c.dtau, true, 16);
    }

    const EnergyForm form(g, m.d(), h, c.k, c.eps1);
    const int n = g.size();
    std::vector<double> ek(traj.taus.size());
    const std::string csv_name = artifact_name(c, "evolve", "csv");
    {
        std::ofstream csv(outdir / csv_name);
        csv << "tau,energy_k,sobolev,projection,sup\n";
        for (size_t i = 0; i < traj.taus.size(); ++i) {
            const Eigen::VectorXd& u = traj.states[i];
            ek[i] = form.norm(u);
            const double h1 = sobolev_norm(g, m.d(), u.head(n), c.k);
            const double h2 = sobolev_norm(g, m.d(), u.tail(n), c.k - 1);
            const double hk = std::sqrt(h1 * h1 + h2 * h2);
            csv << fmt17(traj.taus[i]) << "," << fmt17(ek[i]) << ","
                << fmt17(hk) << "," << fmt17(g1.dot(u)) << ","
                << fmt17(u.lpNorm<Eigen::Infinity>()) << "\n";
        }
    }
    artifacts->push_back(csv_name);

    double omega_fit = 0.0;
    bool have_fit = false;
    if (!traj.diverged && traj.taus.back() > 1.5 && ek.back() > 0.0) {
        try {
            omega_fit = decay_rate(traj.taus, ek, 1.0,
                                   std::min(traj.taus.back(), c.tau_max));
            have_fit = true;
        } catch (const std::invalid_argument&) {
        }
    }
    const FiniteSpeedReport fsrep = finite_speed_check(traj, m, h, T_star, p, g);

    ordered_json j;
    j["model"] = m.name();
    j["d"] = m.d();
    j["delta"] = c.delta;
    j["tuned"] = c.tune;
    j["T_star"] = T_star;
    j["phi"] = phi;
    j["diverged"] = traj.diverged;
    j["omega_fit"] = omega_fit;
    j["finite_speed_deviation"] = fsrep.max_deviation;
    j["finite_speed_samples"] = fsrep.samples;
    j["pass"] = !traj.diverged && (!c.tune || (tuned_ok && have_fit && omega_fit > 0.0));
    return j;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    const auto get = [&j](const char* key, auto& slot) {
        if (j.contains(key)) {
            slot = j.at(key).get<std::decay_t<decltype(slot)>>();
        }
    };
    get("subcommand", c.subcommand);
    get("model", c.model);
    get("d", c.d);
    get("height", c.height);
    get("height_p1", c.height_p1);
    get("height_p2", c.height_p2);
    get("height_p3", c.height_p3);
    get("N", c.N);
    get("N_check", c.N_check);
    get("R", c.R);
    get("k", c.k);
    get("eps1", c.eps1);
    get("delta", c.delta);
    get("r", c.r);
    get("tau_max", c.tau_max);
    get("dtau", c.dtau);
    get("tune", c.tune);
    get("outdir", c.outdir);
    get("seed", c.seed);
    return c;
}

RunResult run(const RunConfig& config) {
    RunResult res;
    fs::path outdir = config.outdir;
    if (const char* env = std::getenv("BLOWUP_LAB_OUTDIR")) {
        outdir = env;
    }
    try {
        fs::create_directories(outdir);
        const HeightFunction h = make_height(config);
        ordered_json j;
        if (config.subcommand == "geometry") {
            j = run_geometry(config, h);
        } else if (config.subcommand == "profile-check") {
            j = run_profile_check(config, make_model(config), h);
        } else if (config.subcommand == "operator-check") {
            j = run_operator_check(config, make_model(config), h);
        } else if (config.subcommand == "spectrum") {
            j = run_spectrum(config, make_model(config), h);
        } else if (config.subcommand == "evolve") {
            j = run_evolve(config, make_model(config), h, outdir,
                           &res.artifacts);
        } else {
            throw std::invalid_argument("unknown subcommand: " +
                                        config.subcommand);
        }
        res.summary = j;
        res.exit_code = j.value("pass", true) ? 0 : 1;
        const std::string name =
            artifact_name(config, config.subcommand, "json");
        write_json(outdir / name, j);
        res.artifacts.push_back(name);
    } catch (const std::invalid_argument& e) {
        res.exit_code = 2;
        res.summary = ordered_json{{"error", e.what()}};
    } catch (const std::domain_error& e) {
        res.exit_code = 2;
        res.summary = ordered_json{{"error", e.what()}};
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.summary = ordered_json{{"error", e.what()}};
    }
    return res;
}

RunResult sweep(const std::vector<RunConfig>& configs,
                const std::string& outdir) {
    RunResult agg;
    if (configs.empty()) {
        agg.exit_code = 2;
        agg.summary = ordered_json{{"error", "sweep requires >= 1 config"}};
        return agg;
    }
    std::vector<std::future<RunResult>> futs;
    futs.reserve(configs.size());
    for (size_t i = 0; i < configs.size(); ++i) {
        RunConfig c = configs[i];
        c.index = static_cast<int>(i);
        c.outdir = outdir;
        futs.push_back(
            std::async(std::launch::async, [c]() { return run(c); }));
    }
    agg.summary = ordered_json::array();
    for (auto& f : futs) {
        RunResult r = f.get();
        agg.exit_code = std::max(agg.exit_code, r.exit_code);
        agg.summary.push_back(r.summary);
        for (auto& a : r.artifacts) {
            agg.artifacts.push_back(std::move(a));
        }
    }
    fs::path dir = outdir;
    if (const char* env = std::getenv("BLOWUP_LAB_OUTDIR")) {
        dir = env;
    }
    fs::create_directories(dir);
    write_json(dir / "sweep.json", agg.summary);
    agg.artifacts.push_back("sweep.json");
    return agg;
}

}  // namespace sslab
