// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sslab/chart.hpp"
#include "sslab/energy.hpp"
#include "sslab/evolve.hpp"
#include "sslab/grid.hpp"
#include "sslab/height.hpp"
#include "sslab/model.hpp"
#include "sslab/operators.hpp"
#include "sslab/runner.hpp"
#include "sslab/spectrum.hpp"

using namespace sslab;

namespace {

struct Criterion {
    const char* label;
    std::function<bool(std::string&)> check;
};

char buf[512];

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

// ---- criterion 1: static profile residuals --------------------------------

bool c1_profile_residuals(std::string& detail) {
    const HeightFunction h = HeightFunction::standard();
    double worst = 0.0;
    std::vector<Model> models = {Model::wave_maps(5), Model::wave_maps(6),
                                 Model::wave_maps(7), Model::wave_maps(9),
                                 Model::yang_mills(7), Model::yang_mills(9)};
    for (const Model& m : models) {
        const RadialGrid g(1.0, 48);
        worst = std::max(worst,
                         profile_residual(g, m, h).lpNorm<Eigen::Infinity>());
    }
    detail = fmt("max residual %.3e (need < 1e-7)", worst);
    return worst < 1e-7;
}

// ---- criterion 2: gauge profile coefficients ------------------------------

bool c2_ym_coefficients(std::string& detail) {
    const auto [a, b] = ym_coefficients(5);
    const double psi = blowup_profile(Model::yang_mills(7), 1.0, 1.0).psi;
    detail = fmt("coeffs (%.17g, %.17g), |psi(1,1)-1| = %.3e", a, b,
                 std::abs(psi - 1.0));
    return a == 0.625 && b == 0.375 && std::abs(psi - 1.0) < 1e-14;
}

// ---- criterion 3: potential consistency -----------------------------------

bool c3_potentials(std::string& detail) {
    double worst = 0.0;
    for (const Model& m : {Model::wave_maps(5), Model::yang_mills(7)}) {
        for (const HeightFunction& h :
             {HeightFunction::standard(),
              HeightFunction::flattened_cone(0.5, 1.0, 0.25)}) {
            const double R = light_cone_radius(h);
            for (int i = 1; i <= 1000; ++i) {
                const double rho = R * i / 1000.0;
                const double t = -h.eval(rho).h;
                worst = std::max(worst,
                                 std::abs(potential(m, h, rho) -
                                          potential_explicit(m, t, rho)));
            }
        }
    }
    detail = fmt("max |V - closed form| = %.3e (need < 1e-12)", worst);
    return worst < 1e-12;
}

// ---- criterion 4: chart geometry ------------------------------------------

bool c4_geometry(std::string& detail) {
    const double r0_std = light_cone_radius(HeightFunction::standard());
    const double r0_hyp =
        light_cone_radius(HeightFunction::hyperboloidal(1.0, 1.0));
    bool ok = (r0_std == 1.0) && std::abs(r0_hyp - 0.75) < 1e-12;

    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> utau(0.0, 3.0);
    double worst = 0.0;
    for (const HeightFunction& h :
         {HeightFunction::standard(), HeightFunction::hyperboloidal(1.0, 1.0),
          HeightFunction::flattened_cone(0.5, 1.0, 0.25)}) {
        const double R = light_cone_radius(h);
        const CoordChart chart(h, 1.0, R);
        std::uniform_real_distribution<double> urho(0.0, R);
        for (int i = 0; i < 1000; ++i) {
            const double tau = utau(rng), rho = urho(rng);
            const Event ev = chart.to_physical(tau, rho);
            const SimCoords back = chart.from_physical(ev);
            worst = std::max(worst,
                             std::abs(back.tau - tau) / std::max(1.0, tau));
            worst = std::max(worst,
                             std::abs(back.rho - rho) / std::max(1.0, rho));
        }
    }
    ok = ok && worst < 1e-12;

    const HeightValidation v = validate_height(
        HeightFunction::flattened_cone(0.5, 1.0, 0.25), 512, 0.25);
    ok = ok && v.all_flattened_cone() && v.all_geometric();
    detail = fmt("roundtrip %.3e, structure ", worst) +
             (v.all_flattened_cone() && v.all_geometric() ? "valid"
                                                          : "invalid");
    return ok;
}

// ---- criterion 5: commutation identity ------------------------------------

std::vector<Eigen::VectorXd> commutator_tests(const RadialGrid& g) {
    const int n = g.size();
    std::vector<Eigen::VectorXd> tests;
    // rho^2 and rho^4 as even-Chebyshev coefficients in both components.
    Eigen::VectorXd p2 = Eigen::VectorXd::Zero(2 * n);
    const double R2 = g.R() * g.R();
    p2(0) = p2(1) = 0.5 * R2;
    p2.segment(n, 2) = p2.head(2);
    tests.push_back(p2);
    Eigen::VectorXd p4 = Eigen::VectorXd::Zero(2 * n);
    const double R4 = R2 * R2;
    p4(0) = 3.0 * R4 / 8.0;
    p4(1) = 0.5 * R4;
    p4(2) = R4 / 8.0;
    p4.segment(n, 3) = p4.head(3);
    tests.push_back(p4);
    // Seeded random decaying coefficient vectors.
    std::mt19937_64 rng(52);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n);
        double env = 1.0;
        for (int mm = 0; mm <= 4; ++mm) {
            u(mm) = env * gauss(rng);
            u(n + mm) = env * gauss(rng);
            env *= 0.6;
        }
        tests.push_back(u);
    }
    return tests;
}

bool c5_commutator(std::string& detail) {
    const Model m = Model::wave_maps(5);
    // Curved slicing: the defect is discretization truncation and must both
    // clear the absolute bar at N = 32 and collapse at N = 64.
    const HeightFunction hyp = HeightFunction::hyperboloidal(1.0, 1.0);
    double d32 = 0.0, d64 = 0.0;
    for (int N : {32, 64}) {
        const RadialGrid g(0.6, N);
        const double d = commutator_defect(g, m, hyp, commutator_tests(g)).max_defect;
        (N == 32 ? d32 : d64) = d;
    }
    // Flat slicing: the identity is exact up to rounding at every N.
    double dstd = 0.0;
    for (int N : {32, 64}) {
        const RadialGrid g(1.0, N);
        dstd = std::max(
            dstd,
            commutator_defect(g, m, HeightFunction::standard(),
                              commutator_tests(g)).max_defect);
    }
    detail = fmt("curved defect %.3e -> %.3e, flat <= %.3e", d32, d64, dstd);
    return d32 < 1e-10 && d64 * 10.0 <= d32 && dstd < 1e-10;
}

// ---- criterion 6: dissipativity -------------------------------------------

bool c6_dissipativity(std::string& detail) {
    const HeightFunction h = HeightFunction::standard();
    struct Case {
        int d, k;
    };
    double worst = -1e300;
    for (const Case c : {Case{5, 1}, Case{5, 3}, Case{9, 2}, Case{9, 5}}) {
        const RadialGrid g(1.0, 32);
        const DissipativityReport rep = dissipativity_check(
            g, Model::wave_maps(c.d), h, c.k, 0.5, 100, 2024 + c.d + c.k);
        worst = std::max(worst, rep.max_violation);
    }
    detail = fmt("max violation %.3e (need <= 1e-8)", worst);
    return worst <= 1e-8;
}

// ---- criterion 7: symmetry eigenpair residual -----------------------------

bool c7_eigenpair(std::string& detail) {
    const HeightFunction h = HeightFunction::standard();
    const RadialGrid g(1.0, 64);
    const double rw = verify_symmetry_eigenpair(g, Model::wave_maps(5), h, 1, 0.5);
    const double ry = verify_symmetry_eigenpair(g, Model::yang_mills(7), h, 1, 0.5);
    detail = fmt("residuals %.3e / %.3e (need < 1e-8)", rw, ry);
    return rw < 1e-8 && ry < 1e-8;
}

// ---- criterion 8: mode stability ------------------------------------------

bool c8_mode_stability(std::string& detail) {
    const HeightFunction st = HeightFunction::standard();
    const HeightFunction fc = HeightFunction::flattened_cone(0.5, 1.0, 0.25);
    const double Rfc = light_cone_radius(fc);
    bool ok = true;
    double worst_lam = 0.0, worst_gap = 0.0, worst_chart = 0.0, worst_idm = 0.0;
    for (const Model& m : {Model::wave_maps(5), Model::wave_maps(6),
                           Model::wave_maps(7), Model::yang_mills(7),
                           Model::yang_mills(9)}) {
        const SpectrumReport r = solve_spectrum(m, st, 1.0, 48, 64);
        ok = ok && r.symmetry_found && r.symmetry_simple &&
             r.unstable_count == 0 && r.omega_gap > 0.0 &&
             r.projector_idempotency < 1e-10;
        worst_lam = std::max(worst_lam, std::abs(r.lambda_sym - 1.0));
        worst_idm = std::max(worst_idm, r.projector_idempotency);
        ok = ok && std::abs(r.lambda_sym - 1.0) < 1e-6;
        // Gap stability under resolution doubling (looser matching at high N
        // to keep the slowly drifting gap eigenvalue in the trusted set).
        const SpectrumReport r2 = solve_spectrum(m, st, 1.0, 96, 112, 1e-3);
        const double dgap = std::abs(r.omega_gap - r2.omega_gap);
        worst_gap = std::max(worst_gap, dgap);
        ok = ok && std::isfinite(r2.omega_gap) && dgap <= 1e-4;
        // Chart invariance against the flattened-cone slicing.
        const SpectrumReport rf = solve_spectrum(m, fc, Rfc, 192, 224, 2e-3);
        const double dchart = std::abs(rf.lambda_sym - r.lambda_sym);
        worst_chart = std::max(worst_chart, dchart);
        ok = ok && dchart < 1e-5;
    }
    detail = fmt("|lam-1| %.3e, gap drift %.3e, chart diff %.3e", worst_lam,
                 worst_gap, worst_chart) +
             fmt(", idempotency %.3e", worst_idm);
    return ok;
}

// ---- criterion 9: linear free-flow growth bound ---------------------------

bool c9_free_flow(std::string& detail) {
    const HeightFunction h = HeightFunction::standard();
    struct Case {
        Model m;
        int k;
    };
    const std::vector<Case> cases = {{Model::wave_maps(5), 3},
                                     {Model::yang_mills(7), 4}};
    bool ok = true;
    std::string parts;
    for (const Case& c : cases) {
        const RadialGrid g(1.0, 32);
        const Eigen::MatrixXd L0 = assemble_L0(g, c.m, h);
        const EnergyForm form(g, c.m.d(), h, c.k, 0.5);
        const double bound =
            std::max(0.5 * c.m.d() - c.m.s() - c.k, -double(c.m.s()) + 0.05) +
            0.05;
        std::mt19937_64 rng(400 + c.m.d());
        double worst = -1e300;
        for (int trial = 0; trial < 5; ++trial) {
            const int n = g.size();
            Eigen::VectorXd u0(2 * n);
            u0.head(n) = g.random_even(6, rng);
            u0.tail(n) = g.random_even(6, rng);
            const Trajectory t = integrate(g, c.m, h, L0, u0, 5.0, -1.0,
                                           /*nonlinear=*/false, 16);
            std::vector<double> norms(t.taus.size());
            for (size_t i = 0; i < t.states.size(); ++i) {
                norms[i] = form.norm(t.states[i]);
            }
            const double expo = -decay_rate(t.taus, norms, 1.0, 5.0);
            worst = std::max(worst, expo);
            ok = ok && expo <= bound;
        }
        parts += fmt("(d=%.0f,k=%.0f) exp %.3f", double(c.m.d()),
                     double(c.k), worst);
        parts += fmt(" vs bound %.3f; ", bound);
    }
    detail = parts;
    return ok;
}

// ---- criterion 10: unstable eigenflow -------------------------------------

bool c10_eigenflow(std::string& detail) {
    const HeightFunction h = HeightFunction::standard();
    double worst = 0.0;
    for (const Model& m : {Model::wave_maps(5), Model::yang_mills(7)}) {
        const RadialGrid g(1.0, 48);
        const Eigen::MatrixXd L = assemble_L(g, m, h);
        const int n = g.size();
        Eigen::VectorXd u0(2 * n);
        for (int i = 0; i < n; ++i) {
            const SymmetryModeEval e = symmetry_mode(m, h, g.rho()(i));
            u0(i) = e.f1;
            u0(n + i) = e.second;
        }
        const Trajectory t = integrate(g, m, h, L, u0, 2.0, -1.0, false, 64);
        for (size_t i = 0; i < t.states.size(); ++i) {
            const Eigen::VectorXd expect = std::exp(t.taus[i]) * u0;
            worst = std::max(worst,
                             (t.states[i] - expect).norm() / expect.norm());
        }
    }
    detail = fmt("max relative deviation %.3e (need < 1e-6)", worst);
    return worst < 1e-6;
}

// ---- criterion 11: nonlinear stability experiment -------------------------

bool c11_nonlinear(std::string& detail) {
    const Model m = Model::wave_maps(5);
    const HeightFunction fc = HeightFunction::flattened_cone(0.5, 1.0, 0.25);
    const double R = light_cone_radius(fc);
    const int N = 64, k = 3;
    const RadialGrid g(R, N);
    const int n = g.size();

    PerturbationSpec p;
    p.family = PerturbationSpec::Family::Bump;
    p.delta = 1e-3;
    p.delta_g = 1e-3;
    p.r = 0.5;

    // Spectral reference gap from the flat-chart solve.
    const double omega_gap =
        solve_spectrum(m, HeightFunction::standard(), 1.0, 48, 64).omega_gap;
    const SpectrumReport sp = solve_spectrum(m, fc, R, N, N + 16, 2e-3);

    const double tau_f = 12.0;
    const TuneResult t = tune_blowup_time(g, m, fc, p, tau_f, sp.left_sym);
    const auto hnorm = [&](const Eigen::VectorXd& u) {
        const double a = sobolev_norm(g, m.d(), u.head(n), k);
        const double b = sobolev_norm(g, m.d(), u.tail(n), k - 1);
        return std::sqrt(a * a + b * b);
    };
    std::vector<double> norms(t.trajectory.taus.size());
    for (size_t i = 0; i < norms.size(); ++i) {
        norms[i] = hnorm(t.trajectory.states[i]);
    }
    // Late-time window: past the delta-scale transient, on the asymptotic
    // decay governed by the spectral gap.
    const double omega_fit = decay_rate(t.trajectory.taus, norms, 9.0, tau_f);

    const Eigen::MatrixXd L = assemble_L(g, m, fc);
    const Trajectory un =
        integrate(g, m, fc, L, initial_data(m, fc, p, 1.0, g), tau_f, -1.0,
                  true, 16);
    std::vector<double> unorms(un.taus.size());
    for (size_t i = 0; i < unorms.size(); ++i) {
        unorms[i] = hnorm(un.states[i]);
    }
    const double growth = -decay_rate(un.taus, unorms, 7.0, 10.0);

    const FiniteSpeedReport fs =
        finite_speed_check(t.trajectory, m, fc, t.T_star, p, g);

    const bool ok = t.success && std::abs(t.phi) < 1e-10 &&
                    t.T_star > 0.95 && t.T_star < 1.05 && omega_fit > 0.0 &&
                    std::abs(omega_fit - omega_gap) <= 0.25 * omega_gap &&
                    std::abs(growth - 1.0) <= 0.1 && !fs.skipped &&
                    fs.max_deviation < 1e-6;
    detail = fmt("T* %.6f, |phi| %.2e, ", t.T_star, std::abs(t.phi)) +
             fmt("w_fit %.3f vs gap %.3f, growth %.3f", omega_fit, omega_gap,
                 growth) +
             fmt(", finite-speed %.3e", fs.max_deviation);
    return ok;
}

// ---- criterion 12: sweep determinism --------------------------------------

bool c12_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const auto run_once = [](const std::string& tag) {
        RunConfig a;
        a.subcommand = "profile-check";
        a.model = "wm";
        a.d = 5;
        a.N = 32;
        a.seed = 7;
        RunConfig b;
        b.subcommand = "operator-check";
        b.model = "wm";
        b.d = 5;
        b.N = 16;
        b.k = 2;
        b.seed = 7;
        RunConfig c;
        c.subcommand = "spectrum";
        c.model = "ym";
        c.d = 7;
        c.N = 32;
        c.N_check = 48;
        c.seed = 7;
        const fs::path dir =
            fs::temp_directory_path() / ("blowup-lab-acc-" + tag);
        fs::remove_all(dir);
        return std::make_pair(dir, sweep({a, b, c}, dir.string()));
    };
    const auto [d1, r1] = run_once("a");
    const auto [d2, r2] = run_once("b");
    bool ok = r1.exit_code == 0 && r2.exit_code == 0 &&
              r1.artifacts == r2.artifacts;
    int compared = 0;
    for (const auto& name : r1.artifacts) {
        std::ifstream f1(d1 / name, std::ios::binary);
        std::ifstream f2(d2 / name, std::ios::binary);
        std::ostringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        ok = ok && !s1.str().empty() && s1.str() == s2.str();
        ++compared;
    }
    detail = fmt("%.0f artifacts byte-compared", double(compared));
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"static profile residuals", c1_profile_residuals},
        {"gauge profile coefficients", c2_ym_coefficients},
        {"potential consistency", c3_potentials},
        {"chart geometry", c4_geometry},
        {"commutation identity", c5_commutator},
        {"graded energy dissipativity", c6_dissipativity},
        {"symmetry eigenpair residual", c7_eigenpair},
        {"mode stability", c8_mode_stability},
        {"linear free-flow growth bound", c9_free_flow},
        {"unstable eigenflow", c10_eigenflow},
        {"nonlinear stability experiment", c11_nonlinear},
        {"sweep determinism", c12_determinism},
    };
    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].check(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2zu %-34s %s  [%s]\n", i + 1,
                    criteria[i].label, ok ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
    }
    return failures;
}
