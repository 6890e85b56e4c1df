#include "sslab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sslab/operators.hpp"

namespace sslab {

namespace {

// Normalized bump: e^{1 - 1/(1 - x^2)} on |x| < 1, zero outside; equals 1 at
// the center.
double bump(double x) {
    const double x2 = x * x;
    if (x2 >= 1.0) {
        return 0.0;
    }
    return std::exp(1.0 - 1.0 / (1.0 - x2));
}

// Smooth step: 1 for x <= 1/2, 0 for x >= 1.
double cutoff(double x) {
    const auto edge = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    const double a = edge(2.0 - 2.0 * x);
    const double b = edge(2.0 * x - 1.0);
    return a / (a + b);
}

double shape(PerturbationSpec::Family fam, double rho, double r) {
    switch (fam) {
        case PerturbationSpec::Family::Zero:
            return 0.0;
        case PerturbationSpec::Family::Gaussian:
            return std::exp(-8.0 * rho * rho / (r * r)) * cutoff(std::abs(rho) / r);
        case PerturbationSpec::Family::Bump:
            return bump(rho / r);
    }
    return 0.0;
}

// The static similarity profile and its time derivative at the slice
// t = shift - h(rho).
ProfileEval slice_profile(const Model& m, const HeightFunction& h, double rho,
                          double shift) {
    return blowup_profile(m, shift - h.eval(rho).h, rho);
}

Eigen::VectorXd nonlinear_term(const RadialGrid& g, const Model& m,
                               const HeightFunction& h,
                               const Eigen::VectorXd& u) {
    const int n = g.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i) {
        const HeightEval e = h.eval(g.rho()(i));
        out(n + i) =
            e.c / e.w * nonlinear_remainder(m, h, g.rho()(i), u(i));
    }
    return out;
}

}  // namespace

double PerturbationSpec::f(double rho) const {
    return delta * shape(family, rho, r);
}

double PerturbationSpec::g(double rho) const {
    return delta_g * shape(family, rho, r);
}

std::pair<double, double> blowup_time_window(const HeightFunction& h,
                                             const PerturbationSpec& p) {
    const double plateau = h.plateau_radius();
    if (p.family != PerturbationSpec::Family::Zero && p.r > plateau) {
        throw std::domain_error(
            "perturbation support exceeds the height plateau");
    }
    double eps = plateau - p.r;
    if (!std::isfinite(eps)) {
        eps = 1e3 * p.r;  // effectively unconstrained window
    }
    const double w = eps / (p.r + eps);
    return {1.0 - w, 1.0 + w};
}

Eigen::VectorXd initial_data(const Model& m, const HeightFunction& h,
                             const PerturbationSpec& p, double T,
                             const RadialGrid& g) {
    if (T <= 0.0) {
        throw std::domain_error("blowup time must be positive");
    }
    const auto [tlo, thi] = blowup_time_window(h, p);
    if (T < tlo || T > thi) {
        throw std::domain_error("candidate blowup time outside the window");
    }
    const int n = g.size();
    const int s = m.s();
    Eigen::VectorXd u(2 * n);
    const double shift = 1.0 / T - 1.0;
    for (int i = 0; i < n; ++i) {
        const double rho = g.rho()(i);
        const ProfileEval at1 = slice_profile(m, h, rho, shift);
        const ProfileEval atT = slice_profile(m, h, rho, 0.0);
        u(i) = std::pow(T, s) * p.f(T * rho) + at1.psi - atT.psi;
        u(n + i) = std::pow(T, s + 1) * p.g(T * rho) +
                   (-at1.dpsi_dt) - (-atT.dpsi_dt);
    }
    return u;
}

double stable_time_step(const RadialGrid& g, const Eigen::MatrixXd& L,
                        const HeightFunction& h) {
    double rad = 0.0;
    {
        const Eigen::VectorXcd ev =
            Eigen::EigenSolver<Eigen::MatrixXd>(L, false).eigenvalues();
        for (int j = 0; j < ev.size(); ++j) {
            rad = std::max(rad, std::abs(ev(j)));
        }
    }
    double cmax = 1.0;
    for (int i = 0; i < g.size(); ++i) {
        const double rho = g.rho()(i);
        const HeightEval e = h.eval(rho);
        cmax = std::max(cmax, std::abs(rho + 2.0 * e.c / e.w * e.hp));
    }
    double dt = std::min(0.4 * g.min_spacing() / cmax, 1.5 / std::max(rad, 1.0));
    return std::min(dt, 5e-3);
}

Trajectory integrate(const RadialGrid& g, const Model& m,
                     const HeightFunction& h, const Eigen::MatrixXd& L,
                     const Eigen::VectorXd& u0, double tau_max, double dtau,
                     bool nonlinear, int stride, double divergence_guard) {
    if (u0.size() != L.rows()) {
        throw std::invalid_argument("state size does not match the operator");
    }
    if (dtau <= 0.0) {
        dtau = stable_time_step(g, L, h);
    }
    // The nonlinearity depends on tau only through the state, so the height
    // and background-profile data at the nodes is precomputed once (the
    // mollified-band height evaluation is far too costly per RK stage).
    const int n = g.size();
    Eigen::VectorXd cw(n), psi(n), base_f(n), base_fz(n);
    if (nonlinear) {
        for (int i = 0; i < n; ++i) {
            const double rho = g.rho()(i);
            const HeightEval e = h.eval(rho);
            cw(i) = e.c / e.w;
            psi(i) = blowup_profile(m, -e.h, rho).psi;
            const NonlinearityEval b = nonlinearity(m, rho, psi(i));
            base_f(i) = b.F;
            base_fz(i) = b.Fz;
        }
    }
    const auto rhs = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::VectorXd r = L * u;
        if (nonlinear) {
            for (int i = 0; i < n; ++i) {
                const NonlinearityEval s =
                    nonlinearity(m, g.rho()(i), psi(i) + u(i));
                r(n + i) += cw(i) * (s.F - base_fz(i) * u(i) - base_f(i));
            }
        }
        return r;
    };

    Trajectory traj;
    Eigen::VectorXd u = u0;
    double tau = 0.0;
    traj.taus.push_back(tau);
    traj.states.push_back(u);
    const long nsteps = std::lround(std::ceil(tau_max / dtau - 1e-12));
    const double dt = tau_max / static_cast<double>(std::max(nsteps, 1L));
    for (long step = 0; step < nsteps; ++step) {
        const Eigen::VectorXd k1 = rhs(u);
        const Eigen::VectorXd k2 = rhs(u + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(u + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(u + dt * k3);
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau = (step + 1) * dt;
        const double sup = u.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(sup) || sup > divergence_guard) {
            traj.diverged = true;
            traj.diverged_tau = tau;
            break;
        }
        if ((step + 1) % stride == 0 || step + 1 == nsteps) {
            traj.taus.push_back(tau);
            traj.states.push_back(u);
        }
    }
    return traj;
}

TuneResult tune_blowup_time(const RadialGrid& g, const Model& m,
                            const HeightFunction& h, const PerturbationSpec& p,
                            double tau_f, const Eigen::VectorXd& g1) {
    const Eigen::MatrixXd L = assemble_L(g, m, h);
    const double dtau = stable_time_step(g, L, h);
    const auto phi_of = [&](double T, Trajectory* out) -> double {
        const Eigen::VectorXd u0 = initial_data(m, h, p, T, g);
        Trajectory t =
            integrate(g, m, h, L, u0, tau_f, dtau, /*nonlinear=*/true, 16);
        double phi;
        if (t.diverged) {
            // Signed overflow surrogate keeps the bracketing logic usable.
            phi = std::copysign(1e30, g1.dot(t.states.back()));
        } else {
            phi = std::exp(-tau_f) * g1.dot(t.states.back());
        }
        if (out != nullptr) {
            *out = std::move(t);
        }
        return phi;
    };

    TuneResult res;
    if (p.family == PerturbationSpec::Family::Zero || p.delta == 0.0) {
        res.T_star = 1.0;
        res.phi = phi_of(1.0, &res.trajectory);
        res.success = true;
        return res;
    }

    auto [tlo, thi] = blowup_time_window(h, p);
    tlo = std::max(tlo, 1.0 - 0.05);
    thi = std::min(thi, 1.0 + 0.05);
    double flo = phi_of(tlo, nullptr);
    double fhi = phi_of(thi, nullptr);
    if (flo == 0.0) {
        res.T_star = tlo;
    } else if (fhi == 0.0) {
        res.T_star = thi;
    } else if (flo * fhi > 0.0) {
        res.success = false;
        res.T_star = std::abs(flo) < std::abs(fhi) ? tlo : thi;
        res.phi = phi_of(res.T_star, &res.trajectory);
        return res;
    } else {
        double a = tlo, b = thi, fa = flo, fb = fhi;
        double x = a - fa * (b - a) / (fb - fa);
        for (int it = 0; it < 200; ++it) {
            x = std::clamp(x, a + 0.1 * (b - a), b - 0.1 * (b - a));
            const double fx = phi_of(x, nullptr);
            if (std::abs(fx) < 1e-14 || b - a < 1e-15) {
                a = b = x;
                break;
            }
            if (fa * fx < 0.0) {
                b = x;
                fb = fx;
            } else {
                a = x;
                fa = fx;
            }
            // Secant proposal within the bracket, bisection fallback.
            const double sec = b - fb * (b - a) / (fb - fa);
            x = (sec > a && sec < b) ? sec : 0.5 * (a + b);
        }
        res.T_star = 0.5 * (a + b);
    }
    res.phi = phi_of(res.T_star, &res.trajectory);
    res.success = std::abs(res.phi) < 1e-10;
    return res;
}

double decay_rate(const std::vector<double>& taus,
                  const std::vector<double>& norms, double tau1, double tau2) {
    if (taus.size() != norms.size()) {
        throw std::invalid_argument("decay_rate: mismatched sample arrays");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t i = 0; i < taus.size(); ++i) {
        if (taus[i] < tau1 || taus[i] > tau2) {
            continue;
        }
        if (!(norms[i] > 0.0)) {
            throw std::invalid_argument("decay_rate: nonpositive norm sample");
        }
        const double x = taus[i];
        const double y = std::log(norms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) {
        throw std::invalid_argument("decay_rate: window holds < 2 samples");
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return -slope;
}

FiniteSpeedReport finite_speed_check(const Trajectory& t, const Model& m,
                                     const HeightFunction& h, double T,
                                     const PerturbationSpec& p,
                                     const RadialGrid& g) {
    FiniteSpeedReport rep;
    if (p.family != PerturbationSpec::Family::Zero &&
        p.r >= h.plateau_radius()) {
        rep.skipped = true;
        return rep;
    }
    const int n = g.size();
    const int s = m.s();
    for (size_t j = 0; j < t.taus.size(); ++j) {
        const double scale = T * std::exp(-t.taus[j]);
        for (int i = 0; i < n; ++i) {
            const double rho = g.rho()(i);
            const double time = T + scale * h.eval(rho).h;
            const double rad = scale * rho;
            // Exterior region causally untouched by data supported in B_r.
            if (!(time > 0.0 && time < rad - p.r)) {
                continue;
            }
            const double psi_static = slice_profile(m, h, rho, 0.0).psi;
            const double psi_num =
                std::pow(scale, -s) * (t.states[j](i) + psi_static);
            const double psi_ref = blowup_profile(m, 1.0 - time, rad).psi;
            rep.max_deviation =
                std::max(rep.max_deviation, std::abs(psi_num - psi_ref));
            ++rep.samples;
        }
    }
    return rep;
}

CorrectionResult lyapunov_correction(const Trajectory& t,
                                     const Eigen::MatrixXd& P1, const Model& m,
                                     const HeightFunction& h,
                                     const RadialGrid& g) {
    if (t.states.empty()) {
        throw std::invalid_argument("lyapunov_correction: empty trajectory");
    }
    CorrectionResult res;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(t.states.front().size());
    Eigen::VectorXd prev;
    double tail = 0.0;
    for (size_t j = 0; j < t.states.size(); ++j) {
        const Eigen::VectorXd w =
            std::exp(-t.taus[j]) * nonlinear_term(g, m, h, t.states[j]);
        if (j > 0) {
            acc += 0.5 * (t.taus[j] - t.taus[j - 1]) * (w + prev);
        }
        prev = w;
        tail = w.lpNorm<Eigen::Infinity>();
    }
    res.converged = tail < 1e-10;
    res.correction = P1 * t.states.front() + P1 * acc;
    return res;
}

}  // namespace sslab
