#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sslab/grid.hpp"
#include "sslab/height.hpp"
#include "sslab/model.hpp"

namespace sslab {

// Smooth even perturbation data (f, g), compactly supported in the ball of
// radius r, with amplitudes delta (for f) and delta_g (for g).
struct PerturbationSpec {
    enum class Family { Zero, Gaussian, Bump };
    Family family = Family::Zero;
    double delta = 0.0;
    double delta_g = 0.0;
    double r = 0.5;

    double f(double rho) const;
    double g(double rho) const;
};

// Evolved state samples: stacked (u1, u2) grid vectors per time sample.
struct Trajectory {
    std::vector<double> taus;
    std::vector<Eigen::VectorXd> states;
    bool diverged = false;
    double diverged_tau = 0.0;
};

// Admissible window of candidate blowup times for a given perturbation
// support and height plateau.
std::pair<double, double> blowup_time_window(const HeightFunction& h,
                                             const PerturbationSpec& p);

// Perturbation of the static profile induced by free data (f, g) posed at
// physical time 0 with candidate blowup time T, expressed on the grid.
Eigen::VectorXd initial_data(const Model& m, const HeightFunction& h,
                             const PerturbationSpec& p, double T,
                             const RadialGrid& g);

// Stable explicit time step for the assembled generator.
double stable_time_step(const RadialGrid& g, const Eigen::MatrixXd& L,
                        const HeightFunction& h);

// Classical fourth-order Runge-Kutta on du/dtau = L u (+ N(u) when
// nonlinear); dtau <= 0 selects the stable step automatically. Samples are
// recorded every `stride` steps (always including the final time).
Trajectory integrate(const RadialGrid& g, const Model& m,
                     const HeightFunction& h, const Eigen::MatrixXd& L,
                     const Eigen::VectorXd& u0, double tau_max, double dtau,
                     bool nonlinear, int stride = 1,
                     double divergence_guard = 1e6);

struct TuneResult {
    double T_star = 1.0;
    double phi = 0.0;      // residual unstable projection at T_star
    bool success = false;
    Trajectory trajectory;  // tuned run
};

// Shooting on the candidate blowup time: finds T* in the admissible window
// where the normalized unstable projection e^{-tau_f} <g1, u_T(tau_f)>
// vanishes, under the full nonlinear flow.
TuneResult tune_blowup_time(const RadialGrid& g, const Model& m,
                            const HeightFunction& h, const PerturbationSpec& p,
                            double tau_f, const Eigen::VectorXd& g1);

// -slope of the least-squares line through log norms(tau) over
// [tau1, tau2]; positive return means decay.
double decay_rate(const std::vector<double>& taus,
                  const std::vector<double>& norms, double tau1, double tau2);

struct FiniteSpeedReport {
    double max_deviation = 0.0;
    int samples = 0;
    bool skipped = false;  // support not inside the plateau
};

// Compares the reconstructed physical-space solution against the unperturbed
// blowup solution on the exterior region untouched by the perturbation.
FiniteSpeedReport finite_speed_check(const Trajectory& t, const Model& m,
                                     const HeightFunction& h, double T,
                                     const PerturbationSpec& p,
                                     const RadialGrid& g);

struct CorrectionResult {
    Eigen::VectorXd correction;
    bool converged = false;  // e^{-tau} nonlinearity decayed below 1e-10
};

// Discrete realization of the blowup-time correction functional:
// P1 u(0) + P1 \int_0^\infty e^{-tau'} N(u(tau')) dtau' (trapezoid on the
// recorded samples). Near zero for a tuned trajectory.
CorrectionResult lyapunov_correction(const Trajectory& t,
                                     const Eigen::MatrixXd& P1, const Model& m,
                                     const HeightFunction& h,
                                     const RadialGrid& g);

}  // namespace sslab
