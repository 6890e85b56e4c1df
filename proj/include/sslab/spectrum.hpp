#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "sslab/grid.hpp"
#include "sslab/height.hpp"
#include "sslab/model.hpp"

namespace sslab {

// Coefficients of the radial mode equation
//   a2 f'' + a1 f' + (a0 + V) f = 0
// for a separated mode with generator eigenvalue lambda.
struct ModeOdeCoeffs {
    double a2, a1, a0, V;
};
ModeOdeCoeffs mode_ode_coeffs(const Model& m, const HeightFunction& h,
                              double rho, double lambda);

// Hypergeometric parameters of the mode equation transplanted to the standard
// chart, in the variable z = rho^2:
//   z(1-z) w'' + (c - (a+b+1) z) w' - (a b - W(z)) w = 0.
struct HypergeomForm {
    double a, b, c;
    // Potential term W(z) evaluated pointwise.
    double potential(const Model& m, double z) const;
};
HypergeomForm hypergeometric_form(const Model& m, double lambda);

// Frobenius indices of the hypergeometric-type mode equation at z = 0 and
// z = 1; resonant marks an integer index difference (logarithmic case).
struct FrobeniusIndices {
    double at0_first, at0_second;
    double at1_first, at1_second;
    bool resonant_at0, resonant_at1;
};
FrobeniusIndices frobenius_indices(const Model& m, double lambda);

// Transplant a mode profile between charts: given samples f on grid g
// (height h) returns gbar on grid gbar_grid with
//   gbar(rho) = hplus(rho)^{-lambda} f(rho / hplus(rho)),  hplus = -h.
Eigen::VectorXd mode_transform(const RadialGrid& g, const HeightFunction& h,
                               double lambda, const Eigen::VectorXd& f,
                               const RadialGrid& gbar_grid);

struct SpectrumReport {
    std::vector<std::complex<double>> all_eigenvalues;      // at resolution N
    std::vector<std::complex<double>> trusted;              // matched across N
    std::complex<double> lambda_sym;       // trusted eigenvalue nearest 1
    bool symmetry_found = false;           // |lambda_sym - 1| small
    bool symmetry_simple = true;           // unique trusted near lambda_sym
    int unstable_count = 0;                // trusted with Re > delta, != sym
    double omega_gap = 0.0;                // -max Re over trusted != sym
    Eigen::VectorXd right_sym;             // right eigenvector for lambda_sym
    Eigen::VectorXd left_sym;              // left eigenvector (of L^T)
    Eigen::MatrixXd projector;             // rank-one spectral projector P1
    double projector_idempotency = 0.0;    // ||P1^2 - P1||_max
};

// Dense spectrum of the linearized generator at resolution N, cross-checked
// against resolution N_check; trusted eigenvalues agree across resolutions
// within match_tol (relative for large moduli).
SpectrumReport solve_spectrum(const Model& m, const HeightFunction& h, double R,
                              int N, int N_check, double match_tol = 1e-4,
                              double realpart_window = -0.1);

// Relative graded-energy residual || (L - 1) f_sym || / || f_sym || in E^k.
double verify_symmetry_eigenpair(const RadialGrid& g, const Model& m,
                                 const HeightFunction& h, int k, double eps1);

}  // namespace sslab
