#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sslab/energy.hpp"
#include "sslab/grid.hpp"
#include "sslab/height.hpp"
#include "sslab/model.hpp"

namespace sslab {

// Pointwise geometric data on the grid used by the operator assembly.
struct GridGeometry {
    Eigen::VectorXd h, hp, hpp, c, w;
    Eigen::VectorXd hp_over_rho;  // h'/rho with the even limit h''(0)
    Eigen::VectorXd delta_h;      // Laplacian of the height: h'' + (d-1) h'/rho
};
GridGeometry grid_geometry(const RadialGrid& g, const HeightFunction& h, int d);

// Free part L0 of the linearized generator on stacked even radial pairs.
Eigen::MatrixXd assemble_L0(const RadialGrid& g, const Model& m,
                            const HeightFunction& h);
// Potential part: [0; (c/w) V f1].
Eigen::MatrixXd assemble_LV(const RadialGrid& g, const Model& m,
                            const HeightFunction& h);
// Full linearized generator L = L0 + LV.
Eigen::MatrixXd assemble_L(const RadialGrid& g, const Model& m,
                           const HeightFunction& h);
// L_chi = L0 + s I (the wave part before subtracting the scaling shift).
Eigen::MatrixXd assemble_Lchi(const RadialGrid& g, const Model& m,
                              const HeightFunction& h);
// L_chi acting on the first angular sector: radial profiles p(rho) (odd) of
// pairs p(rho) * omega_j.
Eigen::MatrixXd assemble_Lchi_l1(const RadialGrid& g, const Model& m,
                                 const HeightFunction& h);

// The commuting first-order operators on radial pairs.
// Time class: even pair -> even pair.
Eigen::MatrixXd assemble_D0(const RadialGrid& g, const HeightFunction& h, int d);
// Space class: even pair -> the odd radial parts p with D_i u = omega_i p.
Eigen::MatrixXd assemble_Dspace(const RadialGrid& g, const HeightFunction& h, int d);

// Radial coefficient fields of the similarity-coordinate d'Alembertian:
// Box v = e^{2 tau} ( c00 dtau^2 + cr0 drho dtau + crr drho^2 + c0 dtau
//                     + cr drho + (d-1)/rho drho ) v.
struct BoxCoeffs {
    Eigen::VectorXd c00, cr0, crr, c0, cr;
};
BoxCoeffs assemble_box_chi(const RadialGrid& g, const HeightFunction& h, int d);

// Box applied to a separable v = e^{lambda tau} f(rho), without the e^{2 tau}
// prefactor.
Eigen::VectorXd apply_box(const RadialGrid& g, const BoxCoeffs& box, int d,
                          double lambda, const Eigen::VectorXd& f);

// Residual of the static blowup profile under the full wave equation,
// evaluated through Box plus the nonlinearity on the grid.
Eigen::VectorXd profile_residual(const RadialGrid& g, const Model& m,
                                 const HeightFunction& h);

// Sup-norm defects of the commutation identity D_mu L_chi - L_chi D_mu = -D_mu
// (time class and space class). Each test is a stacked pair of even-Chebyshev
// coefficient vectors (degrees 0, 2, ..., N per component); nodal values are
// synthesized internally, in quadruple precision for the standard and
// hyperboloidal heights, so that the test polynomials are represented exactly
// and the reported defect reflects discretization truncation rather than
// rounding noise in the sampled data.
struct CommutatorReport {
    double defect_time = 0.0;
    double defect_space = 0.0;
    double max_defect = 0.0;
};
CommutatorReport commutator_defect(const RadialGrid& g, const Model& m,
                                   const HeightFunction& h,
                                   const std::vector<Eigen::VectorXd>& tests);

// Random-state check of the graded energy dissipativity bound
//   Re(L_chi f | f)_{E^k} <= (d/2 - k) ||f||^2
//                            + (-d/2 + k + eps1)(2 eps_k/R) bnd|f1|^2
// for k < d/2 + 1, and <= eps1 ||f||^2 for k >= d/2 + 1.
struct DissipativityReport {
    double max_violation = 0.0;  // max over trials of lhs - rhs
    double min_margin = 0.0;     // min over trials of rhs - lhs
    int trials = 0;
};
DissipativityReport dissipativity_check(const RadialGrid& g, const Model& m,
                                        const HeightFunction& h, int k,
                                        double eps1, int trials, uint64_t seed);

}  // namespace sslab
