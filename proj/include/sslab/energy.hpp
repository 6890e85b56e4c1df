#pragma once

#include <Eigen/Dense>

#include "sslab/grid.hpp"
#include "sslab/height.hpp"

namespace sslab {

// The graded energy inner product E^k on corotational state pairs, realized
// as a dense Gram matrix on the stacked grid values (u1; u2).
//
// Base level: (f|g)_{E^1} = int grad f1 . grad g1 + int f2 g2 w
//                           + (2 eps_1/R) boundary-int f1 g1.
// Recursion: (f|g)_{E^k} = sum_{mu=0}^{d} (D_mu f | D_mu g)_{E^{k-1}}
//   + (2 eps_k/R) boundary-int f1 g1          for k < d/2 + 1,
//   + (f|g)_{E^{k-1}}                          for k >= d/2 + 1,
// with eps_k = eps_1 prod_{i=1}^{k-1} (d/2 - i - eps_1) eps_1 / R^2.
//
// The operators D_mu mix radial profiles with angular monomials xi^alpha; the
// evaluation tracks, per term, a numerator (linear in the input state), a
// power of rho, and the angular multi-index, and integrates the angular
// factors in closed form. The result is exact (up to rounding) for grid
// polynomials.
class EnergyForm {
  public:
    EnergyForm(const RadialGrid& g, int d, const HeightFunction& h, int k,
               double eps1 = 0.5);

    const Eigen::MatrixXd& gram() const { return gram_; }
    int k() const { return k_; }
    int d() const { return d_; }
    double eps1() const { return eps1_; }
    // eps_k of the top level (0 when the lower-order-term branch applies).
    double eps_k() const { return epsk_; }

    // When the top-level boundary weight eps_k vanishes, E^k is a seminorm
    // whose kernel is the constant first component; evaluation then deflates
    // that component (an exact invariance of the form) to avoid cancellation
    // against the large derivative entries of the Gram.
    double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    double norm(const Eigen::VectorXd& u) const;

    // Boundary integral of |u1|^2 over the sphere rho = R.
    double boundary_u1_sq(const Eigen::VectorXd& u) const;

  private:
    int d_, k_;
    double eps1_, epsk_, R_;
    double sphere_;
    double boundary_factor_;  // |S^{d-1}| R^{d-1}
    bool degenerate_top_ = false;
    int n_ = 0;  // grid size (half the state dimension)
    Eigen::MatrixXd gram_;
};

}  // namespace sslab
