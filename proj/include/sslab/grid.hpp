#pragma once

#include <Eigen/Dense>
#include <map>
#include <random>

namespace sslab {

// Chebyshev-Gauss-Lobatto collocation on [0, R], reduced to even radial
// functions. The full symmetric grid on [-R, R] has N+1 nodes (N even); the
// half grid keeps nodes rho_i = R cos(i pi / N), i = 0..M = N/2, so
// rho_0 = R and rho_M = 0. Differentiation operators are the parity-folded
// restrictions of the full spectral differentiation matrix; quadrature
// weights are exact for grid polynomials against any fixed power of rho.
class RadialGrid {
  public:
    RadialGrid(double R, int N);

    double R() const { return R_; }
    int N() const { return N_; }
    int M() const { return M_; }
    int size() const { return M_ + 1; }
    const Eigen::VectorXd& rho() const { return rho_; }
    double min_spacing() const { return min_spacing_; }

    // First derivative of an even grid function (values of the odd f').
    const Eigen::MatrixXd& De() const { return De_; }
    // First derivative of an odd grid function (values of the even p').
    const Eigen::MatrixXd& Do() const { return Do_; }
    // Second derivatives, folded even/odd.
    const Eigen::MatrixXd& D2e() const { return D2e_; }
    const Eigen::MatrixXd& D2o() const { return D2o_; }

    // Radial Laplacian f'' + (d-1) f'/rho on even functions, with the even
    // limit d * f''(0) at the origin.
    Eigen::MatrixXd laplacian(int d) const;
    // Laplacian on the first angular sector: radial profiles p (odd) of
    // functions p(rho) * omega_j; p'' + (d-1) p'/rho - (d-1) p / rho^2.
    Eigen::MatrixXd laplacian_l1(int d) const;
    // Multiplication by 1/rho on odd grid functions (result even); the origin
    // row carries the limit p'(0).
    Eigen::MatrixXd odd_div_rho() const;

    // Quadrature weights w^(p) with sum_i w_i f_i = int_0^R f(rho) rho^p drho,
    // exact for even grid polynomials f. Negative even p is supported through
    // the origin-reduction operator and is exact when the integrand's
    // numerator vanishes at rho = 0 to order |p|.
    const Eigen::VectorXd& quad_weights(int p) const;

    // Surface measure of the unit (d-1)-sphere.
    static double sphere_area(int d);

    // Integral over the d-ball of radius R of an even radial grid function.
    double ball_integral(const Eigen::VectorXd& f, int d) const;

    // Barycentric interpolation of an even grid function at rho in [0, R].
    double interp_even(const Eigen::VectorXd& f, double rho) const;

    // Random band-limited even function: Chebyshev-even coefficients up to
    // degree 2*deg with a decaying envelope.
    Eigen::VectorXd random_even(int deg, std::mt19937_64& rng) const;

  private:
    double R_;
    int N_, M_;
    double min_spacing_;
    Eigen::VectorXd rho_;
    Eigen::VectorXd xfull_;  // full grid nodes, exactly antisymmetric
    Eigen::VectorXd bary_;   // barycentric weights of the full grid
    Eigen::MatrixXd De_, Do_, D2e_, D2o_;
    mutable std::map<int, Eigen::VectorXd> quad_cache_;
    Eigen::MatrixXd reduce_;  // linear "divide by rho^2" with origin limit

    Eigen::VectorXd cardinal_weights(int p) const;
};

// Sobolev norm of an even radial function: the radial form
// ( sum_{j<=k} int_{B_R^d} |d^j f|^2 )^{1/2}.
double sobolev_norm(const RadialGrid& g, int d, const Eigen::VectorXd& f, int k);

}  // namespace sslab
