#pragma once

#include <utility>
#include <vector>

#include "sslab/height.hpp"

namespace sslab {

// Which symmetry-reduced equation is being studied, at which reduced
// dimension d, with the scaling exponent s and (for the gauge model) the
// profile coefficients.
class Model {
  public:
    enum class Kind { WaveMaps, YangMills };

    static Model wave_maps(int d);   // requires d >= 5
    static Model yang_mills(int d);  // requires d >= 7

    Kind kind() const { return kind_; }
    int d() const { return d_; }
    int s() const { return s_; }
    double alpha_c() const { return alpha_; }  // YangMills only
    double beta_c() const { return beta_; }    // YangMills only
    const char* name() const {
        return kind_ == Kind::WaveMaps ? "wave-maps" : "yang-mills";
    }

  private:
    Model(Kind k, int d);
    Kind kind_;
    int d_, s_;
    double alpha_, beta_;
};

// Closed-form profile coefficients (alpha_n, beta_n) of the gauge model,
// n >= 5.
std::pair<double, double> ym_coefficients(int n);

// Value and first derivatives of the self-similar blowup profile at (t, r).
struct ProfileEval {
    double psi;
    double dpsi_dt;
    double dpsi_dr;
};

// Blowup profile psi(t, r); throws std::domain_error at the singular point
// (0,0). Small r is evaluated through series forms of the even extension.
ProfileEval blowup_profile(const Model& m, double t, double r);

// F(r, z) and its first two z-derivatives.
struct NonlinearityEval {
    double F;
    double Fz;
    double Fzz;
};
NonlinearityEval nonlinearity(const Model& m, double r, double z);

// V(rho) = F'(rho, psi(-h(rho), rho)).
double potential(const Model& m, const HeightFunction& h, double rho);

// The closed-form expression for the same potential, used as a consistency
// oracle: evaluated at t = -h(rho), r = rho.
double potential_explicit(const Model& m, double t, double r);

// N(z) = F(rho, psi + z) - F'(rho, psi) z - F(rho, psi) with psi the static
// profile value at (-h(rho), rho); quadratic-leading in z.
double nonlinear_remainder(const Model& m, const HeightFunction& h, double rho,
                           double z);

// The time-translation symmetry mode: first component
// f1(rho) = (d/dt psi)(-h(rho), rho), second component
// ((s+1) f1 + rho f1')/c(rho).
struct SymmetryModeEval {
    double f1;
    double second;
};
SymmetryModeEval symmetry_mode(const Model& m, const HeightFunction& h, double rho);

// Reconstruction of the ambient fields from the radial profile value psi at a
// spatial point x. Wave maps: the sphere-valued point
// (sin(|x| psi) x/|x|, cos(|x| psi)), unit norm. Yang-Mills: the connection
// component A_mu^{ij} = psi (x_i delta_mu^j - x_j delta_mu^i).
std::vector<double> reconstruct_wave_map(const std::vector<double>& x, double psi);
double reconstruct_yang_mills(const std::vector<double>& x, double psi, int mu,
                              int i, int j);

}  // namespace sslab
