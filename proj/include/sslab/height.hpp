#pragma once

#include <string>

namespace sslab {

// Pointwise data of a radial height profile: value, first and second
// derivative, and the derived quantities c = rho*h' - h and w = 1 - h'^2.
struct HeightEval {
    double h;
    double hp;
    double hpp;
    double c;
    double w;
};

// Per-condition outcome of validate_height. The four structural conditions
// are: (1) flat plateau at value -1, (2) gradient bound 0 <= h' < 1,
// (3) convexity h'' >= 0, (4) existence of R with h(R) = kappa*R for the
// requested cone-opening slope kappa.
struct HeightValidation {
    bool h_negative_at_origin = false;
    bool gradient_bound = false;
    bool convexity = false;
    bool c_lower_bound = false;
    bool cond1_plateau = false;
    bool cond2_gradient = false;
    bool cond3_convex = false;
    bool cond4_solvable = false;
    double cond4_R = 0.0;
    double cond4_kappa = 0.0;
    bool all_geometric() const {
        return h_negative_at_origin && gradient_bound && convexity && c_lower_bound;
    }
    bool all_flattened_cone() const {
        return cond1_plateau && cond2_gradient && cond3_convex && cond4_solvable;
    }
};

// A radial height profile defining a similarity-coordinate slicing. Immutable
// after construction; evaluation is pure.
class HeightFunction {
  public:
    enum class Kind { Standard, Hyperboloidal, FlattenedCone };

    static HeightFunction standard();
    static HeightFunction hyperboloidal(double alpha, double beta);
    static HeightFunction flattened_cone(double kbar, double rbar, double eps);

    // h(rho), h'(rho), h''(rho), c(rho), w(rho); throws std::domain_error for
    // rho < 0.
    HeightEval eval(double rho) const;

    Kind kind() const { return kind_; }
    // Asymptotic slope kappa = lim_{rho->inf} h'(rho).
    double asymptotic_slope() const;
    // Radius of the flat plateau (h == -1 there); 0 when there is none
    // (infinity for Standard, reported as a large sentinel via has_plateau).
    bool has_plateau() const { return kind_ != Kind::Hyperboloidal; }
    double plateau_radius() const;

    double param_alpha() const { return p1_; }
    double param_beta() const { return p2_; }
    double param_kbar() const { return p1_; }
    double param_rbar() const { return p2_; }
    double param_eps() const { return p3_; }

    std::string describe() const;

  private:
    HeightFunction(Kind k, double a, double b, double c);
    Kind kind_;
    double p1_, p2_, p3_;
    double bump_l1_;  // L1 norm of the unscaled mollifier bump (FlattenedCone)
};

// Unique root R0 of h(rho) + rho = 0 (where the slice meets the backward
// light cone), to relative tolerance 1e-13. rho_max bounds the bracket search.
double light_cone_radius(const HeightFunction& h, double rho_max = 10.0);

// (kappa, kappa_R) with kappa the asymptotic slope and kappa_R = h(R)/R.
struct ImageSlopes {
    double kappa;
    double kappa_R;
};
ImageSlopes image_slopes(const HeightFunction& h, double R);

// Sampled validation of the structural conditions; kappa is the cone-opening
// slope used in condition (4) (must be below the asymptotic slope for a
// solution to exist).
HeightValidation validate_height(const HeightFunction& h, int samples,
                                 double kappa = 0.0, double rho_max = 10.0);

}  // namespace sslab
