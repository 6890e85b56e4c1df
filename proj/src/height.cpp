#include "sslab/height.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sslab/rootfind.hpp"

namespace sslab {

namespace {

// The standard bump exp(-1/(1-x^2)) on (-1,1), zero outside.
double bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

double bump_l1_norm() {
    using boost::math::quadrature::gauss_kronrod;
    static const double value = gauss_kronrod<double, 31>::integrate(
        [](double x) { return bump(x); }, -1.0, 1.0, 8, 1e-15);
    return value;
}

// int_{-1}^{u} bump and int_{-1}^{u} x*bump, adaptive to abs tol ~1e-14.
double bump_int0(double u) {
    using boost::math::quadrature::gauss_kronrod;
    if (u <= -1.0) return 0.0;
    if (u > 1.0) u = 1.0;
    return gauss_kronrod<double, 31>::integrate(
        [](double x) { return bump(x); }, -1.0, u, 8, 1e-15);
}

double bump_int1(double u) {
    using boost::math::quadrature::gauss_kronrod;
    if (u <= -1.0) return 0.0;
    if (u > 1.0) u = 1.0;
    return gauss_kronrod<double, 31>::integrate(
        [](double x) { return x * bump(x); }, -1.0, u, 8, 1e-15);
}

}  // namespace

HeightFunction::HeightFunction(Kind k, double a, double b, double c)
    : kind_(k), p1_(a), p2_(b), p3_(c), bump_l1_(0.0) {
    if (kind_ == Kind::FlattenedCone) bump_l1_ = bump_l1_norm();
}

HeightFunction HeightFunction::standard() {
    return HeightFunction(Kind::Standard, 0.0, 0.0, 0.0);
}

HeightFunction HeightFunction::hyperboloidal(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::domain_error("hyperboloidal: alpha and beta must be positive");
    return HeightFunction(Kind::Hyperboloidal, alpha, beta, 0.0);
}

HeightFunction HeightFunction::flattened_cone(double kbar, double rbar, double eps) {
    if (!(kbar > 0.0 && kbar < 1.0))
        throw std::domain_error("flattened_cone: slope must lie in (0,1)");
    if (!(rbar > 0.0) || !(eps > 0.0 && eps < rbar))
        throw std::domain_error("flattened_cone: need 0 < eps < rbar");
    return HeightFunction(Kind::FlattenedCone, kbar, rbar, eps);
}

HeightEval HeightFunction::eval(double rho) const {
    if (rho < 0.0) throw std::domain_error("height eval: rho must be nonnegative");
    HeightEval e{};
    switch (kind_) {
        case Kind::Standard:
            e.h = -1.0;
            e.hp = 0.0;
            e.hpp = 0.0;
            break;
        case Kind::Hyperboloidal: {
            const double alpha = p1_, beta = p2_;
            const double s = std::sqrt(alpha * alpha + rho * rho);
            e.h = s - alpha - beta;
            e.hp = rho / s;
            e.hpp = alpha * alpha / (s * s * s);
            break;
        }
        case Kind::FlattenedCone: {
            const double kbar = p1_, rbar = p2_, eps = p3_;
            const double y = rho - rbar;
            if (y <= -eps) {
                e.h = -1.0;
                e.hp = 0.0;
                e.hpp = 0.0;
            } else if (y >= eps) {
                e.h = kbar * y - 1.0;
                e.hp = kbar;
                e.hpp = 0.0;
            } else {
                // Mollified band: h = kbar*int_{-eps}^{y} (y - z) phi_eps(z) dz - 1
                // with phi_eps(z) = bump(z/eps)/(eps*||bump||_1). Substituting
                // z = eps*x gives moments of the unit bump.
                const double u = y / eps;
                const double i0 = bump_int0(u) / bump_l1_;
                const double i1 = eps * bump_int1(u) / bump_l1_;
                e.h = kbar * (y * i0 - i1) - 1.0;
                e.hp = kbar * i0;
                e.hpp = kbar * bump(u) / (eps * bump_l1_);
            }
            break;
        }
    }
    e.c = rho * e.hp - e.h;
    e.w = 1.0 - e.hp * e.hp;
    return e;
}

double HeightFunction::asymptotic_slope() const {
    switch (kind_) {
        case Kind::Standard: return 0.0;
        case Kind::Hyperboloidal: return 1.0;
        case Kind::FlattenedCone: return p1_;
    }
    return 0.0;
}

double HeightFunction::plateau_radius() const {
    switch (kind_) {
        case Kind::Standard: return std::numeric_limits<double>::infinity();
        case Kind::Hyperboloidal: return 0.0;
        case Kind::FlattenedCone: return p2_ - p3_;
    }
    return 0.0;
}

std::string HeightFunction::describe() const {
    switch (kind_) {
        case Kind::Standard: return "standard";
        case Kind::Hyperboloidal:
            return "hyperboloidal(" + std::to_string(p1_) + "," + std::to_string(p2_) + ")";
        case Kind::FlattenedCone:
            return "flattened-cone(" + std::to_string(p1_) + "," + std::to_string(p2_) +
                   "," + std::to_string(p3_) + ")";
    }
    return "?";
}

double light_cone_radius(const HeightFunction& h, double rho_max) {
    // h(0) + 0 < 0 and the function rho + h(rho) is strictly increasing
    // (derivative 1 + h' >= 1), so the root is unique once bracketed.
    auto f = [&h](double rho) {
        HeightEval e = h.eval(rho);
        return std::make_pair(e.h + rho, e.hp + 1.0);
    };
    if (f(rho_max).first <= 0.0)
        throw std::runtime_error("light_cone_radius: root not bracketed within rho_max");
    return solve_monotone(f, 0.0, rho_max);
}

ImageSlopes image_slopes(const HeightFunction& h, double R) {
    if (!(R > 0.0)) throw std::domain_error("image_slopes: R must be positive");
    return {h.asymptotic_slope(), h.eval(R).h / R};
}

HeightValidation validate_height(const HeightFunction& h, int samples, double kappa,
                                 double rho_max) {
    if (samples < 2) throw std::domain_error("validate_height: samples >= 2 required");
    HeightValidation rep;
    rep.cond4_kappa = kappa;

    const double h0 = h.eval(0.0).h;
    rep.h_negative_at_origin = (h0 < 0.0);

    bool grad_ok = true, convex_ok = true, c_ok = true, plateau_ok = h.has_plateau();
    const double plateau = h.has_plateau()
                               ? std::min(h.plateau_radius(), rho_max)
                               : 0.0;
    for (int i = 0; i < samples; ++i) {
        const double rho = rho_max * double(i) / double(samples - 1);
        HeightEval e = h.eval(rho);
        if (!(e.hp >= 0.0 && e.hp < 1.0)) grad_ok = false;
        if (!(e.hpp >= -1e-14)) convex_ok = false;
        if (!(e.c >= -h0 - 1e-12)) c_ok = false;
        if (plateau_ok && rho < plateau && std::abs(e.h + 1.0) > 1e-14)
            plateau_ok = false;
    }
    rep.gradient_bound = grad_ok;
    rep.convexity = convex_ok;
    rep.c_lower_bound = c_ok;
    rep.cond1_plateau = plateau_ok;
    rep.cond2_gradient = grad_ok;
    rep.cond3_convex = convex_ok;

    // Condition (4): h(R) = kappa*R. Scan for a sign change of
    // h(rho) - kappa*rho and refine on the bracketing subinterval.
    rep.cond4_solvable = false;
    if (kappa < h.asymptotic_slope() || h.eval(rho_max).h >= kappa * rho_max) {
        const int scan = 4096;
        double prev_rho = 0.0;
        double prev = h.eval(0.0).h;
        for (int i = 1; i <= scan; ++i) {
            const double rho = rho_max * double(i) / scan;
            const double val = h.eval(rho).h - kappa * rho;
            if ((prev <= 0.0 && val >= 0.0) || (prev >= 0.0 && val <= 0.0)) {
                auto f = [&h, kappa](double r) {
                    HeightEval e = h.eval(r);
                    return std::make_pair(e.h - kappa * r, e.hp - kappa);
                };
                rep.cond4_R = solve_monotone(f, prev_rho, rho);
                rep.cond4_solvable = true;
                break;
            }
            prev_rho = rho;
            prev = val;
        }
    }
    return rep;
}

}  // namespace sslab
