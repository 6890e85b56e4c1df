#include "sslab/chart.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sslab/rootfind.hpp"

namespace sslab {

namespace {

// Solves alpha * h(rho_hat/alpha) = target for alpha > 0. The left-hand side
// is strictly decreasing in alpha (derivative -c(rho_hat/alpha) <= h(0) < 0),
// tends to kappa*rho_hat as alpha -> 0+ and to -infinity as alpha -> infinity.
double solve_scale(const HeightFunction& h, double rho_hat, double target,
                   const char* who) {
    if (rho_hat == 0.0) {
        const double h0 = h.eval(0.0).h;
        if (!(target / h0 > 0.0))
            throw std::domain_error(std::string(who) +
                                    ": on the axis the event must satisfy t < T");
        return target / h0;
    }
    if (!(h.asymptotic_slope() * rho_hat > target))
        throw std::domain_error(std::string(who) +
                                ": violated image inequality kappa*|x| > t - T");
    auto f = [&](double alpha) {
        HeightEval e = h.eval(rho_hat / alpha);
        return std::make_pair(alpha * e.h - target, -e.c);
    };
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (f(lo).first <= 0.0) {
        lo *= 0.5;
        if (++guard > 200)
            throw std::domain_error(std::string(who) + ": bracketing failed (low end)");
    }
    guard = 0;
    while (f(hi).first >= 0.0) {
        hi *= 2.0;
        if (++guard > 200)
            throw std::domain_error(std::string(who) + ": bracketing failed (high end)");
    }
    // f is decreasing: f(lo) > 0 > f(hi).
    return solve_monotone(f, lo, hi);
}

}  // namespace

CoordChart::CoordChart(HeightFunction height, double T, double R)
    : height_(std::move(height)), T_(T), R_(R), R0_(0.0) {
    if (!(T > 0.0)) throw std::domain_error("chart: T must be positive");
    if (!(R > 0.0)) throw std::domain_error("chart: R must be positive");
    R0_ = light_cone_radius(height_, 10.0 * std::max(1.0, R));
    if (R < R0_ - 1e-12)
        throw std::domain_error("chart: R must not be below the light-cone radius R0");
}

Event CoordChart::to_physical(double tau, double rho) const {
    if (rho < 0.0 || rho > R_ * (1.0 + 1e-14))
        throw std::domain_error("to_physical: rho outside [0, R]");
    const double scale = T_ * std::exp(-tau);
    return {T_ + scale * height_.eval(rho).h, scale * rho};
}

SimCoords CoordChart::from_physical(const Event& e) const {
    if (e.r < 0.0) throw std::domain_error("from_physical: r must be nonnegative");
    const double rho_hat = e.r / T_;
    const double beta = (e.t - T_) / T_;
    const double alpha = solve_scale(height_, rho_hat, beta, "from_physical");
    const double rho = rho_hat / alpha;
    if (rho > R_ * (1.0 + 1e-10))
        throw std::domain_error("from_physical: event outside the radial extent rho <= R");
    return {-std::log(alpha), std::min(rho, R_)};
}

FoliationMetrics CoordChart::foliation(double rho, int d, double tau) const {
    HeightEval he = height_.eval(rho);
    const double scale = T_ * std::exp(-tau);
    const double sw = std::sqrt(he.w);
    return {std::pow(scale, 2 * d) * he.w, 1.0 / sw, he.hp / sw};
}

double transition_scale(const HeightFunction& h, const HeightFunction& hbar,
                        double rho_bar) {
    if (rho_bar < 0.0)
        throw std::domain_error("transition_scale: rho_bar must be nonnegative");
    return solve_scale(h, rho_bar, hbar.eval(rho_bar).h, "transition_scale");
}

}  // namespace sslab
