#include "sslab/model.hpp"

#include <cmath>
#include <stdexcept>

namespace sslab {

Model::Model(Kind k, int d) : kind_(k), d_(d), alpha_(0.0), beta_(0.0) {
    if (k == Kind::WaveMaps) {
        if (d < 5) throw std::domain_error("wave maps model requires d >= 5");
        s_ = 1;
    } else {
        if (d < 7) throw std::domain_error("yang-mills model requires d >= 7");
        s_ = 2;
        auto [a, b] = ym_coefficients(d - 2);
        alpha_ = a;
        beta_ = b;
    }
}

Model Model::wave_maps(int d) { return Model(Kind::WaveMaps, d); }
Model Model::yang_mills(int d) { return Model(Kind::YangMills, d); }

std::pair<double, double> ym_coefficients(int n) {
    if (n < 5) throw std::domain_error("ym_coefficients: n >= 5 required");
    const double t = 3.0 * (n - 2) * (n - 4);
    const double rt = std::sqrt(t);
    const double alpha = (t + (n + 2) * rt) / (12.0 * (n - 1));
    const double beta = (3.0 * (n - 2) - rt) / (4.0 * (n - 1));
    return {alpha, beta};
}

namespace {

// arctan(u)/u with a series branch for small u.
double arctanc(double u) {
    const double u2 = u * u;
    if (std::abs(u) < 1e-4)
        return 1.0 - u2 / 3.0 + u2 * u2 / 5.0 - u2 * u2 * u2 / 7.0;
    return std::atan(u) / u;
}

// q(u) = [ (1-u^2)/(1+u^2)^2 - arctan(u)/u ] / u, the radial-derivative
// kernel of the arctan profile; odd, q(u) ~ -(8/3) u for small u.
double qker(double u) {
    if (std::abs(u) < 1e-2) {
        const double u2 = u * u;
        // (-1)^k (2k)(2k+2)/(2k+1) u^{2k-1}, k = 1..5
        return u * (-8.0 / 3.0 +
                    u2 * (24.0 / 5.0 +
                          u2 * (-48.0 / 7.0 +
                                u2 * (80.0 / 9.0 + u2 * (-120.0 / 11.0)))));
    }
    const double opu2 = 1.0 + u * u;
    return ((1.0 - u * u) / (opu2 * opu2) - arctanc(u)) / u;
}

}  // namespace

ProfileEval blowup_profile(const Model& m, double t, double r) {
    if (r < 0.0) throw std::domain_error("blowup_profile: r must be nonnegative");
    if (t == 0.0 && r == 0.0)
        throw std::domain_error("blowup_profile: singular point (0,0)");
    if (m.kind() == Model::Kind::WaveMaps) {
        const double a = std::sqrt(double(m.d() - 4));
        const double S = std::hypot(a * t, r);
        // D = a t + S, written cancellation-free when a t < 0.
        const double D = (t >= 0.0) ? (a * t + S) : (r * r / (S - a * t));
        if (D == 0.0)
            throw std::domain_error("blowup_profile: singular on the negative time axis");
        const double u = r / D;
        ProfileEval e;
        e.psi = 4.0 / D * arctanc(u);
        e.dpsi_dt = -2.0 * a / (S * S);
        e.dpsi_dr = 4.0 / (D * D) * qker(u);
        return e;
    }
    const double al = m.alpha_c(), be = m.beta_c();
    const double Q = al * t * t + be * r * r;
    if (Q == 0.0) throw std::domain_error("blowup_profile: singular point (0,0)");
    ProfileEval e;
    e.psi = 1.0 / Q;
    e.dpsi_dt = -2.0 * al * t / (Q * Q);
    e.dpsi_dr = -2.0 * be * r / (Q * Q);
    return e;
}

NonlinearityEval nonlinearity(const Model& m, double r, double z) {
    NonlinearityEval out;
    if (m.kind() == Model::Kind::YangMills) {
        const double c = double(m.d() - 4);
        out.F = c * (3.0 * z * z - r * r * z * z * z);
        out.Fz = c * (6.0 * z - 3.0 * r * r * z * z);
        out.Fzz = c * (6.0 - 6.0 * r * r * z);
        return out;
    }
    const double c = double(m.d() - 3);
    const double w = 2.0 * r * z;
    double s3, c2, s1;  // (sin w - w)/w^3, (cos w - 1)/w^2, sin(w)/w
    if (std::abs(w) < 0.5) {
        // Series branch: at |w| = 0.5 the truncation tails are below 1e-17.
        const double w2 = w * w;
        s3 = -1.0 / 6.0 +
             w2 * (1.0 / 120.0 +
                   w2 * (-1.0 / 5040.0 +
                         w2 * (1.0 / 362880.0 +
                               w2 * (-1.0 / 39916800.0 +
                                     w2 * (1.0 / 6227020800.0 -
                                           w2 / 1307674368000.0)))));
        s1 = 1.0 + w2 * s3;
    } else {
        s3 = (std::sin(w) - w) / (w * w * w);
        s1 = std::sin(w) / w;
    }
    // cos w - 1 = -2 sin^2(w/2): cancellation-free at every w.
    {
        const double half = 0.5 * w;
        const double sc = half == 0.0 ? 1.0 : std::sin(half) / half;
        c2 = -0.5 * sc * sc;
    }
    out.F = -4.0 * c * z * z * z * s3;
    out.Fz = -4.0 * c * z * z * c2;
    out.Fzz = 4.0 * c * z * s1;
    return out;
}

double potential(const Model& m, const HeightFunction& h, double rho) {
    const double t = -h.eval(rho).h;
    const double psi = blowup_profile(m, t, rho).psi;
    return nonlinearity(m, rho, psi).Fz;
}

double potential_explicit(const Model& m, double t, double r) {
    if (m.kind() == Model::Kind::WaveMaps) {
        const double d = m.d();
        const double den = (d - 4) * t * t + r * r;
        return 8.0 * (d - 3) * (d - 4) * t * t / (den * den);
    }
    const double al = m.alpha_c(), be = m.beta_c();
    const double den = al * t * t + be * r * r;
    return 3.0 * (m.d() - 4) * (2.0 * al * t * t + (2.0 * be - 1.0) * r * r) /
           (den * den);
}

double nonlinear_remainder(const Model& m, const HeightFunction& h, double rho,
                           double z) {
    const double t = -h.eval(rho).h;
    const double psi = blowup_profile(m, t, rho).psi;
    NonlinearityEval base = nonlinearity(m, rho, psi);
    NonlinearityEval shifted = nonlinearity(m, rho, psi + z);
    return shifted.F - base.Fz * z - base.F;
}

SymmetryModeEval symmetry_mode(const Model& m, const HeightFunction& h, double rho) {
    HeightEval he = h.eval(rho);
    double f1, f1p;
    if (m.kind() == Model::Kind::WaveMaps) {
        const double a = std::sqrt(double(m.d() - 4));
        const double S2 = a * a * he.h * he.h + rho * rho;
        f1 = -2.0 * a / S2;
        f1p = 4.0 * a * (a * a * he.h * he.hp + rho) / (S2 * S2);
    } else {
        const double al = m.alpha_c(), be = m.beta_c();
        const double Q = al * he.h * he.h + be * rho * rho;
        f1 = 2.0 * al * he.h / (Q * Q);
        f1p = 2.0 * al * he.hp / (Q * Q) -
              8.0 * al * al * he.h * he.h * he.hp / (Q * Q * Q) -
              8.0 * al * be * he.h * rho / (Q * Q * Q);
    }
    return {f1, ((m.s() + 1) * f1 + rho * f1p) / he.c};
}

std::vector<double> reconstruct_wave_map(const std::vector<double>& x, double psi) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double r = std::sqrt(r2);
    std::vector<double> out(x.size() + 1);
    const double angle = r * psi;
    // sin(r psi)/r, with the even limit psi at r = 0.
    const double sinc = (r < 1e-8) ? psi * (1.0 - angle * angle / 6.0)
                                   : std::sin(angle) / r;
    for (size_t i = 0; i < x.size(); ++i) out[i] = sinc * x[i];
    out[x.size()] = std::cos(angle);
    return out;
}

double reconstruct_yang_mills(const std::vector<double>& x, double psi, int mu,
                              int i, int j) {
    const int n = int(x.size());
    if (i < 1 || j < 1 || i > n || j > n || mu < 0 || mu > n)
        throw std::domain_error("reconstruct_yang_mills: index out of range");
    const double xi = x[i - 1], xj = x[j - 1];
    const double di = (mu == i) ? 1.0 : 0.0;
    const double dj = (mu == j) ? 1.0 : 0.0;
    return psi * (xi * dj - xj * di);
}

}  // namespace sslab
