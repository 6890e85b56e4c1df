#include "sslab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <quadmath.h>

namespace sslab {

namespace {

constexpr double kOriginTol = 1e-13;

}  // namespace

GridGeometry grid_geometry(const RadialGrid& g, const HeightFunction& h, int d) {
    const int n = g.size();
    GridGeometry geo;
    geo.h.resize(n);
    geo.hp.resize(n);
    geo.hpp.resize(n);
    geo.c.resize(n);
    geo.w.resize(n);
    geo.hp_over_rho.resize(n);
    geo.delta_h.resize(n);
    for (int i = 0; i < n; ++i) {
        const double rho = g.rho()(i);
        const HeightEval e = h.eval(rho);
        geo.h(i) = e.h;
        geo.hp(i) = e.hp;
        geo.hpp(i) = e.hpp;
        geo.c(i) = e.c;
        geo.w(i) = e.w;
        if (rho < kOriginTol) {
            geo.hp_over_rho(i) = e.hpp;
            geo.delta_h(i) = d * e.hpp;
        } else {
            geo.hp_over_rho(i) = e.hp / rho;
            geo.delta_h(i) = e.hpp + (d - 1) * e.hp / rho;
        }
    }
    return geo;
}

Eigen::MatrixXd assemble_L0(const RadialGrid& g, const Model& m,
                            const HeightFunction& h) {
    const int n = g.size();
    const int d = m.d();
    const int s = m.s();
    const GridGeometry geo = grid_geometry(g, h, d);
    const Eigen::MatrixXd& De = g.De();
    const Eigen::MatrixXd Lap = g.laplacian(d);
    const Eigen::VectorXd& rho = g.rho();

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    // Row block 1: -s f1 - rho f1' + c f2.
    L.block(0, 0, n, n) = -(rho.asDiagonal() * De);
    L.block(0, 0, n, n).diagonal().array() -= s;
    L.block(0, n, n, n) = geo.c.asDiagonal();
    // Row block 2: (c/w) Lap f1 - (s+1 + (c/w) dh) f2 - (rho + 2 (c/w) h') f2'.
    const Eigen::VectorXd cw = geo.c.array() / geo.w.array();
    L.block(n, 0, n, n) = cw.asDiagonal() * Lap;
    const Eigen::VectorXd adiag =
        -(s + 1 + (cw.array() * geo.delta_h.array()));
    const Eigen::VectorXd bcoef = -(rho.array() + 2.0 * cw.array() * geo.hp.array());
    L.block(n, n, n, n) = bcoef.asDiagonal() * De;
    L.block(n, n, n, n).diagonal() += adiag;
    return L;
}

Eigen::MatrixXd assemble_LV(const RadialGrid& g, const Model& m,
                            const HeightFunction& h) {
    const int n = g.size();
    const GridGeometry geo = grid_geometry(g, h, m.d());
    Eigen::MatrixXd LV = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const double v = potential(m, h, g.rho()(i));
        LV(n + i, i) = geo.c(i) / geo.w(i) * v;
    }
    return LV;
}

Eigen::MatrixXd assemble_L(const RadialGrid& g, const Model& m,
                           const HeightFunction& h) {
    return assemble_L0(g, m, h) + assemble_LV(g, m, h);
}

Eigen::MatrixXd assemble_Lchi(const RadialGrid& g, const Model& m,
                              const HeightFunction& h) {
    Eigen::MatrixXd L = assemble_L0(g, m, h);
    L.diagonal().array() += m.s();
    return L;
}

Eigen::MatrixXd assemble_Lchi_l1(const RadialGrid& g, const Model& m,
                                 const HeightFunction& h) {
    const int n = g.size();
    const int d = m.d();
    const int s = m.s();
    const GridGeometry geo = grid_geometry(g, h, d);
    const Eigen::MatrixXd& Do = g.Do();
    const Eigen::MatrixXd Lap1 = g.laplacian_l1(d);
    const Eigen::VectorXd& rho = g.rho();

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    L.block(0, 0, n, n) = -(rho.asDiagonal() * Do);
    L.block(0, 0, n, n).diagonal().array() -= s;
    L.block(0, n, n, n) = geo.c.asDiagonal();
    const Eigen::VectorXd cw = geo.c.array() / geo.w.array();
    L.block(n, 0, n, n) = cw.asDiagonal() * Lap1;
    const Eigen::VectorXd adiag =
        -(s + 1 + (cw.array() * geo.delta_h.array()));
    const Eigen::VectorXd bcoef = -(rho.array() + 2.0 * cw.array() * geo.hp.array());
    L.block(n, n, n, n) = bcoef.asDiagonal() * Do;
    L.block(n, n, n, n).diagonal() += adiag;
    L.diagonal().array() += s;
    return L;
}

Eigen::MatrixXd assemble_D0(const RadialGrid& g, const HeightFunction& h, int d) {
    const int n = g.size();
    const GridGeometry geo = grid_geometry(g, h, d);
    const Eigen::Index nn = n;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * nn, 2 * nn);
    const Eigen::MatrixXd Lap = g.laplacian(d);
    const Eigen::MatrixXd& De = g.De();
    // D0 (f1,f2) = [ f2 ; (1/w) Lap f1 - (dh/w) f2 - (2 h'/w) f2' ].
    D.block(0, n, n, n).setIdentity();
    const Eigen::VectorXd iw = geo.w.cwiseInverse();
    D.block(n, 0, n, n) = iw.asDiagonal() * Lap;
    D.block(n, n, n, n) =
        (-2.0 * geo.hp.array() * iw.array()).matrix().asDiagonal() * De;
    D.block(n, n, n, n).diagonal() -=
        (geo.delta_h.array() * iw.array()).matrix();
    return D;
}

Eigen::MatrixXd assemble_Dspace(const RadialGrid& g, const HeightFunction& h,
                                int d) {
    const int n = g.size();
    const GridGeometry geo = grid_geometry(g, h, d);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    const Eigen::MatrixXd Lap = g.laplacian(d);
    const Eigen::MatrixXd& De = g.De();
    // D_i (f1,f2) = omega_i (p1, p2) with
    //   p1 = f1' - h' f2
    //   p2 = -(h'/w) Lap f1 + (h' dh / w) f2 + ((1 + h'^2)/w) f2'.
    D.block(0, 0, n, n) = De;
    D.block(0, n, n, n) = (-geo.hp).asDiagonal();
    const Eigen::VectorXd iw = geo.w.cwiseInverse();
    D.block(n, 0, n, n) = (-geo.hp.array() * iw.array()).matrix().asDiagonal() * Lap;
    D.block(n, n, n, n) =
        ((1.0 + geo.hp.array().square()) * iw.array()).matrix().asDiagonal() * De;
    D.block(n, n, n, n).diagonal() +=
        (geo.hp.array() * geo.delta_h.array() * iw.array()).matrix();
    return D;
}

BoxCoeffs assemble_box_chi(const RadialGrid& g, const HeightFunction& h, int d) {
    const int n = g.size();
    const GridGeometry geo = grid_geometry(g, h, d);
    const Eigen::VectorXd& rho = g.rho();
    BoxCoeffs box;
    box.c00.resize(n);
    box.cr0.resize(n);
    box.crr.resize(n);
    box.c0.resize(n);
    box.cr.resize(n);
    for (int i = 0; i < n; ++i) {
        const double c = geo.c(i);
        const double w = geo.w(i);
        const double hp = geo.hp(i);
        const double hpp = geo.hpp(i);
        const double r = rho(i);
        const double c2 = c * c;
        box.c00(i) = -w / c2;
        box.cr0(i) = -2.0 * (w * r / c2 + hp / c);
        box.crr(i) = 1.0 - w * r * r / c2 - 2.0 * r * hp / c;
        const double dch = (d - 1) * geo.hp_over_rho(i) + box.crr(i) * hpp;
        box.c0(i) = -w / c2 - dch / c;
        box.cr(i) = box.cr0(i) - r * dch / c;
    }
    return box;
}

Eigen::VectorXd apply_box(const RadialGrid& g, const BoxCoeffs& box, int d,
                          double lambda, const Eigen::VectorXd& f) {
    const int n = g.size();
    const Eigen::VectorXd fp = g.De() * f;
    const Eigen::VectorXd fpp = g.D2e() * f;
    const Eigen::VectorXd fp_rho = g.odd_div_rho() * fp;
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        out(i) = box.c00(i) * lambda * lambda * f(i) +
                 (box.cr0(i) * lambda + box.cr(i)) * fp(i) +
                 box.crr(i) * fpp(i) + (d - 1) * fp_rho(i) +
                 box.c0(i) * lambda * f(i);
    }
    return out;
}

Eigen::VectorXd profile_residual(const RadialGrid& g, const Model& m,
                                 const HeightFunction& h) {
    const int n = g.size();
    const int d = m.d();
    Eigen::VectorXd phi(n);
    for (int i = 0; i < n; ++i) {
        const double rho = g.rho()(i);
        const double t = -h.eval(rho).h;
        phi(i) = blowup_profile(m, t, rho).psi;
    }
    const BoxCoeffs box = assemble_box_chi(g, h, d);
    Eigen::VectorXd res = apply_box(g, box, d, m.s(), phi);
    for (int i = 0; i < n; ++i) {
        res(i) += nonlinearity(m, g.rho()(i), phi(i)).F;
    }
    return res;
}

namespace {

// Extended-precision evaluation of the commutator defect. The defect of the
// discretized identity is dominated by rounding amplified by the products of
// the differentiation matrices (~N^4 eps in double), which would mask the
// spectral truncation behavior; re-assembling the operators in quadruple
// precision pushes that floor far below the truncation level. Only the
// standard and hyperboloidal heights have closed forms evaluated natively in
// quadruple precision.

using Quad = __float128;

struct QMat {
    int r = 0, c = 0;
    std::vector<Quad> a;
    QMat() = default;
    QMat(int rr, int cc) : r(rr), c(cc), a(size_t(rr) * cc, Quad(0)) {}
    Quad& operator()(int i, int j) { return a[size_t(i) * c + j]; }
    Quad operator()(int i, int j) const { return a[size_t(i) * c + j]; }
};

QMat qmul(const QMat& A, const QMat& B) {
    QMat C(A.r, B.c);
    for (int i = 0; i < A.r; ++i)
        for (int k = 0; k < A.c; ++k) {
            const Quad aik = A(i, k);
            if (aik == Quad(0)) continue;
            for (int j = 0; j < B.c; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

struct QHeight {
    Quad h, hp, hpp, c, w;
};

QHeight qheight(const HeightFunction& hf, Quad rho) {
    QHeight e;
    if (hf.kind() == HeightFunction::Kind::Standard) {
        e.h = Quad(-1);
        e.hp = Quad(0);
        e.hpp = Quad(0);
    } else {
        const Quad alpha = Quad(hf.param_alpha());
        const Quad beta = Quad(hf.param_beta());
        const Quad rad = sqrtq(alpha * alpha + rho * rho);
        e.h = rad - alpha - beta;
        e.hp = rho / rad;
        e.hpp = alpha * alpha / (rad * rad * rad);
    }
    e.c = rho * e.hp - e.h;
    e.w = Quad(1) - e.hp * e.hp;
    return e;
}

// Parity-folded Chebyshev differentiation matrices in quadruple precision,
// mirroring the double-precision grid construction.
struct QGrid {
    int N, M, n;
    std::vector<Quad> rho;
    QMat De, Do, D2e, D2o;
};

QGrid qgrid(double R, int N) {
    QGrid q;
    q.N = N;
    q.M = N / 2;
    q.n = q.M + 1;
    const Quad qR = Quad(R);
    std::vector<Quad> x(N + 1);
    for (int j = 0; j <= q.M; ++j)
        x[j] = cosq(Quad(j) * M_PIq / Quad(N));
    x[q.M] = Quad(0);
    for (int j = q.M + 1; j <= N; ++j) x[j] = -x[N - j];
    q.rho.resize(q.n);
    for (int i = 0; i < q.n; ++i) q.rho[i] = qR * x[i];
    QMat D(N + 1, N + 1);
    auto cw = [N](int j) { return (j == 0 || j == N) ? Quad(2) : Quad(1); };
    for (int i = 0; i <= N; ++i) {
        Quad sum = Quad(0);
        for (int j = 0; j <= N; ++j) {
            if (i == j) continue;
            const Quad sgn = ((i + j) % 2 == 0) ? Quad(1) : Quad(-1);
            D(i, j) = (cw(i) / cw(j)) * sgn / (x[i] - x[j]);
            sum += D(i, j);
        }
        D(i, i) = -sum;
    }
    QMat D2 = qmul(D, D);
    for (int i = 0; i <= N; ++i) {
        D2(i, i) = Quad(0);
        Quad sum = Quad(0);
        for (int j = 0; j <= N; ++j) sum += D2(i, j);
        D2(i, i) = -sum;
    }
    q.De = QMat(q.n, q.n);
    q.Do = QMat(q.n, q.n);
    q.D2e = QMat(q.n, q.n);
    q.D2o = QMat(q.n, q.n);
    for (int i = 0; i < q.n; ++i) {
        for (int j = 0; j < q.M; ++j) {
            q.De(i, j) = (D(i, j) + D(i, N - j)) / qR;
            q.Do(i, j) = (D(i, j) - D(i, N - j)) / qR;
            q.D2e(i, j) = (D2(i, j) + D2(i, N - j)) / (qR * qR);
            q.D2o(i, j) = (D2(i, j) - D2(i, N - j)) / (qR * qR);
        }
        q.De(i, q.M) = D(i, q.M) / qR;
        q.D2e(i, q.M) = D2(i, q.M) / (qR * qR);
    }
    return q;
}

struct QOps {
    QMat Lchi, Lchi1, D0, Dsp;
};

QOps qassemble(const QGrid& q, const Model& m, const HeightFunction& hf) {
    const int n = q.n, M = q.M, d = m.d(), s = m.s();
    std::vector<QHeight> e(n);
    std::vector<Quad> hp_over_rho(n), delta_h(n);
    for (int i = 0; i < n; ++i) {
        e[i] = qheight(hf, q.rho[i]);
        if (i == M) {
            hp_over_rho[i] = e[i].hpp;
            delta_h[i] = Quad(d) * e[i].hpp;
        } else {
            hp_over_rho[i] = e[i].hp / q.rho[i];
            delta_h[i] = e[i].hpp + Quad(d - 1) * hp_over_rho[i];
        }
    }
    // Radial Laplacians (even sector and first angular sector).
    QMat Lap(n, n), Lap1(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Lap(i, j) = q.D2e(i, j);
            Lap1(i, j) = q.D2o(i, j);
        }
        if (i == M) {
            for (int j = 0; j < n; ++j) Lap(i, j) += Quad(d - 1) * q.D2e(i, j);
        } else {
            for (int j = 0; j < n; ++j) {
                Lap(i, j) += Quad(d - 1) / q.rho[i] * q.De(i, j);
                Lap1(i, j) += Quad(d - 1) / (q.rho[i] * q.rho[i]) *
                              (q.rho[i] * q.Do(i, j) -
                               ((i == j) ? Quad(1) : Quad(0)));
            }
        }
    }
    QOps ops;
    ops.Lchi = QMat(2 * n, 2 * n);
    ops.Lchi1 = QMat(2 * n, 2 * n);
    ops.D0 = QMat(2 * n, 2 * n);
    ops.Dsp = QMat(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const Quad cw = e[i].c / e[i].w;
        const Quad iw = Quad(1) / e[i].w;
        const Quad adiag = -(Quad(s + 1) + cw * delta_h[i]);
        const Quad bcoef = -(q.rho[i] + Quad(2) * cw * e[i].hp);
        for (int j = 0; j < n; ++j) {
            const Quad id = (i == j) ? Quad(1) : Quad(0);
            // L_chi = L0 + s I on the even sector.
            ops.Lchi(i, j) = -q.rho[i] * q.De(i, j);
            ops.Lchi(i, n + j) = e[i].c * id;
            ops.Lchi(n + i, j) = cw * Lap(i, j);
            ops.Lchi(n + i, n + j) = bcoef * q.De(i, j) + (adiag + Quad(s)) * id;
            // Same blocks on the first angular sector.
            ops.Lchi1(i, j) = -q.rho[i] * q.Do(i, j);
            ops.Lchi1(i, n + j) = e[i].c * id;
            ops.Lchi1(n + i, j) = cw * Lap1(i, j);
            ops.Lchi1(n + i, n + j) = bcoef * q.Do(i, j) + (adiag + Quad(s)) * id;
            // D0.
            ops.D0(i, n + j) = id;
            ops.D0(n + i, j) = iw * Lap(i, j);
            ops.D0(n + i, n + j) =
                -Quad(2) * e[i].hp * iw * q.De(i, j) - delta_h[i] * iw * id;
            // Radial profile of D_i.
            ops.Dsp(i, j) = q.De(i, j);
            ops.Dsp(i, n + j) = -e[i].hp * id;
            ops.Dsp(n + i, j) = -e[i].hp * iw * Lap(i, j);
            ops.Dsp(n + i, n + j) =
                (Quad(1) + e[i].hp * e[i].hp) * iw * q.De(i, j) +
                e[i].hp * delta_h[i] * iw * id;
        }
    }
    return ops;
}

QMat qcommutator(const QMat& D, const QMat& L, const QMat& Ltarget) {
    QMat C = qmul(D, L);
    const QMat LD = qmul(Ltarget, D);
    for (size_t idx = 0; idx < C.a.size(); ++idx)
        C.a[idx] += -LD.a[idx] + D.a[idx];
    return C;
}

}  // namespace

CommutatorReport commutator_defect(const RadialGrid& g, const Model& m,
                                   const HeightFunction& h,
                                   const std::vector<Eigen::VectorXd>& tests) {
    const int n = g.size();
    const int N = g.N();
    CommutatorReport rep;
    if (h.kind() != HeightFunction::Kind::FlattenedCone) {
        const QGrid q = qgrid(g.R(), g.N());
        const QOps ops = qassemble(q, m, h);
        const QMat Ct = qcommutator(ops.D0, ops.Lchi, ops.Lchi);
        const QMat Cs = qcommutator(ops.Dsp, ops.Lchi, ops.Lchi1);
        for (const Eigen::VectorXd& c : tests) {
            if (c.size() != 2 * n) {
                throw std::invalid_argument(
                    "commutator test state has wrong size");
            }
            // Synthesize exact nodal values of the coefficient polynomials.
            std::vector<Quad> u(2 * n, Quad(0));
            Quad sup = Quad(1);
            for (int i = 0; i < n; ++i) {
                for (int mm = 0; mm < n; ++mm) {
                    const Quad t = cosq(Quad(2 * mm * i) * M_PIq / Quad(N));
                    u[i] += Quad(c[mm]) * t;
                    u[n + i] += Quad(c[n + mm]) * t;
                }
                if (fabsq(u[i]) > sup) sup = fabsq(u[i]);
                if (fabsq(u[n + i]) > sup) sup = fabsq(u[n + i]);
            }
            Quad mt = Quad(0), ms = Quad(0);
            for (int i = 0; i < 2 * n; ++i) {
                Quad st = Quad(0), ss = Quad(0);
                for (int j = 0; j < 2 * n; ++j) {
                    st += Ct(i, j) * u[j];
                    ss += Cs(i, j) * u[j];
                }
                if (fabsq(st) > mt) mt = fabsq(st);
                if (fabsq(ss) > ms) ms = fabsq(ss);
            }
            rep.defect_time = std::max(rep.defect_time, double(mt / sup));
            rep.defect_space = std::max(rep.defect_space, double(ms / sup));
        }
        rep.max_defect = std::max(rep.defect_time, rep.defect_space);
        return rep;
    }
    const Eigen::MatrixXd Lchi = assemble_Lchi(g, m, h);
    const Eigen::MatrixXd Lchi1 = assemble_Lchi_l1(g, m, h);
    const Eigen::MatrixXd D0 = assemble_D0(g, h, m.d());
    const Eigen::MatrixXd Dsp = assemble_Dspace(g, h, m.d());
    const Eigen::MatrixXd Ct = D0 * Lchi - Lchi * D0 + D0;
    const Eigen::MatrixXd Cs = Dsp * Lchi - Lchi1 * Dsp + Dsp;
    for (const Eigen::VectorXd& c : tests) {
        if (c.size() != 2 * n) {
            throw std::invalid_argument("commutator test state has wrong size");
        }
        Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n);
        for (int i = 0; i < n; ++i) {
            for (int mm = 0; mm < n; ++mm) {
                const double t = std::cos(2.0 * mm * i * M_PI / N);
                u[i] += c[mm] * t;
                u[n + i] += c[n + mm] * t;
            }
        }
        const double scale = std::max(1.0, u.lpNorm<Eigen::Infinity>());
        rep.defect_time = std::max(
            rep.defect_time, (Ct * u).lpNorm<Eigen::Infinity>() / scale);
        rep.defect_space = std::max(
            rep.defect_space, (Cs * u).lpNorm<Eigen::Infinity>() / scale);
    }
    rep.max_defect = std::max(rep.defect_time, rep.defect_space);
    return rep;
}

DissipativityReport dissipativity_check(const RadialGrid& g, const Model& m,
                                        const HeightFunction& h, int k,
                                        double eps1, int trials,
                                        uint64_t seed) {
    const int n = g.size();
    const int d = m.d();
    const EnergyForm form(g, d, h, k, eps1);
    const Eigen::MatrixXd Lchi = assemble_Lchi(g, m, h);
    std::mt19937_64 rng(seed);
    const int deg = std::max(2, g.N() / 6);
    DissipativityReport rep;
    rep.trials = trials;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const bool subcritical = 2 * k < d + 2;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd u(2 * n);
        u.head(n) = g.random_even(deg, rng);
        u.tail(n) = g.random_even(deg, rng);
        const double nrm2 = form.inner(u, u);
        const double lhs = form.inner(Lchi * u, u);
        double rhs;
        if (subcritical) {
            rhs = (0.5 * d - k) * nrm2 +
                  (-0.5 * d + k + eps1) * (2.0 * form.eps_k() / g.R()) *
                      form.boundary_u1_sq(u);
        } else {
            rhs = eps1 * nrm2;
        }
        const double scale = std::max(1.0, nrm2);
        rep.max_violation = std::max(rep.max_violation, (lhs - rhs) / scale);
        rep.min_margin = std::min(rep.min_margin, (rhs - lhs) / scale);
    }
    return rep;
}

}  // namespace sslab
