#include "sslab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sslab/energy.hpp"
#include "sslab/operators.hpp"

namespace sslab {

ModeOdeCoeffs mode_ode_coeffs(const Model& m, const HeightFunction& h,
                              double rho, double lambda) {
    if (rho <= 0.0) {
        throw std::invalid_argument("mode_ode_coeffs requires rho > 0");
    }
    const int d = m.d();
    const double lam = lambda + m.s();
    const HeightEval e = h.eval(rho);
    const double c2 = e.c * e.c;
    ModeOdeCoeffs out;
    out.a2 = -(rho * rho - e.h * e.h) / c2;
    out.a1 = 2.0 * (0.5 * (d - 3) - lam) * (rho - e.h * e.hp) / c2 +
             ((d - 1) / rho - rho * e.hpp / e.c) * out.a2;
    out.a0 = -lam * (lam + 1.0) * (1.0 - e.hp * e.hp) / c2 -
             lam * (d - 1) * e.hp / (e.c * rho) - lam * e.hpp * out.a2 / e.c;
    out.V = potential(m, h, rho);
    return out;
}

double HypergeomForm::potential(const Model& m, double z) const {
    const int d = m.d();
    if (m.kind() == Model::Kind::WaveMaps) {
        const double den = (d - 4) + z;
        return 8.0 * (d - 3) * (d - 4) / (den * den);
    }
    const double al = m.alpha_c();
    const double be = m.beta_c();
    const double den = al + be * z;
    return 3.0 * (d - 4) * (2.0 * al + (2.0 * be - 1.0) * z) / (den * den);
}

HypergeomForm hypergeometric_form(const Model& m, double lambda) {
    HypergeomForm f;
    const double lam = lambda + m.s();
    f.a = 0.5 * lam;
    f.b = 0.5 * (lam + 1.0);
    f.c = 0.5 * m.d();
    return f;
}

FrobeniusIndices frobenius_indices(const Model& m, double lambda) {
    const HypergeomForm f = hypergeometric_form(m, lambda);
    FrobeniusIndices idx;
    idx.at0_first = 0.0;
    idx.at0_second = 1.0 - f.c;
    idx.at1_first = 0.0;
    idx.at1_second = f.c - f.a - f.b;
    const auto is_integer = [](double x) {
        return std::abs(x - std::round(x)) < 1e-12;
    };
    idx.resonant_at0 = is_integer(idx.at0_first - idx.at0_second);
    idx.resonant_at1 = is_integer(idx.at1_first - idx.at1_second);
    return idx;
}

Eigen::VectorXd mode_transform(const RadialGrid& g, const HeightFunction& h,
                               double lambda, const Eigen::VectorXd& f,
                               const RadialGrid& gbar_grid) {
    const int n = gbar_grid.size();
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        const double rho = gbar_grid.rho()(i);
        const double hplus = -h.eval(rho).h;
        if (hplus <= 0.0) {
            throw std::domain_error("mode_transform: height not negative");
        }
        out(i) = std::pow(hplus, -lambda) * g.interp_even(f, rho / hplus);
    }
    return out;
}

extern "C" void dgeev_(const char* jobvl, const char* jobvr, const int* n,
                       double* a, const int* lda, double* wr, double* wi,
                       double* vl, const int* ldvl, double* vr, const int* ldvr,
                       double* work, const int* lwork, int* info);

namespace {

// LAPACK dgeev wrapper; dgeev balances the matrix internally, which keeps
// eigenvalue roundoff under control for the badly scaled collocation
// operators (norms grow like N^4).
void lapack_eig(const Eigen::MatrixXd& L, Eigen::VectorXd& wr,
                Eigen::VectorXd& wi, Eigen::MatrixXd* vr) {
    const int n = static_cast<int>(L.rows());
    Eigen::MatrixXd a = L;
    wr.resize(n);
    wi.resize(n);
    if (vr != nullptr) {
        vr->resize(n, n);
    }
    const char jobvl = 'N';
    const char jobvr = (vr != nullptr) ? 'V' : 'N';
    int lwork = -1;
    double wk_query = 0.0;
    int info = 0;
    dgeev_(&jobvl, &jobvr, &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n,
           vr ? vr->data() : nullptr, &n, &wk_query, &lwork, &info);
    lwork = static_cast<int>(wk_query);
    std::vector<double> work(static_cast<size_t>(lwork));
    dgeev_(&jobvl, &jobvr, &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n,
           vr ? vr->data() : nullptr, &n, work.data(), &lwork, &info);
    if (info != 0) {
        throw std::runtime_error("dense eigensolver failed to converge");
    }
}

std::vector<std::complex<double>> dense_eigenvalues(const Eigen::MatrixXd& L) {
    Eigen::VectorXd wr, wi;
    lapack_eig(L, wr, wi, nullptr);
    std::vector<std::complex<double>> ev(wr.size());
    for (int j = 0; j < wr.size(); ++j) {
        ev[j] = {wr(j), wi(j)};
    }
    return ev;
}

// Real eigenvector of a real matrix for the eigenvalue nearest target.
Eigen::VectorXd real_eigenvector(const Eigen::MatrixXd& L, double target) {
    Eigen::VectorXd wr, wi;
    Eigen::MatrixXd vrm;
    lapack_eig(L, wr, wi, &vrm);
    int best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (int j = 0; j < wr.size(); ++j) {
        const double dist = std::abs(std::complex<double>(wr(j), wi(j)) -
                                     target);
        if (dist < bestd) {
            bestd = dist;
            best = j;
        }
    }
    // For a complex pair dgeev stores Re/Im in adjacent columns; the
    // eigenvalues near the real target of interest are real, so take the
    // stored column (the real part for a pair).
    Eigen::VectorXd vr = vrm.col(wi(best) == 0.0 || wi(best) > 0.0
                                     ? best
                                     : best - 1);
    // One inverse-iteration step against the computed eigenvalue polishes
    // the eigenvector to near machine precision (the near-singular solve is
    // exactly what inverse iteration wants).
    {
        Eigen::MatrixXd shifted = L;
        shifted.diagonal().array() -= wr(best);
        Eigen::VectorXd w = shifted.partialPivLu().solve(vr);
        if (w.allFinite() && w.norm() > 0.0) {
            vr = w / w.norm();
        }
    }
    // Orient so the largest-magnitude entry is positive.
    int imax = 0;
    vr.cwiseAbs().maxCoeff(&imax);
    if (vr(imax) < 0.0) {
        vr = -vr;
    }
    vr /= vr.norm();
    return vr;
}

}  // namespace

SpectrumReport solve_spectrum(const Model& m, const HeightFunction& h, double R,
                              int N, int N_check, double match_tol,
                              double realpart_window) {
    const RadialGrid g(R, N);
    const RadialGrid gc(R, N_check);
    const Eigen::MatrixXd L = assemble_L(g, m, h);
    const Eigen::MatrixXd Lc = assemble_L(gc, m, h);

    SpectrumReport rep;
    rep.all_eigenvalues = dense_eigenvalues(L);
    const std::vector<std::complex<double>> evc = dense_eigenvalues(Lc);

    for (const auto& lam : rep.all_eigenvalues) {
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& mu : evc) {
            dist = std::min(dist, std::abs(lam - mu));
        }
        if (dist <= match_tol * std::max(1.0, std::abs(lam))) {
            rep.trusted.push_back(lam);
        }
    }

    double bestd = std::numeric_limits<double>::infinity();
    for (const auto& lam : rep.trusted) {
        const double dist = std::abs(lam - 1.0);
        if (dist < bestd) {
            bestd = dist;
            rep.lambda_sym = lam;
        }
    }
    rep.symmetry_found = !rep.trusted.empty() && bestd <= 1e-6;

    double max_re_rest = -std::numeric_limits<double>::infinity();
    for (const auto& lam : rep.trusted) {
        const bool is_sym = std::abs(lam - rep.lambda_sym) <= 1e-6;
        if (is_sym) {
            continue;
        }
        max_re_rest = std::max(max_re_rest, lam.real());
        if (lam.real() > realpart_window) {
            ++rep.unstable_count;
        }
        if (std::abs(lam - rep.lambda_sym) <= 0.2) {
            rep.symmetry_simple = false;
        }
    }
    rep.omega_gap = -max_re_rest;

    rep.right_sym = real_eigenvector(L, 1.0);
    rep.left_sym = real_eigenvector(L.transpose(), 1.0);
    const double pairing = rep.left_sym.dot(rep.right_sym);
    rep.projector = (rep.right_sym * rep.left_sym.transpose()) / pairing;
    // The projector has condition ~kappa(lambda)^2 in this residual, so the
    // matrix product is accumulated in extended precision to keep the
    // reported defect a measure of the projector, not of double rounding.
    {
        const Eigen::Index np = rep.projector.rows();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < np; ++i) {
            for (Eigen::Index j = 0; j < np; ++j) {
                long double acc = -static_cast<long double>(rep.projector(i, j));
                for (Eigen::Index l = 0; l < np; ++l) {
                    acc += static_cast<long double>(rep.projector(i, l)) *
                           static_cast<long double>(rep.projector(l, j));
                }
                worst = std::max(worst, static_cast<double>(fabsl(acc)));
            }
        }
        rep.projector_idempotency = worst;
    }
    return rep;
}

double verify_symmetry_eigenpair(const RadialGrid& g, const Model& m,
                                 const HeightFunction& h, int k, double eps1) {
    const int n = g.size();
    Eigen::VectorXd u(2 * n);
    for (int i = 0; i < n; ++i) {
        const SymmetryModeEval e = symmetry_mode(m, h, g.rho()(i));
        u(i) = e.f1;
        u(n + i) = e.second;
    }
    const Eigen::MatrixXd L = assemble_L(g, m, h);
    Eigen::VectorXd r = L * u - u;
    const EnergyForm form(g, m.d(), h, k, eps1);
    return form.norm(r) / form.norm(u);
}

}  // namespace sslab
