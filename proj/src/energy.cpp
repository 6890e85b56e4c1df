#include "sslab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace sslab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// One symbolic term n(rho) * rho^{-q} * xi^alpha, with the numerator values
// linear in the stacked input state: num is (M+1) x 2(M+1).
struct Term {
    MatrixXd num;
    int q = 0;
    std::vector<int> alpha;  // sorted multiset of abstract spatial labels
};

using TermList = std::vector<Term>;

struct State {
    TermList c1, c2;
};

int multiplicity(const std::vector<int>& alpha, int label) {
    return int(std::count(alpha.begin(), alpha.end(), label));
}

std::vector<int> plus_e(std::vector<int> alpha, int label) {
    alpha.insert(std::upper_bound(alpha.begin(), alpha.end(), label), label);
    return alpha;
}

std::vector<int> minus_e(std::vector<int> alpha, int label) {
    auto it = std::find(alpha.begin(), alpha.end(), label);
    alpha.erase(it);
    return alpha;
}

void merge_terms(TermList& list) {
    std::map<std::pair<int, std::vector<int>>, size_t> seen;
    TermList out;
    for (auto& t : list) {
        auto key = std::make_pair(t.q, t.alpha);
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(key, out.size());
            out.push_back(std::move(t));
        } else {
            out[it->second].num += t.num;
        }
    }
    list = std::move(out);
}

// Builder holding the geometric data on the grid.
//
// Volume integrals are evaluated on an auxiliary Gauss-Legendre grid in
// (0, R): term numerators are polynomials on the collocation grid, their
// pairwise products exceed the collocation degree, and inverse powers of rho
// are singular at the origin node. Interpolating the numerators to interior
// Gauss nodes makes every pairwise product a polynomial integrated exactly,
// and every per-node contribution a positively weighted square, so the
// assembled Gram is positive semidefinite by construction.
class GramBuilder {
  public:
    GramBuilder(const RadialGrid& g, int d, const HeightFunction& h, int k,
                double eps1)
        : g_(g), d_(d), k_(k), eps1_(eps1), M_(g.M()), n_(g.M() + 1) {
        const VectorXd& rho = g.rho();
        hp_over_rho_.resize(n_);
        w_.resize(n_);
        delta_h_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            HeightEval e = h.eval(rho[i]);
            const double hpr = (i == M_) ? h.eval(0.0).hpp : e.hp / rho[i];
            hp_over_rho_[i] = hpr;
            w_[i] = e.w;
            delta_h_[i] = e.hpp + (d - 1) * hpr;
        }
        rde_ = rho.asDiagonal() * g.De();
        sphere_ = RadialGrid::sphere_area(d);
        eps_.assign(k + 1, 0.0);
        eps_[1] = eps1;
        for (int kk = 2; kk <= k; ++kk) {
            if (2 * kk < d + 2)
                eps_[kk] = eps_[kk - 1] * (0.5 * d - (kk - 1) - eps1) * eps1 /
                           (g.R() * g.R());
            else
                eps_[kk] = 0.0;
        }
        build_fine_grid(h);
        gram_ = MatrixXd::Zero(2 * n_, 2 * n_);
    }

    MatrixXd build() {
        State top;
        Term t1;
        t1.num.resize(n_, 2 * n_);
        t1.num << MatrixXd::Identity(n_, n_), MatrixXd::Zero(n_, n_);
        top.c1.push_back(std::move(t1));
        Term t2;
        t2.num.resize(n_, 2 * n_);
        t2.num << MatrixXd::Zero(n_, n_), MatrixXd::Identity(n_, n_);
        top.c2.push_back(std::move(t2));
        recurse(top, k_, 1.0, 0);
        return 0.5 * (gram_ + gram_.transpose());
    }

    double eps_top() const { return (2 * k_ < d_ + 2 || k_ == 1) ? eps_[k_] : 0.0; }

  private:
    const RadialGrid& g_;
    int d_, k_;
    double eps1_;
    int M_, n_;
    VectorXd hp_over_rho_, w_, delta_h_;
    MatrixXd rde_;  // diag(rho) * De
    double sphere_;
    std::vector<double> eps_;
    MatrixXd gram_;
    int nf_ = 0;             // number of Gauss-Legendre nodes
    VectorXd yf_, wgl_;      // Gauss nodes in (0, R) and their weights
    VectorXd wfine_;         // 1 - h'(y)^2 at the Gauss nodes
    MatrixXd eval_fine_;     // even interpolation: grid values -> Gauss nodes
    mutable std::map<int, VectorXd> pow_cache_;  // wgl * y^P per power P

    // Gauss-Legendre rule on (0, R) by Golub-Welsch, sized so that products
    // of two grid polynomials times every radial power that appears are
    // integrated exactly.
    void build_fine_grid(const HeightFunction& h) {
        nf_ = g_.N() + (d_ + 2 * k_) / 2 + 6;
        VectorXd diag = VectorXd::Zero(nf_), sub(nf_ - 1);
        for (int j = 1; j < nf_; ++j)
            sub[j - 1] = j / std::sqrt(4.0 * j * j - 1.0);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es;
        es.computeFromTridiagonal(diag, sub);
        yf_.resize(nf_);
        wgl_.resize(nf_);
        wfine_.resize(nf_);
        const double R = g_.R();
        for (int j = 0; j < nf_; ++j) {
            yf_[j] = 0.5 * R * (es.eigenvalues()[j] + 1.0);
            const double v0 = es.eigenvectors()(0, j);
            wgl_[j] = R * v0 * v0;
            wfine_[j] = h.eval(yf_[j]).w;
        }
        eval_fine_.resize(nf_, n_);
        VectorXd unit = VectorXd::Zero(n_);
        for (int i = 0; i < n_; ++i) {
            unit[i] = 1.0;
            for (int j = 0; j < nf_; ++j)
                eval_fine_(j, i) = g_.interp_even(unit, yf_[j]);
            unit[i] = 0.0;
        }
    }

    // wgl_j * yf_j^P; the Gauss nodes are interior, so negative powers are
    // finite pointwise (and exact: numerators carry matching rho factors).
    const VectorXd& fine_pow(int P) const {
        auto it = pow_cache_.find(P);
        if (it != pow_cache_.end()) return it->second;
        VectorXd v(nf_);
        for (int j = 0; j < nf_; ++j)
            v[j] = wgl_[j] * std::pow(yf_[j], P);
        return pow_cache_.emplace(P, std::move(v)).first->second;
    }

    // A = rho n' - q n.
    MatrixXd amat(const Term& t) const { return rde_ * t.num - double(t.q) * t.num; }

    // Laplacian of a term: [rho A' + (d-2+2|alpha|-q) A] rho^{-q-2} xi^alpha
    //                      + sum_l alpha_l (alpha_l - 1) n rho^{-q} xi^{alpha-2e_l}.
    void laplace_into(const Term& t, const VectorXd& scale, int extra_label,
                      TermList& out) const {
        MatrixXd A = amat(t);
        Term lead;
        lead.num = scale.asDiagonal() * (rde_ * A + double(d_ - 2 + 2 * int(t.alpha.size()) - t.q) * A);
        lead.q = t.q + 2;
        lead.alpha = (extra_label >= 0) ? plus_e(t.alpha, extra_label) : t.alpha;
        out.push_back(std::move(lead));
        std::set<int> labels(t.alpha.begin(), t.alpha.end());
        for (int l : labels) {
            int m = multiplicity(t.alpha, l);
            if (m >= 2) {
                Term sub;
                sub.num = double(m * (m - 1)) * (scale.asDiagonal() * t.num);
                sub.q = t.q;
                sub.alpha = minus_e(minus_e(t.alpha, l), l);
                if (extra_label >= 0) sub.alpha = plus_e(sub.alpha, extra_label);
                out.push_back(std::move(sub));
            }
        }
    }

    // The contraction 2 (hp/rho/w) (rho n' + (|beta|-q) n) rho^{-q} xi^{beta (+e_i)}
    // implementing -2 (c_mu/w) grad h . grad F2 for c_0 = 1 / c_i = -d_i h.
    Term grad_h_contraction(const Term& t, const VectorXd& scale, int extra_label) const {
        Term out;
        out.num = scale.asDiagonal() *
                  (rde_ * t.num + double(int(t.alpha.size()) - t.q) * t.num);
        out.q = t.q;
        out.alpha = (extra_label >= 0) ? plus_e(t.alpha, extra_label) : t.alpha;
        return out;
    }

    // Partial derivative terms of t with respect to x_label.
    void partial_into(const Term& t, int label, TermList& out) const {
        Term lead;
        lead.num = amat(t);
        lead.q = t.q + 2;
        lead.alpha = plus_e(t.alpha, label);
        out.push_back(std::move(lead));
        int m = multiplicity(t.alpha, label);
        if (m > 0) {
            Term sub;
            sub.num = double(m) * t.num;
            sub.q = t.q;
            sub.alpha = minus_e(t.alpha, label);
            out.push_back(std::move(sub));
        }
    }

    State apply_D0(const State& F) const {
        State out;
        VectorXd inv_w = w_.cwiseInverse();
        for (const Term& t : F.c2) out.c1.push_back(t);  // c_0 F2
        for (const Term& t : F.c1) laplace_into(t, inv_w, -1, out.c2);
        for (const Term& t : F.c2) {
            Term dh;
            dh.num = (-(delta_h_.cwiseProduct(inv_w))).asDiagonal() * t.num;
            dh.q = t.q;
            dh.alpha = t.alpha;
            out.c2.push_back(std::move(dh));
            out.c2.push_back(grad_h_contraction(
                t, (-2.0) * hp_over_rho_.cwiseProduct(inv_w), -1));
        }
        merge_terms(out.c1);
        merge_terms(out.c2);
        return out;
    }

    State apply_Di(const State& F, int label) const {
        State out;
        VectorXd inv_w = w_.cwiseInverse();
        VectorXd hpr_w = hp_over_rho_.cwiseProduct(inv_w);
        for (const Term& t : F.c1) partial_into(t, label, out.c1);
        for (const Term& t : F.c2) {
            Term ci;  // c_i F2 = -(hp/rho) xi_i F2
            ci.num = (-hp_over_rho_).asDiagonal() * t.num;
            ci.q = t.q;
            ci.alpha = plus_e(t.alpha, label);
            out.c1.push_back(std::move(ci));
        }
        for (const Term& t : F.c1) laplace_into(t, -hpr_w, label, out.c2);
        for (const Term& t : F.c2) {
            Term dh;
            dh.num = (hpr_w.cwiseProduct(delta_h_)).asDiagonal() * t.num;
            dh.q = t.q;
            dh.alpha = plus_e(t.alpha, label);
            out.c2.push_back(std::move(dh));
            partial_into(t, label, out.c2);
            out.c2.push_back(grad_h_contraction(
                t, 2.0 * hp_over_rho_.cwiseProduct(hpr_w), label));
        }
        merge_terms(out.c1);
        merge_terms(out.c2);
        return out;
    }

    // Angular average of xi^gamma over the unit sphere (normalized by |S|):
    // prod (gamma_i - 1)!! / prod_{m=0}^{Q-1} (d + 2m), zero for odd counts.
    double angular_moment(const std::vector<int>& gamma) const {
        if (gamma.empty()) return 1.0;
        std::map<int, int> counts;
        for (int l : gamma) counts[l]++;
        double num = 1.0;
        int total = 0;
        for (auto& [l, c] : counts) {
            (void)l;
            if (c % 2 != 0) return 0.0;
            for (int v = c - 1; v >= 1; v -= 2) num *= v;
            total += c;
        }
        double den = 1.0;
        for (int m = 0; m < total / 2; ++m) den *= (d_ + 2 * m);
        return num / den;
    }

    // Gram += sum over Gauss nodes of V_j^T C_j V_j, where V_j stacks the
    // numerator rows interpolated to Gauss node j.
    void accumulate_rows(const std::vector<const MatrixXd*>& rows,
                         const std::vector<MatrixXd>& C) {
        const int nr = int(rows.size());
        std::vector<MatrixXd> fine(nr);
        for (int r = 0; r < nr; ++r) fine[r] = eval_fine_ * (*rows[r]);
        MatrixXd V(nr, 2 * n_);
        for (int j = 0; j < nf_; ++j) {
            for (int r = 0; r < nr; ++r) V.row(r) = fine[r].row(j);
            gram_.noalias() += V.transpose() * C[j] * V;
        }
    }

    // int_B grad A1 . grad B1 for the component-1 list (against itself).
    void gradient_piece(const TermList& list, double coef) {
        const int nt = int(list.size());
        if (nt == 0) return;
        std::vector<MatrixXd> derived(nt);
        std::vector<const MatrixXd*> rows(2 * nt);
        for (int t = 0; t < nt; ++t) {
            derived[t] = amat(list[t]);
            rows[2 * t] = &list[t].num;
            rows[2 * t + 1] = &derived[t];
        }
        std::vector<MatrixXd> C(nf_, MatrixXd::Zero(2 * nt, 2 * nt));
        for (int s = 0; s < nt; ++s) {
            for (int t = 0; t < nt; ++t) {
                const auto& a = list[s].alpha;
                const auto& b = list[t].alpha;
                std::vector<int> gamma(a);
                gamma.insert(gamma.end(), b.begin(), b.end());
                std::sort(gamma.begin(), gamma.end());
                const int qa = list[s].q, qb = list[t].q;
                const int sz = int(gamma.size());
                const double mu = angular_moment(gamma);
                if (mu != 0.0) {
                    // A1 x B1 with an extra rho^2
                    add_weight(C, 2 * s + 1, 2 * t + 1, coef * mu,
                               d_ - 1 + sz + 2 - qa - qb - 4);
                    // A1 x b * |beta| and a x B1 * |alpha|
                    if (!b.empty())
                        add_weight(C, 2 * s + 1, 2 * t, coef * mu * double(b.size()),
                                   d_ - 1 + sz - qa - 2 - qb);
                    if (!a.empty())
                        add_weight(C, 2 * s, 2 * t + 1, coef * mu * double(a.size()),
                                   d_ - 1 + sz - qa - qb - 2);
                }
                // a x b * sum_l alpha_l beta_l mu(gamma - 2 e_l)
                std::set<int> labels(a.begin(), a.end());
                double msum = 0.0;
                for (int l : labels) {
                    const int bl = multiplicity(b, l);
                    if (bl == 0) continue;
                    std::vector<int> g2 = minus_e(minus_e(gamma, l), l);
                    msum += double(multiplicity(a, l) * bl) * angular_moment(g2);
                }
                if (msum != 0.0)
                    add_weight(C, 2 * s, 2 * t, coef * msum,
                               d_ - 1 + sz - 2 - qa - qb);
            }
        }
        accumulate_rows(rows, C);
    }

    // int_B A2 B2 w for the component-2 list (against itself).
    void product_piece(const TermList& list, double coef) {
        const int nt = int(list.size());
        if (nt == 0) return;
        std::vector<const MatrixXd*> rows(nt);
        for (int t = 0; t < nt; ++t) rows[t] = &list[t].num;
        std::vector<MatrixXd> C(nf_, MatrixXd::Zero(nt, nt));
        for (int s = 0; s < nt; ++s) {
            for (int t = 0; t < nt; ++t) {
                std::vector<int> gamma(list[s].alpha);
                gamma.insert(gamma.end(), list[t].alpha.begin(), list[t].alpha.end());
                std::sort(gamma.begin(), gamma.end());
                const double mu = angular_moment(gamma);
                if (mu == 0.0) continue;
                const int P = d_ - 1 + int(gamma.size()) - list[s].q - list[t].q;
                const VectorXd& w = fine_pow(P);
                for (int j = 0; j < nf_; ++j)
                    C[j](s, t) += coef * mu * w[j] * wfine_[j];
            }
        }
        accumulate_rows(rows, C);
    }

    void add_weight(std::vector<MatrixXd>& C, int r, int c, double scalar, int P) {
        const VectorXd& w = fine_pow(P);
        for (int j = 0; j < nf_; ++j) C[j](r, c) += scalar * w[j];
    }

    // Boundary integral of the component-1 list against itself.
    void boundary_piece(const TermList& list, double coef) {
        for (const Term& s : list) {
            for (const Term& t : list) {
                std::vector<int> gamma(s.alpha);
                gamma.insert(gamma.end(), t.alpha.begin(), t.alpha.end());
                std::sort(gamma.begin(), gamma.end());
                const double mu = angular_moment(gamma);
                if (mu == 0.0) continue;
                const double fac =
                    coef * mu *
                    std::pow(g_.R(), d_ - 1 + int(gamma.size()) - s.q - t.q);
                gram_.noalias() += fac * s.num.row(0).transpose() * t.num.row(0);
            }
        }
    }

    std::set<int> used_labels(const State& F) const {
        std::set<int> out;
        for (const Term& t : F.c1) out.insert(t.alpha.begin(), t.alpha.end());
        for (const Term& t : F.c2) out.insert(t.alpha.begin(), t.alpha.end());
        return out;
    }

    void recurse(const State& F, int level, double coef, int fresh_label) {
        const double total = coef * sphere_;
        if (level == 1) {
            gradient_piece(F.c1, total);
            product_piece(F.c2, total);
            boundary_piece(F.c1, total * 2.0 * eps_[1] / g_.R());
            return;
        }
        if (2 * level < d_ + 2)
            boundary_piece(F.c1, coef * sphere_ * 2.0 * eps_[level] / g_.R());
        else
            recurse(F, level - 1, coef, fresh_label);
        recurse(apply_D0(F), level - 1, coef, fresh_label);
        std::set<int> used = used_labels(F);
        for (int l : used) recurse(apply_Di(F, l), level - 1, coef, fresh_label);
        const int fresh = fresh_label + 1;
        recurse(apply_Di(F, fresh), level - 1, coef * double(d_ - int(used.size())),
                fresh);
    }
};

}  // namespace

EnergyForm::EnergyForm(const RadialGrid& g, int d, const HeightFunction& h, int k,
                       double eps1)
    : d_(d), k_(k), eps1_(eps1), R_(g.R()) {
    if (k < 1) throw std::domain_error("energy: k >= 1 required");
    if (!(eps1 > 0.0 && eps1 <= 0.5))
        throw std::domain_error("energy: eps1 must lie in (0, 1/2]");
    GramBuilder builder(g, d, h, k, eps1);
    gram_ = builder.build();
    epsk_ = builder.eps_top();
    sphere_ = RadialGrid::sphere_area(d);
    boundary_factor_ = sphere_ * std::pow(R_, d - 1);
    n_ = g.size();
    degenerate_top_ = (k >= 2 && 2 * k < d + 2 && epsk_ == 0.0);
}

double EnergyForm::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    if (!degenerate_top_) return u.dot(gram_ * v);
    Eigen::VectorXd ud = u, vd = v;
    ud.head(n_).array() -= u.head(n_).mean();
    vd.head(n_).array() -= v.head(n_).mean();
    return ud.dot(gram_ * vd);
}

double EnergyForm::norm(const Eigen::VectorXd& u) const {
    return std::sqrt(std::max(0.0, inner(u, u)));
}

double EnergyForm::boundary_u1_sq(const Eigen::VectorXd& u) const {
    const double f1R = u[0];
    return boundary_factor_ * f1R * f1R;
}

}  // namespace sslab
