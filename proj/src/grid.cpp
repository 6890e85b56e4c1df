#include "sslab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sslab {

namespace {

// Gauss-Legendre nodes/weights on [a, b] by Golub-Welsch.
void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes,
                    Eigen::VectorXd& weights) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double off = k / std::sqrt(4.0 * k * k - 1.0);
        J(k - 1, k) = off;
        J(k, k - 1) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(n);
    weights.resize(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int k = 0; k < n; ++k) {
        nodes[k] = mid + half * es.eigenvalues()[k];
        const double v = es.eigenvectors()(0, k);
        weights[k] = 2.0 * v * v * half;
    }
}

}  // namespace

RadialGrid::RadialGrid(double R, int N) : R_(R), N_(N), M_(N / 2) {
    if (!(R > 0.0)) throw std::domain_error("grid: R must be positive");
    if (N < 8 || N % 2 != 0)
        throw std::domain_error("grid: N must be even and at least 8");

    // Full grid nodes, exactly antisymmetric about the origin.
    xfull_.resize(N_ + 1);
    for (int j = 0; j <= M_; ++j) xfull_[j] = std::cos(j * M_PI / N_);
    xfull_[M_] = 0.0;
    for (int j = M_ + 1; j <= N_; ++j) xfull_[j] = -xfull_[N_ - j];

    rho_ = R_ * xfull_.head(M_ + 1);
    min_spacing_ = rho_[0] - rho_[1];

    bary_.resize(N_ + 1);
    for (int j = 0; j <= N_; ++j)
        bary_[j] = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == N_) ? 0.5 : 1.0);

    // Spectral differentiation matrix with the negative-sum trick on the
    // diagonal, scaled to d/drho.
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N_ + 1, N_ + 1);
    auto cw = [this](int j) { return (j == 0 || j == N_) ? 2.0 : 1.0; };
    for (int i = 0; i <= N_; ++i)
        for (int j = 0; j <= N_; ++j)
            if (i != j)
                D(i, j) = (cw(i) / cw(j)) * (((i + j) % 2 == 0) ? 1.0 : -1.0) /
                          (xfull_[i] - xfull_[j]);
    for (int i = 0; i <= N_; ++i) D(i, i) = -D.row(i).sum();
    Eigen::MatrixXd D2 = D * D;
    for (int i = 0; i <= N_; ++i) {
        D2(i, i) = 0.0;
        D2(i, i) = -D2.row(i).sum();
    }
    D /= R_;
    D2 /= R_ * R_;

    // Parity folding onto the half grid.
    De_.resize(M_ + 1, M_ + 1);
    Do_.resize(M_ + 1, M_ + 1);
    D2e_.resize(M_ + 1, M_ + 1);
    D2o_.resize(M_ + 1, M_ + 1);
    for (int i = 0; i <= M_; ++i) {
        for (int j = 0; j < M_; ++j) {
            De_(i, j) = D(i, j) + D(i, N_ - j);
            Do_(i, j) = D(i, j) - D(i, N_ - j);
            D2e_(i, j) = D2(i, j) + D2(i, N_ - j);
            D2o_(i, j) = D2(i, j) - D2(i, N_ - j);
        }
        De_(i, M_) = D(i, M_);
        Do_(i, M_) = 0.0;  // odd functions vanish at the origin
        D2e_(i, M_) = D2(i, M_);
        D2o_(i, M_) = 0.0;
    }

    reduce_.resize(M_ + 1, M_ + 1);
    reduce_.setZero();
    for (int i = 0; i < M_; ++i) reduce_(i, i) = 1.0 / (rho_[i] * rho_[i]);
    reduce_.row(M_) = 0.5 * D2e_.row(M_);
}

Eigen::MatrixXd RadialGrid::laplacian(int d) const {
    Eigen::MatrixXd L = D2e_;
    for (int i = 0; i < M_; ++i) L.row(i) += (d - 1) / rho_[i] * De_.row(i);
    L.row(M_) += (d - 1) * D2e_.row(M_);  // f'/rho -> f''(0) at the origin
    return L;
}

Eigen::MatrixXd RadialGrid::laplacian_l1(int d) const {
    // p'' + (d-1) (rho p' - p)/rho^2; the parenthesis vanishes cubically at 0.
    Eigen::MatrixXd L = D2o_;
    Eigen::MatrixXd G = rho_.asDiagonal() * Do_ -
                        Eigen::MatrixXd::Identity(M_ + 1, M_ + 1);
    for (int i = 0; i < M_; ++i) L.row(i) += (d - 1) / (rho_[i] * rho_[i]) * G.row(i);
    // Origin row: the combination tends to 0 for odd p; leave as D2o (zero row).
    return L;
}

Eigen::MatrixXd RadialGrid::odd_div_rho() const {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M_ + 1, M_ + 1);
    for (int i = 0; i < M_; ++i) P(i, i) = 1.0 / rho_[i];
    P.row(M_) = Do_.row(M_);  // limit p'(0)
    return P;
}

Eigen::VectorXd RadialGrid::cardinal_weights(int p) const {
    // Moment matching in the even Chebyshev basis: solve B w = m with
    // B(k, i) = T_{2k}(x_i) (a well-conditioned cosine collocation matrix)
    // and m_k = int_0^R T_{2k}(rho / R) rho^p drho by Gauss-Legendre. This
    // avoids evaluating cardinal functions near their poles.
    const int ngl = M_ + p / 2 + 6;
    Eigen::VectorXd t, om;
    gauss_legendre(ngl, 0.0, R_, t, om);
    Eigen::MatrixXd B(M_ + 1, M_ + 1);
    for (int k = 0; k <= M_; ++k)
        for (int i = 0; i <= M_; ++i)
            B(k, i) = std::cos(2.0 * k * i * M_PI / N_);
    Eigen::VectorXd m(M_ + 1);
    for (int k = 0; k <= M_; ++k) {
        double s = 0.0;
        for (int j = 0; j < ngl; ++j)
            s += om[j] * std::cos(2.0 * k * std::acos(t[j] / R_)) *
                 std::pow(t[j], p);
        m[k] = s;
    }
    return B.colPivHouseholderQr().solve(m);
}

const Eigen::VectorXd& RadialGrid::quad_weights(int p) const {
    auto it = quad_cache_.find(p);
    if (it != quad_cache_.end()) return it->second;
    Eigen::VectorXd w;
    if (p >= 0) {
        w = cardinal_weights(p);
    } else {
        if (p % 2 != 0)
            throw std::domain_error("quad_weights: negative powers must be even");
        w = quad_weights(0);
        for (int r = 0; r < -p / 2; ++r) w = reduce_.transpose() * w;
    }
    return quad_cache_.emplace(p, std::move(w)).first->second;
}

double RadialGrid::sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

double RadialGrid::ball_integral(const Eigen::VectorXd& f, int d) const {
    return sphere_area(d) * quad_weights(d - 1).dot(f);
}

double RadialGrid::interp_even(const Eigen::VectorXd& f, double rho) const {
    const double x = rho / R_;
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= N_; ++j) {
        const double diff = x - xfull_[j];
        const double fj = f[(j <= M_) ? j : (N_ - j)];
        if (std::abs(diff) < 1e-14) return fj;
        const double t = bary_[j] / diff;
        num += t * fj;
        den += t;
    }
    return num / den;
}

Eigen::VectorXd RadialGrid::random_even(int deg, std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(M_ + 1);
    double envelope = 1.0;
    for (int m = 0; m <= deg; ++m) {
        const double a = envelope * gauss(rng);
        for (int i = 0; i <= M_; ++i)
            f[i] += a * std::cos(2.0 * m * i * M_PI / N_);
        envelope *= 0.6;
    }
    return f;
}

double sobolev_norm(const RadialGrid& g, int d, const Eigen::VectorXd& f, int k) {
    if (k < 0) throw std::domain_error("sobolev_norm: k must be nonnegative");
    if (k > g.N() / 2)
        throw std::domain_error("sobolev_norm: k too large for the resolution");
    double sq = 0.0;
    Eigen::VectorXd cur = f;
    bool even = true;
    for (int j = 0; j <= k; ++j) {
        sq += g.ball_integral(cur.cwiseProduct(cur), d);
        if (j < k) {
            cur = even ? (g.De() * cur).eval() : (g.Do() * cur).eval();
            even = !even;
        }
    }
    return std::sqrt(sq);
}

}  // namespace sslab
