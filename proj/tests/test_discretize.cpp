#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sslab/grid.hpp"

using namespace sslab;

TEST_CASE("grid nodes and layout") {
    const RadialGrid g(2.0, 16);
    CHECK(g.size() == 9);
    CHECK(g.rho()(0) == 2.0);
    CHECK(g.rho()(g.M()) == 0.0);
    for (int i = 1; i <= g.M(); ++i) {
        CHECK(g.rho()(i) < g.rho()(i - 1));
        CHECK(g.rho()(i) ==
              doctest::Approx(2.0 * std::cos(i * M_PI / 16.0)).epsilon(1e-15));
    }
    CHECK(g.min_spacing() > 0.0);
}

TEST_CASE("derivatives are exact on grid polynomials") {
    const RadialGrid g(1.5, 20);
    const int n = g.size();
    Eigen::VectorXd f2(n), f4(n), odd3(n);
    for (int i = 0; i < n; ++i) {
        const double r = g.rho()(i);
        f2(i) = r * r;
        f4(i) = r * r * r * r;
        odd3(i) = r * r * r;
    }
    const Eigen::VectorXd d2 = g.De() * f2;     // 2 rho (odd)
    const Eigen::VectorXd d4 = g.De() * f4;     // 4 rho^3
    const Eigen::VectorXd dd4 = g.D2e() * f4;   // 12 rho^2
    const Eigen::VectorXd d3 = g.Do() * odd3;   // 3 rho^2 (even)
    for (int i = 0; i < n; ++i) {
        const double r = g.rho()(i);
        CHECK(d2(i) == doctest::Approx(2.0 * r).epsilon(1e-11));
        CHECK(d4(i) == doctest::Approx(4.0 * r * r * r).epsilon(1e-11));
        CHECK(dd4(i) == doctest::Approx(12.0 * r * r).epsilon(1e-10));
        CHECK(d3(i) == doctest::Approx(3.0 * r * r).epsilon(1e-11));
    }
}

TEST_CASE("radial laplacian with the origin limit") {
    for (int d : {5, 7, 9}) {
        const RadialGrid g(1.0, 16);
        const int n = g.size();
        Eigen::VectorXd f2(n);
        for (int i = 0; i < n; ++i) f2(i) = g.rho()(i) * g.rho()(i);
        const Eigen::VectorXd lap = g.laplacian(d) * f2;
        for (int i = 0; i < n; ++i) {
            CHECK(lap(i) == doctest::Approx(2.0 * d).epsilon(1e-10));
        }
    }
}

TEST_CASE("first angular sector laplacian annihilates rho") {
    // p(rho) = rho solves p'' + (d-1)p'/rho - (d-1)p/rho^2 = 0.
    const RadialGrid g(1.0, 16);
    const int n = g.size();
    Eigen::VectorXd p = g.rho();
    const Eigen::VectorXd lp = g.laplacian_l1(7) * p;
    CHECK(lp.lpNorm<Eigen::Infinity>() < 1e-10);
    // p = rho^3 at d=7: p'' + 6 p'/rho - 6 p/rho^2 = 6rho + 18rho - 6rho.
    Eigen::VectorXd p3(n);
    for (int i = 0; i < n; ++i) p3(i) = std::pow(g.rho()(i), 3);
    const Eigen::VectorXd lp3 = g.laplacian_l1(7) * p3;
    for (int i = 0; i < n; ++i) {
        CHECK(lp3(i) == doctest::Approx(18.0 * g.rho()(i)).epsilon(1e-9));
    }
}

TEST_CASE("quadrature weights integrate monomials exactly") {
    // sum w^(p)_i f_i = int_0^R f rho^p drho for even grid polynomials f.
    for (int N : {16, 24, 32, 48}) {
        const RadialGrid g(1.3, N);
        const int n = g.size();
        for (int p : {0, 2, 4, 6, 8}) {
            const Eigen::VectorXd& w = g.quad_weights(p);
            for (int q = 0; q <= 6; q += 2) {
                Eigen::VectorXd f(n);
                for (int i = 0; i < n; ++i) f(i) = std::pow(g.rho()(i), q);
                const double exact =
                    std::pow(1.3, p + q + 1) / double(p + q + 1);
                CHECK(w.dot(f) == doctest::Approx(exact).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("ball integral reproduces the unit 5-ball volume") {
    const RadialGrid g(1.0, 24);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(g.size());
    CHECK(g.ball_integral(one, 5) ==
          doctest::Approx(8.0 * M_PI * M_PI / 15.0).epsilon(1e-13));
    CHECK(RadialGrid::sphere_area(5) ==
          doctest::Approx(8.0 * M_PI * M_PI / 3.0).epsilon(1e-14));
}

TEST_CASE("interpolation reproduces grid functions") {
    const RadialGrid g(1.0, 24);
    const int n = g.size();
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = std::cos(2.0 * g.rho()(i));
    // Node hits are exact.
    for (int i = 0; i < n; ++i) {
        CHECK(g.interp_even(f, g.rho()(i)) == doctest::Approx(f(i)).epsilon(1e-14));
    }
    // Off-node values of an analytic function converge spectrally; at N=24
    // the error of cos(2 rho) is far below 1e-12.
    for (double r : {0.123, 0.456, 0.789, 0.999}) {
        CHECK(g.interp_even(f, r) ==
              doctest::Approx(std::cos(2.0 * r)).epsilon(1e-12));
    }
}

TEST_CASE("random band-limited functions are seeded deterministically") {
    const RadialGrid g(1.0, 32);
    std::mt19937_64 a(42), b(42), c(43);
    const Eigen::VectorXd ua = g.random_even(5, a);
    const Eigen::VectorXd ub = g.random_even(5, b);
    const Eigen::VectorXd uc = g.random_even(5, c);
    CHECK((ua - ub).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((ua - uc).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("sobolev norm of a constant is the ball volume") {
    const RadialGrid g(1.0, 24);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(g.size());
    CHECK(sobolev_norm(g, 5, one, 3) ==
          doctest::Approx(std::sqrt(8.0 * M_PI * M_PI / 15.0)).epsilon(1e-12));
}

TEST_CASE("derivative errors decay spectrally") {
    // Analytic non-polynomial target: errors drop by far more than 10x from
    // N=16 to N=32.
    double err16 = 0.0, err32 = 0.0;
    for (int N : {16, 32}) {
        const RadialGrid g(1.0, N);
        const int n = g.size();
        Eigen::VectorXd f(n);
        for (int i = 0; i < n; ++i) f(i) = std::exp(-g.rho()(i) * g.rho()(i));
        const Eigen::VectorXd df = g.De() * f;
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = g.rho()(i);
            e = std::max(e, std::abs(df(i) + 2.0 * r * std::exp(-r * r)));
        }
        (N == 16 ? err16 : err32) = e;
    }
    CHECK(err32 * 10.0 < err16);
    CHECK(err32 < 1e-10);
}
