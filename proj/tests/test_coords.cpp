#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sslab/chart.hpp"
#include "sslab/height.hpp"

using namespace sslab;

TEST_CASE("standard height is the constant slice") {
    const HeightFunction h = HeightFunction::standard();
    for (double rho : {0.0, 0.3, 1.0, 2.5}) {
        const HeightEval e = h.eval(rho);
        CHECK(e.h == -1.0);
        CHECK(e.hp == 0.0);
        CHECK(e.hpp == 0.0);
        CHECK(e.c == 1.0);
        CHECK(e.w == 1.0);
    }
    CHECK(h.asymptotic_slope() == 0.0);
    CHECK(std::isinf(h.plateau_radius()));
}

TEST_CASE("hyperboloidal height matches its closed form") {
    const double alpha = 1.0, beta = 1.0;
    const HeightFunction h = HeightFunction::hyperboloidal(alpha, beta);
    for (double rho : {0.1, 0.5, 1.0, 3.0}) {
        const HeightEval e = h.eval(rho);
        const double rad = std::sqrt(alpha * alpha + rho * rho);
        CHECK(e.h == doctest::Approx(rad - alpha - beta).epsilon(1e-15));
        CHECK(e.hp == doctest::Approx(rho / rad).epsilon(1e-15));
        CHECK(e.hpp ==
              doctest::Approx(alpha * alpha / (rad * rad * rad)).epsilon(1e-15));
        CHECK(e.c == doctest::Approx(rho * e.hp - e.h).epsilon(1e-15));
        CHECK(e.w == doctest::Approx(1.0 - e.hp * e.hp).epsilon(1e-15));
    }
    CHECK(h.asymptotic_slope() == 1.0);
    CHECK(h.plateau_radius() == 0.0);
}

TEST_CASE("flattened cone keeps the plateau and the cone exactly") {
    const HeightFunction h = HeightFunction::flattened_cone(0.5, 1.0, 0.25);
    CHECK(h.plateau_radius() == doctest::Approx(0.75).epsilon(1e-15));
    // Plateau region.
    for (double rho : {0.0, 0.4, 0.75}) {
        const HeightEval e = h.eval(rho);
        CHECK(e.h == -1.0);
        CHECK(e.hp == 0.0);
    }
    // Cone region.
    for (double rho : {1.25, 2.0, 4.0}) {
        const HeightEval e = h.eval(rho);
        CHECK(e.h == doctest::Approx(0.5 * (rho - 1.0) - 1.0).epsilon(1e-14));
        CHECK(e.hp == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(e.hpp == 0.0);
    }
    CHECK(h.asymptotic_slope() == 0.5);
    // The mollified band interpolates monotonically with h'' >= 0.
    double prev = h.eval(0.75).hp;
    for (double rho = 0.76; rho < 1.25; rho += 0.01) {
        const HeightEval e = h.eval(rho);
        CHECK(e.hp >= prev - 1e-14);
        CHECK(e.hpp >= 0.0);
        prev = e.hp;
    }
}

TEST_CASE("height constructor preconditions") {
    CHECK_THROWS_AS(HeightFunction::hyperboloidal(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(HeightFunction::hyperboloidal(1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(HeightFunction::flattened_cone(1.5, 1.0, 0.25),
                    std::domain_error);
    CHECK_THROWS_AS(HeightFunction::flattened_cone(0.5, 1.0, 1.5),
                    std::domain_error);
    CHECK_THROWS_AS(HeightFunction::standard().eval(-0.1), std::domain_error);
}

TEST_CASE("light-cone radius roots") {
    CHECK(light_cone_radius(HeightFunction::standard()) == 1.0);
    CHECK(light_cone_radius(HeightFunction::hyperboloidal(1.0, 1.0)) ==
          doctest::Approx(0.75).epsilon(1e-12));
    CHECK(light_cone_radius(HeightFunction::flattened_cone(0.5, 1.0, 0.25)) ==
          doctest::Approx(0.983087854605191).epsilon(1e-12));
}

TEST_CASE("structural validation of the flattened cone") {
    const HeightFunction h = HeightFunction::flattened_cone(0.5, 1.0, 0.25);
    const HeightValidation v = validate_height(h, 512, 0.25);
    CHECK(v.all_geometric());
    CHECK(v.all_flattened_cone());
    // h(R) = kappa R at the reported R.
    CHECK(h.eval(v.cond4_R).h ==
          doctest::Approx(0.25 * v.cond4_R).epsilon(1e-10));
}

TEST_CASE("coordinate round trip on random in-image events") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> utau(0.0, 3.0);
    for (const HeightFunction& h :
         {HeightFunction::standard(), HeightFunction::hyperboloidal(1.0, 1.0),
          HeightFunction::flattened_cone(0.5, 1.0, 0.25)}) {
        const double R = light_cone_radius(h);
        const CoordChart chart(h, 1.0, R);
        std::uniform_real_distribution<double> urho(0.0, R);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double tau = utau(rng), rho = urho(rng);
            const Event ev = chart.to_physical(tau, rho);
            const SimCoords back = chart.from_physical(ev);
            // Relative agreement (floored at scale 1 near the origin).
            worst = std::max(worst,
                             std::abs(back.tau - tau) / std::max(1.0, tau));
            worst = std::max(worst,
                             std::abs(back.rho - rho) / std::max(1.0, rho));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("chart rejects out-of-image points") {
    const CoordChart chart(HeightFunction::standard(), 1.0, 1.0);
    CHECK_THROWS_AS(chart.to_physical(0.0, 1.5), std::domain_error);
    // An event beyond the blowup time is outside the image.
    CHECK_THROWS_AS(chart.from_physical({1.5, 0.1}), std::domain_error);
}

TEST_CASE("foliation metrics of the standard slicing") {
    const CoordChart chart(HeightFunction::standard(), 1.0, 1.0);
    const FoliationMetrics fm = chart.foliation(0.5, 5, 0.3);
    CHECK(fm.det_gamma ==
          doctest::Approx(std::pow(std::exp(-0.3), 10)).epsilon(1e-13));
    CHECK(fm.n0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fm.nr == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("scaling of the similarity map") {
    // chi_T(tau, rho) = (T + T e^{-tau} h, T e^{-tau} rho): doubling T scales
    // both components of (t - T, r) by 2.
    const HeightFunction h = HeightFunction::hyperboloidal(1.0, 1.0);
    const CoordChart c1(h, 1.0, 0.75), c2(h, 2.0, 0.75);
    const Event e1 = c1.to_physical(0.7, 0.3);
    const Event e2 = c2.to_physical(0.7, 0.3);
    CHECK(e2.t - 2.0 == doctest::Approx(2.0 * (e1.t - 1.0)).epsilon(1e-14));
    CHECK(e2.r == doctest::Approx(2.0 * e1.r).epsilon(1e-14));
}

TEST_CASE("transition scale between the standard and hyperboloidal slicings") {
    // alpha * (-1) = hbar(1) = sqrt(2) - 2, so the scale is 2 - sqrt(2).
    const double s = transition_scale(HeightFunction::standard(),
                                      HeightFunction::hyperboloidal(1.0, 1.0),
                                      1.0);
    CHECK(s == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
}
