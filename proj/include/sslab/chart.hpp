#pragma once

#include "sslab/height.hpp"

namespace sslab {

// A physical spacetime event (t, r) with r = |x| >= 0.
struct Event {
    double t;
    double r;
};

// Similarity-time coordinates of an event: (tau, rho).
struct SimCoords {
    double tau;
    double rho;
};

// Lapse/shift-type data of the constant-tau foliation.
struct FoliationMetrics {
    double det_gamma;  // induced metric determinant: (T e^{-tau})^{2d} * w
    double n0;         // unit-normal time component 1/sqrt(w)
    double nr;         // unit-normal radial component h'/sqrt(w)
};

// A fixed similarity chart: (tau, rho) -> (T + T e^{-tau} h(rho), T e^{-tau} rho)
// on [tau window] x [0, R]. Immutable; all operations are pure.
class CoordChart {
  public:
    CoordChart(HeightFunction height, double T, double R);

    const HeightFunction& height() const { return height_; }
    double T() const { return T_; }
    double R() const { return R_; }
    double R0() const { return R0_; }

    // Forward map; throws std::domain_error when rho > R.
    Event to_physical(double tau, double rho) const;

    // Inverse map by a monotone scalar root-find (relative tolerance 1e-13);
    // throws std::domain_error naming the violated image inequality when the
    // event lies outside the chart image.
    SimCoords from_physical(const Event& e) const;

    FoliationMetrics foliation(double rho, int d, double tau) const;

  private:
    HeightFunction height_;
    double T_, R_, R0_;
};

// Transition scale h_plus between two slicings at radius rho_bar: solves
// alpha * h(rho_bar/alpha) = hbar(rho_bar). The transition between the charts
// is then (tau, rho) = (tau_bar - log h_plus, rho_bar / h_plus).
double transition_scale(const HeightFunction& h, const HeightFunction& hbar,
                        double rho_bar);

}  // namespace sslab
