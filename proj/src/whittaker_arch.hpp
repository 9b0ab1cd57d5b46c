#pragma once

// Archimedean Whittaker data: max |W| / (W,W)^{1/2} for lowest-weight vectors
// of GL(2,R) representations.
//
//   discrete weight k:      W(a(y)) = y^{k/2} e^{-2 pi y}   (exact closed forms)
//   principal, trivial cc:  W(a(y)) = y^{1/2} K_{ir}(2 pi y)
//   principal, nontriv cc:  W(a(y)) = W_{1/2, ir}(4 pi y)   (exploratory)
//
// Bessel/Whittaker values are computed scaled by e^{pi r / 2} throughout:
// the scaled functions are seeded from their large-argument asymptotic
// series at x ~ 1.5 r^2 and carried down through the transition range by
// downward Runge-Kutta integration of the defining ODE (the direction in
// which the growing companion solution decays, so the integration is
// stable). Every quantity is validated by a halved-step re-run; refinements
// disagreeing by more than 1e-8 relative raise an error.

#include "common.hpp"

namespace wlab {

struct ArchRepresentation {
    enum class Kind { discrete, principal_trivial, principal_nontrivial };
    Kind kind;
    int weight = 0;    // discrete: even, >= 2
    double r = 0;      // spectral parameter, > 0

    static ArchRepresentation discrete_series(int k);
    static ArchRepresentation principal(double r);
    static ArchRepresentation principal_nontrivial(double r);
};

// max|W| / (W,W)^{1/2}
double arch_ratio(const ArchRepresentation& rep);

// max over x > 0 of x^{1/2} * e^{pi r/2} K_{ir}(x), with its location.
struct ScaledMax {
    double value = 0;
    double location = 0;
};
ScaledMax kbessel_scaled_max(double r);

// scaled W~ = e^{pi r/2} W_{1/2,ir}: sup |W~|, its location, and the scaled
// norm (W~,W~) = int |W~(z)|^2 dz/z with an error estimate.
struct NontrivialData {
    double max_abs = 0;
    double zmax = 0;
    double norm = 0;
    double norm_err = 0;
};
NontrivialData whittaker_half_ir(double r);

// least-squares slope of log max_y y^{1/2} |K~_{ir}(y)| against log r over a
// log-spaced grid; the transition-range exponent (expected near 1/6).
FitResult kbessel_exponent_fit(double r_lo, double r_hi, int npts, int jobs = 1);

struct NontrivialFits {
    FitResult max_fit;    // expected slope near 2/3
    FitResult norm_fit;   // expected slope near 1 (scaled norm ~ r)
    double net_exponent;  // max slope - norm slope / 2
};
NontrivialFits nontrivial_central_fits(double r_lo, double r_hi, int npts, int jobs = 1);

// golden-section maximizer on [a, b] for unimodal f (used for the analytic
// maximizer cross-checks)
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-12);

struct ArchRow {
    double parameter;  // k or r
    double max_abs;    // scaled max
    double norm;       // scaled (W,W)
    double ratio;
};
std::vector<ArchRow> run_arch_table(ArchRepresentation::Kind kind, double lo, double hi,
                                    int npts, int jobs);

}  // namespace wlab
