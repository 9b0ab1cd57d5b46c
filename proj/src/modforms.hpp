#pragma once

// Global side: q-expansion evaluation with rigorous truncation bounds, the
// special point z_chi, the congruence-twisted horocycle expansion, sup-norm
// scans, Wilton partial sums, the Hecke integral, and the sup-norm lower
// bound certificate.
//
// Values are the weight-2 invariant |f|(z) = y |sum a_n n^{1/2} e(nz)| with
// the analytic coefficient normalization (a_1 = 1, |a_n| <= tau(n)).

#include "ingest.hpp"

namespace wlab {

struct Point {
    Rat x{0};
    Rat y{1};
    double yd() const { return y.dbl(); }
    double xd() const { return x.dbl(); }
};

struct EvalReport {
    Point z;
    cplx value{0.0};
    double truncation_bound = 0;
    int64_t terms_used = 0;
    bool certified = true;  // truncation_bound < 1e-3 |value|
};

// rigorous tail bound y * sum_{n > M} tau(n) n^{1/2} e^{-2 pi n y} via
// tau(n) <= n and a geometric majorant
double eval_tail_bound(double y, int64_t M);
// least M with eval_tail_bound(y, M) <= tol (throws data_shortage if > limit)
int64_t terms_needed(double y, double tol, int64_t limit);

// literal truncated sum at z (no reduction): value = y sum a_n n^{1/2} e(nz)
EvalReport evaluate(const NewformData& f, const Point& z, double tol);

// Gamma_0(N)-reduction to a maximal-height representative (exact rational
// Moebius arithmetic; falls back to the input if denominators overflow)
Point reduce_point(const Point& z, int64_t N);

// |f| at z computed after reduction; equals |evaluate| by modular invariance
// but needs far fewer coefficients low in the cusp. Points deep in the
// width-N cusp are routed through the Fricke involution,
// |f(z)| = |f^sigma(-1/(Nz))| with conjugated coefficients, which the
// validation side verifies numerically per form (verify_fricke).
double abs_at(const NewformData& f, const Point& z, double tol);

// residual of |f(-1/(N z))| |N z|^{-... } against the conjugate-coefficient
// form at test heights; near zero for genuine newforms
double verify_fricke(const NewformData& f);

// congruence-restricted expansion y p^{1/2} sum_{n = 1 mod p} a_n n^{1/2} e(nz)
EvalReport twisted_expansion_eval(const NewformData& f, const DirichletChar& chi,
                                  const Point& z, double tol);

struct SpecialPoint {
    DirichletChar chi;
    int64_t b = 0;  // parameter of the central character (= p - b_literal)
    int64_t a = 0;  // a b = 1 mod p
    Point z_chi;
    Point z_chi_prime;  // -1/(p^2 z_chi)
};

// chi primitive even mod p^2. The nebentypus convention here is
// f(gz) = chi(d) (cz+d)^2 f(z); the unit part of the local component at p is
// then the conjugate character, so the off-diagonal support parameter is the
// negative of the literal find_b value. That sign is what this returns.
SpecialPoint special_point(const DirichletChar& chi);

Point atkin_lehner_point(const Point& z, int64_t N);

struct GridSpec {
    int nx = 64;
    int ny = 64;
    double y_min = 0;  // 0: pick from coefficient supply
    double y_max = 1.0;
    bool include_special = true;   // z_chi, z'_chi
    bool include_witness = true;   // image of the horocycle y = 1/2pi
    int64_t dilate = 1;            // scan |f(d z)| (oldform pullback)
    double tol = 1e-9;
    int jobs = 1;
};

struct ScanResult {
    double max_abs = 0;
    Point argmax;
    // growth exponent log(max * 2 pi e) / log N: the level-aspect exponent
    // after stripping the universal archimedean factor (2 pi e)^{-1}, which
    // otherwise drowns log(max)/log(N) at desk-scale levels
    double exponent = 0;
    double exponent_raw = 0;  // log max / log N
    int64_t points = 0;
};

ScanResult supnorm_scan(const NewformData& f, const GridSpec& grid);

// (2 pi e)^{-1} prod_{p^c || N} p^{floor(c/2)/2}; requires primitive nebentypus
double lower_bound_certificate(const NewformData& f);

// max_n |a_n| / (n^{1/2-1/2} ... ) : worst ratio against the h-product bound
double hecke_coefficient_bound(const NewformData& f);

// S(M, x) = sum_{m <= M} a_m e(m x)
cplx wilton_sum(const NewformData& f, int64_t M, const Rat& x);

struct WiltonScan {
    double best_ratio = 0;  // max |S(M,x)| / sqrt(M)
    int64_t best_M = 0;
};
WiltonScan wilton_lower_scan(const NewformData& f, const Rat& x, int64_t M_max);

// slope of log max_x |S(M,x)| over log M, x drawn from a seeded sample
FitResult wilton_upper_fit(const NewformData& f, int64_t M_max, int nx, uint64_t seed);

struct HeckeIntegral {
    cplx quadrature;      // int_{1/N}^{1} F(iy) dy by adaptive quadrature
    cplx series;          // same integral, exact termwise closed form
    std::optional<cplx> lvalue;  // ingested, when present
    double band = 0;      // |quadrature - lvalue/2pi| when lvalue present
};
HeckeIntegral hecke_integral(const NewformData& f);

struct NeighborhoodEstimate {
    double area = 0;    // measured hyperbolic area with |phi_tw| >= c0 p^delta
    double target = 0;  // p^{1/2-delta}
    double threshold = 0;
};
// region p^{delta-1/2} <= y <= 1, x in [0,1); threshold constant c0 = e^{-2pi}
NeighborhoodEstimate large_neighborhood(const NewformData& f, const DirichletChar& chi,
                                        double delta, int grid = 96);

}  // namespace wlab
