#pragma once

// Petersson norms and domain integrals over Gamma_0(N)\H via cusp-adapted
// coset cells: each cusp kappa of width m contributes cells sigma_kappa T^j,
// j < m, integrated over the standard fundamental domain truncated at the
// scaled height V; the horoball above V is controlled by a Parseval line
// measurement at v = V (the cusp expansions decay like e^{-2 pi n v} in the
// scaled coordinate, so the dropped mass is bounded by the measured line
// integral divided by 4 pi V^2).

#include "modforms.hpp"

namespace wlab {

struct Cusp {
    int64_t a = 1, c = 0;            // the cusp a/c (c = 0 is infinity)
    int64_t width = 1;               // N / gcd(c^2, N)
    std::array<int64_t, 4> sigma{};  // SL2(Z) lift with sigma(infinity) = a/c
};

struct CosetSystem {
    int64_t N = 1;
    int64_t index = 1;  // N prod (1 + 1/p)
    std::vector<Cusp> cusps;
    // all representatives sigma_kappa T^j in cusp order
    std::vector<std::array<int64_t, 4>> reps;
};

// complete verified system; N <= 200
CosetSystem coset_reps(int64_t N);

struct NormResult {
    double value = 0;
    double error = 0;  // refinement disagreement + horoball tail bounds
};

// (f, f) = int |f|^2 dmu over Gamma_0(N)\H (unnormalized measure dx dy/y^2)
NormResult petersson_norm(const NewformData& f, int order = 24, int jobs = 1);

struct BasisWithNorms {
    std::vector<NewformData> forms;
    std::vector<double> norms;       // quadrature (f_i, f_i)
    std::vector<double> norm_errs;
    int64_t expected_dim = -1;       // -1: unknown
    bool complete() const {
        return expected_dim >= 0 && int64_t(forms.size()) == expected_dim;
    }
};

BasisWithNorms basis_with_norms(std::vector<NewformData> forms, int order = 24, int jobs = 1);

// dim S_2(p^2, chi) for chi primitive even mod p^2 (trace-formula dimension
// count; exact at this level shape)
int64_t dim_s2_prime_square(const DirichletChar& chi);

struct MchiResult {
    double value = 0;
    bool partial = false;  // basis known incomplete: lower bound only
};
MchiResult m_chi(const Point& z, const BasisWithNorms& basis, double tol = 1e-9);

// (1/vol) int M_chi dmu, measured by the same quadrature
NormResult mchi_domain_average(const BasisWithNorms& basis, int order = 24, int jobs = 1);

// volume-normalized L^r norm, r in [2, 64]; lr_norm of the constant 1 is
// exactly 1 (quadrature calibration); r = infinity callers use supnorm_scan
double lr_norm(const NewformData& f, double r, int order = 24, int jobs = 1);

// hyperbolic volume of Gamma_0(N)\H measured by the quadrature (for the
// calibration invariant; exact value is (pi/3) index)
NormResult measured_volume(int64_t N, int order = 24);

}  // namespace wlab
