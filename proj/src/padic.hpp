#pragma once

// Exact arithmetic mod p^c, unit group discrete logs, and truncated p-adic
// numbers (valuation + unit residue). Everything here is immutable after
// construction and safe to share across threads.

#include "common.hpp"

namespace wlab {

// q = p^c with p an odd prime checked at construction. q is capped at 2^31:
// the desk scale is p <= 101, c <= 6, and all downstream tables are O(q).
struct PrimePower {
    int64_t p = 0;
    int c = 0;
    int64_t q = 0;

    PrimePower() = default;
    PrimePower(int64_t p_, int c_);

    int64_t phi() const { return c == 0 ? 1 : q / p * (p - 1); }
    bool operator==(const PrimePower& o) const { return p == o.p && c == o.c; }
};

inline constexpr int64_t kModulusLimit = int64_t(1) << 31;

// Discrete-log table for (Z/p^c)^* with the smallest primitive root as
// generator. dlog[u] = k with g^k = u for units, -1 elsewhere.
struct UnitGroupTable {
    PrimePower modulus;
    int64_t generator = 0;
    int64_t order = 0;  // phi(p^c)
    std::vector<int32_t> dlog;

    int64_t log_of(int64_t u) const;
    int64_t pow_g(int64_t k) const;  // g^k mod q
};

// p odd, c >= 1. Deterministic: smallest primitive root.
UnitGroupTable unit_group(int64_t p, int c);

// x = p^v * unit, unit a unit residue known mod p^K; or the zero marker.
// Arithmetic refuses to silently drop below precision K.
struct TruncatedPAdic {
    int64_t p = 0;
    int K = 1;
    bool zero = true;
    int v = 0;
    int64_t unit = 0;  // in (Z/p^K)^*, canonical representative [1, p^K)

    static TruncatedPAdic zero_at(int64_t p, int K);
    static TruncatedPAdic from_unit(int64_t p, int K, int v, int64_t unit_residue);
    // exact small rational a/b (p-adic valuation extracted from both parts)
    static TruncatedPAdic from_rational(int64_t p, int K, int64_t num, int64_t den);

    int64_t pK() const { return checked_ipow(p, K, kModulusLimit); }
    // residue of the unit mod p^j, j <= K
    int64_t unit_mod(int j) const;
    double abs() const { return zero ? 0.0 : std::pow(double(p), -double(v)); }

    TruncatedPAdic add(const TruncatedPAdic& o) const;
    TruncatedPAdic mul(const TruncatedPAdic& o) const;
    TruncatedPAdic scale_p(int dv) const;  // multiply by p^dv
};

// {x}_p as an exact rational in [0,1): sum of digits d_j p^j over v <= j < 0.
Rat fractional_part(const TruncatedPAdic& x);

}  // namespace wlab
