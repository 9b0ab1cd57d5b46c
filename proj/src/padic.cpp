#include "padic.hpp"

namespace wlab {

PrimePower::PrimePower(int64_t p_, int c_) : p(p_), c(c_) {
    if (!is_prime(p)) throw Error(Error::invalid_argument, "p is not prime");
    if (c < 0) throw Error(Error::invalid_argument, "negative exponent");
    q = checked_ipow(p, c, kModulusLimit);
}

int64_t UnitGroupTable::log_of(int64_t u) const {
    int64_t q = modulus.q;
    u %= q;
    if (u < 0) u += q;
    int32_t k = dlog[size_t(u)];
    if (k < 0) throw Error(Error::invalid_argument, "dlog of a non-unit");
    return k;
}

int64_t UnitGroupTable::pow_g(int64_t k) const {
    k %= order;
    if (k < 0) k += order;
    return pow_mod(generator, k, modulus.q);
}

UnitGroupTable unit_group(int64_t p, int c) {
    if (p == 2) throw Error(Error::unsupported, "p = 2 unit groups not supported (odd p only)");
    if (c < 1) throw Error(Error::invalid_argument, "unit_group needs c >= 1");
    PrimePower m(p, c);
    int64_t phi = m.phi();
    auto factors = prime_factors(phi);

    // smallest primitive root mod p^c
    int64_t g = 0;
    for (int64_t cand = 2; cand < m.q; ++cand) {
        if (cand % p == 0) continue;
        bool primitive = true;
        for (int64_t f : factors) {
            if (pow_mod(cand, phi / f, m.q) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) {
            g = cand;
            break;
        }
    }
    if (g == 0) throw Error(Error::internal, "no primitive root found");

    UnitGroupTable t;
    t.modulus = m;
    t.generator = g;
    t.order = phi;
    t.dlog.assign(size_t(m.q), -1);
    int64_t u = 1;
    for (int64_t k = 0; k < phi; ++k) {
        if (t.dlog[size_t(u)] != -1)
            throw Error(Error::internal, "generator order too small");
        t.dlog[size_t(u)] = int32_t(k);
        u = mul_mod(u, g, m.q);
    }
    if (u != 1) throw Error(Error::internal, "generator does not close the cycle");
    return t;
}

TruncatedPAdic TruncatedPAdic::zero_at(int64_t p, int K) {
    TruncatedPAdic x;
    x.p = p;
    x.K = K;
    x.zero = true;
    return x;
}

TruncatedPAdic TruncatedPAdic::from_unit(int64_t p, int K, int v, int64_t unit_residue) {
    if (K < 1) throw Error(Error::invalid_argument, "precision K must be >= 1");
    TruncatedPAdic x;
    x.p = p;
    x.K = K;
    int64_t pk = x.pK();
    unit_residue %= pk;
    if (unit_residue < 0) unit_residue += pk;
    if (unit_residue % p == 0)
        throw Error(Error::invalid_argument, "unit residue divisible by p");
    x.zero = false;
    x.v = v;
    x.unit = unit_residue;
    return x;
}

TruncatedPAdic TruncatedPAdic::from_rational(int64_t p, int K, int64_t num, int64_t den) {
    if (den == 0) throw Error(Error::invalid_argument, "zero denominator");
    if (num == 0) return zero_at(p, K);
    int v = 0;
    while (num % p == 0) { num /= p; ++v; }
    while (den % p == 0) { den /= p; --v; }
    TruncatedPAdic x;
    x.p = p;
    x.K = K;
    int64_t pk = x.pK();
    int64_t nu = ((num % pk) + pk) % pk;
    int64_t du = ((den % pk) + pk) % pk;
    x.zero = false;
    x.v = v;
    x.unit = mul_mod(nu, inv_mod(du, pk), pk);
    return x;
}

int64_t TruncatedPAdic::unit_mod(int j) const {
    if (zero) throw Error(Error::invalid_argument, "unit of the zero marker");
    if (j > K) throw Error(Error::precision_loss, "residue requested beyond precision K");
    return unit % checked_ipow(p, j, kModulusLimit);
}

TruncatedPAdic TruncatedPAdic::scale_p(int dv) const {
    if (zero) return *this;
    TruncatedPAdic x = *this;
    x.v += dv;
    return x;
}

TruncatedPAdic TruncatedPAdic::mul(const TruncatedPAdic& o) const {
    if (p != o.p) throw Error(Error::invalid_argument, "mixed primes");
    if (zero || o.zero) return zero_at(p, std::min(K, o.K));
    int Kr = std::min(K, o.K);
    TruncatedPAdic x;
    x.p = p;
    x.K = Kr;
    x.zero = false;
    x.v = v + o.v;
    int64_t pk = x.pK();
    x.unit = mul_mod(unit % pk, o.unit % pk, pk);
    return x;
}

TruncatedPAdic TruncatedPAdic::add(const TruncatedPAdic& o) const {
    if (p != o.p) throw Error(Error::invalid_argument, "mixed primes");
    if (zero) return o;
    if (o.zero) return *this;
    const TruncatedPAdic& lo = (v <= o.v) ? *this : o;
    const TruncatedPAdic& hi = (v <= o.v) ? o : *this;
    int shift = hi.v - lo.v;
    int Kr = std::min(K, o.K);
    int64_t pk = checked_ipow(p, Kr, kModulusLimit);
    if (shift >= Kr) {
        // hi is invisible at this precision; result equals lo exactly mod p^Kr
        return from_unit(p, Kr, lo.v, lo.unit % pk);
    }
    int64_t sum = (lo.unit % pk + mul_mod(checked_ipow(p, shift, kModulusLimit),
                                          hi.unit % pk, pk)) % pk;
    if (sum == 0)
        throw Error(Error::precision_loss, "cancellation exhausts precision K");
    int dv = 0;
    while (sum % p == 0) { sum /= p; ++dv; }
    if (dv + 1 > Kr)
        throw Error(Error::precision_loss, "valuation gain exceeds precision K");
    // the unit is now only known mod p^(Kr - dv)
    return from_unit(p, Kr - dv, lo.v + dv, sum);
}

Rat fractional_part(const TruncatedPAdic& x) {
    if (x.zero || x.v >= 0) return Rat(0);
    int j = -x.v;
    if (j > x.K)
        throw Error(Error::precision_loss, "fractional part needs valuation >= -K");
    int64_t pj = checked_ipow(x.p, j, kModulusLimit);
    // {p^v u} = (u mod p^j) / p^j
    return Rat(x.unit % pj, pj);
}

}  // namespace wlab
