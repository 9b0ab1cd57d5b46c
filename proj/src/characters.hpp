#pragma once

// Dirichlet characters mod p^c stored as discrete-log multipliers, Gauss
// sums, the b parameter of primitive even characters mod p^2, and the
// Whittaker-at-identity epsilon value. Character values are exact roots of
// unity taken from shared precomputed tables so sums are reproducible.

#include <memory>

#include "padic.hpp"

namespace wlab {

// e^{2*pi*i*j/n} for 0 <= j < n
class RootTable {
public:
    explicit RootTable(int64_t n);
    cplx operator[](int64_t j) const {
        j %= n_;
        if (j < 0) j += n_;
        return roots_[size_t(j)];
    }
    int64_t order() const { return n_; }

private:
    int64_t n_;
    std::vector<cplx> roots_;
};

std::shared_ptr<const UnitGroupTable> shared_unit_group(int64_t p, int c);
std::shared_ptr<const RootTable> shared_roots(int64_t n);

// chi(u) = e^{2*pi*i * k * dlog(u) / phi(p^c)}
class DirichletChar {
public:
    DirichletChar() = default;
    DirichletChar(int64_t p, int c, int64_t k);

    const PrimePower& modulus() const { return mod_; }
    int64_t p() const { return mod_.p; }
    int cond_exp() const { return c0_; }        // conductor = p^c0
    bool primitive() const { return c0_ == mod_.c; }
    bool trivial() const { return k_ == 0; }
    int parity() const { return parity_; }      // chi(-1)
    bool even() const { return parity_ == 1; }
    int64_t multiplier() const { return k_; }
    int64_t generator() const { return tab_->generator; }
    int64_t order() const;                       // order of chi in the dual group

    cplx operator()(int64_t u) const;            // 0 on non-units
    // exact index: chi(u) = roots[phi][index_of(u)]
    int64_t index_of(int64_t u) const;

    DirichletChar conj() const { return DirichletChar(mod_.p, mod_.c, (tab_->order - k_) % tab_->order); }
    DirichletChar times(const DirichletChar& o) const;

    std::string id() const;  // "p.c.k" used in reports

private:
    PrimePower mod_;
    int64_t k_ = 0;
    std::shared_ptr<const UnitGroupTable> tab_;
    std::shared_ptr<const RootTable> roots_;
    int c0_ = 0;
    int parity_ = 1;
};

std::vector<DirichletChar> enumerate_chars(int64_t p, int c, bool primitive_only, bool even_only);

// tau(chi) = sum over units mod p^c of chi(u) e^{2*pi*i*u/p^c}
cplx gauss_sum(const DirichletChar& chi);

// A character of Q_p^*: finite part on units plus a unimodular value at p.
class UnitaryCharacter {
public:
    UnitaryCharacter() = default;
    UnitaryCharacter(DirichletChar unit_part, cplx value_at_p);

    const DirichletChar& unit_part() const { return unit_; }
    cplx value_at_p() const { return vp_; }
    int conductor_exp() const { return unit_.cond_exp(); }
    bool ramified() const { return unit_.cond_exp() > 0; }
    int64_t p() const { return unit_.p(); }

    cplx eval(const TruncatedPAdic& x) const;
    cplx eval(int v, int64_t unit_residue) const;  // chi(p^v * u)

    UnitaryCharacter conj() const { return UnitaryCharacter(unit_.conj(), std::conj(vp_)); }

private:
    DirichletChar unit_;
    cplx vp_ = 1.0;
};

struct BParam {
    int64_t b = 0;  // chi(1 - p z) = e^{2 pi i b z / p} for all z
    int64_t a = 0;  // a b = 1 mod p
};

// chi primitive mod p^2, p odd. The defining identity is verified
// exhaustively over z in {0,...,p-1} with exact root-of-unity indices.
BParam find_b(const DirichletChar& chi);

struct EpsilonFactor {
    cplx value;
    // Which object this is: the Jacquet-integral value W(e) for 1 boxplus chi
    // with unramified psi, integrated over v(x) <= -2 against psi(x).
    std::string convention = "jacquet_W_at_e";
};

// |value| = p^{-c/2}. Shells j in [2, c) and (c, c+2] are summed and checked
// to vanish numerically rather than assumed.
EpsilonFactor epsilon_W_at_identity(const UnitaryCharacter& chi);

}  // namespace wlab
