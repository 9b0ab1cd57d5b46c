#pragma once

// Whittaker newvector values for twist-minimal principal series of
// GL(2, Q_p), computed two ways: closed forms (conductor p^2) and a
// brute-force Jacquet-integral oracle (any conductor p^c, c >= 2) evaluated
// as exact finite sums over valuation shells.
//
// Pinned conventions, used consistently everywhere in this module:
//   n(x) = [[1,x],[0,1]], a(y) = [[y,0],[0,1]], w = [[0,1],[-1,0]],
//   psi unramified (psi(x) = e^{2 pi i {x}_p}), I_c = { k in GL2(Z_p) :
//   v(k21) >= c }, pi = chi1 boxplus chi2 with chi1 unramified and chi2 of
//   conductor p^c.  The newvector of the induced model of 1 boxplus chi is
//   supported on B*I_c and equals f(h) = chi(h22) |det h|^{1/2} / |h22|
//   there; W(g) = int f(w n(x) g) conj(psi(x)) dx and W0 = W / W(e).
//   The newvector of chi1 boxplus chi2 is chi1(det g) W0(g).
//
// Cell representatives (paper coordinates for conductor p^2):
//   cell 0: [[1,0],[1,1]]   (the B I_2-coset of the antidiagonal)
//   cell 1: [[p,0],[p,1]]   (off-diagonal; carries the p^{1/2} values)
//   cell 2: identity        (diagonal / Kirillov restriction)
// For generic matrices R = [[p^a,0],[p^g,1]] the oracle is exposed directly;
// the general-c search uses R = [[1,0],[p^i,1]], i = 0..c.

#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "characters.hpp"

namespace wlab {

class PrincipalSeries {
public:
    // chi1 unramified (given by its value at p), chi2 of conductor p^c with
    // unit part `chi2_unit` and value `chi2_at_p` at p.
    PrincipalSeries(DirichletChar chi2_unit, cplx chi2_at_p, cplx chi1_at_p = 1.0);

    int64_t p() const { return chi_.p(); }
    int conductor_exp() const { return chi_.conductor_exp(); }
    const UnitaryCharacter& chi1() const { return chi1_; }
    const UnitaryCharacter& chi2() const { return chi2_; }
    // chi = chi1^{-1} chi2, the character of the normalized model 1 boxplus chi
    const UnitaryCharacter& chi() const { return chi_; }

    PrincipalSeries twisted(cplx eta_at_p) const;  // eta unramified unimodular

    // shared mutable cache for shell sums and W(e); thread-safe
    struct Cache;
    Cache& cache() const { return *cache_; }

private:
    UnitaryCharacter chi1_, chi2_, chi_;
    std::shared_ptr<Cache> cache_;
};

struct WhittakerCell {
    TruncatedPAdic y;
    int i = 2;  // 0, 1, 2 as above
};

enum class Provenance { closed_form, oracle, oracle_extrapolated };

struct WhittakerValue {
    cplx value{0.0};
    bool nonzero = false;
    Provenance provenance = Provenance::closed_form;
    double abs() const { return std::abs(value); }
};

// Closed forms (twist chi1(det) included).
WhittakerValue w_diag(const PrincipalSeries& ps, const TruncatedPAdic& y);
WhittakerValue w_cell0(const PrincipalSeries& ps, const TruncatedPAdic& y);  // c = 2 only
WhittakerValue w_cell1(const PrincipalSeries& ps, const TruncatedPAdic& y);  // c = 2 only

// W0(a(y) R) for R = [[p^a,0],[p^g,1]]; g < 0 means the diagonal (gamma = 0).
cplx oracle_matrix(const PrincipalSeries& ps, const TruncatedPAdic& y, int a, int g);

// Oracle on the three pinned cells. Errors if a shell sum at the vanishing
// cutoff exceeds 1e-8 (a support-rule bug, not a tolerance issue).
WhittakerValue jacquet_oracle(const PrincipalSeries& ps, const WhittakerCell& cell);

enum class HMethod { closed_form, exhaustive };

// h = max |W0|. closed_form: p^{floor(c/2)/2}. exhaustive: max of the oracle
// over cells [[1,0],[p^i,1]], i = 0..c, and y-classes with
// -(c+2) <= v(y) <= 2, unit classes exhaustive mod p^c.
// The two methods are required to agree within 1e-8.
double h_invariant(const PrincipalSeries& ps, HMethod method, int jobs = 1);

struct HObservation {
    double h_closed = 0;
    double h_exhaustive = 0;
    int argmax_cell = -1;
    int argmax_vy = 0;
    int64_t argmax_unit = 0;
};
HObservation h_scan(const PrincipalSeries& ps, int jobs = 1);

bool unramified_twist_invariance(const PrincipalSeries& ps, cplx eta_at_p, double tol = 1e-8,
                                 int jobs = 1);

// CSV table rows for the CLI.
struct LocalRow {
    int64_t p;
    int c;
    std::string chi_id;
    int cell;
    int vy;
    int64_t unit_class;
    double abs_w;
    double phase;
    std::string provenance;
};
std::vector<LocalRow> run_local_table(int64_t p, int c, bool all_chars, bool with_oracle,
                                      int jobs);

}  // namespace wlab
