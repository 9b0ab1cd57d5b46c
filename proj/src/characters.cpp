#include "characters.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace wlab {

RootTable::RootTable(int64_t n) : n_(n) {
    if (n < 1) throw Error(Error::invalid_argument, "root table order must be positive");
    roots_.resize(size_t(n));
    for (int64_t j = 0; j < n; ++j) {
        double t = 2.0 * PI * double(j) / double(n);
        roots_[size_t(j)] = cplx(std::cos(t), std::sin(t));
    }
}

namespace {
std::mutex g_cache_mutex;
std::map<std::pair<int64_t, int>, std::shared_ptr<const UnitGroupTable>> g_unit_groups;
std::map<int64_t, std::shared_ptr<const RootTable>> g_root_tables;
}  // namespace

std::shared_ptr<const UnitGroupTable> shared_unit_group(int64_t p, int c) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto key = std::make_pair(p, c);
    auto it = g_unit_groups.find(key);
    if (it != g_unit_groups.end()) return it->second;
    auto t = std::make_shared<UnitGroupTable>(unit_group(p, c));
    g_unit_groups[key] = t;
    return t;
}

std::shared_ptr<const RootTable> shared_roots(int64_t n) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_root_tables.find(n);
    if (it != g_root_tables.end()) return it->second;
    auto t = std::make_shared<RootTable>(n);
    g_root_tables[n] = t;
    return t;
}

DirichletChar::DirichletChar(int64_t p, int c, int64_t k) : mod_(p, c) {
    if (c < 1) throw Error(Error::invalid_argument, "character modulus needs c >= 1");
    tab_ = shared_unit_group(p, c);
    roots_ = shared_roots(tab_->order);
    k_ = ((k % tab_->order) + tab_->order) % tab_->order;

    // conductor: chi is trivial on units = 1 mod p^j iff p^{c-j} | k
    if (k_ == 0) {
        c0_ = 0;
    } else {
        int vp = 0;
        int64_t kk = k_;
        while (kk % p == 0) { kk /= p; ++vp; }
        c0_ = mod_.c - std::min(vp, mod_.c - 1);
    }
    // chi(-1) = (-1)^k since dlog(-1) = phi/2
    parity_ = (k_ % 2 == 0) ? 1 : -1;
}

int64_t DirichletChar::order() const {
    if (k_ == 0) return 1;
    return tab_->order / std::gcd(k_, tab_->order);
}

int64_t DirichletChar::index_of(int64_t u) const {
    int64_t d = tab_->log_of(u);
    return mul_mod(k_, d, tab_->order);
}

cplx DirichletChar::operator()(int64_t u) const {
    int64_t q = mod_.q;
    u %= q;
    if (u < 0) u += q;
    if (u % mod_.p == 0) return 0.0;
    return (*roots_)[index_of(u)];
}

DirichletChar DirichletChar::times(const DirichletChar& o) const {
    if (!(mod_ == o.mod_))
        throw Error(Error::invalid_argument, "character product needs equal moduli");
    return DirichletChar(mod_.p, mod_.c, k_ + o.k_);
}

std::string DirichletChar::id() const {
    return std::to_string(mod_.p) + "." + std::to_string(mod_.c) + "." + std::to_string(k_);
}

std::vector<DirichletChar> enumerate_chars(int64_t p, int c, bool primitive_only, bool even_only) {
    PrimePower m(p, c);
    std::vector<DirichletChar> out;
    for (int64_t k = 0; k < m.phi(); ++k) {
        DirichletChar chi(p, c, k);
        if (primitive_only && !chi.primitive()) continue;
        if (even_only && !chi.even()) continue;
        out.push_back(chi);
    }
    return out;
}

cplx gauss_sum(const DirichletChar& chi) {
    int64_t q = chi.modulus().q;
    auto psi = shared_roots(q);
    std::vector<cplx> terms;
    terms.reserve(size_t(q));
    for (int64_t u = 1; u < q; ++u) {
        if (u % chi.p() == 0) continue;
        terms.push_back(chi(u) * (*psi)[u]);
    }
    return pairwise_sum(terms);
}

UnitaryCharacter::UnitaryCharacter(DirichletChar unit_part, cplx value_at_p)
    : unit_(std::move(unit_part)), vp_(value_at_p) {
    if (std::abs(std::abs(vp_) - 1.0) > 1e-14)
        throw Error(Error::invalid_argument, "value at p must be unimodular");
}

cplx UnitaryCharacter::eval(int v, int64_t unit_residue) const {
    cplx pv = 1.0;
    cplx base = v >= 0 ? vp_ : std::conj(vp_);
    for (int i = 0; i < std::abs(v); ++i) pv *= base;
    return pv * unit_(unit_residue);
}

cplx UnitaryCharacter::eval(const TruncatedPAdic& x) const {
    if (x.zero) throw Error(Error::invalid_argument, "character of zero");
    return eval(x.v, x.unit);
}

BParam find_b(const DirichletChar& chi) {
    int64_t p = chi.p();
    if (chi.modulus().c != 2 || !chi.primitive())
        throw Error(Error::invalid_argument, "find_b needs a primitive character mod p^2");
    int64_t phi = p * (p - 1);
    int64_t q = p * p;

    // chi(1-p) = e^{2 pi i m / phi} must be a p-th root of unity: (p-1) | m.
    int64_t one_minus_p = ((1 - p) % q + q) % q;
    int64_t m = chi.index_of(one_minus_p);
    if (m == 0 || m % (p - 1) != 0)
        throw Error(Error::validation_failed, "no b exists: character not primitive mod p^2");
    int64_t b = (m / (p - 1)) % p;
    if (b == 0)
        throw Error(Error::validation_failed, "b = 0: character not primitive mod p^2");

    // exhaustive check over z in Z/p with exact indices:
    // chi(1 - p z) = e^{2 pi i b z / p} = roots_phi[b z (p-1)]
    for (int64_t z = 0; z < p; ++z) {
        int64_t u = ((1 - p * z) % q + q) % q;
        int64_t lhs = chi.index_of(u);
        int64_t rhs = mul_mod(mul_mod(b, z, phi), p - 1, phi);
        if (lhs != rhs)
            throw Error(Error::validation_failed, "b identity fails at z = " + std::to_string(z));
    }
    return BParam{b, inv_mod(b, p)};
}

EpsilonFactor epsilon_W_at_identity(const UnitaryCharacter& chi) {
    int c = chi.conductor_exp();
    int64_t p = chi.p();
    if (c < 2)
        throw Error(Error::unsupported,
                    "W(e) support is empty for conductor exponent < 2");

    // shell integral S_j = chi(p)^{-j} p^{-m} sum_{u mod p^m unit} chi(u) e^{2 pi i u / p^j},
    // m = max(c, j). Only j = c survives; neighbours are summed and checked.
    auto shell = [&](int j) -> cplx {
        int m = std::max(c, j);
        int64_t pm = checked_ipow(p, m, kModulusLimit);
        int64_t pj = checked_ipow(p, j, kModulusLimit);
        auto psi = shared_roots(pj);
        std::vector<cplx> terms;
        terms.reserve(size_t(pm));
        for (int64_t u = 1; u < pm; ++u) {
            if (u % p == 0) continue;
            terms.push_back(chi.unit_part()(u) * (*psi)[u % pj]);
        }
        cplx g = pairwise_sum(terms) / double(pm);
        cplx pv = 1.0;
        for (int i = 0; i < j; ++i) pv *= std::conj(chi.value_at_p());
        return pv * g;
    };

    cplx total = 0.0;
    for (int j = 2; j <= c + 2; ++j) {
        cplx s = shell(j);
        if (j != c && std::abs(s) > 1e-12)
            throw Error(Error::validation_failed,
                        "shell j=" + std::to_string(j) + " fails to vanish");
        total += s;
    }
    double want = std::pow(double(p), -0.5 * c);
    if (std::abs(std::abs(total) - want) > 1e-12 * std::max(1.0, want))
        throw Error(Error::validation_failed, "|W(e)| != p^{-c/2}");
    return EpsilonFactor{total};
}

}  // namespace wlab
