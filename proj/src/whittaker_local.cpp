#include "whittaker_local.hpp"

#include <cmath>

namespace wlab {

struct PrincipalSeries::Cache {
    // full-shell sums D(n) depend only on the unit part of chi, so twists of
    // the same series share `shells`; W(e) carries chi(p)-powers and is
    // cached per twist.
    struct ShellMap {
        std::mutex mutex;
        std::map<int, cplx> d;
    };
    std::shared_ptr<ShellMap> shells = std::make_shared<ShellMap>();
    std::mutex we_mutex;
    std::optional<cplx> w_at_e;
};

PrincipalSeries::PrincipalSeries(DirichletChar chi2_unit, cplx chi2_at_p, cplx chi1_at_p) {
    if (chi2_unit.cond_exp() < 1)
        throw Error(Error::invalid_argument, "chi2 must be ramified");
    int64_t p = chi2_unit.p();
    DirichletChar trivial(p, 1, 0);
    chi1_ = UnitaryCharacter(trivial, chi1_at_p);
    chi2_ = UnitaryCharacter(chi2_unit, chi2_at_p);
    chi_ = UnitaryCharacter(chi2_unit, std::conj(chi1_at_p) * chi2_at_p);
    cache_ = std::make_shared<Cache>();
}

PrincipalSeries PrincipalSeries::twisted(cplx eta_at_p) const {
    PrincipalSeries t(chi2_.unit_part(), chi2_.value_at_p() * eta_at_p,
                      chi1_.value_at_p() * eta_at_p);
    t.cache_->shells = cache_->shells;
    return t;
}

namespace {

// e^{-2 pi i (u mod p^j) / p^j} with incremental stepping over an arithmetic
// progression of u; exact renormalization every 1024 steps keeps drift at the
// rounding floor while staying deterministic.
class PsiBarWalker {
public:
    PsiBarWalker(int64_t pj, int64_t u0, int64_t step) : pj_(pj), u_(u0 % pj), step_(step % pj) {
        if (u_ < 0) u_ += pj;
        if (step_ < 0) step_ += pj;
        cur_ = exact(u_);
        factor_ = exact(step_);
    }
    cplx value() const { return cur_; }
    void advance() {
        u_ = (u_ + step_) % pj_;
        if (++since_renorm_ == 1024) {
            cur_ = exact(u_);
            since_renorm_ = 0;
        } else {
            cur_ *= factor_;
        }
    }

private:
    cplx exact(int64_t u) const {
        double t = -2.0 * PI * double(u) / double(pj_);
        return cplx(std::cos(t), std::sin(t));
    }
    int64_t pj_, u_, step_;
    cplx cur_, factor_;
    int since_renorm_ = 0;
};

// D(n) = p^{-M} sum_{u unit mod p^M} chi_unit(-u) psibar(p^n u),  M = max(c, -n).
// Vanishes for n != -c; the n = -c value is p^{-c} tau(conj-normalized chi).
cplx full_shell(const UnitaryCharacter& chi, int n) {
    int64_t p = chi.p();
    int c = chi.conductor_exp();
    int M = std::max(c, -n);
    int64_t pM = checked_ipow(p, M, kModulusLimit);
    const DirichletChar& cu = chi.unit_part();

    PairwiseAcc<cplx> acc;
    if (n >= 0) {
        // psibar = 1 on the shell
        for (int64_t u = 1; u < pM; ++u) {
            if (u % p == 0) continue;
            acc.add(cu(-u));
        }
    } else {
        int64_t pj = checked_ipow(p, -n, kModulusLimit);
        PsiBarWalker psi(pj, 1, 1);
        for (int64_t u = 1; u < pM; ++u, psi.advance()) {
            if (u % p == 0) continue;
            acc.add(cu(-u) * psi.value());
        }
    }
    return acc.total() / double(pM);
}

cplx cached_shell(const PrincipalSeries& ps, int n) {
    auto& shells = *ps.cache().shells;
    {
        std::lock_guard<std::mutex> lock(shells.mutex);
        auto it = shells.d.find(n);
        if (it != shells.d.end()) return it->second;
    }
    cplx v = full_shell(ps.chi(), n);
    std::lock_guard<std::mutex> lock(shells.mutex);
    shells.d[n] = v;
    return v;
}

cplx vp_pow(const UnitaryCharacter& chi, int n) {
    cplx base = n >= 0 ? chi.value_at_p() : std::conj(chi.value_at_p());
    cplx r = 1.0;
    for (int i = 0; i < std::abs(n); ++i) r *= base;
    return r;
}

// sum over full shells n <= hi of vp^n D(n). Only n = -c survives; shells at
// the truncation margin are summed explicitly and must vanish.
cplx full_shell_tail(const PrincipalSeries& ps, int hi) {
    int c = ps.conductor_exp();
    cplx total = 0.0;
    int lo = -c - 3;
    for (int n = hi; n >= lo; --n) {
        cplx d = cached_shell(ps, n);
        if (n != -c && std::abs(d) > 1e-8)
            throw Error(Error::convergence_failure,
                        "shell n=" + std::to_string(n) + " fails to vanish: |D| = " +
                            std::to_string(std::abs(d)));
        total += vp_pow(ps.chi(), n) * d;
    }
    // Shells below the cutoff factor as (unit-coset sum) x (full exponential
    // sum over p^{-n-c} residues); the second factor is a complete root sum,
    // identically zero, so the truncation is exact once the checked shells
    // vanish.
    return total;
}

cplx w_at_e(const PrincipalSeries& ps) {
    auto& cache = ps.cache();
    {
        std::lock_guard<std::mutex> lock(cache.we_mutex);
        if (cache.w_at_e) return *cache.w_at_e;
    }
    cplx v = full_shell_tail(ps, -ps.conductor_exp());
    if (std::abs(v) < 1e-14)
        throw Error(Error::internal, "W(e) vanished; newvector normalization impossible");
    std::lock_guard<std::mutex> lock(cache.we_mutex);
    cache.w_at_e = v;
    return v;
}

// Raw W(a(y) R), R = [[p^a,0],[p^g,1]] (g < 0: gamma = 0). See header for the
// shell decomposition; for g < c exactly one shell n = V - g contributes,
// restricted to the unit coset u = -U mod p^{c-g}.
cplx oracle_raw(const PrincipalSeries& ps, const TruncatedPAdic& y, int a, int g) {
    if (y.zero) throw Error(Error::invalid_argument, "y must be nonzero");
    int64_t p = ps.p();
    int c = ps.conductor_exp();
    if (y.p != p) throw Error(Error::invalid_argument, "y lives at the wrong prime");
    if (y.K < c) throw Error(Error::precision_loss, "y needs precision K >= c");

    int V = y.v + a;
    double front = std::pow(double(p), -0.5 * V);
    const UnitaryCharacter& chi = ps.chi();

    if (g < 0 || g >= c) {
        return front * full_shell_tail(ps, V - c);
    }

    // single partial shell
    int n = V - g;
    int M = std::max(c, -n);
    int64_t pM = checked_ipow(p, M, kModulusLimit);
    int64_t step = checked_ipow(p, c - g, kModulusLimit);
    int64_t U = y.unit_mod(std::min(y.K, M));  // unit of y (and of y p^a)
    int64_t u0 = ((-U) % pM + pM) % pM;

    PairwiseAcc<cplx> acc;
    const DirichletChar& cu = chi.unit_part();
    if (n >= 0) {
        for (int64_t t = 0, u = u0; t < pM / step; ++t, u = (u + step) % pM) acc.add(cu(-u));
    } else {
        int64_t pj = checked_ipow(p, -n, kModulusLimit);
        PsiBarWalker psi(pj, u0, step);
        for (int64_t t = 0, u = u0; t < pM / step; ++t, u = (u + step) % pM, psi.advance())
            acc.add(cu(-u) * psi.value());
    }
    return front * vp_pow(chi, n) * acc.total() / double(pM);
}

cplx twist_factor(const PrincipalSeries& ps, const TruncatedPAdic& y, int a) {
    // chi1(det(a(y) R)) = chi1(p)^{v(y)+a} for unramified chi1
    return vp_pow(ps.chi1(), y.v + a);
}

void cell_rep(int i, int* a, int* g) {
    switch (i) {
        case 0: *a = 0; *g = 0; break;
        case 1: *a = 1; *g = 1; break;
        case 2: *a = 0; *g = -1; break;
        default: throw Error(Error::invalid_argument, "cell index must be 0, 1 or 2");
    }
}

}  // namespace

cplx oracle_matrix(const PrincipalSeries& ps, const TruncatedPAdic& y, int a, int g) {
    return twist_factor(ps, y, a) * oracle_raw(ps, y, a, g) / w_at_e(ps);
}

WhittakerValue jacquet_oracle(const PrincipalSeries& ps, const WhittakerCell& cell) {
    if (ps.conductor_exp() < 2)
        throw Error(Error::unsupported, "oracle needs conductor exponent >= 2");
    int a, g;
    cell_rep(cell.i, &a, &g);
    WhittakerValue out;
    out.value = oracle_matrix(ps, cell.y, a, g);
    out.nonzero = std::abs(out.value) > 1e-12;
    out.provenance =
        ps.conductor_exp() == 2 ? Provenance::oracle : Provenance::oracle_extrapolated;
    return out;
}

WhittakerValue w_diag(const PrincipalSeries& ps, const TruncatedPAdic& y) {
    WhittakerValue out;
    out.provenance = Provenance::closed_form;
    if (y.zero) throw Error(Error::invalid_argument, "y must be nonzero");
    if (y.v < 0) return out;
    out.value = vp_pow(ps.chi1(), y.v) * std::pow(double(ps.p()), -0.5 * y.v);
    out.nonzero = true;
    return out;
}

WhittakerValue w_cell0(const PrincipalSeries& ps, const TruncatedPAdic& y) {
    int c = ps.conductor_exp();
    if (c != 2)
        throw Error(Error::unsupported, "cell-0 closed form is pinned at conductor p^2");
    WhittakerValue out;
    out.provenance = Provenance::closed_form;
    if (y.zero) throw Error(Error::invalid_argument, "y must be nonzero");
    if (y.v < -c) return out;

    int64_t p = ps.p();
    const UnitaryCharacter& chi = ps.chi();
    cplx tau = gauss_sum(chi.unit_part());
    Rat fr = fractional_part(y);
    cplx psi_y = std::polar(1.0, 2.0 * PI * fr.dbl());
    cplx val = std::pow(double(p), -0.5 * y.v) * chi.eval(y) * psi_y *
               vp_pow(chi, c) / tau;
    out.value = twist_factor(ps, y, 0) * val;
    out.nonzero = true;
    return out;
}

WhittakerValue w_cell1(const PrincipalSeries& ps, const TruncatedPAdic& y) {
    int c = ps.conductor_exp();
    if (c != 2)
        throw Error(Error::unsupported, "cell-1 closed form is pinned at conductor p^2");
    WhittakerValue out;
    out.provenance = Provenance::closed_form;
    if (y.zero) throw Error(Error::invalid_argument, "y must be nonzero");
    int64_t p = ps.p();
    if (y.v != -2) return out;
    BParam bp = find_b(ps.chi().unit_part());
    // support: p^2 y = b mod p
    if (y.unit_mod(1) % p != bp.b % p) return out;
    out.value = twist_factor(ps, y, 1) * std::sqrt(double(p));
    out.nonzero = true;
    return out;
}

double h_invariant(const PrincipalSeries& ps, HMethod method, int jobs) {
    int c = ps.conductor_exp();
    if (method == HMethod::closed_form) {
        return std::pow(double(ps.p()), 0.5 * (c / 2));
    }
    HObservation obs = h_scan(ps, jobs);
    if (std::abs(obs.h_exhaustive - obs.h_closed) > 1e-8)
        throw Error(Error::validation_failed,
                    "exhaustive h disagrees with closed form: " +
                        std::to_string(obs.h_exhaustive) + " vs " + std::to_string(obs.h_closed));
    return obs.h_exhaustive;
}

HObservation h_scan(const PrincipalSeries& ps, int jobs) {
    int64_t p = ps.p();
    int c = ps.conductor_exp();
    if (c < 2) throw Error(Error::unsupported, "h scan needs conductor exponent >= 2");
    int K = c + 3;
    int64_t pc = checked_ipow(p, c, kModulusLimit);

    HObservation obs;
    obs.h_closed = std::pow(double(p), 0.5 * (c / 2));

    // values depend on y only through v(y) and the unit class mod p^c
    // (right I_c-equivariance), so this search is finite and complete over
    // the stated window.
    struct Pt { int vy; int64_t u; };
    std::vector<Pt> pts;
    for (int vy = -(c + 2); vy <= 2; ++vy)
        for (int64_t u = 1; u < pc; ++u)
            if (u % p != 0) pts.push_back({vy, u});

    struct Best { double m = -1; int cell = -1; };
    std::vector<Best> best(pts.size());
    parallel_for(pts.size(), jobs, [&](size_t t) {
        TruncatedPAdic y = TruncatedPAdic::from_unit(p, K, pts[t].vy, pts[t].u);
        for (int i = 0; i <= c; ++i) {
            int g = (i == c) ? -1 : i;  // [[1,0],[p^i,1]]; i = c lies in I_c
            double m = std::abs(oracle_matrix(ps, y, 0, g));
            if (m > best[t].m) best[t] = {m, i};
        }
    });
    for (size_t t = 0; t < pts.size(); ++t) {
        if (best[t].m > obs.h_exhaustive) {
            obs.h_exhaustive = best[t].m;
            obs.argmax_cell = best[t].cell;
            obs.argmax_vy = pts[t].vy;
            obs.argmax_unit = pts[t].u;
        }
    }
    return obs;
}

bool unramified_twist_invariance(const PrincipalSeries& ps, cplx eta_at_p, double tol,
                                 int jobs) {
    if (std::abs(std::abs(eta_at_p) - 1.0) > 1e-12)
        throw Error(Error::invalid_argument, "twist must be unimodular");
    double h0 = h_scan(ps, jobs).h_exhaustive;
    double h1 = h_scan(ps.twisted(eta_at_p), jobs).h_exhaustive;
    return std::abs(h0 - h1) <= tol;
}

std::vector<LocalRow> run_local_table(int64_t p, int c, bool all_chars, bool with_oracle,
                                      int jobs) {
    auto chars = enumerate_chars(p, c, /*primitive_only=*/true, /*even_only=*/false);
    if (!all_chars && !chars.empty()) chars.resize(1);

    struct Task {
        DirichletChar chi;
        int vy;
        int64_t u;
    };
    std::vector<Task> tasks;
    int64_t pc = checked_ipow(p, c, kModulusLimit);
    for (const auto& chi : chars)
        for (int vy = -(c + 2); vy <= 2; ++vy)
            for (int64_t u = 1; u < pc; ++u)
                if (u % p != 0) tasks.push_back({chi, vy, u});

    int ncell = (c == 2) ? 3 : c + 1;
    std::vector<LocalRow> rows(tasks.size() * size_t(ncell));
    parallel_for(tasks.size(), jobs, [&](size_t t) {
        const Task& task = tasks[t];
        PrincipalSeries ps(task.chi, 1.0);
        TruncatedPAdic y = TruncatedPAdic::from_unit(p, c + 3, task.vy, task.u);
        for (int j = 0; j < ncell; ++j) {
            WhittakerValue v;
            if (c == 2) {
                if (with_oracle) {
                    v = jacquet_oracle(ps, WhittakerCell{y, j});
                } else {
                    v = (j == 0) ? w_cell0(ps, y) : (j == 1) ? w_cell1(ps, y) : w_diag(ps, y);
                }
            } else {
                int g = (j == c) ? -1 : j;
                v.value = oracle_matrix(ps, y, 0, g);
                v.nonzero = std::abs(v.value) > 1e-12;
                v.provenance = Provenance::oracle_extrapolated;
            }
            LocalRow& r = rows[t * size_t(ncell) + size_t(j)];
            r.p = p;
            r.c = c;
            r.chi_id = task.chi.id();
            r.cell = j;
            r.vy = task.vy;
            r.unit_class = task.u;
            r.abs_w = std::abs(v.value);
            r.phase = std::arg(v.value);
            const char* prov[] = {"closed_form", "oracle", "oracle_extrapolated"};
            r.provenance = prov[int(v.provenance)];
        }
    });
    return rows;
}

}  // namespace wlab
