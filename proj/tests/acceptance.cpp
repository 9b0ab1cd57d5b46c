// Acceptance suite: every numbered criterion runs at its stated tolerance
// and prints one PASS/FAIL line. Exit status is nonzero when a selected
// criterion fails. Run all with no arguments or one with --criterion k.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <wlab.h>

#include "../src/mean_values.hpp"
#include "../src/whittaker_arch.hpp"
#include "../src/whittaker_local.hpp"

#ifndef WLAB_SOURCE_DIR
#define WLAB_SOURCE_DIR "."
#endif

using namespace wlab;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kForms = std::string(WLAB_SOURCE_DIR) + "/data/forms/";
int g_jobs = 4;

struct Outcome {
    bool pass = true;
    std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + what;
    }
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - t0)
        .count();
}

// 1. Local oracle vs closed forms: p in {3,5,7}, all primitive even chi mod
//    p^2, -4 <= v(y) <= 1, cells {0,1,2}, |oracle - closed| <= 1e-10, with
//    W(a(y)k_1) = p^{1/2} exactly on the b-classes. Runtime < 30 s.
Outcome criterion1() {
    Outcome o;
    auto t0 = Clock::now();
    double worst = 0;
    int64_t checked = 0;
    for (int64_t p : {3, 5, 7}) {
        for (const auto& chi : enumerate_chars(p, 2, true, true)) {
            PrincipalSeries ps(chi, 1.0);
            BParam bp = find_b(chi);
            for (int vy = -4; vy <= 1; ++vy) {
                for (int64_t u = 1; u < p * p; ++u) {
                    if (u % p == 0) continue;
                    auto y = TruncatedPAdic::from_unit(p, 5, vy, u);
                    for (int cell = 0; cell < 3; ++cell) {
                        WhittakerValue orc = jacquet_oracle(ps, {y, cell});
                        WhittakerValue cf = cell == 0   ? w_cell0(ps, y)
                                            : cell == 1 ? w_cell1(ps, y)
                                                        : w_diag(ps, y);
                        worst = std::max(worst, std::abs(orc.value - cf.value));
                        ++checked;
                        if (cell == 1 && vy == -2 && u % p == bp.b % p) {
                            note(o,
                                 std::abs(orc.value - cplx(std::sqrt(double(p)))) < 1e-10,
                                 "cell-1 value off the exact p^{1/2} at p=" +
                                     std::to_string(p));
                        }
                    }
                }
            }
        }
    }
    note(o, worst <= 1e-10, "worst |oracle - closed| = " + fmt_g17(worst));
    double dt = seconds_since(t0);
    note(o, dt < 30.0, "runtime " + fmt_g17(dt) + "s exceeds 30s");
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(checked) +
                " cells, worst " + fmt_g17(worst) + ", " + fmt_g17(dt) + "s";
    return o;
}

// 2. h table: h_exhaustive = p^{floor(c/2)/2} for p in {3,5}, c in {2,3,4}
//    within 1e-8; unramified-twist invariance for 5 seeded twists each.
Outcome criterion2() {
    Outcome o;
    Rng rng(20260810);
    for (int64_t p : {3, 5}) {
        for (int c : {2, 3, 4}) {
            DirichletChar chi(p, c, 1);
            PrincipalSeries ps(chi, 1.0);
            double closed = std::pow(double(p), 0.5 * (c / 2));
            HObservation h = h_scan(ps, g_jobs);
            note(o, std::abs(h.h_exhaustive - closed) <= 1e-8,
                 "h(" + std::to_string(p) + "," + std::to_string(c) + ") = " +
                     fmt_g17(h.h_exhaustive) + " vs " + fmt_g17(closed));
            for (int t = 0; t < 5; ++t) {
                cplx eta = std::polar(1.0, 2 * PI * rng.uniform());
                note(o, unramified_twist_invariance(ps, eta, 1e-8, g_jobs),
                     "twist breaks h at (" + std::to_string(p) + "," + std::to_string(c) +
                         ")");
            }
        }
    }
    return o;
}

// 3. |W(e)| = p^{-c/2} and |tau(chi)| = p^{c/2} for all primitive chi with
//    p^c <= 343 (odd p), tolerance 1e-10.
Outcome criterion3() {
    Outcome o;
    double worst_tau = 0, worst_we = 0;
    for (int64_t p = 3; p <= 343; p += 2) {
        if (!is_prime(p)) continue;
        for (int c = 1; checked_ipow(p, c, int64_t(1) << 40) <= 343; ++c) {
            for (const auto& chi : enumerate_chars(p, c, true, false)) {
                double q_half = std::pow(double(p), 0.5 * c);
                worst_tau = std::max(worst_tau, std::abs(std::abs(gauss_sum(chi)) - q_half));
                if (c >= 2) {
                    EpsilonFactor e = epsilon_W_at_identity(UnitaryCharacter(chi, 1.0));
                    worst_we =
                        std::max(worst_we, std::abs(std::abs(e.value) - 1.0 / q_half));
                }
            }
        }
    }
    note(o, worst_tau <= 1e-10, "worst | |tau| - p^{c/2} | = " + fmt_g17(worst_tau));
    note(o, worst_we <= 1e-10, "worst | |W(e)| - p^{-c/2} | = " + fmt_g17(worst_we));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("tau residual ") +
                fmt_g17(worst_tau) + ", W(e) residual " + fmt_g17(worst_we);
    return o;
}

// 4. find_b: the defining identity for all z in Z/p, all primitive even chi
//    mod p^2, p <= 13; b(conj chi) = -b(chi) within conjugate pairs.
Outcome criterion4() {
    Outcome o;
    for (int64_t p : {3, 5, 7, 11, 13}) {
        for (const auto& chi : enumerate_chars(p, 2, true, true)) {
            BParam bp = find_b(chi);  // throws unless the identity holds for every z
            note(o, bp.a * bp.b % p == 1, "inverse pair broken");
            BParam bc = find_b(chi.conj());
            note(o, (bp.b + bc.b) % p == 0,
                 "conjugation does not negate b at p = " + std::to_string(p));
        }
    }
    return o;
}

// 5. Global end to end at level 25: direct vs twisted within combined
//    certified bounds (< 1e-8) and |f(z_chi)| >= 0.95 sqrt(5) e^{-2 pi}.
//    Runtime < 10 s. Driven through the shared C surface.
Outcome criterion5() {
    Outcome o;
    auto t0 = Clock::now();
    for (const char* name : {"25.2.e.0.wform", "25.2.e.1.wform"}) {
        wlab_form* f = wlab_form_load((kForms + name).c_str());
        if (!f) {
            note(o, false, std::string("load: ") + wlab_last_error());
            continue;
        }
        int64_t b, a, zxn, zxd, zyn, zyd;
        note(o, wlab_special_point(f, &b, &a, &zxn, &zxd, &zyn, &zyd) == WLAB_OK,
             "special point");
        double dre, dim_, dbound;
        int64_t terms;
        note(o,
             wlab_form_eval(f, zxn, zxd, zyn, zyd, 4e-9, &dre, &dim_, &dbound, &terms) ==
                 WLAB_OK,
             "direct eval");
        double tre, tim, tbound;
        note(o,
             wlab_form_eval_twisted(f, 0, 1, 1, 1, 4e-9, &tre, &tim, &tbound) == WLAB_OK,
             "twisted eval");
        double direct = std::hypot(dre, dim_), twisted = std::hypot(tre, tim);
        double gap = std::abs(direct - twisted);
        note(o, gap <= dbound + tbound, "gap exceeds the certified bounds");
        note(o, gap < 1e-8, std::string(name) + ": |direct - twisted| = " + fmt_g17(gap));
        double floor_value = 0.95 * std::sqrt(5.0) * std::exp(-2 * PI);
        note(o, direct >= floor_value,
             std::string(name) + ": |f(z_chi)| = " + fmt_g17(direct) + " < " +
                 fmt_g17(floor_value));
        wlab_form_free(f);
    }
    double dt = seconds_since(t0);
    note(o, dt < 10.0, "runtime " + fmt_g17(dt) + "s exceeds 10s");
    o.detail += (o.detail.empty() ? "" : "; ") + fmt_g17(dt) + "s";
    return o;
}

// 6. Certificate consistency: scan max >= (2 pi e)^{-1} N^{1/4} at level 25.
Outcome criterion6() {
    Outcome o;
    wlab_form* f = wlab_form_load((kForms + "25.2.e.0.wform").c_str());
    if (!f) {
        note(o, false, wlab_last_error());
        return o;
    }
    double cert, mx, expn;
    note(o, wlab_certificate(f, &cert) == WLAB_OK, "certificate");
    note(o, wlab_supnorm_scan(f, 64, 64, 0, 1.0, 1, 1, g_jobs, &mx, &expn) == WLAB_OK,
         "scan");
    note(o, std::abs(cert - std::pow(25.0, 0.25) / (2 * PI * std::exp(1.0))) < 1e-15,
         "certificate value drifted");
    note(o, mx >= cert,
         "scan max " + fmt_g17(mx) + " below the certificate " + fmt_g17(cert));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("max ") + fmt_g17(mx) +
                " >= cert " + fmt_g17(cert) + ", exponent " + fmt_g17(expn);
    wlab_form_free(f);
    return o;
}

// 7. Archimedean exponents: discrete ratio/k^{1/4} within 1% of (2 pi)^{-1/4}
//    at k = 1000; K-Bessel fitted exponent over [20, 200] = 1/6 +- 0.02.
//    Runtime < 60 s.
Outcome criterion7() {
    Outcome o;
    auto t0 = Clock::now();
    double ratio = arch_ratio(ArchRepresentation::discrete_series(1000));
    double limit = std::pow(2 * PI, -0.25);
    double scaled = ratio / std::pow(1000.0, 0.25);
    note(o, scaled >= 0.6316 * 0.99 && scaled <= 0.6316 * 1.01,
         "discrete scaled ratio " + fmt_g17(scaled));
    FitResult fit = kbessel_exponent_fit(20, 200, 20, g_jobs);
    note(o, std::abs(fit.slope - 1.0 / 6.0) <= 0.02,
         "K-Bessel exponent " + fmt_g17(fit.slope));
    double dt = seconds_since(t0);
    note(o, dt < 60.0, "runtime " + fmt_g17(dt) + "s exceeds 60s");
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("scaled ") + fmt_g17(scaled) +
                " (limit " + fmt_g17(limit) + "), slope " + fmt_g17(fit.slope) + ", " +
                fmt_g17(dt) + "s";
    return o;
}

// 8. Weight-2 archimedean max: max_y y e^{-2 pi y} = 0.0585498 +- 1e-6 at
//    y = (2 pi)^{-1}.
Outcome criterion8() {
    Outcome o;
    double ymax = golden_max([](double y) { return y * std::exp(-2 * PI * y); }, 1e-6, 5.0);
    double vmax = ymax * std::exp(-2 * PI * ymax);
    note(o, std::abs(vmax - 0.0585498) <= 1e-6, "max value " + fmt_g17(vmax));
    note(o, std::abs(ymax - 1.0 / (2 * PI)) <= 1e-8, "argmax " + fmt_g17(ymax));
    o.detail = "max " + fmt_g17(vmax) + " at y = " + fmt_g17(ymax);
    return o;
}

// 9. Mean value at N = 25 with the complete ingested basis: domain average
//    of M_chi within [0.9, 1.1]/(4 pi), and M_chi(z_chi) >= |f(z_chi)|^2/(f,f)
//    with the right-hand side matching criterion 5.
Outcome criterion9() {
    Outcome o;
    BasisWithNorms basis = basis_with_norms(
        {load_form(kForms + "25.2.e.0.wform"), load_form(kForms + "25.2.e.1.wform")}, 20,
        g_jobs);
    note(o, basis.complete(), "basis incomplete against the dimension count");

    NormResult avg = mchi_domain_average(basis, 16, g_jobs);
    double lo = 0.9 / (4 * PI), hi = 1.1 / (4 * PI);
    note(o, avg.value >= lo && avg.value <= hi,
         "domain average " + fmt_g17(avg.value) + " outside [0.9, 1.1]/(4 pi) = [" +
             fmt_g17(lo) + ", " + fmt_g17(hi) + "] (exact value dim/vol = 2/(10 pi) = 0.8/(4 pi) at N = 25)");

    SpecialPoint sp = special_point(basis.forms[0].neben.locals()[0]);
    double v0 = abs_at(basis.forms[0], sp.z_chi, 1e-10);
    double single = v0 * v0 / basis.norms[0];
    MchiResult m = m_chi(sp.z_chi, basis);
    note(o, m.value >= single, "M_chi(z_chi) below the single-form contribution");
    note(o, std::abs(v0 - std::sqrt(5.0) * std::exp(-2 * PI)) < 1e-4,
         "z_chi value does not match criterion 5");
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("M_chi(z_chi) = ") +
                fmt_g17(m.value) + ", single form " + fmt_g17(single) + ", avg*4pi = " +
                fmt_g17(avg.value * 4 * PI);
    return o;
}

// 10. Wilton: some M <= 5^3 * 10 with |S(M, a/5)| >= 0.3 sqrt(M); fitted
//     upper exponent over seeded random x at most 0.6.
Outcome criterion10() {
    Outcome o;
    NewformData f = load_form(kForms + "25.2.e.0.wform");
    SpecialPoint sp = special_point(f.neben.locals()[0]);
    WiltonScan scan = wilton_lower_scan(f, Rat(sp.a, 5), 1250);
    note(o, scan.best_ratio >= 0.3,
         "best |S|/sqrt(M) = " + fmt_g17(scan.best_ratio) + " at M = " +
             std::to_string(scan.best_M));
    FitResult fit = wilton_upper_fit(f, 5000, 16, 20260810);
    note(o, fit.slope <= 0.6, "upper exponent " + fmt_g17(fit.slope));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("ratio ") +
                fmt_g17(scan.best_ratio) + " at M=" + std::to_string(scan.best_M) +
                ", upper slope " + fmt_g17(fit.slope);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) g_jobs = std::atoi(argv[++i]);
    }
    using Fn = Outcome (*)();
    Fn fns[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                criterion6, criterion7, criterion8, criterion9, criterion10};
    bool all_pass = true;
    for (int k = 1; k <= 10; ++k) {
        if (only && k != only) continue;
        Outcome o;
        try {
            o = fns[k - 1]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d: %s  %s\n", k, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 3;
}
