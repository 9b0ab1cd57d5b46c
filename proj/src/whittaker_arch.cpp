#include "whittaker_arch.hpp"

#include <cmath>

namespace wlab {

ArchRepresentation ArchRepresentation::discrete_series(int k) {
    if (k < 2 || k % 2 != 0)
        throw Error(Error::invalid_argument, "discrete series weight must be even and >= 2");
    return {Kind::discrete, k, 0};
}
ArchRepresentation ArchRepresentation::principal(double r) {
    if (!(r > 0) || r > 500)
        throw Error(Error::invalid_argument, "spectral parameter must lie in (0, 500]");
    return {Kind::principal_trivial, 0, r};
}
ArchRepresentation ArchRepresentation::principal_nontrivial(double r) {
    if (!(r >= 10) || r > 300)
        throw Error(Error::invalid_argument, "nontrivial-central r must lie in [10, 300]");
    return {Kind::principal_nontrivial, 0, r};
}

double golden_max(const std::function<double(double)>& f, double a, double b, double xtol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

namespace {

// Downward RK4 over u'' = q1(x) u' + q0(x) u from x_hi to x_lo with an
// x-dependent step. `observe` sees every accepted node (x, u).
template <typename Q1, typename Q0, typename Obs>
void integrate_down(double x_hi, double x_lo, double u0, double v0, Q1 q1, Q0 q0,
                    const std::function<double(double)>& step_at, Obs&& observe) {
    double x = x_hi, u = u0, v = v0;
    observe(x, u);
    while (x > x_lo) {
        double h = std::min(step_at(x), x - x_lo);
        if (h <= 0) break;
        auto f = [&](double xx, double uu, double vv, double* du, double* dv) {
            *du = vv;
            *dv = q1(xx) * vv + q0(xx) * uu;
        };
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        f(x, u, v, &k1u, &k1v);
        f(x - h / 2, u - h / 2 * k1u, v - h / 2 * k1v, &k2u, &k2v);
        f(x - h / 2, u - h / 2 * k2u, v - h / 2 * k2v, &k3u, &k3v);
        f(x - h, u - h * k3u, v - h * k3v, &k4u, &k4v);
        u -= h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v -= h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        x -= h;
        observe(x, u);
    }
}

// ---- scaled K-Bessel ----
// H(x) := e^x K_{ir}(x) satisfies H'' = (2 - 1/x) H' + (1/x - r^2/x^2) H.
// Seed from K_ir(x) ~ sqrt(pi/2x) e^{-x} sum a_s, a_s = a_{s-1} *
// (-(4r^2 + (2s-1)^2)) / (8 x s), valid for x >> r^2.

struct SeriesSeed {
    double u, v;  // H and H'
};

SeriesSeed kbessel_seed(double r, double x) {
    double a = 1.0, as = 1.0, das = 0.0;
    for (int s = 1; s < 60; ++s) {
        a *= -(4 * r * r + (2 * s - 1) * (2 * s - 1)) / (8 * x * s);
        as += a;
        das += -s * a / x;
        if (std::abs(a) < 1e-18 * std::abs(as)) break;
    }
    double pref = std::sqrt(PI / (2 * x));
    // H = pref * A, H' = pref * (A' - A/(2x))
    return {pref * as, pref * (das - as / (2 * x))};
}

struct KRun {
    double log_max = 0;  // log of max_x x^{1/2} e^{pi r/2} K_{ir}(x)
    double xmax = 0;
};

KRun kbessel_run(double r, double refine) {
    double x_hi = std::max(1.5 * r * r, 60.0);
    double scan_hi = r + 9 * std::cbrt(std::max(r, 1.0)) + 4;
    double x_lo = std::max(0.25, r - 10 * std::cbrt(r));
    auto seed = kbessel_seed(r, x_hi);

    // H carries e^{x - pi r/2}-sized values through the transition range;
    // compare F(x) = x^{1/2} K~ = x^{1/2} H e^{pi r/2 - x} in the log domain.
    auto step_at = [&](double x) {
        // in-window steps small enough that the parabolic vertex through
        // grid nodes has O(h^3) error below the 1e-8 refinement budget
        double osc = (x < r) ? std::sqrt(r * r - x * x) / x : 0.0;
        // small r sharpens the peak, so the in-window parabola needs finer
        // nodes there to stay under the 1e-8 refinement budget
        double h = r < 4 ? 0.0005 : 0.0015;
        if (osc > 1) h /= osc;
        // approach region: the decaying solution varies at rate ~ r^2/(2x^2),
        // so steps may grow quadratically while keeping h * rate fixed
        if (x > scan_hi) h = std::min(0.25, std::max(0.01, 2e-3 * x * x / (r * r)));
        return h / refine;
    };

    std::vector<double> xs, lf;
    integrate_down(x_hi, x_lo, seed.u, seed.v,
                   [&](double x) { return 2.0 - 1.0 / x; },
                   [&](double x) { return 1.0 / x - r * r / (x * x); },
                   step_at, [&](double x, double u) {
                       if (x > scan_hi || x <= 0) return;
                       xs.push_back(x);
                       lf.push_back(0.5 * std::log(x) + std::log(std::abs(u)) + PI * r / 2 - x);
                   });
    if (xs.size() < 3)
        throw Error(Error::convergence_failure, "empty K-Bessel scan window");
    size_t ib = 1;
    for (size_t i = 1; i + 1 < xs.size(); ++i)
        if (lf[i] > lf[ib]) ib = i;

    KRun run;
    run.log_max = lf[ib];
    run.xmax = xs[ib];
    // parabola through the bracketing nodes sharpens the grid maximum
    double x0 = xs[ib - 1], x1 = xs[ib], x2 = xs[ib + 1];
    double f0 = lf[ib - 1], f1 = lf[ib], f2 = lf[ib + 1];
    double d21 = (f2 - f1) / (x2 - x1), d10 = (f1 - f0) / (x1 - x0);
    double curv = 2.0 * (d21 - d10) / (x2 - x0);
    if (curv < 0) {
        double xv = 0.5 * (x0 + x1) - d10 / curv;
        if (xv > std::min(x0, x2) && xv < std::max(x0, x2)) {
            double l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
            double l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
            double l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
            run.log_max = f0 * l0 + f1 * l1 + f2 * l2;
            run.xmax = xv;
        }
    }
    return run;
}

}  // namespace

ScaledMax kbessel_scaled_max(double r) {
    if (!(r > 0) || r > 500)
        throw Error(Error::invalid_argument, "spectral parameter must lie in (0, 500]");
    KRun a = kbessel_run(r, 1.0);
    KRun b = kbessel_run(r, 2.0);
    double va = std::exp(a.log_max), vb = std::exp(b.log_max);
    if (std::abs(va - vb) > 1e-8 * std::abs(vb))
        throw Error(Error::convergence_failure,
                    "K-Bessel max failed to converge under step refinement: " +
                        fmt_g17(va) + " vs " + fmt_g17(vb) + " at x = " + fmt_g17(a.xmax) +
                        ", " + fmt_g17(b.xmax));
    return {vb, b.xmax};
}

double arch_ratio(const ArchRepresentation& rep) {
    using Kind = ArchRepresentation::Kind;
    switch (rep.kind) {
        case Kind::discrete: {
            double k = rep.weight;
            // max|W| = (k/4pi)^{k/2} e^{-k/2}, (W,W) = (4pi)^{-k} Gamma(k)
            double log_max = 0.5 * k * (std::log(k / (4 * PI)) - 1.0);
            double log_norm = -k * std::log(4 * PI) + std::lgamma(k);
            return std::exp(log_max - 0.5 * log_norm);
        }
        case Kind::principal_trivial: {
            // W(a(y)) = y^{1/2} K_{ir}(2 pi y): max_y |W| = (2pi)^{-1/2} max_x x^{1/2} K_{ir}(x).
            // (W,W) = (1/4) Gamma_R(1+2ir) Gamma_R(1-2ir) = 1 / (4 cosh(pi r)).
            ScaledMax m = kbessel_scaled_max(rep.r);
            // ratio = (2pi)^{-1/2} m e^{-pi r/2} * 2 sqrt(cosh pi r)
            return m.value / std::sqrt(2 * PI) * std::sqrt(2.0) *
                   std::sqrt(1.0 + std::exp(-2 * PI * rep.r));
        }
        case Kind::principal_nontrivial: {
            NontrivialData d = whittaker_half_ir(rep.r);
            return d.max_abs / std::sqrt(d.norm);
        }
    }
    throw Error(Error::internal, "unreachable");
}

namespace {

// ---- scaled W_{1/2, ir} ----
// H(z) := e^{z/2} W_{1/2,ir}(z) satisfies H'' - H' + (k/z + (1/4+r^2)/z^2) H = 0
// with k = 1/2, i.e. H'' = H' - (k/z + (1/4+r^2)/z^2) H.
// Seed: W ~ e^{-z/2} z^k sum_s c_s (-z)^{-s} with
// c_s = c_{s-1} * ((s-1)^2 + r^2) / s  (Pochhammer product for mu = ir, k = 1/2).

SeriesSeed whittaker_seed(double r, double z, double scale) {
    const double k = 0.5;
    double c = 1.0, S = 1.0, dS = 0.0;
    for (int s = 1; s < 80; ++s) {
        double js = s - 1;
        c *= (js * js + r * r) / s;
        double term = c * std::pow(-z, -double(s));
        S += term;
        dS += -double(s) * term / z;
        if (std::abs(term) < 1e-18 * std::abs(S)) break;
    }
    double zk = std::pow(z, k) * scale;
    // H = z^k S * scale, H' = scale (k z^{k-1} S + z^k S')
    return {zk * S, scale * (k * std::pow(z, k - 1) * S + zk * dS)};
}

struct WRun {
    double max_abs = 0, zmax = 0;
    double norm = 0, norm_err = 0;
};

WRun whittaker_run(double r, double refine) {
    double z_hi = std::max(1.5 * r * r, 60.0);
    double z_t = 1.0 + 2 * std::sqrt(0.25 + r * r + 0.25);  // turning point of the ODE
    double scan_hi = z_t + 9 * std::cbrt(4 * r) + 4;
    double z_lo = 1e-3;
    // W~ = H e^{pi r/2 - z/2}, assembled in the log domain
    double log_pref = PI * r / 2;
    auto seed = whittaker_seed(r, z_hi, 1.0);

    auto q1 = [](double) { return 1.0; };
    auto q0 = [&](double z) { return -(0.5 / z + (0.25 + r * r) / (z * z)); };
    auto step_at = [&](double z) {
        double q = 0.25 - 0.5 / z - (0.25 + r * r) / (z * z);
        double osc = q < 0 ? std::sqrt(-q) : 0.0;
        // trapezoid accumulation of the norm needs (osc*h)^2/12 below 1e-8
        double h = 0.0015;
        if (osc > 1) h = std::min(h, 4e-4 / osc);
        if (z > scan_hi) h = std::min(0.25, std::max(0.01, 2e-3 * z * z / (r * r)));
        return h / refine;
    };

    // W~(z) = H(z) e^{pi r/2 - z/2}; the norm integral int |W~|^2 dz/z
    // accumulates by trapezoid on the fine steps, the max over the window
    // sharpens by a parabola through the best node's neighbours.
    WRun run;
    double prev_z = 0, prev_f2 = 0;
    bool have_prev = false;
    double acc = 0, env_small = 0;
    std::vector<double> zs, lw_win;
    integrate_down(z_hi, z_lo, seed.u, seed.v, q1, q0, step_at, [&](double z, double u) {
        double lw = std::log(std::abs(u) + 1e-320) + log_pref - z / 2;
        if (z <= scan_hi) {
            zs.push_back(z);
            lw_win.push_back(lw);
        }
        double w = std::exp(lw);
        double f2 = w * w / z;
        if (have_prev) acc += 0.5 * (prev_f2 + f2) * (prev_z - z);
        if (z < 50 * z_lo) env_small = std::max(env_small, f2);
        prev_z = z;
        prev_f2 = f2;
        have_prev = true;
    });
    if (zs.size() < 3) throw Error(Error::convergence_failure, "empty Whittaker scan window");
    size_t ib = 1;
    for (size_t i = 1; i + 1 < zs.size(); ++i)
        if (lw_win[i] > lw_win[ib]) ib = i;
    double best = lw_win[ib], bz = zs[ib];
    {
        double x0 = zs[ib - 1], x1 = zs[ib], x2 = zs[ib + 1];
        double f0 = lw_win[ib - 1], f1 = lw_win[ib], f2 = lw_win[ib + 1];
        double d21 = (f2 - f1) / (x2 - x1), d10 = (f1 - f0) / (x1 - x0);
        double curv = 2.0 * (d21 - d10) / (x2 - x0);
        if (curv < 0) {
            double xv = 0.5 * (x0 + x1) - d10 / curv;
            if (xv > std::min(x0, x2) && xv < std::max(x0, x2)) {
                double l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
                double l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
                double l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
                best = f0 * l0 + f1 * l1 + f2 * l2;
                bz = xv;
            }
        }
    }
    run.max_abs = std::exp(best);
    run.zmax = bz;
    run.norm = acc;
    // below z_lo the integrand is O(z): bound the dropped tail by the local
    // envelope times the cut
    run.norm_err = 3.0 * env_small * z_lo;
    return run;
}

}  // namespace

NontrivialData whittaker_half_ir(double r) {
    if (!(r >= 10) || r > 300)
        throw Error(Error::invalid_argument, "nontrivial-central r must lie in [10, 300]");
    WRun a = whittaker_run(r, 1.0);
    WRun b = whittaker_run(r, 2.0);
    if (std::abs(a.max_abs - b.max_abs) > 1e-8 * b.max_abs)
        throw Error(Error::convergence_failure, "W_{1/2,ir} max failed to converge");
    if (std::abs(a.norm - b.norm) > 1e-8 * b.norm + b.norm_err)
        throw Error(Error::convergence_failure, "W_{1/2,ir} norm failed to converge");
    return {b.max_abs, b.zmax, b.norm, b.norm_err};
}

FitResult kbessel_exponent_fit(double r_lo, double r_hi, int npts, int jobs) {
    if (npts < 2 || !(r_lo > 0) || !(r_hi > r_lo))
        throw Error(Error::invalid_argument, "bad fit grid");
    std::vector<double> lr(npts), lm(npts);
    parallel_for(size_t(npts), jobs, [&](size_t i) {
        double t = double(i) / (npts - 1);
        double r = r_lo * std::pow(r_hi / r_lo, t);
        // max_y y^{1/2} K~_{ir}(y): same engine, argument unscaled
        ScaledMax m = kbessel_scaled_max(r);
        lr[i] = std::log(r);
        lm[i] = std::log(m.value);
    });
    return least_squares(lr, lm);
}

NontrivialFits nontrivial_central_fits(double r_lo, double r_hi, int npts, int jobs) {
    if (npts < 2) throw Error(Error::invalid_argument, "bad fit grid");
    std::vector<double> lr(npts), lmax(npts), lnorm(npts);
    parallel_for(size_t(npts), jobs, [&](size_t i) {
        double t = double(i) / (npts - 1);
        double r = r_lo * std::pow(r_hi / r_lo, t);
        NontrivialData d = whittaker_half_ir(r);
        lr[i] = std::log(r);
        lmax[i] = std::log(d.max_abs);
        lnorm[i] = std::log(d.norm);
    });
    NontrivialFits out{least_squares(lr, lmax), least_squares(lr, lnorm), 0.0};
    out.net_exponent = out.max_fit.slope - 0.5 * out.norm_fit.slope;
    return out;
}

std::vector<ArchRow> run_arch_table(ArchRepresentation::Kind kind, double lo, double hi,
                                    int npts, int jobs) {
    using Kind = ArchRepresentation::Kind;
    std::vector<ArchRow> rows;
    rows.resize(size_t(npts));
    parallel_for(size_t(npts), jobs, [&](size_t i) {
        double t = npts == 1 ? 0.0 : double(i) / (npts - 1);
        double param = lo * std::pow(hi / lo, t);
        ArchRow& row = rows[i];
        row.parameter = param;
        switch (kind) {
            case Kind::discrete: {
                int k = std::max(2, 2 * int(std::lround(param / 2)));
                row.parameter = k;
                ArchRepresentation rep = ArchRepresentation::discrete_series(k);
                row.ratio = arch_ratio(rep);
                row.max_abs = std::exp(0.5 * k * (std::log(k / (4 * PI)) - 1.0));
                row.norm = std::exp(-k * std::log(4 * PI) + std::lgamma(double(k)));
                break;
            }
            case Kind::principal_trivial: {
                ScaledMax m = kbessel_scaled_max(param);
                row.max_abs = m.value;
                row.norm = 0.25 * (1.0 + std::exp(-2 * PI * param));  // e^{pi r}-scaled
                row.ratio = arch_ratio(ArchRepresentation::principal(param));
                break;
            }
            case Kind::principal_nontrivial: {
                NontrivialData d = whittaker_half_ir(param);
                row.max_abs = d.max_abs;
                row.norm = d.norm;
                row.ratio = d.max_abs / std::sqrt(d.norm);
                break;
            }
        }
    });
    return rows;
}

}  // namespace wlab
