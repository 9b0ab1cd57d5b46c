#include "modforms.hpp"

#include <cmath>

namespace wlab {

namespace {

// e(n x) for rational x via a shared root table when the denominator is
// sane; incremental multiplication otherwise.
class PhaseWalker {
public:
    PhaseWalker(const Rat& x, int64_t stride = 1) {
        if (x.den <= (1 << 22)) {
            table_ = shared_roots(x.den);
            idx_ = 0;
            step_ = ((x.num % x.den) + x.den) % x.den;
            step_ = mul_mod(step_, stride % x.den, x.den);
        } else {
            cur_ = 1.0;
            factor_ = std::polar(1.0, 2 * PI * x.dbl() * double(stride));
        }
    }
    cplx at_next() {  // value at n = k*stride for k = 1, 2, ... per call
        if (table_) {
            idx_ = (idx_ + step_) % table_->order();
            return (*table_)[idx_];
        }
        cur_ *= factor_;
        if (++since_ == 1024) {
            since_ = 0;
            // drift control: re-polarize
            double ang = std::arg(cur_);
            cur_ = std::polar(1.0, ang);
        }
        return cur_;
    }

private:
    std::shared_ptr<const RootTable> table_;
    int64_t idx_ = 0, step_ = 0;
    cplx cur_{1.0}, factor_{1.0};
    int since_ = 0;
};

// e^{-2 pi n y} walker with exact renormalization every 512 steps
class RadialWalker {
public:
    RadialWalker(double y, int64_t stride = 1) : y_(y), stride_(stride) {
        factor_ = std::exp(-2 * PI * y * double(stride));
        cur_ = 1.0;
        n_ = 0;
    }
    double at_next() {
        n_ += stride_;
        cur_ *= factor_;
        if (++since_ == 512) {
            since_ = 0;
            cur_ = std::exp(-2 * PI * y_ * double(n_));
        }
        return cur_;
    }

private:
    double y_, factor_, cur_;
    int64_t stride_, n_ = 0;
    int since_ = 0;
};

}  // namespace

double eval_tail_bound(double y, int64_t M) {
    // tau(n) <= n, so tail <= y sum_{n>M} n^{3/2} x^n with x = e^{-2 pi y};
    // the ratio n^{3/2} x^n is dominated by rho = ((M+2)/(M+1))^{3/2} x.
    double x = std::exp(-2 * PI * y);
    double rho = std::pow(double(M + 2) / double(M + 1), 1.5) * x;
    if (rho >= 1.0) return HUGE_VAL;
    double lead = y * std::pow(double(M + 1), 1.5) * std::pow(x, double(M + 1));
    return lead / (1.0 - rho);
}

int64_t terms_needed(double y, double tol, int64_t limit) {
    if (!(y > 0)) throw Error(Error::invalid_argument, "evaluation needs Im z > 0");
    int64_t lo = 1;
    while (eval_tail_bound(y, lo) > tol) {
        lo *= 2;
        if (lo > (int64_t(1) << 40))
            throw Error(Error::data_shortage, "tail bound does not close at this height");
    }
    // binary search the least M in (lo/2, lo]
    int64_t hi = lo, low = lo / 2;
    while (low + 1 < hi) {
        int64_t mid = (low + hi) / 2;
        if (eval_tail_bound(y, mid) <= tol) hi = mid;
        else low = mid;
    }
    if (hi > limit)
        throw Error(Error::data_shortage,
                    "insufficient coefficients: need " + std::to_string(hi) + ", have " +
                        std::to_string(limit));
    return hi;
}

namespace {

EvalReport eval_impl(const NewformData& f, const Point& z, double tol, bool conj_coeffs) {
    double y = z.yd();
    int64_t M = terms_needed(y, tol, f.count());
    EvalReport rep;
    rep.z = z;
    rep.terms_used = M;
    rep.truncation_bound = eval_tail_bound(y, M);

    PairwiseAcc<cplx> acc;
    PhaseWalker ph(z.x);
    RadialWalker rad(y);
    for (int64_t n = 1; n <= M; ++n) {
        cplx e = ph.at_next() * cplx(rad.at_next());
        cplx a = conj_coeffs ? std::conj(f.a[size_t(n)]) : f.a[size_t(n)];
        acc.add(a * std::sqrt(double(n)) * e);
    }
    rep.value = y * acc.total();
    rep.certified = rep.truncation_bound < 1e-3 * std::abs(rep.value);
    return rep;
}

}  // namespace

EvalReport evaluate(const NewformData& f, const Point& z, double tol) {
    return eval_impl(f, z, tol, false);
}

EvalReport twisted_expansion_eval(const NewformData& f, const DirichletChar& chi,
                                  const Point& z, double tol) {
    int64_t p = chi.p();
    if (f.level != p * p || !chi.primitive() || chi.modulus().c != 2)
        throw Error(Error::invalid_argument,
                    "twisted expansion needs level p^2 and chi primitive mod p^2");
    double y = z.yd();
    int64_t M = terms_needed(y, tol, f.count());
    EvalReport rep;
    rep.z = z;
    rep.terms_used = M;
    rep.truncation_bound = std::sqrt(double(p)) * eval_tail_bound(y, M);

    PairwiseAcc<cplx> acc;
    std::shared_ptr<const RootTable> roots;
    if (z.x.den <= (1 << 22)) roots = shared_roots(z.x.den);
    for (int64_t n = 1; n <= M; n += p) {
        cplx e = roots ? (*roots)[mul_mod(((z.x.num % z.x.den) + z.x.den) % z.x.den,
                                          n % z.x.den, z.x.den)]
                       : std::polar(1.0, 2 * PI * double(n) * z.x.dbl());
        e *= std::exp(-2 * PI * y * double(n));
        acc.add(f.a[size_t(n)] * std::sqrt(double(n)) * e);
    }
    rep.value = y * std::sqrt(double(p)) * acc.total();
    rep.certified = rep.truncation_bound < 1e-3 * std::abs(rep.value);
    return rep;
}

namespace {

// z -> (a z + b) / (c z + d) over exact rationals; throws on int64 overflow
Point moebius(const Point& z, int64_t a, int64_t b, int64_t c, int64_t d) {
    // w = (az+b)(conj(cz+d)) / |cz+d|^2
    Rat cx = Rat(c) * z.x + Rat(d);
    Rat cy = Rat(c) * z.y;
    Rat den = cx * cx + cy * cy;
    Rat ax = Rat(a) * z.x + Rat(b);
    Rat ay = Rat(a) * z.y;
    Point w;
    w.x = (ax * cx + ay * cy) / den;
    w.y = (Rat(a) * Rat(d) - Rat(b) * Rat(c)) * z.y / den;
    return w;
}

void bezout_sl2(int64_t c, int64_t d, int64_t* a, int64_t* b) {
    // a d - b c = 1
    int64_t old_r = d, r = -c, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        int64_t q = old_r / r;
        std::swap(old_r -= q * r, r);
        std::swap(old_s -= q * s, s);
        std::swap(old_t -= q * t, t);
    }
    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
    if (old_r != 1) throw Error(Error::invalid_argument, "row not unimodular");
    *a = old_s;
    *b = old_t;
}

}  // namespace

namespace {

Point snap_dyadic(double x, double y) {
    Point p;
    x -= std::floor(x);
    p.x = Rat(int64_t(std::ldexp(x, 40)), int64_t(1) << 40);
    p.y = Rat(std::max<int64_t>(1, int64_t(std::ldexp(y, 48))), int64_t(1) << 48);
    return p;
}

}  // namespace

Point reduce_point(const Point& z_in, int64_t N) {
    Point z = z_in;
    bool exact = true;
    double xd = z.xd(), yd = z.yd();
    for (int iter = 0; iter < 64; ++iter) {
        if (exact) {
            try {
                // translate x into [0, 1)
                int64_t fl =
                    z.x.num >= 0 ? z.x.num / z.x.den : -((-z.x.num + z.x.den - 1) / z.x.den);
                z.x = z.x - Rat(fl);
                xd = z.xd();
                yd = z.yd();
            } catch (const Error&) {
                exact = false;
            }
        }
        if (!exact) {
            xd -= std::floor(xd);
        }
        // search bottom rows (c, d), c = N k, minimizing |c z + d|^2 < 1
        double best = 1.0 - 1e-12;
        int64_t bc = 0, bd = 0;
        int64_t kmax = int64_t(1.0 / (double(N) * yd) + 2);
        for (int64_t k = -kmax; k <= kmax; ++k) {
            if (k == 0) continue;
            int64_t c = N * k;
            double d0 = -double(c) * xd;
            for (int64_t d = int64_t(std::floor(d0)) - 1; d <= int64_t(std::floor(d0)) + 2;
                 ++d) {
                if (std::gcd(std::abs(c), std::abs(d)) != 1) continue;
                double nrm = (double(c) * xd + double(d)) * (double(c) * xd + double(d)) +
                             double(c) * yd * double(c) * yd;
                if (nrm < best) {
                    best = nrm;
                    bc = c;
                    bd = d;
                }
            }
        }
        if (bc == 0) break;
        int64_t a, b;
        bezout_sl2(bc, bd, &a, &b);
        if (exact) {
            try {
                z = moebius(z, a, b, bc, bd);
                continue;
            } catch (const Error&) {
                exact = false;  // continue in doubles, snap at the end
            }
        }
        double cx = double(bc) * xd + double(bd), cy = double(bc) * yd;
        double den = cx * cx + cy * cy;
        double nx =
            ((double(a) * xd + double(b)) * cx + double(a) * double(bc) * yd * yd) / den;
        yd = yd / den;
        xd = nx;
    }
    return exact ? z : snap_dyadic(xd, yd);
}

double verify_fricke(const NewformData& f) {
    // |f(W_N z)| = |f^sigma(z)| with W_N z = -1/(N z); test at generic heights
    double worst = 0;
    for (double t : {1.21, 1.93}) {
        Point z{Rat(1, 7), Rat(int64_t(std::ldexp(t / std::sqrt(double(f.level)), 16)),
                               int64_t(1) << 16)};
        Point w = atkin_lehner_point(z, f.level);
        double lhs = std::abs(eval_impl(f, w, 1e-12, false).value);
        double rhs = std::abs(eval_impl(f, z, 1e-12, true).value);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1e-30, rhs));
    }
    return worst;
}

double abs_at(const NewformData& f, const Point& z, double tol) {
    Point r = reduce_point(z, f.level);
    // Fricke route: deep points in the width-N cusp lift to y/N-scaled height
    Point alt;
    bool have_alt = false;
    try {
        alt = reduce_point(atkin_lehner_point(r, f.level), f.level);
        have_alt = true;
    } catch (const Error&) {
    }
    if (have_alt && alt.yd() > 1.02 * r.yd())
        return std::abs(eval_impl(f, alt, tol, true).value);
    return std::abs(eval_impl(f, r, tol, false).value);
}

SpecialPoint special_point(const DirichletChar& chi) {
    if (!chi.even())
        throw Error(Error::invalid_argument, "special point needs an even character");
    BParam bp = find_b(chi);  // literal: chi(1 - p z) = e^{2 pi i b z / p}
    int64_t p = chi.p();
    SpecialPoint sp;
    sp.chi = chi;
    // central character of the attached representation restricts to the
    // conjugate character on units, so its parameter is -b
    sp.b = (p - bp.b) % p;
    sp.a = inv_mod(sp.b, p);
    sp.z_chi.x = Rat(sp.a, p);
    sp.z_chi.y = Rat(1, p * p * p);
    sp.z_chi_prime = atkin_lehner_point(sp.z_chi, p * p);
    return sp;
}

Point atkin_lehner_point(const Point& z, int64_t N) {
    if (z.x.is_zero() && z.y.is_zero())
        throw Error(Error::invalid_argument, "Atkin-Lehner image of 0 undefined");
    // -1/(Nz) = -conj(z) / (N |z|^2)
    Rat n2 = (z.x * z.x + z.y * z.y) * Rat(N);
    Point w;
    w.x = -z.x / n2;
    w.y = z.y / n2;
    return w;
}

ScanResult supnorm_scan(const NewformData& f, const GridSpec& grid) {
    double y_min = grid.y_min;
    if (y_min <= 0) {
        // reduction keeps evaluation heights above ~sqrt(3)/(2N); pick the
        // floor from the coefficient supply with a 2x safety margin
        double floor_h = 0.8 / double(f.level);
        y_min = floor_h;
    }
    std::vector<Point> pts;
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            double t = grid.ny == 1 ? 0.0 : double(j) / (grid.ny - 1);
            double y = y_min * std::pow(grid.y_max / y_min, t);
            Point z;
            z.x = Rat(i, grid.nx);
            z.y = Rat(int64_t(std::ldexp(y, 26)), int64_t(1) << 26);  // dyadic
            if (z.y.num <= 0) continue;
            pts.push_back(z);
        }
    }
    // mandatory special points and the certificate witness horocycle
    if (grid.include_special && f.neben.primitive() && f.neben.locals().size() == 1 &&
        f.neben.locals()[0].modulus().c == 2) {
        SpecialPoint sp = special_point(f.neben.locals()[0]);
        pts.push_back(sp.z_chi);
        pts.push_back(sp.z_chi_prime);
        if (grid.include_witness) {
            int64_t p = sp.chi.p();
            for (double s : {0.75, 0.875, 1.0, 1.125, 1.3}) {
                for (int j = 0; j < 128; ++j) {
                    // gamma_inf^{-1} = [[p, 0], [-a p^2, 1]] applied to x + iy
                    Point z;
                    z.x = Rat(j, 128);
                    double y = s / (2 * PI);
                    z.y = Rat(int64_t(std::ldexp(y, 26)), int64_t(1) << 26);
                    try {
                        pts.push_back(moebius(z, p, 0, -sp.a * p * p, 1));
                    } catch (const Error&) {
                        // witness point skipped if rationals overflow
                    }
                }
            }
        }
    }

    std::vector<double> vals(pts.size(), 0.0);
    parallel_for(pts.size(), grid.jobs, [&](size_t i) {
        Point z = pts[i];
        if (grid.dilate != 1) {
            z.x = z.x * Rat(grid.dilate);
            z.y = z.y * Rat(grid.dilate);
        }
        vals[i] = abs_at(f, z, grid.tol);
    });
    ScanResult res;
    res.points = int64_t(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        if (vals[i] > res.max_abs) {
            res.max_abs = vals[i];
            res.argmax = pts[i];
        }
    }
    res.exponent_raw = std::log(res.max_abs) / std::log(double(f.level));
    res.exponent =
        std::log(res.max_abs * 2 * PI * std::exp(1.0)) / std::log(double(f.level));
    return res;
}

double lower_bound_certificate(const NewformData& f) {
    if (f.neben.trivial() || !f.neben.primitive())
        throw Error(Error::unsupported,
                    "certificate unavailable: nebentypus must be primitive mod the level");
    double prod = 1.0;
    int64_t N = f.level;
    for (const auto& chi : f.neben.locals()) {
        int c = chi.modulus().c;
        prod *= std::pow(double(chi.p()), 0.5 * (c / 2));
        N /= chi.modulus().q;
    }
    if (N != 1)
        throw Error(Error::unsupported, "level has prime factors outside the nebentypus");
    return prod / (2 * PI * std::exp(1.0));
}

double hecke_coefficient_bound(const NewformData& f) {
    // |a_n| <= n^{1/2} prod_{p | n} h_p. At unramified p the Whittaker
    // function is bi-K-invariant, so h_p is the Kirillov sup
    // max_k |a_{p^k}| p^{-k/2}; near the tempered edge this exceeds 1 at
    // p = 2, 3, and replacing it by 1 would falsify the genuine bound.
    // Ramified h carries the twist-minimal closed form when the nebentypus
    // is primitive; otherwise h = 1 only strengthens the check.
    int64_t M = f.count();
    std::vector<double> h_of_p;  // indexed by prime order below
    std::vector<int64_t> primes;
    for (int64_t p = 2; p <= M; ++p) {
        if (!is_prime(p)) continue;
        primes.push_back(p);
        double h = 1.0;
        bool ramified = false;
        if (f.neben.primitive()) {
            for (const auto& chi : f.neben.locals()) {
                if (chi.p() == p) {
                    ramified = true;
                    h = std::pow(double(p), 0.5 * (chi.modulus().c / 2));
                }
            }
        }
        if (!ramified && f.level % p != 0) {
            for (int64_t pk = p, k = 1; pk <= M; pk *= p, ++k)
                h = std::max(h, std::abs(f.a[size_t(pk)]) / std::pow(double(p), 0.5 * k));
        }
        h_of_p.push_back(h);
    }
    double worst = 0;
    for (int64_t n = 1; n <= M; ++n) {
        double h = 1.0;
        int64_t m = n;
        for (size_t i = 0; i < primes.size() && primes[i] * primes[i] <= m; ++i) {
            if (m % primes[i] == 0) {
                h *= h_of_p[i];
                while (m % primes[i] == 0) m /= primes[i];
            }
        }
        if (m > 1) {
            auto it = std::lower_bound(primes.begin(), primes.end(), m);
            if (it != primes.end() && *it == m) h *= h_of_p[size_t(it - primes.begin())];
        }
        worst = std::max(worst, std::abs(f.a[size_t(n)]) / (std::sqrt(double(n)) * h));
    }
    return worst;
}

cplx wilton_sum(const NewformData& f, int64_t M, const Rat& x) {
    if (M > f.count())
        throw Error(Error::data_shortage, "Wilton sum needs more coefficients");
    PairwiseAcc<cplx> acc;
    PhaseWalker ph(x);
    for (int64_t m = 1; m <= M; ++m) acc.add(f.a[size_t(m)] * ph.at_next());
    return acc.total();
}

WiltonScan wilton_lower_scan(const NewformData& f, const Rat& x, int64_t M_max) {
    if (M_max > f.count()) M_max = f.count();
    WiltonScan out;
    cplx s = 0.0;
    PhaseWalker ph(x);
    for (int64_t m = 1; m <= M_max; ++m) {
        s += f.a[size_t(m)] * ph.at_next();
        double ratio = std::abs(s) / std::sqrt(double(m));
        if (ratio > out.best_ratio) {
            out.best_ratio = ratio;
            out.best_M = m;
        }
    }
    return out;
}

FitResult wilton_upper_fit(const NewformData& f, int64_t M_max, int nx, uint64_t seed) {
    Rng rng(seed);
    std::vector<Rat> xs;
    for (int i = 0; i < nx; ++i) xs.push_back(Rat(rng.below(1 << 20), 1 << 20));
    std::vector<double> lm, lv;
    for (int64_t M = 64; M <= M_max; M = M * 3 / 2) {
        double mx = 0;
        for (const auto& x : xs) mx = std::max(mx, std::abs(wilton_sum(f, M, x)));
        lm.push_back(std::log(double(M)));
        lv.push_back(std::log(mx));
    }
    return least_squares(lm, lv);
}

HeckeIntegral hecke_integral(const NewformData& f) {
    HeckeIntegral out;
    int64_t N = f.level;
    // termwise: int_{1/N}^1 F(iy) dy = sum_n a_n sqrt(n) (e^{-2 pi n/N} - e^{-2 pi n})/(2 pi n)
    {
        PairwiseAcc<cplx> acc;
        for (int64_t n = 1; n <= f.count(); ++n) {
            double w =
                (std::exp(-2 * PI * double(n) / double(N)) - std::exp(-2 * PI * double(n))) /
                (2 * PI * double(n));
            if (w < 1e-19 && n > N) break;
            acc.add(f.a[size_t(n)] * std::sqrt(double(n)) * w);
        }
        out.series = acc.total();
    }
    // adaptive composite Gauss-Legendre on log-spaced panels, refined once
    auto quad = [&](int panels, int order) {
        static const double gl8x[4] = {0.1834346424956498, 0.5255324099163290,
                                       0.7966664774136267, 0.9602898564975363};
        static const double gl8w[4] = {0.3626837833783620, 0.3137066458778873,
                                       0.2223810344533745, 0.1012285362903763};
        (void)order;
        cplx total = 0.0;
        double lo = 1.0 / double(N);
        for (int i = 0; i < panels; ++i) {
            double a = lo * std::pow(1.0 / lo, double(i) / panels);
            double b = lo * std::pow(1.0 / lo, double(i + 1) / panels);
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (int j = 0; j < 4; ++j) {
                for (double s : {-gl8x[j], gl8x[j]}) {
                    double y = mid + half * s;
                    Point z;
                    z.x = Rat(0);
                    z.y = Rat(int64_t(std::ldexp(y, 40)), int64_t(1) << 40);
                    cplx F = evaluate(f, z, 1e-12).value / y;  // F(iy) = f_inv/y
                    total += gl8w[j] * half * F;
                }
            }
        }
        return total;
    };
    cplx q1 = quad(24, 8), q2 = quad(48, 8);
    if (std::abs(q1 - q2) > 1e-8 * (1 + std::abs(q2)))
        throw Error(Error::convergence_failure, "Hecke integral quadrature did not settle");
    out.quadrature = q2;
    if (std::abs(out.quadrature - out.series) > 1e-8 * (1 + std::abs(out.series)))
        throw Error(Error::internal, "quadrature disagrees with the termwise integral");
    out.lvalue = f.lvalue;
    if (f.lvalue) out.band = std::abs(out.quadrature - *f.lvalue / (2 * PI));
    return out;
}

NeighborhoodEstimate large_neighborhood(const NewformData& f, const DirichletChar& chi,
                                        double delta, int grid) {
    if (!(delta > 0) || !(delta < 0.5))
        throw Error(Error::invalid_argument, "delta must lie in (0, 1/2)");
    int64_t p = chi.p();
    NeighborhoodEstimate out;
    out.target = std::pow(double(p), 0.5 - delta);
    out.threshold = std::exp(-2 * PI) * std::pow(double(p), delta);
    double y_lo = std::pow(double(p), delta - 0.5);
    // log-y cells; the twisted value is x-independent in modulus only through
    // |e(nz)|, so sample x as well
    double area = 0;
    int ny = grid, nxs = 16;
    for (int j = 0; j < ny; ++j) {
        double y0 = y_lo * std::pow(1.0 / y_lo, double(j) / ny);
        double y1 = y_lo * std::pow(1.0 / y_lo, double(j + 1) / ny);
        double ym = std::sqrt(y0 * y1);
        int hits = 0;
        for (int i = 0; i < nxs; ++i) {
            Point z;
            z.x = Rat(i, nxs);
            z.y = Rat(int64_t(std::ldexp(ym, 30)), int64_t(1) << 30);
            double v = std::abs(twisted_expansion_eval(f, chi, z, 1e-10).value);
            if (v >= out.threshold) ++hits;
        }
        // cell area: int dx dy/y^2 = (1/y0 - 1/y1) per unit x
        area += (1.0 / y0 - 1.0 / y1) * double(hits) / nxs;
    }
    out.area = area;
    return out;
}

}  // namespace wlab
