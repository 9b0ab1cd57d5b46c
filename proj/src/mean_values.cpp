#include "mean_values.hpp"

#include <cmath>

namespace wlab {

namespace {

void bezout_rows(int64_t a, int64_t c, int64_t* b_out, int64_t* d_out) {
    // complete (a, c) (gcd 1) to [[a, b],[c, d]] in SL2: a d - b c = 1
    int64_t old_r = a, r = c, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        int64_t q = old_r / r;
        std::swap(old_r -= q * r, r);
        std::swap(old_s -= q * s, s);
        std::swap(old_t -= q * t, t);
    }
    // old_s * a + old_t * c = old_r = +-1
    if (old_r == -1) { old_s = -old_s; old_t = -old_t; old_r = 1; }
    if (old_r != 1) throw Error(Error::invalid_argument, "cusp pair not coprime");
    // a d - b c = 1 with d = old_s, b = -old_t
    *d_out = old_s;
    *b_out = -old_t;
}

}  // namespace

CosetSystem coset_reps(int64_t N) {
    if (N < 1 || N > 200)
        throw Error(Error::invalid_argument, "coset system limited to N <= 200");
    CosetSystem cs;
    cs.N = N;
    cs.index = N;
    for (int64_t p : prime_factors(N)) cs.index = cs.index / p * (p + 1);

    for (int64_t c = 1; c <= N; ++c) {
        if (N % c != 0) continue;
        int64_t g = std::gcd(c, N / c);
        for (int64_t a0 = 0; a0 < g; ++a0) {
            if (std::gcd(a0, g) != 1) continue;
            // lift a0 to a residue coprime to c
            int64_t a = a0 == 0 ? 1 : a0;
            while (std::gcd(a, c) != 1) a += g;
            Cusp k;
            k.a = a % c == 0 ? 1 : a;
            if (c == N) k = Cusp{1, 0, 1, {1, 0, 0, 1}};  // infinity
            if (c != N) {
                k.c = c;
                k.width = N / std::gcd(c * c, N);
                int64_t b, d;
                bezout_rows(k.a, c, &b, &d);
                k.sigma = {k.a, b, c, d};
            } else {
                k.width = 1;
            }
            cs.cusps.push_back(k);
        }
    }
    // representatives sigma T^j
    for (const auto& k : cs.cusps) {
        for (int64_t j = 0; j < k.width; ++j) {
            // sigma * [[1, j],[0,1]] = [[a, a j + b],[c, c j + d]]
            cs.reps.push_back({k.sigma[0], k.sigma[0] * j + k.sigma[1], k.sigma[2],
                               k.sigma[2] * j + k.sigma[3]});
        }
    }
    if (int64_t(cs.reps.size()) != cs.index)
        throw Error(Error::internal, "cusp widths do not sum to the index");
    // pairwise inequivalence: bottom rows (c1,d1), (c2,d2) represent the same
    // coset iff c1 d2 - d1 c2 = 0 mod N
    for (size_t i = 0; i < cs.reps.size(); ++i) {
        for (size_t j = i + 1; j < cs.reps.size(); ++j) {
            int64_t v = cs.reps[i][2] * cs.reps[j][3] - cs.reps[i][3] * cs.reps[j][2];
            if (((v % N) + N) % N == 0)
                throw Error(Error::internal, "coset representatives collide");
        }
    }
    return cs;
}

namespace {

constexpr double kHoroV = 4.0;  // scaled horoball cut

struct GL {
    std::vector<double> x, w;
};

// Gauss-Legendre nodes by Newton iteration on Legendre polynomials
GL gauss_legendre(int n) {
    GL g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        g.x[size_t(i)] = t;
        double p0 = 1, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1);
        g.w[size_t(i)] = 2 / ((1 - t * t) * dp * dp);
    }
    return g;
}

Point apply_rep(const std::array<int64_t, 4>& m, double x, double y) {
    // real Moebius (doubles; the evaluation path re-reduces exactly anyway)
    double cx = double(m[2]) * x + double(m[3]);
    double cy = double(m[2]) * y;
    double den = cx * cx + cy * cy;
    double wx = ((double(m[0]) * x + double(m[1])) * cx + double(m[0]) * double(m[2]) * y * y) / den;
    double wy = y / den;
    Point p;
    p.x = Rat(int64_t(std::ldexp(wx, 30)), int64_t(1) << 30);
    p.y = Rat(std::max<int64_t>(1, int64_t(std::ldexp(wy, 40))), int64_t(1) << 40);
    return p;
}

// integral over Gamma_0(N)\H of G(point), G evaluated on truncated cells;
// returns the cell part only (tails handled by callers per cusp)
double cell_integral(const CosetSystem& cs, int order, int jobs,
                     const std::function<double(const Point&)>& G) {
    GL gx = gauss_legendre(order), gt = gauss_legendre(order);
    struct Task {
        std::array<int64_t, 4> rep;
        int64_t width;
    };
    std::vector<Task> tasks;
    size_t r = 0;
    for (const auto& k : cs.cusps)
        for (int64_t j = 0; j < k.width; ++j) tasks.push_back({cs.reps[r++], k.width});

    std::vector<double> parts(tasks.size(), 0.0);
    parallel_for(tasks.size(), jobs, [&](size_t ti) {
        const Task& task = tasks[ti];
        double ycap = kHoroV * double(task.width);
        PairwiseAcc<double> acc;
        for (int i = 0; i < order; ++i) {
            double x = 0.5 * gx.x[size_t(i)];
            double yf = std::sqrt(std::max(0.0, 1 - x * x));
            double t0 = 1.0 / ycap, t1 = 1.0 / yf;
            for (int j = 0; j < order; ++j) {
                double t = 0.5 * (t1 - t0) * gt.x[size_t(j)] + 0.5 * (t0 + t1);
                double y = 1.0 / t;
                Point w = apply_rep(task.rep, x, y);
                acc.add(gx.w[size_t(i)] * gt.w[size_t(j)] * 0.25 * (t1 - t0) * G(w));
            }
        }
        parts[ti] = acc.total();
    });
    return pairwise_sum(parts);
}

// Parseval line bound for the horoball above v = V at cusp kappa:
// tail <= (line integral of |f|^2 at v = V) / (4 pi V^2)
double horoball_tail_bound(const NewformData& f, const Cusp& k, double tol) {
    const int nu = 48;
    double line = 0;
    for (int i = 0; i < nu; ++i) {
        double u = (i + 0.5) / nu;
        // scaled chart: z = sigma(width * (u + i V))
        double zx = double(k.width) * u, zy = double(k.width) * kHoroV;
        Point w = apply_rep(k.sigma, zx, zy);
        double v = abs_at(f, w, tol);
        line += v * v / nu;
    }
    return line / (4 * PI * kHoroV * kHoroV);
}

}  // namespace

NormResult petersson_norm(const NewformData& f, int order, int jobs) {
    CosetSystem cs = coset_reps(f.level);
    auto G = [&](const Point& w) {
        double v = abs_at(f, w, 1e-10);
        return v * v;
    };
    double v1 = cell_integral(cs, order, jobs, G);
    double v2 = cell_integral(cs, order + 8, jobs, G);
    double tails = 0;
    for (const auto& k : cs.cusps) tails += horoball_tail_bound(f, k, 1e-10);
    NormResult out;
    out.value = v2 + 0;  // tails are a bound on the *dropped* mass, reported as error
    out.error = std::abs(v2 - v1) + tails;
    if (out.error > 0.01 * out.value)
        throw Error(Error::convergence_failure,
                    "Petersson quadrature refinement disagreement above 1%");
    return out;
}

BasisWithNorms basis_with_norms(std::vector<NewformData> forms, int order, int jobs) {
    BasisWithNorms b;
    b.forms = std::move(forms);
    for (const auto& f : b.forms) {
        NormResult n = petersson_norm(f, order, jobs);
        b.norms.push_back(n.value);
        b.norm_errs.push_back(n.error);
    }
    if (!b.forms.empty()) {
        const auto& locs = b.forms[0].neben.locals();
        if (locs.size() == 1 && locs[0].modulus().c == 2 && locs[0].primitive() &&
            locs[0].even())
            b.expected_dim = dim_s2_prime_square(locs[0]);
    }
    return b;
}

int64_t dim_s2_prime_square(const DirichletChar& chi) {
    if (chi.modulus().c != 2 || !chi.primitive() || !chi.even())
        throw Error(Error::invalid_argument, "dimension count needs chi primitive even mod p^2");
    int64_t p = chi.p();
    int64_t N = p * p;
    // index/12 - 1 - eps4/4 - eps3/3 with the elliptic character sums
    double mu = double(p * (p + 1));
    double eps4 = 0, eps3 = 0;
    for (int64_t x = 0; x < N; ++x) {
        if ((x * x + 1) % N == 0) eps4 += chi(x).real();
        if ((x * x + x + 1) % N == 0) eps3 += chi(x).real();
    }
    double dim = mu / 12.0 - 1.0 - eps4 / 4.0 - eps3 / 3.0;
    int64_t d = std::llround(dim);
    if (std::abs(dim - double(d)) > 1e-9)
        throw Error(Error::internal, "dimension formula returned a non-integer");
    return d;
}

MchiResult m_chi(const Point& z, const BasisWithNorms& basis, double tol) {
    if (basis.forms.empty())
        throw Error(Error::invalid_argument, "empty basis");
    MchiResult out;
    for (size_t i = 0; i < basis.forms.size(); ++i) {
        double v = abs_at(basis.forms[i], z, tol);
        out.value += v * v / basis.norms[i];
    }
    out.partial = !basis.complete();
    return out;
}

NormResult mchi_domain_average(const BasisWithNorms& basis, int order, int jobs) {
    if (basis.forms.empty()) throw Error(Error::invalid_argument, "empty basis");
    int64_t N = basis.forms[0].level;
    CosetSystem cs = coset_reps(N);
    auto G = [&](const Point& w) {
        double s = 0;
        for (size_t i = 0; i < basis.forms.size(); ++i) {
            double v = abs_at(basis.forms[i], w, 1e-10);
            s += v * v / basis.norms[i];
        }
        return s;
    };
    double v1 = cell_integral(cs, order, jobs, G);
    double v2 = cell_integral(cs, order + 8, jobs, G);
    double tails = 0;
    for (const auto& k : cs.cusps) {
        for (size_t i = 0; i < basis.forms.size(); ++i)
            tails += horoball_tail_bound(basis.forms[i], k, 1e-10) / basis.norms[i];
    }
    NormResult vol = measured_volume(N, order);
    NormResult out;
    out.value = v2 / vol.value;
    out.error = (std::abs(v2 - v1) + tails) / vol.value + std::abs(v2) * vol.error /
                                                              (vol.value * vol.value);
    return out;
}

double lr_norm(const NewformData& f, double r, int order, int jobs) {
    if (r < 2 || r > 64)
        throw Error(Error::invalid_argument, "r must lie in [2, 64] (use the scan for sup)");
    CosetSystem cs = coset_reps(f.level);
    auto G = [&](const Point& w) { return std::pow(abs_at(f, w, 1e-10), r); };
    double v = cell_integral(cs, order, jobs, G);
    // horoball mass: |f|^r <= Mline^{r-2} |f|^2 above the cut since the cusp
    // expansions decay beyond the line maximum
    double tails = 0;
    for (const auto& k : cs.cusps) {
        double t2 = horoball_tail_bound(f, k, 1e-10);
        tails += t2;  // Mline <= 1 at V = 4 for cusp forms at this scale
    }
    NormResult vol = measured_volume(f.level, order);
    return std::pow((v + tails) / vol.value, 1.0 / r);
}

NormResult measured_volume(int64_t N, int order) {
    CosetSystem cs = coset_reps(N);
    double cells = cell_integral(cs, order, 1, [](const Point&) { return 1.0; });
    // horoball above V has exact measure 1/V per cusp in scaled coordinates
    double horo = double(cs.cusps.size()) / kHoroV;
    NormResult out;
    out.value = cells + horo;
    out.error = std::abs(out.value - (PI / 3.0) * double(cs.index));
    return out;
}

}  // namespace wlab
