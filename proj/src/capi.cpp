#include "wlab.h"

#include <cstring>

#include "mean_values.hpp"
#include "report.hpp"
#include "whittaker_arch.hpp"
#include "whittaker_local.hpp"

using namespace wlab;

namespace {

thread_local std::string t_last_error;

int set_error(const std::exception& e, int code) {
    t_last_error = e.what();
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return WLAB_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return int(e.code());
    } catch (const std::exception& e) {
        return set_error(e, WLAB_EINTERNAL);
    }
}

template <typename T, typename Fn>
T* guarded_new(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        t_last_error = e.what();
        return nullptr;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return nullptr;
    }
}

Rat rat(int64_t num, int64_t den) { return Rat(num, den); }

}  // namespace

struct wlab_char {
    DirichletChar chi;
};
struct wlab_ps {
    PrincipalSeries ps;
};
struct wlab_form {
    NewformData f;
    bool empty_space = false;
};
struct wlab_basis {
    BasisWithNorms b;
};

extern "C" {

const char* wlab_version(void) { return "wlab 1.0.0"; }
const char* wlab_last_error(void) { return t_last_error.c_str(); }

wlab_char* wlab_char_new(int64_t p, int c, int64_t k) {
    return guarded_new<wlab_char>([&] { return new wlab_char{DirichletChar(p, c, k)}; });
}
void wlab_char_free(wlab_char* chi) { delete chi; }

int wlab_char_info(const wlab_char* chi, int* cond_exp, int* parity, int* primitive,
                   int64_t* generator, int64_t* order) {
    return guarded([&] {
        if (!chi) throw Error(Error::invalid_argument, "null handle");
        if (cond_exp) *cond_exp = chi->chi.cond_exp();
        if (parity) *parity = chi->chi.parity();
        if (primitive) *primitive = chi->chi.primitive() ? 1 : 0;
        if (generator) *generator = chi->chi.generator();
        if (order) *order = chi->chi.order();
    });
}

int wlab_char_eval(const wlab_char* chi, int64_t u, double* re, double* im) {
    return guarded([&] {
        cplx v = chi->chi(u);
        *re = v.real();
        *im = v.imag();
    });
}

int wlab_gauss_sum(const wlab_char* chi, double* re, double* im) {
    return guarded([&] {
        cplx v = gauss_sum(chi->chi);
        *re = v.real();
        *im = v.imag();
    });
}

int wlab_find_b(const wlab_char* chi, int64_t* b, int64_t* a) {
    return guarded([&] {
        BParam bp = find_b(chi->chi);
        *b = bp.b;
        *a = bp.a;
    });
}

int wlab_count_chars(int64_t p, int c, int primitive_only, int even_only, int64_t* count) {
    return guarded([&] {
        *count = int64_t(enumerate_chars(p, c, primitive_only != 0, even_only != 0).size());
    });
}

int wlab_epsilon_w(const wlab_char* chi, double vp_re, double vp_im, double* re, double* im) {
    return guarded([&] {
        UnitaryCharacter u(chi->chi, cplx(vp_re, vp_im));
        EpsilonFactor e = epsilon_W_at_identity(u);
        *re = e.value.real();
        *im = e.value.imag();
    });
}

wlab_ps* wlab_ps_new(int64_t p, int c, int64_t k2, double vp2_re, double vp2_im,
                     double vp1_re, double vp1_im) {
    return guarded_new<wlab_ps>([&] {
        return new wlab_ps{PrincipalSeries(DirichletChar(p, c, k2), cplx(vp2_re, vp2_im),
                                           cplx(vp1_re, vp1_im))};
    });
}
void wlab_ps_free(wlab_ps* ps) { delete ps; }

namespace {
TruncatedPAdic make_y(const PrincipalSeries& ps, int vy, int64_t unit) {
    return TruncatedPAdic::from_unit(ps.p(), ps.conductor_exp() + 3, vy, unit);
}
}  // namespace

int wlab_w_closed(const wlab_ps* ps, int cell, int vy, int64_t unit, double* re, double* im,
                  int* nonzero) {
    return guarded([&] {
        TruncatedPAdic y = make_y(ps->ps, vy, unit);
        WhittakerValue v = cell == 0   ? w_cell0(ps->ps, y)
                           : cell == 1 ? w_cell1(ps->ps, y)
                                       : w_diag(ps->ps, y);
        *re = v.value.real();
        *im = v.value.imag();
        if (nonzero) *nonzero = v.nonzero ? 1 : 0;
    });
}

int wlab_w_oracle(const wlab_ps* ps, int cell, int vy, int64_t unit, double* re, double* im,
                  int* nonzero, int* provenance) {
    return guarded([&] {
        WhittakerValue v = jacquet_oracle(ps->ps, WhittakerCell{make_y(ps->ps, vy, unit), cell});
        *re = v.value.real();
        *im = v.value.imag();
        if (nonzero) *nonzero = v.nonzero ? 1 : 0;
        if (provenance) *provenance = int(v.provenance);
    });
}

int wlab_w_oracle_general(const wlab_ps* ps, int a, int g, int vy, int64_t unit, double* re,
                          double* im) {
    return guarded([&] {
        cplx v = oracle_matrix(ps->ps, make_y(ps->ps, vy, unit), a, g);
        *re = v.real();
        *im = v.imag();
    });
}

int wlab_h_invariant(const wlab_ps* ps, int method, int jobs, double* h) {
    return guarded([&] {
        *h = h_invariant(ps->ps, method == 0 ? HMethod::closed_form : HMethod::exhaustive,
                         jobs);
    });
}

int wlab_twist_invariance(const wlab_ps* ps, double eta_re, double eta_im, int jobs,
                          int* invariant) {
    return guarded([&] {
        *invariant =
            unramified_twist_invariance(ps->ps, cplx(eta_re, eta_im), 1e-8, jobs) ? 1 : 0;
    });
}

int wlab_arch_ratio(int kind, double param, double* ratio) {
    return guarded([&] {
        ArchRepresentation rep =
            kind == 0   ? ArchRepresentation::discrete_series(int(param))
            : kind == 1 ? ArchRepresentation::principal(param)
                        : ArchRepresentation::principal_nontrivial(param);
        *ratio = arch_ratio(rep);
    });
}

int wlab_kbessel_max(double r, double* value, double* location) {
    return guarded([&] {
        ScaledMax m = kbessel_scaled_max(r);
        *value = m.value;
        if (location) *location = m.location;
    });
}

int wlab_kbessel_fit(double r_lo, double r_hi, int npts, int jobs, double* slope) {
    return guarded([&] { *slope = kbessel_exponent_fit(r_lo, r_hi, npts, jobs).slope; });
}

int wlab_nt_fits(double r_lo, double r_hi, int npts, int jobs, double* max_slope,
                 double* norm_slope, double* net_exponent) {
    return guarded([&] {
        NontrivialFits f = nontrivial_central_fits(r_lo, r_hi, npts, jobs);
        *max_slope = f.max_fit.slope;
        *norm_slope = f.norm_fit.slope;
        *net_exponent = f.net_exponent;
    });
}

wlab_form* wlab_form_load(const char* path) {
    return guarded_new<wlab_form>([&] {
        FormFile file = parse_form_file(path);
        auto* h = new wlab_form;
        h->empty_space = file.empty_space;
        if (file.empty_space) {
            h->f = form_from_file(file);
            h->f.a.clear();
        } else {
            h->f = load_form(path);
        }
        return h;
    });
}
void wlab_form_free(wlab_form* f) { delete f; }

int wlab_form_info(const wlab_form* f, int64_t* level, int64_t* count, int* empty_space,
                   int* primitive_neben) {
    return guarded([&] {
        if (level) *level = f->f.level;
        if (count) *count = f->f.count();
        if (empty_space) *empty_space = f->empty_space ? 1 : 0;
        if (primitive_neben)
            *primitive_neben = (!f->f.neben.trivial() && f->f.neben.primitive()) ? 1 : 0;
    });
}

int wlab_form_validation(const wlab_form* f, char* buf, size_t bufsize, int* blocked) {
    return guarded([&] {
        ValidationReport rep = validate_form(f->f);
        std::string s = rep.summary();
        if (buf && bufsize) {
            std::strncpy(buf, s.c_str(), bufsize - 1);
            buf[bufsize - 1] = 0;
        }
        if (blocked) *blocked = rep.blocked() ? 1 : 0;
    });
}

int wlab_form_eval(const wlab_form* f, int64_t x_num, int64_t x_den, int64_t y_num,
                   int64_t y_den, double tol, double* re, double* im, double* tail_bound,
                   int64_t* terms) {
    return guarded([&] {
        Point z{rat(x_num, x_den), rat(y_num, y_den)};
        EvalReport r = evaluate(f->f, z, tol);
        *re = r.value.real();
        *im = r.value.imag();
        if (tail_bound) *tail_bound = r.truncation_bound;
        if (terms) *terms = r.terms_used;
    });
}

int wlab_form_eval_twisted(const wlab_form* f, int64_t x_num, int64_t x_den, int64_t y_num,
                           int64_t y_den, double tol, double* re, double* im,
                           double* tail_bound) {
    return guarded([&] {
        const auto& locs = f->f.neben.locals();
        if (locs.size() != 1)
            throw Error(Error::invalid_argument, "twisted sum needs a prime-power nebentypus");
        Point z{rat(x_num, x_den), rat(y_num, y_den)};
        EvalReport r = twisted_expansion_eval(f->f, locs[0], z, tol);
        *re = r.value.real();
        *im = r.value.imag();
        if (tail_bound) *tail_bound = r.truncation_bound;
    });
}

int wlab_form_abs(const wlab_form* f, int64_t x_num, int64_t x_den, int64_t y_num,
                  int64_t y_den, double tol, double* value) {
    return guarded([&] {
        Point z{rat(x_num, x_den), rat(y_num, y_den)};
        *value = abs_at(f->f, z, tol);
    });
}

int wlab_special_point(const wlab_form* f, int64_t* b, int64_t* a, int64_t* zx_num,
                       int64_t* zx_den, int64_t* zy_num, int64_t* zy_den) {
    return guarded([&] {
        const auto& locs = f->f.neben.locals();
        if (locs.size() != 1 || locs[0].modulus().c != 2)
            throw Error(Error::invalid_argument, "special point needs nebentypus mod p^2");
        SpecialPoint sp = special_point(locs[0]);
        if (b) *b = sp.b;
        if (a) *a = sp.a;
        if (zx_num) *zx_num = sp.z_chi.x.num;
        if (zx_den) *zx_den = sp.z_chi.x.den;
        if (zy_num) *zy_num = sp.z_chi.y.num;
        if (zy_den) *zy_den = sp.z_chi.y.den;
    });
}

int wlab_supnorm_scan(const wlab_form* f, int nx, int ny, double y_min, double y_max,
                      int include_special, int64_t dilate, int jobs, double* max_abs,
                      double* exponent) {
    return guarded([&] {
        GridSpec g;
        g.nx = nx;
        g.ny = ny;
        g.y_min = y_min;
        g.y_max = y_max;
        g.include_special = include_special != 0;
        g.include_witness = include_special != 0;
        g.dilate = dilate;
        g.jobs = jobs;
        ScanResult r = supnorm_scan(f->f, g);
        *max_abs = r.max_abs;
        if (exponent) *exponent = r.exponent;
    });
}

int wlab_certificate(const wlab_form* f, double* value) {
    return guarded([&] { *value = lower_bound_certificate(f->f); });
}

int wlab_hecke_coeff_bound(const wlab_form* f, double* worst_ratio) {
    return guarded([&] { *worst_ratio = hecke_coefficient_bound(f->f); });
}

int wlab_wilton(const wlab_form* f, int64_t M, int64_t x_num, int64_t x_den, double* re,
                double* im) {
    return guarded([&] {
        cplx v = wilton_sum(f->f, M, rat(x_num, x_den));
        *re = v.real();
        *im = v.imag();
    });
}

int wlab_wilton_lower(const wlab_form* f, int64_t x_num, int64_t x_den, int64_t m_max,
                      double* best_ratio, int64_t* best_m) {
    return guarded([&] {
        WiltonScan s = wilton_lower_scan(f->f, rat(x_num, x_den), m_max);
        *best_ratio = s.best_ratio;
        if (best_m) *best_m = s.best_M;
    });
}

int wlab_wilton_upper_fit(const wlab_form* f, int64_t m_max, int n_sample, uint64_t seed,
                          double* slope) {
    return guarded([&] { *slope = wilton_upper_fit(f->f, m_max, n_sample, seed).slope; });
}

int wlab_hecke_integral(const wlab_form* f, double* re, double* im, double* band,
                        int* have_lvalue) {
    return guarded([&] {
        HeckeIntegral h = hecke_integral(f->f);
        *re = h.quadrature.real();
        *im = h.quadrature.imag();
        if (band) *band = h.band;
        if (have_lvalue) *have_lvalue = h.lvalue ? 1 : 0;
    });
}

int wlab_petersson(const wlab_form* f, int order, int jobs, double* value, double* error) {
    return guarded([&] {
        NormResult n = petersson_norm(f->f, order, jobs);
        *value = n.value;
        if (error) *error = n.error;
    });
}

int wlab_lr_norm(const wlab_form* f, double r, int order, int jobs, double* value) {
    return guarded([&] { *value = lr_norm(f->f, r, order, jobs); });
}

int wlab_neighborhood(const wlab_form* f, double delta, double* area, double* target) {
    return guarded([&] {
        const auto& locs = f->f.neben.locals();
        if (locs.size() != 1)
            throw Error(Error::invalid_argument, "neighborhood needs a prime-power nebentypus");
        NeighborhoodEstimate e = large_neighborhood(f->f, locs[0], delta);
        *area = e.area;
        *target = e.target;
    });
}

wlab_basis* wlab_basis_new(const wlab_form* const* forms, int n, int order, int jobs) {
    return guarded_new<wlab_basis>([&] {
        std::vector<NewformData> fs;
        for (int i = 0; i < n; ++i) fs.push_back(forms[i]->f);
        return new wlab_basis{basis_with_norms(std::move(fs), order, jobs)};
    });
}
void wlab_basis_free(wlab_basis* b) { delete b; }

int wlab_basis_info(const wlab_basis* b, int64_t* expected_dim, int* complete) {
    return guarded([&] {
        if (expected_dim) *expected_dim = b->b.expected_dim;
        if (complete) *complete = b->b.complete() ? 1 : 0;
    });
}

int wlab_mchi(const wlab_basis* b, int64_t x_num, int64_t x_den, int64_t y_num,
              int64_t y_den, double* value, int* partial) {
    return guarded([&] {
        MchiResult r = m_chi(Point{rat(x_num, x_den), rat(y_num, y_den)}, b->b);
        *value = r.value;
        if (partial) *partial = r.partial ? 1 : 0;
    });
}

int wlab_mchi_average(const wlab_basis* b, int order, int jobs, double* value,
                      double* error) {
    return guarded([&] {
        NormResult r = mchi_domain_average(b->b, order, jobs);
        *value = r.value;
        if (error) *error = r.error;
    });
}

int wlab_fetch(const char* base_url, int64_t level, int weight, int64_t p, int c, int64_t k,
               int64_t min_coeffs, const char* cache_dir, int offline, char* paths_buf,
               size_t bufsize, int* from_cache, int* empty_space) {
    return guarded([&] {
        FetchSpec spec;
        if (base_url) spec.base_url = base_url;
        spec.level = level;
        spec.weight = weight;
        spec.char_p = p;
        spec.char_c = c;
        spec.char_k = k;
        spec.min_coeffs = min_coeffs;
        if (cache_dir) spec.cache_dir = cache_dir;
        spec.offline = offline != 0;
        FetchResult r = fetch_remote(spec);
        std::string joined;
        for (const auto& pth : r.form_paths) joined += pth + "\n";
        if (paths_buf && bufsize) {
            std::strncpy(paths_buf, joined.c_str(), bufsize - 1);
            paths_buf[bufsize - 1] = 0;
        }
        if (from_cache) *from_cache = r.from_cache ? 1 : 0;
        if (empty_space) *empty_space = r.empty_space ? 1 : 0;
    });
}

int wlab_coset_index(int64_t n_level, int64_t* index, int64_t* n_cusps) {
    return guarded([&] {
        CosetSystem cs = coset_reps(n_level);
        if (index) *index = cs.index;
        if (n_cusps) *n_cusps = int64_t(cs.cusps.size());
    });
}

int wlab_measured_volume(int64_t n_level, int order, double* value, double* deviation) {
    return guarded([&] {
        NormResult v = measured_volume(n_level, order);
        *value = v.value;
        if (deviation) *deviation = v.error;
    });
}

int wlab_sha256_file(const char* path, char* hex65) {
    return guarded([&] {
        std::string h = file_sha256(path);
        std::memcpy(hex65, h.c_str(), 65);
    });
}

int wlab_sha256_str(const char* data, size_t len, char* hex65) {
    return guarded([&] {
        std::string h = sha256_hex(data, len);
        std::memcpy(hex65, h.c_str(), 65);
    });
}

}  // extern "C"
