// wlab command-line front end. Links the shared C API only.

#include <wlab.h>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitAcceptance = 3;

struct Fail {
    int code;
    std::string msg;
};

void require(int rc, const char* what) {
    if (rc != WLAB_OK) {
        int exit_code = (rc == WLAB_EVALIDATION || rc == WLAB_EDATA) ? kExitValidation : 1;
        throw Fail{exit_code, std::string(what) + ": " + wlab_last_error()};
    }
}

std::string g17(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

// config-file keys are merged under explicitly passed flags
void merge_config(CLI::App& app, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw Fail{1, "cannot open config " + path};
    std::string line;
    std::vector<std::string> args;
    while (std::getline(in, line)) {
        size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto strip = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string k = strip(line.substr(0, eq)), v = strip(line.substr(eq + 1));
        if (k.empty()) continue;
        auto* opt = app.get_option_no_throw("--" + k);
        if (opt && opt->count() == 0) opt->add_result(v);
    }
}

struct Report {
    std::map<std::string, std::string> config;
    std::vector<std::string> input_hashes;

    std::string config_hash() const {
        std::string s;
        for (const auto& [k, v] : config) s += k + "=" + v + "\n";
        char hex[65];
        wlab_sha256_str(s.c_str(), s.size(), hex);
        return std::string(hex, 64);
    }
    void add_input(const std::string& path) {
        char hex[65];
        require(wlab_sha256_file(path.c_str(), hex), "hash input");
        input_hashes.push_back(std::string(hex, 64));
    }
    std::string csv_header(const std::vector<std::string>& cols) const {
        std::string s = "# config_hash: " + config_hash() + "\n";
        for (const auto& [k, v] : config) s += "# " + k + ": " + v + "\n";
        for (size_t i = 0; i < input_hashes.size(); ++i)
            s += "# input" + std::to_string(i) + "_sha256: " + input_hashes[i] + "\n";
        for (size_t i = 0; i < cols.size(); ++i) s += cols[i] + (i + 1 < cols.size() ? "," : "\n");
        return s;
    }
    json meta() const {
        json j;
        j["config_hash"] = config_hash();
        j["config"] = config;
        j["input_sha256"] = input_hashes;
        return j;
    }
};

void write_out(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Fail{1, "cannot write " + path};
    out.write(content.data(), std::streamsize(content.size()));
}

struct FormHandle {
    wlab_form* f = nullptr;
    ~FormHandle() { wlab_form_free(f); }
};

void load(FormHandle& h, const std::string& path) {
    h.f = wlab_form_load(path.c_str());
    if (!h.f) throw Fail{kExitValidation, std::string("load ") + path + ": " + wlab_last_error()};
}

bool parse_rational(const std::string& s, int64_t* num, int64_t* den) {
    size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            *num = std::stoll(s);
            *den = 1;
        } else {
            *num = std::stoll(s.substr(0, slash));
            *den = std::stoll(s.substr(slash + 1));
        }
    } catch (...) {
        return false;
    }
    return true;
}

// ---- subcommands ----

int cmd_local(int64_t p, int c, bool all_chars, bool oracle, int jobs,
              const std::string& out, Report rep) {
    int64_t phi = 1;
    for (int i = 0; i < c - 1; ++i) phi *= p;
    phi *= (p - 1);
    std::string body = rep.csv_header(
        {"p", "c", "chi_id", "cell", "v_y", "unit_class", "abs_w", "phase", "provenance"});
    int64_t emitted_chars = 0;
    for (int64_t k = 0; k < phi; ++k) {
        wlab_char* chi = wlab_char_new(p, c, k);
        if (!chi) throw Fail{1, wlab_last_error()};
        int cond, parity, prim;
        require(wlab_char_info(chi, &cond, &parity, &prim, nullptr, nullptr), "char info");
        wlab_char_free(chi);
        if (!prim) continue;
        if (!all_chars && emitted_chars >= 1) break;
        ++emitted_chars;
        wlab_ps* ps = wlab_ps_new(p, c, k, 1, 0, 1, 0);
        if (!ps) throw Fail{1, wlab_last_error()};
        int ncell = c == 2 ? 3 : c + 1;
        int64_t pc = 1;
        for (int i = 0; i < c; ++i) pc *= p;
        for (int vy = -(c + 2); vy <= 2; ++vy) {
            for (int64_t u = 1; u < pc; ++u) {
                if (u % p == 0) continue;
                for (int cell = 0; cell < ncell; ++cell) {
                    double re, im;
                    int nz, prov = 0;
                    if (c != 2) {
                        // general c: representatives [[1,0],[p^cell,1]], cell = c
                        // lying in the diagonal coset
                        int g = cell == c ? -1 : cell;
                        require(wlab_w_oracle_general(ps, 0, g, vy, u, &re, &im),
                                "general oracle");
                        prov = 2;
                    } else if (oracle) {
                        require(wlab_w_oracle(ps, cell, vy, u, &re, &im, &nz, &prov), "oracle");
                    } else {
                        require(wlab_w_closed(ps, cell, vy, u, &re, &im, &nz), "closed form");
                    }
                    const char* provname[] = {"closed_form", "oracle", "oracle_extrapolated"};
                    std::string chi_id = std::to_string(p) + "." + std::to_string(c) + "." +
                                         std::to_string(k);
                    double absw = std::hypot(re, im);
                    body += std::to_string(p) + "," + std::to_string(c) + "," + chi_id + "," +
                            std::to_string(cell) + "," + std::to_string(vy) + "," +
                            std::to_string(u) + "," + g17(absw) + "," +
                            g17(std::atan2(im, re)) + "," + provname[prov] + "\n";
                }
            }
        }
        wlab_ps_free(ps);
    }
    write_out(out, body);
    return kExitOk;
}

int cmd_h_table(const std::vector<int64_t>& ps_, const std::vector<int>& cs_, int twists,
                uint64_t seed, int jobs, const std::string& out, Report rep) {
    std::string body =
        rep.csv_header({"p", "c", "chi_id", "h_closed", "h_exhaustive", "agree", "twists_ok"});
    bool all_ok = true;
    for (int64_t p : ps_) {
        for (int c : cs_) {
            if (c == 1) {
                // both factors ramified at conductor p is outside the
                // closed-form scope; the invariant is bounded, not pinned
                body += std::to_string(p) + ",1,-,,,oracle-only regime,\n";
                continue;
            }
            wlab_ps* ps = wlab_ps_new(p, c, 1, 1, 0, 1, 0);
            if (!ps) throw Fail{1, wlab_last_error()};
            double hc, he;
            require(wlab_h_invariant(ps, 0, jobs, &hc), "h closed");
            require(wlab_h_invariant(ps, 1, jobs, &he), "h exhaustive");
            bool agree = std::abs(hc - he) <= 1e-8;
            int ok_twists = 0;
            uint64_t s = seed;
            for (int t = 0; t < twists; ++t) {
                s = s * 6364136223846793005ULL + 1442695040888963407ULL;
                double ang = 2 * M_PI * double(s >> 11) * 0x1.0p-53;
                int inv = 0;
                require(wlab_twist_invariance(ps, std::cos(ang), std::sin(ang), jobs, &inv),
                        "twist");
                ok_twists += inv;
            }
            all_ok = all_ok && agree && ok_twists == twists;
            body += std::to_string(p) + "," + std::to_string(c) + "," + std::to_string(p) +
                    "." + std::to_string(c) + ".1," + g17(hc) + "," + g17(he) + "," +
                    (agree ? "yes" : "NO") + "," + std::to_string(ok_twists) + "/" +
                    std::to_string(twists) + "\n";
            wlab_ps_free(ps);
        }
    }
    write_out(out, body);
    return all_ok ? kExitOk : kExitAcceptance;
}

int cmd_arch(const std::string& series, double lo, double hi, int npts, int jobs,
             const std::string& out, Report rep) {
    int kind = series == "discrete" ? 0 : series == "principal" ? 1 : 2;
    std::string body = rep.csv_header({"parameter", "ratio"});
    for (int i = 0; i < npts; ++i) {
        double t = npts == 1 ? 0 : double(i) / (npts - 1);
        double param = lo * std::pow(hi / lo, t);
        if (kind == 0) param = std::max<double>(2, 2 * std::llround(param / 2));
        double ratio;
        require(wlab_arch_ratio(kind, param, &ratio), "arch ratio");
        body += g17(param) + "," + g17(ratio) + "\n";
    }
    if (kind == 1) {
        double slope;
        require(wlab_kbessel_fit(lo, hi, npts, jobs, &slope), "exponent fit");
        body += "# fitted_exponent: " + g17(slope) + "\n";
    } else if (kind == 2) {
        double ms, ns, net;
        require(wlab_nt_fits(lo, hi, npts, jobs, &ms, &ns, &net), "nt fits");
        body += "# fitted_max_exponent: " + g17(ms) + "\n";
        body += "# fitted_norm_exponent: " + g17(ns) + "\n";
        body += "# net_ratio_exponent: " + g17(net) + "\n";
    }
    write_out(out, body);
    return kExitOk;
}

int cmd_fetch(const std::string& url, int64_t level, int64_t p, int c, int64_t k,
              int64_t min_coeffs, const std::string& cache, bool offline) {
    std::vector<char> buf(1 << 16);
    int from_cache = 0, empty = 0;
    require(wlab_fetch(url.empty() ? nullptr : url.c_str(), level, 2, p, c, k, min_coeffs,
                       cache.c_str(), offline ? 1 : 0, buf.data(), buf.size(), &from_cache,
                       &empty),
            "fetch");
    if (empty) {
        std::printf("empty-space: no forms at level %" PRId64 " for this character\n", level);
        return kExitOk;
    }
    std::printf("%s%s", buf.data(), from_cache ? "(cache)\n" : "(network)\n");
    return kExitOk;
}

int cmd_global(const std::string& action, const std::string& form_path, const std::string& xs,
               const std::string& ys, double tol, int64_t m_max, uint64_t seed, int jobs,
               const std::string& out, Report rep) {
    FormHandle h;
    load(h, form_path);
    rep.add_input(form_path);
    json j;
    j["meta"] = rep.meta();
    int exit_code = kExitOk;

    int64_t level, count;
    int empty, prim;
    require(wlab_form_info(h.f, &level, &count, &empty, &prim), "info");
    j["level"] = level;
    j["coefficients"] = count;
    if (empty) {
        j["empty_space"] = true;
        write_out(out, j.dump(2) + "\n");
        return kExitOk;
    }

    if (action == "eval") {
        int64_t xn, xd, yn, yd;
        if (!parse_rational(xs, &xn, &xd) || !parse_rational(ys, &yn, &yd))
            throw Fail{1, "--x and --y must be rationals like 3/5"};
        double re, im, bound;
        int64_t terms;
        require(wlab_form_eval(h.f, xn, xd, yn, yd, tol, &re, &im, &bound, &terms), "eval");
        j["eval"] = {{"x", xs},        {"y", ys},           {"re", re},
                     {"im", im},       {"abs", std::hypot(re, im)},
                     {"tail_bound", bound}, {"terms", terms}};
        if (prim) {
            double tre, tim, tbound;
            require(wlab_form_eval_twisted(h.f, 0, 1, 1, 1, tol, &tre, &tim, &tbound),
                    "twisted");
            j["twisted_at_i"] = {{"abs", std::hypot(tre, tim)}, {"tail_bound", tbound}};
        }
    } else if (action == "scan") {
        double mx, expn;
        require(wlab_supnorm_scan(h.f, 64, 64, 0, 1.0, 1, 1, jobs, &mx, &expn), "scan");
        j["scan"] = {{"max_abs", mx}, {"exponent", expn}};
    } else if (action == "wilton") {
        int64_t xn, xd;
        if (!parse_rational(xs, &xn, &xd)) throw Fail{1, "--x must be rational"};
        double best;
        int64_t bm;
        require(wlab_wilton_lower(h.f, xn, xd, m_max, &best, &bm), "wilton scan");
        double slope;
        require(wlab_wilton_upper_fit(h.f, m_max, 12, seed, &slope), "wilton fit");
        j["wilton"] = {{"x", xs}, {"best_ratio", best}, {"best_M", bm},
                       {"upper_fit_slope", slope}};
    } else if (action == "hecke-integral") {
        double re, im, band;
        int have;
        require(wlab_hecke_integral(h.f, &re, &im, &band, &have), "hecke integral");
        j["hecke_integral"] = {{"re", re}, {"im", im}};
        if (have) j["hecke_integral"]["lvalue_band"] = band;
    } else if (action == "certify") {
        double cert = 0, mx = 0, expn = 0;
        int rc = wlab_certificate(h.f, &cert);
        if (rc == WLAB_EUNSUPPORTED) {
            j["certificate"] = "unavailable: nebentypus not primitive";
        } else {
            require(rc, "certificate");
            require(wlab_supnorm_scan(h.f, 64, 64, 0, 1.0, 1, 1, jobs, &mx, &expn), "scan");
            bool pass = mx >= cert;
            j["certificate"] = {{"value", cert},
                                {"scan_max", mx},
                                {"exponent", expn},
                                {"pass", pass}};
            if (!pass) exit_code = kExitAcceptance;
        }
    } else {
        throw Fail{1, "unknown global action: " + action};
    }
    write_out(out, j.dump(2) + "\n");
    return exit_code;
}

int cmd_mvalue(const std::vector<std::string>& form_paths, int order, int jobs,
               const std::string& out, Report rep) {
    std::vector<FormHandle> handles(form_paths.size());
    std::vector<const wlab_form*> raw;
    for (size_t i = 0; i < form_paths.size(); ++i) {
        load(handles[i], form_paths[i]);
        rep.add_input(form_paths[i]);
        raw.push_back(handles[i].f);
    }
    wlab_basis* basis = wlab_basis_new(raw.data(), int(raw.size()), order, jobs);
    if (!basis) throw Fail{kExitValidation, wlab_last_error()};
    int64_t dim;
    int complete;
    require(wlab_basis_info(basis, &dim, &complete), "basis info");
    std::string body = rep.csv_header({"point", "m_chi", "partial"});
    // z_chi plus a short vertical sample
    int64_t b, a, zxn, zxd, zyn, zyd;
    if (wlab_special_point(raw[0], &b, &a, &zxn, &zxd, &zyn, &zyd) == WLAB_OK) {
        double v;
        int partial;
        require(wlab_mchi(basis, zxn, zxd, zyn, zyd, &v, &partial), "m_chi");
        body += "z_chi," + g17(v) + "," + (partial ? std::string("yes") : std::string("no")) +
                "\n";
    }
    for (int t = 0; t < 5; ++t) {
        int64_t yn = 1 + t, yd = 4;
        double v;
        int partial;
        require(wlab_mchi(basis, 0, 1, yn, yd, &v, &partial), "m_chi");
        body += "i*" + std::to_string(yn) + "/" + std::to_string(yd) + "," + g17(v) + "," +
                (partial ? "yes" : "no") + "\n";
    }
    double avg, err;
    require(wlab_mchi_average(basis, order, jobs, &avg, &err), "average");
    body += "# expected_dim: " + std::to_string(dim) + "\n";
    body += "# complete_basis: " + std::string(complete ? "yes" : "no") + "\n";
    body += "# domain_average: " + g17(avg) + " +- " + g17(err) + "\n";
    body += "# quarter_pi_inv: " + g17(1.0 / (4 * M_PI)) + "\n";
    wlab_basis_free(basis);
    write_out(out, body);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wlab: Whittaker newvector invariants and modular form large values"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file merged under flags");

    // local
    auto* local = app.add_subcommand("local", "local Whittaker value table");
    int64_t p = 5;
    int c = 2;
    bool all_chars = false, oracle = false;
    int jobs = 1;
    std::string out = "-";
    local->add_option("--p", p, "prime");
    local->add_option("--c", c, "conductor exponent");
    local->add_flag("--all-chars", all_chars, "all primitive characters");
    local->add_flag("--oracle", oracle, "evaluate through the Jacquet oracle");
    local->add_option("--jobs", jobs);
    local->add_option("--out", out);

    // h-table
    auto* htab = app.add_subcommand("h-table", "h invariant table");
    std::vector<int64_t> hps{3, 5};
    std::vector<int> hcs{2, 3, 4};
    int twists = 0;
    uint64_t seed = 20260810;
    htab->add_option("--p", hps, "primes")->delimiter(',');
    htab->add_option("--c", hcs, "conductor exponents")->delimiter(',');
    htab->add_option("--twists", twists, "random unimodular twist checks per row");
    htab->add_option("--seed", seed);
    htab->add_option("--jobs", jobs);
    htab->add_option("--out", out);

    // arch
    auto* arch = app.add_subcommand("arch", "archimedean ratio table");
    std::string series = "discrete";
    double lo = 2, hi = 64;
    int npts = 8;
    arch->add_option("--series", series)
        ->check(CLI::IsMember({"discrete", "principal", "principal-nt"}));
    arch->add_option("--lo", lo);
    arch->add_option("--hi", hi);
    arch->add_option("--n", npts);
    arch->add_option("--jobs", jobs);
    arch->add_option("--out", out);

    // fetch
    auto* fetch = app.add_subcommand("fetch", "download coefficients from a database");
    std::string db_url, cache_dir = "wlab-cache", char_orbit = "5.2.2";
    int64_t level = 25, min_coeffs = 2000;
    bool offline = false;
    fetch->add_option("--level", level);
    fetch->add_option("--char-orbit", char_orbit, "p.c.k");
    fetch->add_option("--min-coeffs", min_coeffs);
    fetch->add_option("--db-url", db_url, "endpoint (or env WLAB_DB_URL)");
    fetch->add_option("--cache", cache_dir);
    fetch->add_flag("--offline", offline, "cache only, no network");

    // global
    auto* global = app.add_subcommand("global", "q-expansion evaluations");
    std::string action = "eval", form_path, xs = "0", ys = "1";
    double tol = 1e-9;
    int64_t m_max = 1250;
    global->add_option("action", action)
        ->check(CLI::IsMember({"eval", "scan", "wilton", "hecke-integral", "certify"}));
    global->add_option("--form", form_path)->required();
    global->add_option("--x", xs, "rational x");
    global->add_option("--y", ys, "rational y");
    global->add_option("--tol", tol);
    global->add_option("--M", m_max);
    global->add_option("--seed", seed);
    global->add_option("--jobs", jobs);
    global->add_option("--out", out);

    // mvalue
    auto* mvalue = app.add_subcommand("mvalue", "mean value M_chi");
    std::vector<std::string> mv_forms;
    int order = 24;
    mvalue->add_option("--forms", mv_forms, "basis form files")->delimiter(',')->required();
    mvalue->add_option("--order", order);
    mvalue->add_option("--jobs", jobs);
    mvalue->add_option("--out", out);

    // certify (top level alias of global certify)
    auto* certify = app.add_subcommand("certify", "sup-norm certificate check");
    std::string cform;
    certify->add_option("--form", cform)->required();
    certify->add_option("--jobs", jobs);
    certify->add_option("--out", out);

    try {
        app.parse(argc, argv);
        merge_config(app, config_path);

        Report rep;
        for (const auto* sub :
             {local, htab, arch, fetch, global, mvalue, certify}) {
            if (sub->parsed())
                for (const auto* opt : sub->get_options()) {
                    if (opt->count() || !opt->get_default_str().empty()) {
                        std::string name = opt->get_name();
                        if (name == "--out") continue;  // not an input
                        if (!name.empty() && name.substr(0, 2) == "--")
                            rep.config[name.substr(2)] =
                                opt->count() ? opt->results()[0] : opt->get_default_str();
                    }
                }
        }

        if (local->parsed()) {
            rep.config["subcommand"] = "local";
            return cmd_local(p, c, all_chars, oracle, jobs, out, rep);
        }
        if (htab->parsed()) {
            rep.config["subcommand"] = "h-table";
            return cmd_h_table(hps, hcs, twists, seed, jobs, out, rep);
        }
        if (arch->parsed()) {
            rep.config["subcommand"] = "arch";
            return cmd_arch(series, lo, hi, npts, jobs, out, rep);
        }
        if (fetch->parsed()) {
            int64_t cp, ck;
            int cc;
            if (std::sscanf(char_orbit.c_str(), "%" PRId64 ".%d.%" PRId64, &cp, &cc, &ck) != 3)
                throw Fail{1, "--char-orbit must be p.c.k"};
            return cmd_fetch(db_url, level, cp, cc, ck, min_coeffs, cache_dir, offline);
        }
        if (global->parsed()) {
            rep.config["subcommand"] = "global:" + action;
            return cmd_global(action, form_path, xs, ys, tol, m_max, seed, jobs, out, rep);
        }
        if (mvalue->parsed()) {
            rep.config["subcommand"] = "mvalue";
            return cmd_mvalue(mv_forms, order, jobs, out, rep);
        }
        if (certify->parsed()) {
            rep.config["subcommand"] = "certify";
            return cmd_global("certify", cform, "0", "1", 1e-9, 1250, seed, jobs, out, rep);
        }
    } catch (const Fail& f) {
        std::fprintf(stderr, "error: %s\n", f.msg.c_str());
        return f.code;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
