#include <doctest.h>

#include <wlab.h>

#include <cmath>
#include <string>

#ifndef WLAB_SOURCE_DIR
#define WLAB_SOURCE_DIR "."
#endif

namespace {
const std::string kForms = std::string(WLAB_SOURCE_DIR) + "/data/forms/";
}

TEST_CASE("C API: character lifecycle, error reporting") {
    wlab_char* chi = wlab_char_new(5, 2, 2);
    REQUIRE(chi != nullptr);
    int cond, parity, prim;
    int64_t gen, order;
    CHECK(wlab_char_info(chi, &cond, &parity, &prim, &gen, &order) == WLAB_OK);
    CHECK(cond == 2);
    CHECK(parity == 1);
    CHECK(prim == 1);
    CHECK(gen == 2);
    CHECK(order == 10);

    double re, im;
    CHECK(wlab_gauss_sum(chi, &re, &im) == WLAB_OK);
    CHECK(std::hypot(re, im) == doctest::Approx(5.0));

    int64_t b, a;
    CHECK(wlab_find_b(chi, &b, &a) == WLAB_OK);
    CHECK(a * b % 5 == 1);
    wlab_char_free(chi);

    // invalid construction: null handle plus a readable message
    wlab_char* bad = wlab_char_new(4, 2, 1);
    CHECK(bad == nullptr);
    CHECK(std::string(wlab_last_error()).find("prime") != std::string::npos);

    int64_t count;
    CHECK(wlab_count_chars(5, 2, 1, 1, &count) == WLAB_OK);
    CHECK(count == 8);
}

TEST_CASE("C API: local values and h through the shared surface") {
    wlab_ps* ps = wlab_ps_new(5, 2, 2, 1, 0, 1, 0);
    REQUIRE(ps != nullptr);

    double re, im;
    int nz, prov;
    CHECK(wlab_w_oracle(ps, 2, 0, 1, &re, &im, &nz, &prov) == WLAB_OK);
    CHECK(re == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prov == 1);

    wlab_char* chi = wlab_char_new(5, 2, 2);
    int64_t b, a;
    wlab_find_b(chi, &b, &a);
    wlab_char_free(chi);
    CHECK(wlab_w_closed(ps, 1, -2, b, &re, &im, &nz) == WLAB_OK);
    CHECK(nz == 1);
    CHECK(std::hypot(re, im) == doctest::Approx(std::sqrt(5.0)));

    double h0, h1;
    CHECK(wlab_h_invariant(ps, 0, 1, &h0) == WLAB_OK);
    CHECK(wlab_h_invariant(ps, 1, 2, &h1) == WLAB_OK);
    CHECK(h0 == doctest::Approx(h1).epsilon(1e-10));

    double gre, gim;
    CHECK(wlab_w_oracle_general(ps, 0, 2, 0, 1, &gre, &gim) == WLAB_OK);
    CHECK(gre == doctest::Approx(1.0).epsilon(1e-12));  // [[1,0],[p^2,1]] lies in I_2

    wlab_ps_free(ps);
}

TEST_CASE("C API: archimedean surface") {
    double ratio;
    CHECK(wlab_arch_ratio(0, 2, &ratio) == WLAB_OK);
    CHECK(ratio == doctest::Approx(2.0 / std::exp(1.0)));
    CHECK(wlab_arch_ratio(1, 700, &ratio) == WLAB_EINVAL);
}

TEST_CASE("C API: forms end to end") {
    wlab_form* f = wlab_form_load((kForms + "25.2.e.0.wform").c_str());
    REQUIRE(f != nullptr);
    int64_t level, count;
    int empty, prim;
    CHECK(wlab_form_info(f, &level, &count, &empty, &prim) == WLAB_OK);
    CHECK(level == 25);
    CHECK(empty == 0);
    CHECK(prim == 1);

    char buf[2048];
    int blocked;
    CHECK(wlab_form_validation(f, buf, sizeof buf, &blocked) == WLAB_OK);
    CHECK(blocked == 0);
    CHECK(std::string(buf).find("hecke_multiplicativity: ok") != std::string::npos);

    int64_t b, a, zxn, zxd, zyn, zyd;
    CHECK(wlab_special_point(f, &b, &a, &zxn, &zxd, &zyn, &zyd) == WLAB_OK);
    CHECK(zyd == 125);

    double re, im, bound;
    int64_t terms;
    CHECK(wlab_form_eval(f, zxn, zxd, zyn, zyd, 1e-9, &re, &im, &bound, &terms) == WLAB_OK);
    CHECK(std::hypot(re, im) ==
          doctest::Approx(std::sqrt(5.0) * std::exp(-2 * M_PI)).epsilon(1e-4));

    double cert;
    CHECK(wlab_certificate(f, &cert) == WLAB_OK);
    CHECK(cert == doctest::Approx(std::pow(25.0, 0.25) / (2 * M_PI * std::exp(1.0))));
    wlab_form_free(f);

    // empty-space file through the C surface
    wlab_form* e = wlab_form_load((kForms + "9.2.k2.empty.wform").c_str());
    REQUIRE(e != nullptr);
    CHECK(wlab_form_info(e, &level, &count, &empty, &prim) == WLAB_OK);
    CHECK(empty == 1);
    CHECK(count == 0);
    wlab_form_free(e);

    // certificate on the trivial-nebentypus form is unavailable by contract
    wlab_form* f11 = wlab_form_load((kForms + "11.2.a.0.wform").c_str());
    REQUIRE(f11 != nullptr);
    CHECK(wlab_certificate(f11, &cert) == WLAB_EUNSUPPORTED);
    wlab_form_free(f11);
}

TEST_CASE("C API: coset index and hashes") {
    int64_t index, cusps;
    CHECK(wlab_coset_index(25, &index, &cusps) == WLAB_OK);
    CHECK(index == 30);
    CHECK(cusps == 6);

    char hex[65];
    CHECK(wlab_sha256_str("abc", 3, hex) == WLAB_OK);
    CHECK(std::string(hex, 64) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
