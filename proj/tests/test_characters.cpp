#include <doctest.h>

#include "../src/characters.hpp"

using namespace wlab;

TEST_CASE("enumeration sizes and parity filters") {
    // mod 9: 4 primitive, 2 of them even, both of order 3
    auto prim9 = enumerate_chars(3, 2, true, false);
    CHECK(prim9.size() == 4);
    auto even9 = enumerate_chars(3, 2, true, true);
    REQUIRE(even9.size() == 2);
    CHECK(even9[0].order() == 3);
    CHECK(even9[1].order() == 3);
    // brute-force parity filter agrees with the cached parity
    for (const auto& chi : prim9) {
        cplx at_minus1 = chi(-1);
        CHECK(std::abs(at_minus1.real() - chi.parity()) < 1e-14);
        CHECK(std::abs(at_minus1.imag()) < 1e-14);
    }

    CHECK(enumerate_chars(5, 2, true, true).size() == 8);

    DirichletChar triv(7, 1, 0);
    CHECK(triv.cond_exp() == 0);
    CHECK(triv.even());
}

TEST_CASE("multiplicativity and conductor by direct scan, p^c <= 343") {
    for (auto [p, c] : std::vector<std::pair<int64_t, int>>{{3, 1}, {3, 2}, {3, 3}, {5, 2},
                                                            {7, 1}, {7, 2}, {7, 3}}) {
        int64_t q = 1;
        for (int i = 0; i < c; ++i) q *= p;
        for (const auto& chi : enumerate_chars(p, c, false, false)) {
            // multiplicativity, exhaustive
            for (int64_t u = 1; u < q; ++u) {
                if (u % p == 0) continue;
                for (int64_t v = u; v < q; v += 7) {
                    if (v % p == 0) continue;
                    CHECK(std::abs(chi(u * v % q) - chi(u) * chi(v)) < 1e-12);
                }
            }
            // conductor: least p^j with chi trivial on units = 1 mod p^j
            int scan_c0 = c;
            for (int j = 0; j <= c; ++j) {
                int64_t pj = 1;
                for (int i = 0; i < j; ++i) pj *= p;
                bool trivial_on = true;
                for (int64_t t = 0; t < q / pj; ++t) {
                    int64_t u = (1 + pj * t) % q;
                    if (u % p == 0) continue;
                    if (std::abs(chi(u) - cplx(1.0)) > 1e-12) {
                        trivial_on = false;
                        break;
                    }
                }
                if (trivial_on) {
                    scan_c0 = j;
                    break;
                }
            }
            CHECK(scan_c0 == chi.cond_exp());
        }
    }
}

TEST_CASE("Gauss sums: primitive modulus, Ramanujan value, quadratic mod 5") {
    // |tau|^2 cross-checked by the brute double sum
    DirichletChar chi(7, 2, 3);
    REQUIRE(chi.primitive());
    cplx tau = gauss_sum(chi);
    CHECK(std::abs(std::abs(tau) - 7.0) < 1e-10);
    cplx double_sum = 0;
    auto roots = shared_roots(49);
    for (int64_t u = 1; u < 49; ++u) {
        if (u % 7 == 0) continue;
        for (int64_t v = 1; v < 49; ++v) {
            if (v % 7 == 0) continue;
            double_sum += chi(u) * std::conj(chi(v)) * (*roots)[(u - v + 49) % 49];
        }
    }
    CHECK(std::abs(double_sum.real() - 49.0) < 1e-8);
    CHECK(std::abs(double_sum.imag()) < 1e-8);

    // trivial character mod p: the Ramanujan sum c_p(1) = -1
    DirichletChar triv(11, 1, 0);
    cplx t = gauss_sum(triv);
    CHECK(std::abs(t - cplx(-1.0)) < 1e-12);

    // quadratic character mod 5: tau = sqrt(5)
    DirichletChar quad(5, 1, 2);
    CHECK(quad.order() == 2);
    cplx tq = gauss_sum(quad);
    CHECK(std::abs(tq - cplx(std::sqrt(5.0))) < 1e-12);
}

TEST_CASE("find_b: identity, distinctness mod 9, conjugation, inverse") {
    auto even9 = enumerate_chars(3, 2, true, true);
    REQUIRE(even9.size() == 2);
    BParam b0 = find_b(even9[0]);
    BParam b1 = find_b(even9[1]);
    CHECK(b0.b != b1.b);
    CHECK(((b0.b == 1 && b1.b == 2) || (b0.b == 2 && b1.b == 1)));

    // independent exhaustive verification against e^{2 pi i b z / p}
    for (const auto& chi : even9) {
        BParam bp = find_b(chi);
        for (int64_t z = 0; z < 3; ++z) {
            cplx lhs = chi(1 - 3 * z);
            cplx rhs = std::polar(1.0, 2 * PI * double(bp.b) * double(z) / 3.0);
            CHECK(std::abs(lhs - rhs) < 1e-14);
        }
        // conjugate flips the sign
        BParam bc = find_b(chi.conj());
        CHECK((bp.b + bc.b) % 3 == 0);
    }

    // a b = 1 mod 5 round trip for every primitive even chi mod 25
    for (const auto& chi : enumerate_chars(5, 2, true, true)) {
        BParam bp = find_b(chi);
        CHECK(bp.a * bp.b % 5 == 1);
    }

    // imprimitive character: contract violation detected
    DirichletChar imprim(5, 2, 5);  // conductor 5 only
    CHECK(!imprim.primitive());
    CHECK_THROWS_AS(find_b(imprim), Error);
}

TEST_CASE("the Gauss sum factors through b: tau = p chi(b) e^{2 pi i b/p^2}") {
    for (int64_t p : {3, 5, 7, 11}) {
        for (const auto& chi : enumerate_chars(p, 2, true, true)) {
            BParam bp = find_b(chi);
            cplx tau = gauss_sum(chi);
            cplx rhs = double(p) * chi(bp.b) *
                       std::polar(1.0, 2 * PI * double(bp.b) / double(p * p));
            CHECK(std::abs(tau - rhs) < 1e-9);
        }
    }
}

TEST_CASE("epsilon W(e): modulus p^{-c/2}, shell control, support condition") {
    for (auto [p, c] : std::vector<std::pair<int64_t, int>>{{3, 2}, {5, 2}, {3, 4}, {7, 2}}) {
        DirichletChar chi(p, c, 1);
        REQUIRE(chi.primitive());
        UnitaryCharacter u(chi, std::polar(1.0, 0.7));
        EpsilonFactor e = epsilon_W_at_identity(u);
        double want = std::pow(double(p), -0.5 * c);
        CHECK(std::abs(std::abs(e.value) - want) < 1e-12);
    }
    // conductor p^4 -> p^{-2}
    DirichletChar chi54(5, 4, 1);
    EpsilonFactor e = epsilon_W_at_identity(UnitaryCharacter(chi54, 1.0));
    CHECK(std::abs(std::abs(e.value) - 1.0 / 25.0) < 1e-12);

    // not ramified enough: the support requirement is empty
    DirichletChar shallow(5, 1, 1);
    CHECK_THROWS_AS(epsilon_W_at_identity(UnitaryCharacter(shallow, 1.0)), Error);
}

TEST_CASE("character serialization data in ids") {
    DirichletChar chi(5, 2, 7);
    CHECK(chi.id() == "5.2.7");
    CHECK(chi.generator() == 2);
}
