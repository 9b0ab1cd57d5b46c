#include <doctest.h>

#include "../src/whittaker_arch.hpp"

using namespace wlab;

TEST_CASE("discrete series: exact k = 2 value and the Stirling limit") {
    double r2 = arch_ratio(ArchRepresentation::discrete_series(2));
    CHECK(r2 == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-14));

    // independent oracle at k = 2: numeric max and numeric norm quadrature
    auto W = [](double y) { return y * std::exp(-2 * PI * y); };
    double ymax = golden_max([&](double y) { return W(y); }, 0.01, 2.0);
    CHECK(ymax == doctest::Approx(1.0 / (2 * PI)).epsilon(1e-8));
    double norm = 0;  // int_0^inf y^2 e^{-4 pi y} dy/y by midpoint on a log grid
    for (int i = 0; i < 400000; ++i) {
        double t = -12.0 + 16.0 * (i + 0.5) / 400000;
        double y = std::exp(t);
        norm += y * std::exp(-4 * PI * y) * y * (16.0 / 400000);
    }
    CHECK(norm == doctest::Approx(1.0 / (16 * PI * PI)).epsilon(1e-6));
    CHECK(W(ymax) / std::sqrt(norm) == doctest::Approx(r2).epsilon(1e-6));

    double r1000 = arch_ratio(ArchRepresentation::discrete_series(1000));
    CHECK(r1000 / std::pow(1000.0, 0.25) ==
          doctest::Approx(std::pow(2 * PI, -0.25)).epsilon(1e-4));
}

TEST_CASE("weight-2 lowest vector: max y e^{-2 pi y} = (2 pi e)^{-1}") {
    double ymax = golden_max([](double y) { return y * std::exp(-2 * PI * y); }, 1e-4, 3.0);
    double vmax = ymax * std::exp(-2 * PI * ymax);
    CHECK(ymax == doctest::Approx(1.0 / (2 * PI)).epsilon(1e-9));
    CHECK(vmax == doctest::Approx(0.0585498).epsilon(2e-6));
    CHECK(std::abs(vmax - 1.0 / (2 * PI * std::exp(1.0))) < 1e-12);
}

TEST_CASE("scaled K-Bessel agrees with direct quadrature at small r") {
    // at small r the defining integral int_0^inf e^{-x cosh t} cos(rt) dt is
    // numerically benign, giving an implementation-independent reference
    auto direct = [](double r, double x) {
        double sum = 0;
        int n = 200000;
        double tmax = std::acosh(745.0 / x) + 1.0;
        for (int i = 0; i < n; ++i) {
            double t = tmax * (i + 0.5) / n;
            sum += std::exp(-x * std::cosh(t)) * std::cos(r * t) * (tmax / n);
        }
        return sum * std::exp(PI * r / 2);
    };
    for (double r : {0.8, 2.0, 5.0}) {
        ScaledMax m = kbessel_scaled_max(r);
        // reference maximum over a fine x-grid of x^{1/2} K~
        double ref = 0;
        for (int i = 0; i < 400; ++i) {
            double x = 0.05 + (3 * r + 4.0 - 0.05) * i / 399.0;
            ref = std::max(ref, std::sqrt(x) * std::abs(direct(r, x)));
        }
        CHECK(m.value == doctest::Approx(ref).epsilon(2e-4));
    }
}

TEST_CASE("transition location: |y* - r/(2 pi)| < sqrt(r)") {
    for (double r : {30.0, 100.0}) {
        ScaledMax m = kbessel_scaled_max(r);
        double ystar = m.location / (2 * PI);
        CHECK(std::abs(ystar - r / (2 * PI)) < std::sqrt(r));
        CHECK(m.value > 0);
    }
}

TEST_CASE("K-Bessel exponent fit lands on 1/6 within 0.02") {
    FitResult f = kbessel_exponent_fit(20, 200, 12, 4);
    CHECK(std::abs(f.slope - 1.0 / 6.0) < 0.02);
}

TEST_CASE("nontrivial central character: exploratory exponents") {
    NontrivialData d = whittaker_half_ir(40);
    CHECK(d.norm > 0);
    CHECK(d.max_abs > 0);
    // transition near the ODE turning point 1 + 2 sqrt(r^2 + 1/2)
    CHECK(std::abs(d.zmax - (1 + 2 * std::sqrt(40.0 * 40 + 0.5))) < 25);

    NontrivialFits fits = nontrivial_central_fits(20, 150, 8, 4);
    CHECK(std::abs(fits.max_fit.slope - 2.0 / 3.0) < 0.05);
    CHECK(std::abs(fits.norm_fit.slope - 1.0) < 0.05);
    CHECK(std::abs(fits.net_exponent - 1.0 / 6.0) < 0.05);
}

TEST_CASE("parameter guards") {
    CHECK_THROWS_AS(ArchRepresentation::discrete_series(3), Error);
    CHECK_THROWS_AS(ArchRepresentation::principal(600), Error);
    CHECK_THROWS_AS(ArchRepresentation::principal_nontrivial(5), Error);
    CHECK_THROWS_AS(kbessel_scaled_max(-1), Error);
}

TEST_CASE("arch table rows are finite and ordered") {
    auto rows = run_arch_table(ArchRepresentation::Kind::principal_trivial, 10, 40, 4, 2);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(std::isfinite(r.ratio));
        CHECK(r.ratio > 0);
    }
    CHECK(rows.front().parameter < rows.back().parameter);
}
