#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spanledger/errors.hpp"
#include "spanledger/fresnel.hpp"

using spanledger::fresnel_c;

TEST_CASE("small arguments follow the cubic leading term") {
    // C(x) ~ x - pi^2 x^5 / 40 for x -> 0
    for (double x : {1e-8, 1e-6, 1e-4}) {
        CHECK(fresnel_c(x) == doctest::Approx(x).epsilon(1e-12));
    }
    CHECK(fresnel_c(0.0) == 0.0);
    const double x = 1e-2;
    CHECK(fresnel_c(x) == doctest::Approx(x - std::pow(M_PI, 2) * std::pow(x, 5) / 40.0)
                              .epsilon(1e-14));
}

TEST_CASE("reference values") {
    // frozen from a 50-digit arbitrary-precision evaluation
    CHECK(fresnel_c(1.0) == doctest::Approx(0.77989340037682282947).epsilon(1e-14));
    CHECK(fresnel_c(2.3409399821439250218) ==
          doctest::Approx(0.60338583916854722387).epsilon(1e-13));  // sqrt(5.48)
    CHECK(fresnel_c(2.341313) == doctest::Approx(0.6031301182017220).epsilon(1e-13));
    CHECK(fresnel_c(50.0) == doctest::Approx(0.499999189).epsilon(1e-9));
    CHECK(spanledger::fresnel_c_max == doctest::Approx(fresnel_c(1.0)).epsilon(1e-15));
}

TEST_CASE("agrees with adaptive quadrature across all three branches") {
    // dense sweep hitting the series / continued fraction / asymptotic
    // regions and both handover points
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double x = 20.0 * i / 4000.0;
        worst = std::max(worst, std::abs(fresnel_c(x) - oracles::fresnel_c_quadrature(x)));
    }
    CHECK(worst < 1e-10);
    for (double x : {1.5999, 1.6, 1.6001, 7.9999, 8.0, 8.0001}) {
        CHECK(fresnel_c(x) ==
              doctest::Approx(oracles::fresnel_c_quadrature(x)).epsilon(1e-11));
    }
}

TEST_CASE("large arguments settle onto 1/2 with the known envelope") {
    // |C(x) - 1/2| <= 1/(pi x) once the asymptotic regime is reached
    for (double x : {10.0, 25.0, 60.0, 100.0}) {
        CHECK(std::abs(fresnel_c(x) - 0.5) <= 1.0 / (M_PI * x) + 1e-12);
    }
}

TEST_CASE("monotone increasing on [0, 1]") {
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = fresnel_c(i / 100.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(fresnel_c(-0.5), spanledger::model_error);
    CHECK_THROWS_AS(fresnel_c(std::nan("")), spanledger::model_error);
    CHECK_THROWS_AS(fresnel_c(std::numeric_limits<double>::infinity()),
                    spanledger::model_error);
}
