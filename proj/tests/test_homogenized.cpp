#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcf/errors.hpp"
#include "qcf/homogenized.hpp"

using namespace qcf;

namespace {
// Aluminum reference constants (reference-moments mode).
constexpr double kLambda = 1.0 / 6.0;
constexpr double kAlpha = 0.1629;
constexpr double kGamma = 0.9449;

HomogenizedModel aluminum() { return build_model(kLambda, kAlpha, kGamma); }
}  // namespace

TEST_CASE("aluminum constants give Case 1 with the frozen roots") {
    const HomogenizedModel m = aluminum();
    CHECK(m.regime == Regime::case1);
    // Frozen long-double oracle values of the root formula for these inputs.
    CHECK(m.k_plus == doctest::Approx(0.237589309653111378).epsilon(1e-12));
    CHECK(m.k_minus == doctest::Approx(3.35892115417116600).epsilon(1e-12));
    CHECK(m.l0 == doctest::Approx(1.11940346636734751).epsilon(1e-12));
    CHECK(std::abs(m.l1) == doctest::Approx(0.419982747463094).epsilon(1e-10));
    CHECK(m.k_plus < m.k_minus);
    // Root product/sum identities of the quartic characteristic polynomial.
    CHECK(m.k_plus * m.k_plus * m.k_minus * m.k_minus ==
          doctest::Approx(m.inv_l0_4()).epsilon(1e-12));
    CHECK(m.k_plus * m.k_plus + m.k_minus * m.k_minus ==
          doctest::Approx(2.0 * m.inv_l1_sq()).epsilon(1e-12));
}

TEST_CASE("regime classification") {
    CHECK(build_model(1.0, 0.5, 1.0).regime == Regime::case2);  // l0 = l1 = 1
    CHECK(build_model(1.0, 1.0, 1.0).regime == Regime::case3);  // l0 < l1
    CHECK(build_model(1.0, 0.1, -1.0).regime == Regime::non_integrable);
    CHECK_THROWS_AS(build_model(-1.0, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(build_model(1.0, 0.0, 1.0), ValidationError);
}

TEST_CASE("Case 1 Green's function matches the explicit real-root formula") {
    const HomogenizedModel m = aluminum();
    for (double r : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double expect = (std::exp(-m.k_plus * r) - std::exp(-m.k_minus * r)) /
                              (4.0 * M_PI * (m.k_minus * m.k_minus - m.k_plus * m.k_plus) * r);
        CHECK(green_u(m, r) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("Case 2 closed forms") {
    const HomogenizedModel m = build_model(1.0, 0.5, 1.0);
    REQUIRE(m.regime == Regime::case2);
    CHECK(m.l0 == doctest::Approx(1.0));
    for (double r : {0.3, 1.0, 4.0}) {
        CHECK(green_u(m, r) ==
              doctest::Approx(m.l0 / (8.0 * M_PI) * std::exp(-r / m.l0)).epsilon(1e-13));
        const double ephi = -m.lambda / (16.0 * M_PI * m.alpha) * (1.0 / m.l0 + 2.0 / r) *
                            std::exp(-r / m.l0);
        CHECK(green_phi(m, r) == doctest::Approx(ephi).epsilon(1e-13));
    }
}

TEST_CASE("E_phi equals (lambda/2alpha)(Lap E_u - (2/l1^2) E_u)") {
    // Radial Laplacian via (r E_u)'' / r with a central difference.
    for (const HomogenizedModel& m :
         {aluminum(), build_model(1.0, 0.7, 1.0) /* case3 */}) {
        for (double r : {1.0, 3.0}) {
            const double h = 1e-4;
            auto w = [&](double x) { return x * green_u(m, x); };
            const double lap = (w(r - h) - 2.0 * w(r) + w(r + h)) / (h * h) / r;
            const double expect =
                m.lambda / (2.0 * m.alpha) * (lap - 2.0 * m.inv_l1_sq() * green_u(m, r));
            CHECK(green_phi(m, r) == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("Case 3 kernel is real and decays") {
    const HomogenizedModel m = build_model(1.0, 1.0, 1.0);
    REQUIRE(m.regime == Regime::case3);
    const double g1 = green_u(m, 1.0), g2 = green_u(m, 6.0);
    CHECK(std::isfinite(g1));
    CHECK(std::abs(g2) < std::abs(g1));
    CHECK(std::isfinite(green_phi(m, 1.0)));
}

TEST_CASE("non-integrable regime is rejected for field evaluation") {
    const HomogenizedModel m = build_model(1.0, 0.1, -1.0);
    CHECK_THROWS_AS(green_u(m, 1.0), RegimeError);
    CHECK_THROWS_AS(green_phi(m, 1.0), RegimeError);
    CHECK_THROWS_AS(decay_summary(m), RegimeError);
}

TEST_CASE("ode_residual decreases at order h^2") {
    const HomogenizedModel m = aluminum();
    for (double r : {1.0, 5.0, 20.0}) {
        // h large enough that truncation dominates the eps/h^4 rounding
        // floor of the fourth difference, even where E_u is tiny
        const double r1 = ode_residual(m, r, 0.1);
        const double r2 = ode_residual(m, r, 0.05);
        CHECK(r2 < r1);
        CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.3));
    }
    CHECK_THROWS_AS(ode_residual(m, 1e-3, 1e-2), ValidationError);
}

TEST_CASE("Case 1 -> Case 2 continuity near the confluent point") {
    const double l0 = build_model(kLambda, kAlpha, 1.0).l0;  // l0 independent of gamma
    const HomogenizedModel confluent = build_model(kLambda, kAlpha, kLambda / (l0 * l0));
    REQUIRE(confluent.regime == Regime::case2);
    const double l1 = l0 * (1.0 + 1e-6);
    const HomogenizedModel near = build_model(kLambda, kAlpha, kLambda / (l1 * l1));
    REQUIRE(near.regime != Regime::non_integrable);
    for (double r : {0.5, 1.0, 3.0}) {
        CHECK(green_u(near, r) == doctest::Approx(green_u(confluent, r)).epsilon(1e-4));
        CHECK(green_phi(near, r) == doctest::Approx(green_phi(confluent, r)).epsilon(1e-4));
    }
}

TEST_CASE("decay summary") {
    const HomogenizedModel m = aluminum();
    const DecaySummary s = decay_summary(m);
    CHECK(s.rate == doctest::Approx(m.k_plus));
    CHECK(s.decay_length == doctest::Approx(1.0 / m.k_plus));
    CHECK(s.elastic_power == 2);
    // sanity tying the decay rate to the 1% cell-size threshold
    CHECK(std::exp(-m.k_plus * (3.0 * 7.5 - 3.75)) == doctest::Approx(0.0116226).epsilon(1e-4));
}
