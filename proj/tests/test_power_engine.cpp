#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "csc/engine.hpp"
#include "csc/power.hpp"
#include "test_oracles.hpp"

using namespace csc;
using Catch::Approx;

namespace {
PowerModel benchmark_power() {
    PowerModel pm;
    pm.p0_bol_w = 10000.0;
    pm.a_coeffs = PowerModel::rational_fit_coeffs();
    pm.sigma_per_year = 0.02;
    pm.d_coeffs_w = {400.0, 0.0, 0.0};
    return pm;
}
}  // namespace

TEST_CASE("phi: rational fit at 1 AU") {
    const PowerModel pm = benchmark_power();
    // (1.321 - 0.108 - 0.117) / (1 + 0.108 - 0.013) = 1.096 / 1.095
    CHECK(pm.phi(1.0) == Approx(1.096 / 1.095).epsilon(1e-12));
    CHECK(pm.phi(1.0) == Approx(1.000913).epsilon(1e-5));
}

TEST_CASE("phi: inverse-square coefficients reduce to 1/r^2 exactly") {
    PowerModel pm;
    pm.p0_bol_w = 1.0;
    pm.a_coeffs = PowerModel::inverse_square_coeffs();
    CHECK(pm.phi(2.0) == Approx(0.25).epsilon(1e-15));
    for (double r : {0.4, 0.7, 1.0, 1.3, 2.2, 5.0})
        CHECK(pm.phi(r) == Approx(1.0 / (r * r)).epsilon(1e-15));
}

TEST_CASE("phi: independent symbolic evaluation at r = 0.5") {
    const PowerModel pm = benchmark_power();
    const double r = 0.5;
    // Horner-style independent evaluation of the same rational expression.
    const double num = ((1.321 * r - 0.108) * r - 0.117) / (r * r);
    const double den = (-0.013 * r + 0.108) * r + 1.0;
    const double expected = num / den / (r * r);
    CHECK(pm.phi(r) == Approx(expected).epsilon(1e-13));
}

TEST_CASE("phi rejects non-positive distance") {
    const PowerModel pm = benchmark_power();
    CHECK_THROWS_AS(pm.phi(0.0), std::domain_error);
    CHECK_THROWS_AS(pm.phi(-1.0), std::domain_error);
    CHECK_THROWS_AS(pm.bus_power_w(0.0), std::domain_error);
}

TEST_CASE("psi: launch epoch, one year, and the benchmark flight time") {
    const PowerModel pm = benchmark_power();
    CHECK(pm.psi(0.0) == 1.0);
    CHECK(pm.psi(1.0) == Approx(0.98).epsilon(1e-15));

    const double tau = 3543.0 / 365.25;
    CHECK(pm.psi(tau) == Approx(std::exp(tau * std::log(0.98))).epsilon(1e-13));
    CHECK(pm.psi(tau) == Approx(0.8221).epsilon(2e-4));

    // monotone non-increasing
    double prev = 1.0;
    for (double t = 0.0; t < 12.0; t += 0.5) {
        CHECK(pm.psi(t) <= prev + 1e-15);
        prev = pm.psi(t);
    }
}

TEST_CASE("solar array power: benchmark values and strict decay") {
    const PowerModel pm = benchmark_power();
    CHECK(pm.solar_array_power_w(0.0, 1.0) == Approx(10009.1324).epsilon(1e-6));

    PowerModel inv = pm;
    inv.a_coeffs = PowerModel::inverse_square_coeffs();
    inv.sigma_per_year = 0.0;
    CHECK(inv.solar_array_power_w(5.0, 2.0) == Approx(2500.0).epsilon(1e-13));

    // strict monotone decay in time at fixed r when sigma > 0
    CHECK(pm.solar_array_power_w(2.0, 1.3) < pm.solar_array_power_w(1.0, 1.3));
}

TEST_CASE("solar array power: rational fit differs from inverse-square mostly below 1 AU") {
    PowerModel rat = benchmark_power();
    rat.sigma_per_year = 0.0;
    PowerModel inv = rat;
    inv.a_coeffs = PowerModel::inverse_square_coeffs();

    // Below 1 AU the fitted curve departs strongly from 1/r^2 ...
    const double dev_in = std::abs(rat.solar_array_power_w(0.0, 0.5) /
                                       inv.solar_array_power_w(0.0, 0.5) - 1.0);
    // ... while just above 1 AU the two stay close.
    const double dev_out = std::abs(rat.solar_array_power_w(0.0, 1.1) /
                                        inv.solar_array_power_w(0.0, 1.1) - 1.0);
    CHECK(dev_in > 5.0 * dev_out);
}

TEST_CASE("bus power: constant draw and reciprocal series") {
    PowerModel pm = benchmark_power();
    for (double r : {0.5, 1.0, 3.0}) CHECK(pm.bus_power_w(r) == Approx(400.0));

    pm.d_coeffs_w = {0.0, 0.0, 0.0};
    CHECK(pm.bus_power_w(1.7) == 0.0);

    pm.d_coeffs_w = {100.0, 50.0, 25.0};
    CHECK(pm.bus_power_w(0.5) == Approx(300.0).epsilon(1e-15));
}

TEST_CASE("available power: benchmark value at departure and continuity") {
    const PowerModel pm = benchmark_power();
    CHECK(pm.available_power_w(0.0, 1.0) == Approx(9609.1324).epsilon(1e-6));

    PowerModel zero = pm;
    zero.d_coeffs_w = {pm.solar_array_power_w(0.0, 1.0), 0.0, 0.0};
    CHECK(zero.available_power_w(0.0, 1.0) == Approx(0.0).margin(1e-9));

    // the gap below the array curve equals the constant bus draw
    for (double r : {0.8, 1.0, 1.5, 2.5})
        CHECK(pm.solar_array_power_w(1.0, r) - pm.available_power_w(1.0, r) ==
              Approx(400.0).epsilon(1e-13));

    // continuity probe over a fine radial grid; the steepest gradient on
    // [0.4, 2.2] AU is a few hundred watts per milli-AU for a 10 kW array
    double prev = pm.available_power_w(0.0, 0.4);
    for (double r = 0.4; r <= 2.2; r += 1e-3) {
        const double cur = pm.available_power_w(0.0, r);
        CHECK(std::abs(cur - prev) < 500.0);
        prev = cur;
    }
}

TEST_CASE("power model validation") {
    PowerModel pm = benchmark_power();
    CHECK_NOTHROW(pm.validate());
    pm.sigma_per_year = 1.5;
    CHECK_THROWS_AS(pm.validate(), std::domain_error);
    pm = benchmark_power();
    pm.a_coeffs = {2.0, 0.0, 0.0, 0.0, 0.0};  // phi(1) = 2, way off
    CHECK_THROWS_AS(pm.validate(), std::domain_error);
}

TEST_CASE("engine: thrust and mass flow at the benchmark operating point") {
    EngineModel eng;
    eng.efficiency = 0.65;
    eng.c_min_m_s = 3000.0 * 9.80665;
    eng.c_max_m_s = 6000.0 * 9.80665;
    CHECK_NOTHROW(eng.validate());

    const double c = 3000.0 * 9.80665;  // 29419.95 m/s
    CHECK(eng.thrust_n(10000.0, c) == Approx(13000.0 / 29419.95).epsilon(1e-6));
    CHECK(eng.thrust_n(10000.0, c) == Approx(0.44188).epsilon(1e-4));
    CHECK(eng.thrust_n(0.0, c) == 0.0);

    CHECK(eng.mass_flow_kg_s(10000.0, c) == Approx(-1.50196e-5).epsilon(1e-5));
    CHECK(eng.mass_flow_kg_s(0.0, c) == 0.0);

    // doubling c at fixed P halves T
    CHECK(eng.thrust_n(10000.0, 2.0 * c) == Approx(0.5 * eng.thrust_n(10000.0, c)));
}

TEST_CASE("engine: identity mdot * c + T = 0 and the Isp/thrust trade") {
    EngineModel eng;
    eng.efficiency = 0.7;
    eng.c_min_m_s = 1.0e4;
    eng.c_max_m_s = 6.0e4;

    std::uint64_t rng = 5;
    for (int i = 0; i < 50; ++i) {
        const double p = 1.0 + 2e4 * oracle::u01(rng);
        const double c = 1e4 + 5e4 * oracle::u01(rng);
        CHECK(eng.mass_flow_kg_s(p, c) * c + eng.thrust_n(p, c) == Approx(0.0).margin(1e-12));
    }

    // strict decrease of T and |mdot| in c at fixed P
    double prev_t = 1e9, prev_m = 1e9;
    for (double c = 1e4; c <= 6e4; c += 5e3) {
        CHECK(eng.thrust_n(500.0, c) < prev_t);
        CHECK(std::abs(eng.mass_flow_kg_s(500.0, c)) < prev_m);
        prev_t = eng.thrust_n(500.0, c);
        prev_m = std::abs(eng.mass_flow_kg_s(500.0, c));
    }

    CHECK_THROWS_AS(eng.thrust_n(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(eng.mass_flow_kg_s(1.0, -1.0), std::domain_error);
}
