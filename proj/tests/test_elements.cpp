#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "csc/elements.hpp"
#include "csc/units.hpp"
#include "test_oracles.hpp"

using namespace csc;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

/// Random elliptic state via the oracle's classical path.
CartesianState random_elliptic_state(std::uint64_t& rng) {
    // e in [0, 0.9], i in [0, 150 deg]
    oracle::Classical c;
    c.a = 0.5 + 2.5 * oracle::u01(rng);
    c.e = 0.9 * oracle::u01(rng);
    c.i = 150.0 * pi / 180.0 * oracle::u01(rng);
    c.raan = 2.0 * pi * oracle::u01(rng);
    c.argp = 2.0 * pi * oracle::u01(rng);
    c.nu = 2.0 * pi * oracle::u01(rng);

    // Perifocal -> inertial.
    const double p = c.a * (1.0 - c.e * c.e);
    const double r = p / (1.0 + c.e * std::cos(c.nu));
    const double rx = r * std::cos(c.nu), ry = r * std::sin(c.nu);
    const double vf = std::sqrt(1.0 / p);
    const double vx = -vf * std::sin(c.nu), vy = vf * (c.e + std::cos(c.nu));

    const double co = std::cos(c.argp), so = std::sin(c.argp);
    const double ci = std::cos(c.i), si = std::sin(c.i);
    const double cn = std::cos(c.raan), sn = std::sin(c.raan);
    const auto rot = [&](double x, double y) -> Vec3d {
        const double x1 = co * x - so * y;
        const double y1 = so * x + co * y;
        return {cn * x1 - sn * ci * y1, sn * x1 + cn * ci * y1, si * y1};
    };
    return {rot(rx, ry), rot(vx, vy)};
}
}  // namespace

TEST_CASE("canonical units: sun mu is exactly one and scaling is invertible") {
    const CanonicalUnits u(1.495978707e8, 1.32712440018e11, 4000.0);
    const double mu_canonical = 1.32712440018e11 * u.time_unit_s() * u.time_unit_s() /
                                std::pow(u.length_unit_km(), 3);
    CHECK(mu_canonical == Approx(1.0).epsilon(1e-14));

    // Round trips.
    CHECK(u.km_from_length(u.length_from_km(1.7e8)) == Approx(1.7e8).epsilon(1e-14));
    CHECK(u.days_from_time(u.time_from_days(3543.0)) == Approx(3543.0).epsilon(1e-14));
    CHECK(u.kg_from_mass(u.mass_from_kg(123.4)) == Approx(123.4).epsilon(1e-14));
    CHECK(u.w_from_power(u.power_from_w(10e3)) == Approx(10e3).epsilon(1e-14));
    CHECK(u.km_s_from_velocity(u.velocity_from_km_s(30.0)) == Approx(30.0).epsilon(1e-14));

    // Earth-like circular speed is about 29.78 km/s.
    CHECK(u.velocity_unit_km_s() == Approx(29.7847).epsilon(1e-4));
}

TEST_CASE("mee_to_cart: circular equatorial identities") {
    Mee<double> x{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    auto c = mee_to_cart(x, 1.0);
    CHECK(c.r.x == Approx(1.0).margin(1e-15));
    CHECK(c.r.y == Approx(0.0).margin(1e-15));
    CHECK(c.v.y == Approx(1.0).margin(1e-15));

    x.l = pi / 2.0;
    c = mee_to_cart(x, 1.0);
    CHECK(c.r.x == Approx(0.0).margin(1e-15));
    CHECK(c.r.y == Approx(1.0).margin(1e-15));
    CHECK(c.v.x == Approx(-1.0).margin(1e-15));
    CHECK(c.v.y == Approx(0.0).margin(1e-15));
}

TEST_CASE("cart_to_mee: circular equatorial identity case") {
    const MeeState m = cart_to_mee({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 1.0);
    CHECK(m.p == Approx(1.0).margin(1e-14));
    CHECK(m.f == Approx(0.0).margin(1e-14));
    CHECK(m.g == Approx(0.0).margin(1e-14));
    CHECK(m.h == Approx(0.0).margin(1e-14));
    CHECK(m.k == Approx(0.0).margin(1e-14));
    CHECK(m.l == Approx(0.0).margin(1e-14));
}

TEST_CASE("cart_to_mee rejects degenerate inputs") {
    CHECK_THROWS_AS(cart_to_mee({0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 1.0), std::domain_error);
    // radial (rectilinear)
    CHECK_THROWS_AS(cart_to_mee({1.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, 1.0), std::domain_error);
    // retrograde equatorial: i = 180 deg
    CHECK_THROWS_AS(cart_to_mee({1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, 1.0), std::domain_error);
}

TEST_CASE("two-path conversion oracle: direct vs classical-elements route") {
    std::uint64_t rng = 42;
    for (int trial = 0; trial < 200; ++trial) {
        const CartesianState s = random_elliptic_state(rng);
        const double w_guard = 1.0;  // all sampled states are elliptic
        (void)w_guard;

        const MeeState direct = cart_to_mee(s.r, s.v, 1.0);
        const auto coe = oracle::cart_to_classical(s.r, s.v, 1.0);
        const auto viaCoe = oracle::classical_to_mee(coe);

        CHECK(direct.p == Approx(viaCoe.p).epsilon(1e-9));
        CHECK(direct.f == Approx(viaCoe.f).margin(1e-9));
        CHECK(direct.g == Approx(viaCoe.g).margin(1e-9));
        CHECK(direct.h == Approx(viaCoe.h).margin(1e-9));
        CHECK(direct.k == Approx(viaCoe.k).margin(1e-9));
        // longitudes agree modulo 2 pi
        const double dl = std::remainder(direct.l - viaCoe.l, 2.0 * pi);
        CHECK(std::abs(dl) < 1e-8);
    }
}

TEST_CASE("roundtrip property: cart -> mee -> cart and back") {
    std::uint64_t rng = 7;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const CartesianState s = random_elliptic_state(rng);
        const MeeState m = cart_to_mee(s.r, s.v, 1.0);
        const CartesianState back = mee_to_cart(m, 1.0);

        const double scale = std::max(norm(s.r), norm(s.v));
        worst = std::max(worst, norm(back.r - s.r) / scale);
        worst = std::max(worst, norm(back.v - s.v) / scale);

        // mee -> cart -> mee as well
        const MeeState m2 = cart_to_mee(back.r, back.v, 1.0);
        worst = std::max(worst, std::abs(m2.p - m.p) / m.p);
        worst = std::max(worst, std::abs(m2.f - m.f));
        worst = std::max(worst, std::abs(m2.g - m.g));
        worst = std::max(worst, std::abs(m2.h - m.h));
        worst = std::max(worst, std::abs(m2.k - m.k));
    }
    CHECK(worst <= 1e-11);
}

TEST_CASE("benchmark boundary states roundtrip through the element set") {
    // Departure and arrival states of the interplanetary benchmark, km and
    // km/s, heliocentric ecliptic J2000.
    const CanonicalUnits u(1.495978707e8, 1.32712440018e11, 4000.0);
    const Vec3d r0{-4561588.65006029, 147076954.664376, -2259.94592436179};
    const Vec3d v0{-30.2650979882182, -0.848685467901138, 5.05303606281563e-5};
    const Vec3d rf{-305026788.667814, 307051467.941918, 82899899.5682193};
    const Vec3d vf{-4.23872656978066, -13.436307899221, 0.565362569286115};

    for (const auto& [r_km, v_km] : {std::pair{r0, v0}, std::pair{rf, vf}}) {
        const Vec3d r = r_km / u.length_unit_km();
        const Vec3d v = v_km / u.velocity_unit_km_s();
        const MeeState m = cart_to_mee(r, v, 1.0);
        CHECK(m.l >= 0.0);
        CHECK(m.l < 2.0 * pi);
        const CartesianState back = mee_to_cart(m, 1.0);
        CHECK(norm(back.r - r) / norm(r) < 1e-12);
        CHECK(norm(back.v - v) / norm(v) < 1e-12);
    }
}

TEST_CASE("lvlh_rotation: axis-aligned cases and orthonormality") {
    const auto rot = lvlh_rotation<double>({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
    CHECK(rot.ur.x == Approx(1.0));
    CHECK(rot.ut.y == Approx(1.0));
    CHECK(rot.uh.z == Approx(1.0));

    const auto rot2 = lvlh_rotation<double>({0.0, 1.0, 0.0}, {-1.0, 0.0, 0.0});
    CHECK(rot2.ur.y == Approx(1.0));
    CHECK(rot2.ut.x == Approx(-1.0));
    CHECK(rot2.uh.z == Approx(1.0));

    std::uint64_t rng = 99;
    for (int trial = 0; trial < 100; ++trial) {
        const CartesianState s = random_elliptic_state(rng);
        const auto m = lvlh_rotation(s.r, s.v);

        // rows orthonormal
        CHECK(std::abs(dot(m.ur, m.ur) - 1.0) < 1e-13);
        CHECK(std::abs(dot(m.ut, m.ut) - 1.0) < 1e-13);
        CHECK(std::abs(dot(m.uh, m.uh) - 1.0) < 1e-13);
        CHECK(std::abs(dot(m.ur, m.ut)) < 1e-13);
        CHECK(std::abs(dot(m.ur, m.uh)) < 1e-13);
        CHECK(std::abs(dot(m.ut, m.uh)) < 1e-13);

        // det = +1 (proper rotation) and first row parallel to r
        const double det = dot(m.ur, cross(m.ut, m.uh));
        CHECK(det == Approx(1.0).epsilon(1e-12));
        CHECK(norm(cross(m.ur, s.r)) < 1e-12 * norm(s.r));
    }

    CHECK_THROWS_AS(lvlh_rotation<double>({1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}),
                    std::domain_error);
}
