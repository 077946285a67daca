#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "csc/control.hpp"
#include "csc/units.hpp"
#include "test_oracles.hpp"

using namespace csc;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

MeeState sample_state(std::uint64_t& rng) {
    MeeState x;
    x.p = 0.8 + 1.5 * oracle::u01(rng);
    x.f = 0.4 * (2.0 * oracle::u01(rng) - 1.0);
    x.g = 0.4 * (2.0 * oracle::u01(rng) - 1.0);
    x.h = 0.2 * (2.0 * oracle::u01(rng) - 1.0);
    x.k = 0.2 * (2.0 * oracle::u01(rng) - 1.0);
    x.l = 2.0 * pi * oracle::u01(rng);
    return x;
}

/// Benchmark-like canonical setup shared by the pipeline tests.
struct Setup {
    CanonicalUnits units{1.495978707e8, 1.32712440018e11, 4000.0};
    PowerModel power;
    OperationalGates gates;
    ControlContext ctx;

    explicit Setup(double rho_b = 1e-3, double rho_c = 1e-3) {
        power.p0_bol_w = 10000.0;
        power.a_coeffs = PowerModel::inverse_square_coeffs();
        power.d_coeffs_w = {400.0, 0.0, 0.0};

        ctx.engine.eta = 0.65;
        ctx.engine.c_min = units.velocity_from_m_s(3000.0 * 9.80665);
        ctx.engine.c_max = units.velocity_from_m_s(6000.0 * 9.80665);
        ctx.power = &power;
        ctx.gates = &gates;
        ctx.lu_per_au = 1.0;
        ctx.years_per_tu = units.time_unit_s() / (kDaysPerJulianYear * kSecondsPerDay);
        ctx.power_unit_w = units.power_unit_w();
        ctx.rho = {rho_b, rho_c};
    }
};
}  // namespace

TEST_CASE("primer direction: sign, normalization, homogeneity") {
    std::uint64_t rng = 3;
    const MeeState x = sample_state(rng);
    const auto b = control_influence(x, 1.0);

    // pick lambda so that B^T lambda points along -u_t approximately:
    // use the p row (pure transverse) with a negative costate
    std::array<double, 6> lam{};
    lam[0] = -1.0 / b.rows[0].y;  // B^T lam = [0, -1, 0]
    const Vec3d dir = primer_direction(b, lam);
    CHECK(dir.x == Approx(0.0).margin(1e-14));
    CHECK(dir.y == Approx(1.0).epsilon(1e-14));
    CHECK(dir.z == Approx(0.0).margin(1e-14));

    // homogeneity: scaling lambda leaves the direction unchanged
    std::array<double, 6> lam_scaled;
    for (int i = 0; i < 6; ++i) lam_scaled[i] = 17.5 * lam[i];
    const Vec3d dir2 = primer_direction(b, lam_scaled);
    CHECK(norm(dir2 - dir) < 1e-14);

    CHECK_THROWS_AS(primer_direction(b, std::array<double, 6>{}),
                    degenerate_direction_error);
}

TEST_CASE("primer direction minimizes lambda^T B u over the unit sphere") {
    std::uint64_t rng = 9;
    for (int trial = 0; trial < 30; ++trial) {
        const MeeState x = sample_state(rng);
        const auto b = control_influence(x, 1.0);
        std::array<double, 6> lam;
        for (double& v : lam) v = 2.0 * oracle::u01(rng) - 1.0;
        const Vec3d bt = influence_transpose_lambda(b, lam);
        if (norm(bt) < 1e-10) continue;

        const Vec3d star = primer_direction(b, lam);
        const double h_star = dot(bt, star);
        for (int i = 0; i < 40; ++i) {
            // random unit direction
            Vec3d u{2.0 * oracle::u01(rng) - 1.0, 2.0 * oracle::u01(rng) - 1.0,
                    2.0 * oracle::u01(rng) - 1.0};
            if (norm(u) < 1e-3) continue;
            u = normalized(u);
            CHECK(h_star <= dot(bt, u) + 1e-14);
        }
    }
}

TEST_CASE("switching function: arithmetic and positivity of the first term") {
    CHECK(switching_function(0.2, 1.0, -1.0, 10.0) == Approx(0.1).epsilon(1e-15));
    CHECK(switching_function(0.2, 1.0, 0.0, 10.0) > 0.0);

    // at fixed state, S is maximized over c at c_max when lambda_m < 0
    const double btn = 0.3, m = 0.9, lm = -0.8;
    double prev = -1e9;
    for (double c : {0.9, 1.2, 1.5, 1.8}) {
        const double s = switching_function(btn, m, lm, c);
        CHECK(s > prev);
        prev = s;
    }
    CHECK_THROWS_AS(switching_function(0.1, 0.0, -1.0, 1.0), std::domain_error);
}

TEST_CASE("c_op: arithmetic, degenerate denominator, stationarity handled in dynamics") {
    CHECK(c_op_unconstrained(4000.0, -1.0, 0.25) == Approx(32000.0).epsilon(1e-15));
    CHECK(c_op_unconstrained(1.0, 0.0, 0.5) == 0.0);
    CHECK_THROWS_AS(c_op_unconstrained(1.0, -1.0, 0.0), degenerate_direction_error);
}

TEST_CASE("clamp_exhaust_velocity: the max-min reference") {
    CHECK(clamp_exhaust_velocity(0.5, 1.0, 2.0) == 1.0);
    CHECK(clamp_exhaust_velocity(4.0, 1.0, 2.0) == 2.0);
    CHECK(clamp_exhaust_velocity(1.5, 1.0, 2.0) == 1.5);
}

TEST_CASE("smooth activation: midpoint, saturation, odd symmetry") {
    CHECK(smooth_activation(0.0, 0.01) == 0.5);
    CHECK(smooth_activation(-10.0 * 0.01, 0.01) == Approx(1.0).margin(5e-9));
    CHECK(smooth_activation(10.0 * 0.01, 0.01) == Approx(0.0).margin(5e-9));

    std::uint64_t rng = 12;
    for (int i = 0; i < 100; ++i) {
        const double g = 10.0 * (2.0 * oracle::u01(rng) - 1.0);
        const double rho = 0.01 + oracle::u01(rng);
        CHECK(smooth_activation(g, rho) + smooth_activation(-g, rho) == Approx(1.0).epsilon(1e-15));
    }

    // clamp keeps huge arguments finite and exactly saturated
    CHECK(smooth_activation(1e300, 1e-5) == 0.0);
    CHECK(smooth_activation(-1e300, 1e-5) == 1.0);
    CHECK_THROWS_AS(smooth_activation(0.1, 0.0), std::domain_error);
}

TEST_CASE("smooth throttle and gates") {
    CHECK(smooth_throttle(0.0, 0.1) == 0.5);
    CHECK(smooth_throttle(10.0 * 0.1, 0.1) == Approx(1.0).margin(5e-9));
    CHECK(smooth_throttle(-10.0 * 0.1, 0.1) == Approx(0.0).margin(5e-9));

    CHECK(no_power_gate(500.0, 500.0, 1.0) == 0.5);
    CHECK(no_power_gate(500.0 - 10.0, 500.0, 1.0) == Approx(0.0).margin(5e-9));

    // zero-thrust window: deep interior ~1, edges ~1/2, far outside ~0
    const double tl = 10.0, tu = 20.0, rho = 0.05;
    CHECK(zero_thrust_gate(15.0, tl, tu, rho) == Approx(1.0).margin(1e-9));
    CHECK(zero_thrust_gate(tl, tl, tu, rho) == Approx(0.5).margin(1e-9));
    CHECK(zero_thrust_gate(tu, tl, tu, rho) == Approx(0.5).margin(1e-9));
    CHECK(zero_thrust_gate(5.0, tl, tu, rho) == Approx(0.0).margin(1e-9));
    CHECK(zero_thrust_gate(25.0, tl, tu, rho) == Approx(0.0).margin(1e-9));
    CHECK_THROWS_AS(zero_thrust_gate(1.0, 5.0, 2.0, rho), std::domain_error);
}

TEST_CASE("composite exhaust velocity on the sinusoidal test problem") {
    // c_op = 0.6 sin(x) on [0, 2 pi], bounds -0.5 and +0.5.
    const double c_min = -0.5, c_max = 0.5;

    // at x = pi/2 with sharp smoothing the upper bound dominates
    CHECK(composite_exhaust_velocity(0.6, c_min, c_max, 0.01) == Approx(0.5).margin(1e-3));

    // interior point passes through
    CHECK(composite_exhaust_velocity(0.0, c_min, c_max, 0.01) == Approx(0.0).margin(1e-9));
    CHECK(composite_exhaust_velocity(0.2, c_min, c_max, 1e-4) == Approx(0.2).margin(1e-9));

    // sweep of rho: the gap to the clamp reference shrinks monotonically
    // away from the two kink neighborhoods
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double rho : {1.0, 0.1, 0.01}) {
        double gap = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = 2.0 * pi * i / 1000.0;
            const double c_op = 0.6 * std::sin(x);
            // exclude +-0.05-wide neighborhoods of the kinks at |c_op| = 0.5
            if (std::abs(c_op - c_max) < 0.05 || std::abs(c_op - c_min) < 0.05) continue;
            const double smooth = composite_exhaust_velocity(c_op, c_min, c_max, rho);
            const double clamp = clamp_exhaust_velocity(c_op, c_min, c_max);
            gap = std::max(gap, std::abs(smooth - clamp));
        }
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }

    // activation complementarity on the same grid at rho = 1e-2
    for (int i = 0; i <= 1000; ++i) {
        const double x = 2.0 * pi * i / 1000.0;
        const double c_op = 0.6 * std::sin(x);
        if (std::abs(c_op - c_max) < 0.05 || std::abs(c_op - c_min) < 0.05) continue;
        const double rho = 1e-2;
        const double sum = smooth_activation(c_op - c_min, rho) +
                           smooth_activation(c_min - c_op, rho) *
                               smooth_activation(c_op - c_max, rho) +
                           smooth_activation(c_max - c_op, rho);
        CHECK(sum == Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("generalized composite operator") {
    // single block with an always-satisfied constraint passes through
    {
        const ControlBlock blk{3.7, {-10.0 * 0.01}};
        CHECK(composite_control_general(std::array{blk}, 0.01) == Approx(3.7).margin(5e-8));
    }

    // structural equivalence with the exhaust-velocity composite
    const double c_min = 0.9, c_max = 2.1, rho = 0.05;
    for (int i = 0; i <= 1000; ++i) {
        const double c_op = -1.0 + 4.0 * i / 1000.0;
        const std::array blocks{
            ControlBlock{c_min, {c_op - c_min}},
            ControlBlock{c_op, {c_min - c_op, c_op - c_max}},
            ControlBlock{c_max, {c_max - c_op}}};
        const double general = composite_control_general(blocks, rho);
        const double direct = composite_exhaust_velocity(c_op, c_min, c_max, rho);
        CHECK(general == Approx(direct).margin(1e-14));
    }

    // complementary constraints partition unity between two blocks
    std::uint64_t rng = 31;
    for (int i = 0; i < 50; ++i) {
        const double g = 4.0 * (2.0 * oracle::u01(rng) - 1.0);
        const std::array blocks{ControlBlock{1.0, {g}}, ControlBlock{5.0, {-g}}};
        const double v = composite_control_general(blocks, 0.3);
        CHECK(v >= 1.0 - 1e-12);
        CHECK(v <= 5.0 + 1e-12);
        const double w1 = smooth_activation(g, 0.3);
        CHECK(v == Approx(w1 * 1.0 + (1.0 - w1) * 5.0).epsilon(1e-13));
    }

    CHECK_THROWS_AS(composite_control_general(std::array{ControlBlock{1.0, {}}}, 0.1),
                    std::domain_error);
}

TEST_CASE("forced direction blend") {
    const Vec3d primer{1.0, 0.0, 0.0};
    const Vec3d desired{0.0, 1.0, 0.0};
    CHECK(norm(forced_direction(primer, desired, 0.0) - primer) < 1e-15);
    CHECK(norm(forced_direction(primer, desired, 1.0) - desired) < 1e-15);

    const Vec3d mid = forced_direction(primer, desired, 0.5);
    CHECK(mid.x == Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(mid.y == Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(norm(mid) == Approx(1.0).epsilon(1e-14));

    // antipodal blend at 1/2 vanishes
    CHECK_THROWS_AS(forced_direction(primer, {-1.0, 0.0, 0.0}, 0.5),
                    degenerate_direction_error);
}

TEST_CASE("compute_controls: thrusting pipeline composition") {
    Setup su(1e-4, 1e-4);
    std::uint64_t rng = 71;
    const MeeState x{1.05, 0.02, -0.01, 0.0, 0.0, 1.1};
    const double m = 0.95;

    // costates chosen to give a healthy positive S and interior c_op
    std::array<double, 6> lam;
    for (double& v : lam) v = 0.3 * (2.0 * oracle::u01(rng) - 1.0);
    const auto b = control_influence(x, 1.0);
    Vec3d bt = influence_transpose_lambda(b, lam);
    double btn = norm(bt);
    const double c_mid = 0.5 * (su.ctx.engine.c_min + su.ctx.engine.c_max);
    const double lambda_m = -c_mid * btn / (2.0 * m);  // puts c_op at mid-range

    const ControlEval ev = compute_controls(x, m, lam, lambda_m, 0.0, su.ctx);

    CHECK(norm(ev.u.alpha_hat) == Approx(1.0).epsilon(1e-12));
    CHECK(ev.c_op == Approx(c_mid).epsilon(1e-12));
    CHECK(ev.u.exhaust_velocity == Approx(c_mid).epsilon(1e-6));
    CHECK(ev.u.exhaust_velocity >= su.ctx.engine.c_min);
    CHECK(ev.u.exhaust_velocity <= su.ctx.engine.c_max);

    // with S >> rho_b the throttle saturates and power ~ p_max = p_ava
    if (ev.s > 10.0 * su.ctx.rho.rho_b) {
        CHECK(ev.u.power == Approx(ev.p_max).epsilon(1e-6));
        CHECK(ev.p_max == Approx(ev.p_ava).epsilon(1e-12));
    }

    // deterministic
    const ControlEval ev2 = compute_controls(x, m, lam, lambda_m, 0.0, su.ctx);
    CHECK(ev2.u.power == ev.u.power);
    CHECK(ev2.u.exhaust_velocity == ev.u.exhaust_velocity);
}

TEST_CASE("compute_controls: zero-thrust window dominates the power") {
    Setup su(1e-4, 1e-4);
    su.gates.zero_thrust_windows.push_back({1.0, 2.0});

    const MeeState x{1.0, 0.0, 0.0, 0.0, 0.0, 0.4};
    std::array<double, 6> lam{0.1, -0.2, 0.15, 0.0, 0.05, -0.3};
    const ControlEval inside = compute_controls(x, 1.0, lam, -1.0, 1.5, su.ctx);
    CHECK(inside.u.power <= 1e-6 * std::max(inside.p_ava, 1e-12));
    CHECK(inside.gate_zero_thrust == Approx(1.0).margin(1e-9));

    const ControlEval outside = compute_controls(x, 1.0, lam, -1.0, 3.0, su.ctx);
    CHECK(outside.gate_zero_thrust == Approx(0.0).margin(1e-9));
}

TEST_CASE("compute_controls: vanishing primer is rejected when thrust is demanded") {
    Setup su(1.0, 1.0);  // large rho: the throttle cannot shut off
    const MeeState x{1.0, 0.0, 0.0, 0.0, 0.0, 0.4};
    const std::array<double, 6> lam{};  // zero costates
    CHECK_THROWS_AS(compute_controls(x, 1.0, lam, -1.0, 0.0, su.ctx),
                    degenerate_direction_error);

    // at sharp rho the throttle is exactly zero and the coast state is fine
    Setup sharp(1e-5, 1e-5);
    const ControlEval coast = compute_controls(x, 1.0, lam, -1.0, 0.0, sharp.ctx);
    CHECK(coast.u.power == 0.0);
    CHECK(coast.s < 0.0);
}

TEST_CASE("pointwise smoothing convergence toward the discrete law") {
    std::uint64_t rng = 314;
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 100; ++trial) {
        const MeeState x = sample_state(rng);
        std::array<double, 6> lam;
        for (double& v : lam) v = 2.0 * oracle::u01(rng) - 1.0;
        const double m = 0.7 + 0.3 * oracle::u01(rng);
        const double lambda_m = -1.2 * oracle::u01(rng) - 0.05;

        Setup base(1.0, 1.0);
        const auto b = control_influence(x, 1.0);
        const double btn = norm(influence_transpose_lambda(b, lam));
        if (btn < 1e-6) continue;

        // discrete reference: clamped c, bang-bang power with c = c*
        const double c_op = -2.0 * m * lambda_m / btn;
        const double c_star =
            clamp_exhaust_velocity(c_op, base.ctx.engine.c_min, base.ctx.engine.c_max);
        const double s_disc = switching_function(btn, m, lambda_m, c_star);

        // skip states too close to a switch or a bound for a clean limit
        if (std::abs(s_disc) < 1e-2) continue;
        if (std::abs(c_op - base.ctx.engine.c_min) < 1e-2 ||
            std::abs(c_op - base.ctx.engine.c_max) < 1e-2)
            continue;
        ++checked;

        double prev_err = std::numeric_limits<double>::infinity();
        for (double rho : {1e-2, 1e-3, 1e-4, 1e-5}) {
            Setup su(rho, rho);
            const ControlEval ev = compute_controls(x, m, lam, lambda_m, 0.0, su.ctx);
            const double p_disc = s_disc > 0.0 ? ev.p_max : 0.0;
            const double err = std::abs(ev.u.exhaust_velocity - c_star) +
                               std::abs(ev.u.power - p_disc);
            CHECK(err <= prev_err + 1e-12);
            prev_err = err;
        }
        CHECK(prev_err < 1e-6);
    }
    CHECK(checked == 100);
}

TEST_CASE("argmin invariance: costate scaling leaves direction and on/off decision") {
    std::uint64_t rng = 2718;
    Setup su(1e-3, 1e-3);
    for (int trial = 0; trial < 50; ++trial) {
        const MeeState x = sample_state(rng);
        std::array<double, 6> lam;
        for (double& v : lam) v = 2.0 * oracle::u01(rng) - 1.0;
        const double lambda_m = -(0.1 + oracle::u01(rng));
        const double scale = 0.1 + 10.0 * oracle::u01(rng);

        const auto b = control_influence(x, 1.0);
        if (norm(influence_transpose_lambda(b, lam)) < 1e-6) continue;

        const ControlEval a = compute_controls(x, 0.9, lam, lambda_m, 0.0, su.ctx);
        std::array<double, 6> lam2;
        for (int i = 0; i < 6; ++i) lam2[i] = scale * lam[i];
        const ControlEval c = compute_controls(x, 0.9, lam2, scale * lambda_m, 0.0, su.ctx);

        CHECK(norm(a.u.alpha_hat - c.u.alpha_hat) < 1e-12);
        CHECK(std::signbit(a.s) == std::signbit(c.s));
        CHECK(c.s == Approx(scale * a.s).epsilon(1e-10));
    }
}
