/**
 * Pontryagin-optimal controls and their composite smooth approximations.
 *
 * The discrete reference law is: thrust along the unit primer vector
 * -B^T lambda / |B^T lambda|, power bang-bang in the switching function
 * S = |B^T lambda|/m + lambda_m/c, and exhaust velocity clamped from the
 * interior stationary value c_op = -2 m lambda_m / |B^T lambda|.
 *
 * Each if/then branch of that law is replaced by a tanh activation
 * zeta(g, rho) = (1 - tanh(g/rho))/2 of a signed constraint g, and the
 * branches are blended into one smooth composite control. rho_b sharpens
 * the bang-bang throttle, rho_c the constraint-triggered switches; both
 * are swept toward zero by the homotopy.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "csc/dynamics.hpp"
#include "csc/elements.hpp"
#include "csc/engine.hpp"
#include "csc/errors.hpp"
#include "csc/power.hpp"
#include "csc/units.hpp"
#include "csc/vec.hpp"

namespace csc {

struct SmoothingParams {
    double rho_b = 1.0;  ///< throttle (switching-function) sharpness
    double rho_c = 1.0;  ///< constraint-activation sharpness
};

/// A no-thrust time interval [t_lower, t_upper], canonical time.
struct ZeroThrustWindow {
    double t_lower = 0.0;
    double t_upper = 0.0;
};

/// Forced thrust direction over a time window; the desired direction is a
/// unit vector in LVLH.
struct ForcedDirectionWindow {
    double t_lower = 0.0;
    double t_upper = 0.0;
    Vec3d direction{0.0, 1.0, 0.0};
};

struct OperationalGates {
    std::vector<ZeroThrustWindow> zero_thrust_windows;
    std::vector<ForcedDirectionWindow> forced_direction_windows;
};

namespace detail {
/// tanh with its argument clamped at +/-50; the clamp saturates cleanly
/// instead of overflowing in exotic scalar types.
template <class T>
T tanh_clamped(T arg) {
    using std::tanh;
    if (real_part(arg) > 50.0) return T(1);
    if (real_part(arg) < -50.0) return T(-1);
    return tanh(arg);
}
}  // namespace detail

/// zeta(g, rho) = (1 - tanh(g/rho))/2: ~1 when the constraint g <= 0 is
/// satisfied, ~0 when violated, 1/2 at the boundary.
template <class T>
T smooth_activation(T g, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("smooth_activation: rho must be positive");
    return 0.5 * (T(1) - detail::tanh_clamped(g / rho));
}

/// Throttle fraction (1 + tanh(S/rho_b))/2 multiplying the maximum power.
template <class T>
T smooth_throttle(T s, double rho_b) {
    if (!(rho_b > 0.0)) throw std::domain_error("smooth_throttle: rho_b must be positive");
    return 0.5 * (T(1) + detail::tanh_clamped(s / rho_b));
}

/// ~1 with ample power, ~0 when the PPU cannot be energized.
inline double no_power_gate(double p_ava, double p_ava_min, double rho_b) {
    return smooth_throttle(p_ava - p_ava_min, rho_b);
}

/// ~1 inside the window (t_lower, t_upper), ~0 outside, transitions of
/// width O(rho_c). Power is multiplied by the complement.
inline double zero_thrust_gate(double t, double t_lower, double t_upper, double rho_c) {
    if (!(t_lower < t_upper)) throw std::domain_error("zero_thrust_gate: need t_lower < t_upper");
    const double zeta_lower = smooth_throttle(t - t_lower, rho_c);
    const double zeta_upper = 1.0 - smooth_throttle(t - t_upper, rho_c);
    return zeta_lower * zeta_upper;
}

/// Unit primer vector -B^T lambda / |B^T lambda|.
inline Vec3d primer_direction(const Influence<double>& b, const std::array<double, 6>& lambda) {
    const Vec3d bt = influence_transpose_lambda(b, lambda);
    const double n = norm(bt);
    if (n < 1e-14)
        throw degenerate_direction_error("primer_direction: |B^T lambda| vanished");
    return (-1.0 / n) * bt;
}

inline Vec3d primer_direction(const MeeState& x, const std::array<double, 6>& lambda,
                              double mu = 1.0) {
    return primer_direction(control_influence(x, mu), lambda);
}

/// Power switching function S = |B^T lambda|/m + lambda_m/c.
inline double switching_function(double bt_lambda_norm, double m, double lambda_m, double c) {
    if (!(m > 0.0)) throw std::domain_error("switching_function: mass must be positive");
    if (!(c > 0.0)) throw std::domain_error("switching_function: c must be positive");
    return bt_lambda_norm / m + lambda_m / c;
}

inline double switching_function(const MeeState& x, double m,
                                 const std::array<double, 6>& lambda, double lambda_m,
                                 double c, double mu = 1.0) {
    const Vec3d bt = influence_transpose_lambda(control_influence(x, mu), lambda);
    return switching_function(norm(bt), m, lambda_m, c);
}

/// Interior stationary exhaust velocity c_op = -2 m lambda_m / |B^T lambda|.
inline double c_op_unconstrained(double m, double lambda_m, double bt_lambda_norm) {
    if (bt_lambda_norm < 1e-14)
        throw degenerate_direction_error("c_op_unconstrained: |B^T lambda| vanished");
    return -2.0 * m * lambda_m / bt_lambda_norm;
}

inline double c_op_unconstrained(double m, double lambda_m, const MeeState& x,
                                 const std::array<double, 6>& lambda, double mu = 1.0) {
    const Vec3d bt = influence_transpose_lambda(control_influence(x, mu), lambda);
    return c_op_unconstrained(m, lambda_m, norm(bt));
}

/// max(c_min, min(c_op, c_max)): the rho -> 0 reference for the composite.
inline double clamp_exhaust_velocity(double c_op, double c_min, double c_max) {
    return std::max(c_min, std::min(c_op, c_max));
}

/// Smooth composite of the three exhaust-velocity branches:
///   c*(rho_c) = zeta_min c_min + zeta_op c_op + zeta_max c_max,
/// with activations built from the bound constraints on c_op.
template <class T>
T composite_exhaust_velocity(T c_op, double c_min, double c_max, double rho_c) {
    const T zeta_min = smooth_activation(c_op - c_min, rho_c);
    const T zeta_op = smooth_activation(c_min - c_op, rho_c) *
                      smooth_activation(c_op - c_max, rho_c);
    const T zeta_max = smooth_activation(c_max - c_op, rho_c);
    return zeta_min * c_min + zeta_op * c_op + zeta_max * c_max;
}

/// One building block of a general composite control: a candidate value
/// and the signed constraints (g <= 0 means satisfied) under which it
/// dominates.
struct ControlBlock {
    double value = 0.0;
    std::vector<double> constraints;
};

/// u = sum_i [ prod_j zeta(g_ij, rho_c) ] u_i over all building blocks.
inline double composite_control_general(std::span<const ControlBlock> blocks, double rho_c) {
    double out = 0.0;
    for (const ControlBlock& blk : blocks) {
        if (blk.constraints.empty())
            throw std::domain_error("composite_control_general: empty constraint list");
        double weight = 1.0;
        for (double g : blk.constraints) weight *= smooth_activation(g, rho_c);
        out += weight * blk.value;
    }
    return out;
}

/// Blend of the primer direction toward a desired direction, renormalized.
/// zeta_time = 0 gives the primer, 1 the desired direction.
inline Vec3d forced_direction(const Vec3d& primer_unit, const Vec3d& alpha_desired,
                              double zeta_time) {
    const Vec3d blended = (1.0 - zeta_time) * primer_unit + zeta_time * alpha_desired;
    const double n = norm(blended);
    if (n < 1e-10)
        throw degenerate_direction_error("forced_direction: blended direction vanished");
    return blended / n;
}

/// Everything compute_controls evaluated along the way, kept for
/// diagnostics, output files, and reuse by the full state-costate rates.
struct ControlEval {
    ControlInput u;
    CartesianState cart;       ///< canonical position/velocity
    double r = 0.0;            ///< |r| [LU]
    double bt_lambda_norm = 0.0;
    Vec3d primer{};            ///< unit primer vector (or placeholder on a hard coast)
    double c_op = 0.0;
    double s = 0.0;            ///< switching function at c = c*
    double throttle = 0.0;     ///< (1 + tanh(S/rho_b))/2
    double gate_no_power = 1.0;
    double gate_zero_thrust = 0.0;  ///< combined zero-thrust activation
    double p_sa = 0.0;         ///< array output [canonical]
    double p_ava = 0.0;        ///< available power [canonical], may be negative
    double p_max = 0.0;        ///< throttle ceiling: available power clamped at 0, engine caps applied
};

/// Scenario-level context needed to evaluate the control law at (z, t).
struct ControlContext {
    CanonicalEngine engine;
    const PowerModel* power = nullptr;
    const OperationalGates* gates = nullptr;
    double lu_per_au = 1.0;          ///< LU -> AU conversion for the power model
    double years_per_tu = 0.0;
    double power_unit_w = 1.0;       ///< watts per canonical power unit
    SmoothingParams rho;
    double p_ava_min = 0.0;          ///< canonical
};

/// Full smooth control pipeline at one instant:
///   direction   = primer (blended toward any forced direction in window),
///   c           = composite of {c_min, c_op, c_max},
///   P           = (1 - zeta_zero_thrust) * zeta_no_power * throttle(S) * P_max.
/// Throws degenerate_direction_error if the primer vanishes while the
/// throttle still calls for meaningful power.
inline ControlEval compute_controls(const MeeState& x, double m,
                                    const std::array<double, 6>& lambda, double lambda_m,
                                    double t, const ControlContext& ctx) {
    ControlEval ev;
    ev.cart = mee_to_cart(x, 1.0);
    ev.r = norm(ev.cart.r);

    const Influence<double> b = control_influence(x, 1.0);
    const Vec3d bt = influence_transpose_lambda(b, lambda);
    ev.bt_lambda_norm = norm(bt);

    // Power ceiling from the power subsystem, in canonical units.
    const double r_au = ev.r * ctx.lu_per_au;
    const double years = t * ctx.years_per_tu;
    ev.p_sa = ctx.power->solar_array_power_w(years, r_au) / ctx.power_unit_w;
    ev.p_ava = ev.p_sa - ctx.power->bus_power_w(r_au) / ctx.power_unit_w;
    ev.p_max = std::min(std::max(ev.p_ava, 0.0), ctx.engine.p_max);

    ev.gate_no_power = no_power_gate(ev.p_ava, ctx.p_ava_min, ctx.rho.rho_b);
    ev.gate_zero_thrust = 0.0;
    if (ctx.gates)
        for (const ZeroThrustWindow& wdw : ctx.gates->zero_thrust_windows)
            ev.gate_zero_thrust = std::max(
                ev.gate_zero_thrust, zero_thrust_gate(t, wdw.t_lower, wdw.t_upper, ctx.rho.rho_c));

    const bool primer_ok = ev.bt_lambda_norm >= 1e-14;
    if (primer_ok) {
        ev.primer = (-1.0 / ev.bt_lambda_norm) * bt;
        ev.c_op = -2.0 * m * lambda_m / ev.bt_lambda_norm;
    } else {
        // Direction is undefined; only acceptable if the throttle is shut.
        ev.primer = {0.0, 1.0, 0.0};
        ev.c_op = lambda_m < 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }

    double c_star;
    if (std::isfinite(ev.c_op)) {
        c_star = composite_exhaust_velocity(ev.c_op, ctx.engine.c_min, ctx.engine.c_max,
                                            ctx.rho.rho_c);
    } else {
        c_star = ctx.engine.c_max;
    }

    ev.s = switching_function(ev.bt_lambda_norm, m, lambda_m, c_star);
    ev.throttle = smooth_throttle(ev.s, ctx.rho.rho_b);

    const double power = (1.0 - ev.gate_zero_thrust) * ev.gate_no_power * ev.throttle * ev.p_max;

    if (!primer_ok && power > 1e-12 * std::max(ev.p_max, 1e-30))
        throw degenerate_direction_error(
            "compute_controls: primer vector vanished on a thrusting arc");

    Vec3d alpha = ev.primer;
    if (ctx.gates)
        for (const ForcedDirectionWindow& wdw : ctx.gates->forced_direction_windows) {
            const double zeta = zero_thrust_gate(t, wdw.t_lower, wdw.t_upper, ctx.rho.rho_c);
            alpha = forced_direction(alpha, wdw.direction, zeta);
        }

    ev.u.alpha_hat = alpha;
    ev.u.power = power;
    ev.u.exhaust_velocity = c_star;
    return ev;
}

}  // namespace csc
