/**
 * Equations of motion in modified equinoctial elements and the Hamiltonian
 * of the fuel-optimal problem.
 *
 * The element dynamics split into an unforced drift A(x) (only the true
 * longitude moves) and a control-influence matrix B(x) mapping LVLH
 * accelerations (radial, transverse, normal) to element rates -- the
 * standard Gauss variational form with w = 1 + f cos l + g sin l and
 * s^2 = 1 + h^2 + k^2.
 *
 * Everything is written once, generic over the scalar field: evaluated
 * with std::complex<double> and a single perturbed state it yields the
 * exact partial derivatives needed for the costate rates.
 */

#pragma once

#include <array>
#include <complex>
#include <stdexcept>

#include "csc/elements.hpp"
#include "csc/engine.hpp"
#include "csc/ephemeris.hpp"
#include "csc/vec.hpp"

namespace csc {

/// Unforced element rates A(x): zero except dl/dt = sqrt(mu p) (w/p)^2.
template <class T>
std::array<T, 6> unforced_rates(const Mee<T>& x, T mu) {
    using std::sqrt;
    const T w = mee_w(x);
    if (real_part(w) <= 0.0) throw std::domain_error("unforced_rates: w <= 0");
    std::array<T, 6> a{};
    a[5] = sqrt(mu * x.p) * (w / x.p) * (w / x.p);
    return a;
}

/// The 6x3 control-influence matrix, stored as six LVLH row vectors so
/// that rate_i = dot(row_i, accel) and B^T lambda falls out of the same
/// storage.
template <class T>
struct Influence {
    std::array<Vec3<T>, 6> rows;
};

template <class T>
Influence<T> control_influence(const Mee<T>& x, T mu) {
    using std::cos;
    using std::sin;
    using std::sqrt;

    const T cl = cos(x.l);
    const T sl = sin(x.l);
    const T w = T(1) + x.f * cl + x.g * sl;
    if (real_part(w) <= 0.0) throw std::domain_error("control_influence: w <= 0");
    const T s2 = T(1) + x.h * x.h + x.k * x.k;
    const T root = sqrt(x.p / mu);
    const T hk = x.h * sl - x.k * cl;

    Influence<T> b;
    b.rows[0] = {T(0), root * T(2) * x.p / w, T(0)};
    b.rows[1] = {root * sl, root * ((w + T(1)) * cl + x.f) / w, -root * x.g * hk / w};
    b.rows[2] = {-root * cl, root * ((w + T(1)) * sl + x.g) / w, root * x.f * hk / w};
    b.rows[3] = {T(0), T(0), root * s2 * cl / (T(2) * w)};
    b.rows[4] = {T(0), T(0), root * s2 * sl / (T(2) * w)};
    b.rows[5] = {T(0), T(0), root * hk / w};
    return b;
}

/// B^T lambda; the costates are always real.
template <class T>
Vec3<T> influence_transpose_lambda(const Influence<T>& b, const std::array<double, 6>& lambda) {
    Vec3<T> out{T(0), T(0), T(0)};
    for (int i = 0; i < 6; ++i) out = out + lambda[i] * b.rows[i];
    return out;
}

/// Inputs to the assembled state rates: LVLH control and perturbing
/// accelerations plus the mass rate, already in canonical units.
template <class T>
struct RatesInput {
    Mee<T> x;
    T m{};
    Vec3<T> control_accel{};
    Vec3<T> perturb_accel{};
    T mdot{};
};

/// [A + B (u_prop + a_sb); dm/dt].
template <class T>
std::array<T, 7> state_rates(const RatesInput<T>& in, T mu) {
    if (real_part(in.m) <= 0.0) throw std::domain_error("state_rates: mass must be positive");
    const std::array<T, 6> a = unforced_rates(in.x, mu);
    const Influence<T> b = control_influence(in.x, mu);
    const Vec3<T> accel = in.control_accel + in.perturb_accel;

    std::array<T, 7> out{};
    for (int i = 0; i < 6; ++i) out[i] = a[i] + dot(b.rows[i], accel);
    out[6] = in.mdot;
    return out;
}

/// Control values entering the dynamics, canonical units. When used in a
/// complex-step Hamiltonian evaluation these are frozen: computed once
/// from the real state and never updated off the real axis.
struct ControlInput {
    Vec3d alpha_hat{0.0, 1.0, 0.0};  ///< thrust direction, LVLH
    double power = 0.0;              ///< P [MU LU^2 / TU^3]
    double exhaust_velocity = 0.0;   ///< c [LU/TU]
};

/// Frozen-time context for one dynamics evaluation: gravitational
/// parameter, engine efficiency, and the perturbing bodies' states at the
/// current epoch (real; they depend on time only).
struct DynamicsContext {
    double mu = 1.0;
    double eta = 0.0;
    std::vector<BodyState> bodies;  ///< empty = two-body problem
    ThirdBodyForm form = ThirdBodyForm::standard;
    double collision_floor = 1e-6;
};

/// Hamiltonian of the fuel-optimal problem,
///   H = lambda^T [A + B (u_prop + a_sb)] - lambda_m 2 eta P / c^2,
/// with u_prop = (2 eta P / (m c)) alpha_hat.
///
/// TS is the scalar field of the state (complex when one state carries a
/// step), TC the field of the exhaust velocity (complex only in the
/// dH/dc stationarity check). The control is otherwise frozen.
template <class TS, class TC = double>
promote_t<TS, TC> hamiltonian(const Mee<TS>& x, TS m, const std::array<double, 6>& lambda,
                              double lambda_m, const ControlInput& ctrl, TC c,
                              const DynamicsContext& ctx) {
    using R = promote_t<TS, TC>;

    const std::array<TS, 6> a = unforced_rates(x, TS(ctx.mu));
    const Influence<TS> b = control_influence(x, TS(ctx.mu));

    Vec3<TS> accel_sb{TS(0), TS(0), TS(0)};
    if (!ctx.bodies.empty()) {
        const Cart<TS> cart = mee_to_cart(x, TS(ctx.mu));
        accel_sb = third_body_accel_lvlh(cart.r, cart.v, ctx.bodies, ctx.form,
                                         ctx.collision_floor);
    }

    const R thrust_over_m = R(2.0 * ctx.eta * ctrl.power) / (m * c);
    const Vec3<TS> alpha = lift<TS>(ctrl.alpha_hat);
    R value{};
    for (int i = 0; i < 6; ++i) {
        const R forced = thrust_over_m * dot(b.rows[i], alpha) + dot(b.rows[i], accel_sb);
        value += lambda[i] * (a[i] + forced);
    }
    value -= lambda_m * 2.0 * ctx.eta * ctrl.power / (c * c);
    return value;
}

}  // namespace csc
