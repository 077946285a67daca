/**
 * Costate dynamics by complex-step differentiation of the Hamiltonian.
 *
 * For each of the seven states (six elements plus mass) the state is
 * perturbed by i*gamma_c, the Hamiltonian is re-evaluated with the control
 * inputs frozen at their real-state values, and
 *
 *     lambda_dot_j = -Im[H(x + i gamma_c e_j)] / gamma_c.
 *
 * No subtractive cancellation occurs, so gamma_c can sit at 1e-16 and the
 * result is flat over many orders of magnitude of step size -- unlike real
 * finite differences, which are kept here only as an independent oracle.
 *
 * Freezing the controls is essential: the Euler-Lagrange equations
 * differentiate H at fixed control, and letting the complex step leak into
 * the control law (through B^T lambda, the switching function or the
 * activation functions) produces wrong costate rates on thrusting arcs.
 */

#pragma once

#include <array>
#include <complex>
#include <future>

#include "csc/dynamics.hpp"

namespace csc {

/// 14-dimensional shooting state: elements, mass, element costates, mass
/// costate.
struct FullState {
    MeeState x;
    double m = 1.0;
    std::array<double, 6> lambda{};
    double lambda_m = 0.0;

    static FullState from_array(const std::array<double, 14>& z) {
        FullState s;
        s.x = {z[0], z[1], z[2], z[3], z[4], z[5]};
        s.m = z[6];
        for (int i = 0; i < 6; ++i) s.lambda[i] = z[7 + i];
        s.lambda_m = z[13];
        return s;
    }

    std::array<double, 14> to_array() const {
        return {x.p, x.f, x.g, x.h, x.k, x.l, m,
                lambda[0], lambda[1], lambda[2], lambda[3], lambda[4], lambda[5], lambda_m};
    }
};

struct CxConfig {
    double gamma_c = 1e-16;  ///< imaginary step, canonical units
    bool parallel = false;   ///< evaluate the 7 perturbations concurrently
};

namespace detail {

using cxd = std::complex<double>;

/// H with exactly one of the 7 states carrying an imaginary step.
inline cxd hamiltonian_perturbed(const FullState& z, int state_index, double gamma,
                                 const ControlInput& ctrl, const DynamicsContext& ctx) {
    Mee<cxd> x = lift_mee<cxd>(z.x);
    cxd m(z.m, 0.0);
    switch (state_index) {
        case 0: x.p += cxd(0.0, gamma); break;
        case 1: x.f += cxd(0.0, gamma); break;
        case 2: x.g += cxd(0.0, gamma); break;
        case 3: x.h += cxd(0.0, gamma); break;
        case 4: x.k += cxd(0.0, gamma); break;
        case 5: x.l += cxd(0.0, gamma); break;
        case 6: m += cxd(0.0, gamma); break;
    }
    return hamiltonian(x, m, z.lambda, z.lambda_m, ctrl, ctrl.exhaust_velocity, ctx);
}

}  // namespace detail

/// Closed-form mass-costate rate -(|B^T lambda|/m^2)(2 eta P / c), used to
/// cross-check the complex-step value.
inline double mass_costate_rate_analytic(double bt_lambda_norm, double m, double eta,
                                         double power, double c) {
    if (!(m > 0.0)) throw std::domain_error("mass_costate_rate_analytic: mass must be positive");
    if (!(c > 0.0)) throw std::domain_error("mass_costate_rate_analytic: c must be positive");
    return -(bt_lambda_norm / (m * m)) * (2.0 * eta * power / c);
}

/// Rates of the 7 costates by complex step, controls frozen.
inline std::array<double, 7> costate_rates_cx(const FullState& z, const ControlInput& ctrl,
                                              const DynamicsContext& ctx, const CxConfig& cfg) {
    if (!(cfg.gamma_c > 0.0)) throw std::domain_error("costate_rates_cx: gamma_c must be positive");

    std::array<double, 7> rates{};
    const auto one = [&](int j) {
        const auto h = detail::hamiltonian_perturbed(z, j, cfg.gamma_c, ctrl, ctx);
        return -h.imag() / cfg.gamma_c;
    };

    if (cfg.parallel) {
        std::array<std::future<double>, 7> futs;
        for (int j = 0; j < 7; ++j)
            futs[j] = std::async(std::launch::async, one, j);
        for (int j = 0; j < 7; ++j) rates[j] = futs[j].get();
    } else {
        for (int j = 0; j < 7; ++j) rates[j] = one(j);
    }
    return rates;
}

/// Central-difference rates of the same frozen-control Hamiltonian;
/// an independent check on the complex-step path.
inline std::array<double, 7> costate_rates_fd(const FullState& z, const ControlInput& ctrl,
                                              const DynamicsContext& ctx, double step = 1e-7) {
    if (!(step > 0.0)) throw std::domain_error("costate_rates_fd: step must be positive");

    const auto eval = [&](const FullState& s) {
        return hamiltonian(s.x, s.m, s.lambda, s.lambda_m, ctrl, ctrl.exhaust_velocity, ctx);
    };

    std::array<double, 7> rates{};
    for (int j = 0; j < 7; ++j) {
        auto plus = z.to_array();
        auto minus = z.to_array();
        plus[j] += step;
        minus[j] -= step;
        rates[j] = -(eval(FullState::from_array(plus)) - eval(FullState::from_array(minus))) /
                   (2.0 * step);
    }
    return rates;
}

}  // namespace csc
