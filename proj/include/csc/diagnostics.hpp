/**
 * Derivative cross-checks: complex-step costate rates against central
 * finite differences on randomized benchmark-scale states, step-size
 * sweeps for both methods.
 */

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "csc/costate.hpp"
#include "csc/shooting.hpp"

namespace csc {

struct CxFdReport {
    /// max over states of ||cx - fd||_inf / ||cx||_inf at the default steps
    double max_rel_deviation = 0.0;
    /// max over states of the relative spread of cx across gamma_list
    double cx_spread = 0.0;
    std::vector<double> gamma_list;
    std::vector<double> fd_steps;
    /// per fd step: max over states of relative error against the cx reference
    std::vector<double> fd_errors;
    int states = 0;
};

namespace detail {

inline FullState random_full_state(std::uint64_t& rng) {
    const auto u01 = [&] { return 0.5 * (uniform_pm1(rng) + 1.0); };
    FullState s;
    for (;;) {
        s.x.p = 0.8 + 1.7 * u01();
        s.x.f = 0.3 * uniform_pm1(rng);
        s.x.g = 0.3 * uniform_pm1(rng);
        s.x.h = 0.15 * uniform_pm1(rng);
        s.x.k = 0.15 * uniform_pm1(rng);
        s.x.l = 12.0 * std::numbers::pi * u01();
        s.m = 0.6 + 0.4 * u01();
        for (double& v : s.lambda) v = uniform_pm1(rng);
        s.lambda_m = -1.5 + 1.4 * u01();
        const Vec3d bt = influence_transpose_lambda(control_influence(s.x, 1.0), s.lambda);
        if (norm(bt) > 1e-6) return s;
    }
}

}  // namespace detail

/// Compare costate_rates_cx and costate_rates_fd over randomized states
/// drawn at the problem's scale, and sweep both step sizes.
inline CxFdReport cx_vs_fd_report(const ShootingProblem& pb, int n_states = 100,
                                  std::uint64_t seed = 12345) {
    CxFdReport rep;
    rep.states = n_states;
    rep.gamma_list = {1e-10, 1e-14, 1e-16, 1e-20};
    rep.fd_steps = {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11};
    rep.fd_errors.assign(rep.fd_steps.size(), 0.0);

    detail::FullRatesEvaluator ev(pb);
    std::uint64_t rng = seed;

    for (int n = 0; n < n_states; ++n) {
        const FullState s = detail::random_full_state(rng);
        const double t = pb.t0 + (pb.tf - pb.t0) * 0.5 * (detail::uniform_pm1(rng) + 1.0);
        ev.update_bodies(t);
        const ControlEval ce = ev.controls(s, t);
        const DynamicsContext& ctx = ev.dynamics_context();

        const auto cx_ref = costate_rates_cx(s, ce.u, ctx, pb.cx);
        double cx_scale = 0.0;
        for (double v : cx_ref) cx_scale = std::max(cx_scale, std::abs(v));
        if (cx_scale < 1e-12) continue;

        const auto fd_ref = costate_rates_fd(s, ce.u, ctx, 1e-7);
        double dev = 0.0;
        for (int i = 0; i < 7; ++i) dev = std::max(dev, std::abs(cx_ref[i] - fd_ref[i]));
        rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev / cx_scale);

        CxConfig alt = pb.cx;
        std::array<double, 7> lo = cx_ref, hi = cx_ref;
        for (double gamma : rep.gamma_list) {
            alt.gamma_c = gamma;
            const auto r = costate_rates_cx(s, ce.u, ctx, alt);
            for (int i = 0; i < 7; ++i) {
                lo[i] = std::min(lo[i], r[i]);
                hi[i] = std::max(hi[i], r[i]);
            }
        }
        double spread = 0.0;
        for (int i = 0; i < 7; ++i) spread = std::max(spread, hi[i] - lo[i]);
        rep.cx_spread = std::max(rep.cx_spread, spread / cx_scale);

        for (std::size_t si = 0; si < rep.fd_steps.size(); ++si) {
            const auto r = costate_rates_fd(s, ce.u, ctx, rep.fd_steps[si]);
            double err = 0.0;
            for (int i = 0; i < 7; ++i) err = std::max(err, std::abs(r[i] - cx_ref[i]));
            rep.fd_errors[si] = std::max(rep.fd_errors[si], err / cx_scale);
        }
    }
    return rep;
}

}  // namespace csc
