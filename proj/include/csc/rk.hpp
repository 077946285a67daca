/**
 * Embedded Dormand-Prince 5(4) integrator with PI step-size control and
 * dense output by cubic Hermite interpolation on accepted steps.
 *
 * Generic over the state dimension and the right-hand side; the RHS may
 * throw propagation_error (or std::domain_error, which is converted) to
 * abort a run, which the shooting layer treats as a rejected sample.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "csc/errors.hpp"

namespace csc {

struct IntegOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double initial_step = 0.0;       ///< 0 = choose automatically
    double min_step_fraction = 1e-14;  ///< of the total span
    std::size_t max_steps = 4'000'000;
};

struct IntegStats {
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    std::size_t rhs_evaluations = 0;
};

namespace dp54 {
// Butcher tableau of the Dormand-Prince 5(4) pair (ode45's method).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// y5 - y4 error weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp54

/// Integrate dy/dt = rhs(t, y) from t0 to t1 (t1 > t0). Terminal time is
/// hit exactly. If `sample_times` is non-empty (sorted, within [t0, t1]),
/// `on_sample(t, y)` is called for each, with y interpolated inside the
/// accepted step that covers t.
template <std::size_t N, class RHS>
IntegStats integrate_dp54(
    RHS&& rhs, double t0, std::array<double, N> y, double t1, const IntegOptions& opt,
    std::array<double, N>& y_final,
    const std::vector<double>& sample_times = {},
    const std::function<void(double, const std::array<double, N>&)>& on_sample = nullptr) {
    using State = std::array<double, N>;
    IntegStats stats;

    const double span = t1 - t0;
    if (!(span > 0.0)) throw std::domain_error("integrate_dp54: need t1 > t0");

    const auto call_rhs = [&](double t, const State& s, State& ds) {
        try {
            rhs(t, s, ds);
        } catch (const propagation_error&) {
            throw;
        } catch (const std::exception& ex) {
            throw propagation_error(std::string("rhs evaluation failed: ") + ex.what(), t);
        }
        ++stats.rhs_evaluations;
    };

    State k1, k2, k3, k4, k5, k6, k7, y_try, y_err;
    double t = t0;
    call_rhs(t, y, k1);

    // Initial step from the RHS scale unless the caller fixed one.
    double h = opt.initial_step;
    if (h <= 0.0) {
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1[i]));
        }
        h = fnorm > 0.0 ? 0.01 * std::max(ynorm, 1.0) / fnorm : 1e-3 * span;
        h = std::min(h, 0.1 * span);
    }

    std::size_t sample_idx = 0;
    while (sample_idx < sample_times.size() && sample_times[sample_idx] < t0)
        ++sample_idx;
    // Samples exactly at t0 use the initial state.
    while (sample_idx < sample_times.size() && sample_times[sample_idx] == t0) {
        if (on_sample) on_sample(t0, y);
        ++sample_idx;
    }

    const double h_min = opt.min_step_fraction * span;
    double err_prev = 1.0;
    bool rejected_last = false;

    while (t < t1) {
        if (stats.steps_accepted + stats.steps_rejected > opt.max_steps)
            throw propagation_error("integrate_dp54: step budget exhausted", t);
        if (h < h_min)
            throw propagation_error("integrate_dp54: step size underflow", t);

        const bool last = t + h >= t1;
        if (last) h = t1 - t;

        using namespace dp54;
        State tmp;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        call_rhs(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        call_rhs(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        call_rhs(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        call_rhs(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i]);
        call_rhs(t + h, tmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            y_try[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                   b6 * k6[i]);
        call_rhs(t + h, y_try, k7);  // FSAL

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            y_err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y_try[i]));
            const double q = y_err[i] / scale;
            err += q * q;
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (err <= 1.0) {
            const double t_new = last ? t1 : t + h;

            // Dense output: cubic Hermite on (y, k1) -- (y_try, k7).
            while (sample_idx < sample_times.size() && sample_times[sample_idx] <= t_new) {
                const double ts = sample_times[sample_idx];
                const double theta = std::clamp((ts - t) / h, 0.0, 1.0);
                if (on_sample) {
                    if (ts == t_new && last) {
                        on_sample(ts, y_try);
                    } else {
                        State ys;
                        const double h00 = (1 + 2 * theta) * (1 - theta) * (1 - theta);
                        const double h10 = theta * (1 - theta) * (1 - theta);
                        const double h01 = theta * theta * (3 - 2 * theta);
                        const double h11 = theta * theta * (theta - 1);
                        for (std::size_t i = 0; i < N; ++i)
                            ys[i] = h00 * y[i] + h10 * h * k1[i] + h01 * y_try[i] +
                                    h11 * h * k7[i];
                        on_sample(ts, ys);
                    }
                }
                ++sample_idx;
            }

            t = t_new;
            y = y_try;
            k1 = k7;
            ++stats.steps_accepted;

            // PI controller (Hairer's DOPRI5 defaults).
            const double err_clip = std::max(err, 1e-10);
            double fac = 0.9 * std::pow(err_clip, -0.17) * std::pow(err_prev, 0.04);
            fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 5.0);
            h *= fac;
            err_prev = err_clip;
            rejected_last = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            ++stats.steps_rejected;
            rejected_last = true;
        }
    }

    y_final = y;
    return stats;
}

}  // namespace csc
