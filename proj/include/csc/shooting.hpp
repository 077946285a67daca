/**
 * Single-shooting solution of the fuel-optimal TPBVP.
 *
 * The unknowns are the seven initial costates eta0 = [lambda(t0), lambda_m(t0)].
 * The residual is the terminal element mismatch (true longitude unwrapped,
 * target l = l_tilde + 2 pi N_rev) plus the transversality defect
 * lambda_m(tf) + 1. The solve is damped Levenberg-Marquardt on a
 * forward-difference Jacobian, with uniform random multistart when no
 * guess is supplied, and the smoothing parameters are swept toward zero by
 * a warm-started geometric homotopy.
 */

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "csc/control.hpp"
#include "csc/costate.hpp"
#include "csc/dynamics.hpp"
#include "csc/ephemeris.hpp"
#include "csc/errors.hpp"
#include "csc/power.hpp"
#include "csc/rk.hpp"
#include "csc/units.hpp"

namespace csc {

/// Fully resolved (canonical-unit) problem definition for one solve.
struct ShootingProblem {
    // Fixed initial state and time span.
    MeeState x0;
    double m0 = 1.0;
    double t0 = 0.0;
    double tf = 0.0;

    // Terminal elements. target.l carries the revolution count:
    // target.l = l_tilde_f + 2 pi nrev, with l_tilde_f in [0, 2 pi).
    MeeState target;
    double l_tilde_f = 0.0;
    int nrev = 0;

    // Models.
    CanonicalEngine engine;
    PowerModel power;  ///< dimensional (AU/years/W); converted at evaluation
    OperationalGates gates;
    SmoothingParams rho;
    double p_ava_min = 0.0;  ///< canonical

    // Perturbations (empty body list = two-body problem).
    std::vector<Body> bodies;
    const Ephemeris* ephemeris = nullptr;
    double epoch_jd0 = 0.0;
    ThirdBodyForm third_body_form = ThirdBodyForm::standard;
    double collision_floor = 1e-6;  ///< LU

    // Unit system (needed to query the ephemeris and report in kg/days).
    CanonicalUnits units{1.495978707e8, 1.32712440018e11, 1.0};

    // Numerics.
    std::array<double, 7> residual_weights{1, 1, 1, 1, 1, 1, 1};
    IntegOptions ode;
    CxConfig cx;

    // State-validity guards; excursions beyond these abort a propagation.
    double guard_p_min = 1e-4;
    double guard_p_max = 1e3;
    double guard_m_min = 0.01;

    void set_nrev(int n) {
        nrev = n;
        target.l = l_tilde_f + 2.0 * std::numbers::pi * n;
    }

    double au_km = 1.495978707e8;  ///< for LU -> AU in the power model

    ControlContext control_context() const {
        ControlContext ctx;
        ctx.engine = engine;
        ctx.power = &power;
        ctx.gates = &gates;
        ctx.lu_per_au = units.length_unit_km() / au_km;
        ctx.years_per_tu = units.time_unit_s() / (kDaysPerJulianYear * kSecondsPerDay);
        ctx.power_unit_w = units.power_unit_w();
        ctx.rho = rho;
        ctx.p_ava_min = p_ava_min;
        return ctx;
    }
};

struct TrajectorySample {
    double t = 0.0;  ///< canonical
    std::array<double, 14> z{};
    ControlInput u;
    double s = 0.0;
    double c_op = 0.0;
    double throttle = 0.0;
    double gate_no_power = 1.0;
    double gate_zero_thrust = 0.0;
    double thrust = 0.0;  ///< canonical
    double p_sa = 0.0, p_ava = 0.0, p_max = 0.0;
    CartesianState cart;  ///< canonical
    std::vector<double> body_accel_norms;  ///< canonical, parallel to problem.bodies
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    IntegStats stats;
};

namespace detail {

/// Per-solve evaluator: owns scratch storage so the hot loop performs no
/// heap allocation after warm-up.
class FullRatesEvaluator {
public:
    explicit FullRatesEvaluator(const ShootingProblem& pb) : pb_(pb) {
        cctx_ = pb.control_context();
        dctx_.mu = 1.0;
        dctx_.eta = pb.engine.eta;
        dctx_.form = pb.third_body_form;
        dctx_.collision_floor = pb.collision_floor;
        dctx_.bodies.reserve(pb.bodies.size());
    }

    /// Refresh the perturbing-body snapshot for canonical time t.
    void update_bodies(double t) {
        dctx_.bodies.clear();
        if (pb_.bodies.empty()) return;
        const double jd = pb_.epoch_jd0 + pb_.units.s_from_time(t) / kSecondsPerDay;
        for (Body b : pb_.bodies) {
            const CartesianState st = pb_.ephemeris->planet_state_km(b, jd);
            BodyState bs;
            bs.r = st.r / pb_.units.length_unit_km();
            const double mu_km = pb_.ephemeris->planet_mu_km3_s2(b);
            // mu in LU^3/TU^2: divide by mu_sun (canonical mu_sun == 1).
            bs.mu = mu_km * (pb_.units.time_unit_s() * pb_.units.time_unit_s()) /
                    (pb_.units.length_unit_km() * pb_.units.length_unit_km() *
                     pb_.units.length_unit_km());
            dctx_.bodies.push_back(bs);
        }
    }

    ControlEval controls(const FullState& s, double t) const {
        return compute_controls(s.x, s.m, s.lambda, s.lambda_m, t, cctx_);
    }

    void rates(double t, const std::array<double, 14>& z, std::array<double, 14>& dz) {
        const FullState s = FullState::from_array(z);
        if (!(s.x.p > pb_.guard_p_min && s.x.p < pb_.guard_p_max))
            throw propagation_error("state left validity domain (p)", t);
        if (!(s.m > pb_.guard_m_min))
            throw propagation_error("spacecraft mass exhausted", t);

        update_bodies(t);
        const ControlEval ev = controls(s, t);

        Vec3<double> a_sb{0.0, 0.0, 0.0};
        if (!dctx_.bodies.empty())
            a_sb = third_body_accel_lvlh(ev.cart.r, ev.cart.v, dctx_.bodies, dctx_.form,
                                         dctx_.collision_floor);

        const double thrust = thrust_magnitude(pb_.engine.eta, ev.u.power,
                                               ev.u.exhaust_velocity);
        RatesInput<double> in;
        in.x = s.x;
        in.m = s.m;
        in.control_accel = (thrust / s.m) * ev.u.alpha_hat;
        in.perturb_accel = a_sb;
        in.mdot = mass_flow_rate(pb_.engine.eta, ev.u.power, ev.u.exhaust_velocity);
        const std::array<double, 7> sr = state_rates(in, 1.0);

        const std::array<double, 7> cr = costate_rates_cx(s, ev.u, dctx_, pb_.cx);
        for (int i = 0; i < 7; ++i) dz[i] = sr[i];
        for (int i = 0; i < 7; ++i) dz[7 + i] = cr[i];
    }

    const DynamicsContext& dynamics_context() const { return dctx_; }

private:
    const ShootingProblem& pb_;
    ControlContext cctx_;
    DynamicsContext dctx_;
};

}  // namespace detail

/// Assembled 14-dimensional state-costate rates at (z, t).
inline std::array<double, 14> full_rates(const std::array<double, 14>& z, double t,
                                         const ShootingProblem& pb) {
    detail::FullRatesEvaluator ev(pb);
    std::array<double, 14> dz{};
    ev.rates(t, z, dz);
    return dz;
}

/// Terminal state of a shooting propagation plus the weighted residual.
struct ResidualEval {
    std::array<double, 7> residual{};
    std::array<double, 14> z_final{};
    double inf_norm = 0.0;
};

inline ResidualEval evaluate_residual(const std::array<double, 7>& eta0,
                                      const ShootingProblem& pb,
                                      detail::FullRatesEvaluator& ev) {
    std::array<double, 14> z0{pb.x0.p, pb.x0.f, pb.x0.g, pb.x0.h, pb.x0.k, pb.x0.l, pb.m0,
                              eta0[0], eta0[1], eta0[2], eta0[3], eta0[4], eta0[5], eta0[6]};
    std::array<double, 14> zf{};
    integrate_dp54<14>([&](double t, const auto& z, auto& dz) { ev.rates(t, z, dz); },
                       pb.t0, z0, pb.tf, pb.ode, zf);

    ResidualEval out;
    out.z_final = zf;
    const std::array<double, 6> target{pb.target.p, pb.target.f, pb.target.g,
                                       pb.target.h, pb.target.k, pb.target.l};
    for (int i = 0; i < 6; ++i) out.residual[i] = pb.residual_weights[i] * (zf[i] - target[i]);
    out.residual[6] = pb.residual_weights[6] * (zf[13] + 1.0);
    for (double r : out.residual) out.inf_norm = std::max(out.inf_norm, std::abs(r));
    return out;
}

/// Weighted shooting residual for the initial-costate vector eta0.
inline std::array<double, 7> shooting_residual(const std::array<double, 7>& eta0,
                                               const ShootingProblem& pb) {
    detail::FullRatesEvaluator ev(pb);
    return evaluate_residual(eta0, pb, ev).residual;
}

/// Dense propagation of a (usually converged) eta0 for reporting.
inline Trajectory propagate(const std::array<double, 7>& eta0, const ShootingProblem& pb,
                            std::size_t n_samples = 2001) {
    if (n_samples < 2) throw std::domain_error("propagate: need at least 2 samples");
    detail::FullRatesEvaluator ev(pb);

    std::vector<double> ts(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        ts[i] = pb.t0 + (pb.tf - pb.t0) * static_cast<double>(i) /
                            static_cast<double>(n_samples - 1);
    ts.back() = pb.tf;

    std::vector<std::pair<double, std::array<double, 14>>> raw;
    raw.reserve(n_samples);

    std::array<double, 14> z0{pb.x0.p, pb.x0.f, pb.x0.g, pb.x0.h, pb.x0.k, pb.x0.l, pb.m0,
                              eta0[0], eta0[1], eta0[2], eta0[3], eta0[4], eta0[5], eta0[6]};
    std::array<double, 14> zf{};
    Trajectory traj;
    traj.stats = integrate_dp54<14>(
        [&](double t, const auto& z, auto& dz) { ev.rates(t, z, dz); }, pb.t0, z0, pb.tf,
        pb.ode, zf, ts, [&](double t, const std::array<double, 14>& z) { raw.emplace_back(t, z); });

    traj.samples.reserve(raw.size());
    for (const auto& [t, z] : raw) {
        FullState s = FullState::from_array(z);
        ev.update_bodies(t);
        TrajectorySample smp;
        smp.t = t;
        smp.z = z;
        const ControlEval ce = ev.controls(s, t);
        smp.u = ce.u;
        smp.s = ce.s;
        smp.c_op = ce.c_op;
        smp.throttle = ce.throttle;
        smp.gate_no_power = ce.gate_no_power;
        smp.gate_zero_thrust = ce.gate_zero_thrust;
        smp.thrust = thrust_magnitude(pb.engine.eta, ce.u.power, ce.u.exhaust_velocity);
        smp.p_sa = ce.p_sa;
        smp.p_ava = ce.p_ava;
        smp.p_max = ce.p_max;
        smp.cart = ce.cart;
        const auto& bodies = ev.dynamics_context().bodies;
        smp.body_accel_norms.reserve(bodies.size());
        for (const BodyState& b : bodies) {
            std::vector<BodyState> single{b};
            const Vec3d a = third_body_accel_lvlh(ce.cart.r, ce.cart.v, single,
                                                  pb.third_body_form, pb.collision_floor);
            smp.body_accel_norms.push_back(norm(a));
        }
        traj.samples.push_back(std::move(smp));
    }
    return traj;
}

struct SolverConfig {
    double tol = 1e-10;               ///< on the residual infinity norm
    int max_iterations = 60;
    int multistart_samples = 100;
    std::uint64_t seed = 20121223;
    double fd_step = 1e-7;            ///< forward-difference Jacobian step
    int parallel_samples = 0;         ///< 0 = hardware concurrency (capped at 8)
};

struct SolveReport {
    bool converged = false;
    std::array<double, 7> eta0{};
    std::array<double, 7> residual{};
    double residual_inf = std::numeric_limits<double>::infinity();
    std::array<double, 14> z_final{};
    int iterations = 0;
    int samples_tried = 0;
    std::string failure;
};

namespace detail {

/// Deterministic uniform draw in [-1, 1]; avoids the implementation-defined
/// std::uniform_real_distribution so runs are reproducible everywhere.
inline double uniform_pm1(std::uint64_t& state) {
    // splitmix64
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x ^= x >> 31;
    return 2.0 * (static_cast<double>(x >> 11) * 0x1.0p-53) - 1.0;
}

/// Damped Levenberg-Marquardt from a single starting point.
inline SolveReport lm_solve(const std::array<double, 7>& start, const ShootingProblem& pb,
                            const SolverConfig& cfg) {
    SolveReport rep;
    rep.eta0 = start;
    FullRatesEvaluator ev(pb);

    ResidualEval cur;
    try {
        cur = evaluate_residual(rep.eta0, pb, ev);
    } catch (const propagation_error& pe) {
        rep.failure = pe.what();
        return rep;
    }

    double lambda_damp = 1e-3;
    for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
        rep.residual = cur.residual;
        rep.residual_inf = cur.inf_norm;
        rep.z_final = cur.z_final;
        if (cur.inf_norm <= cfg.tol) {
            rep.converged = true;
            return rep;
        }
        if (iter == cfg.max_iterations) break;

        // Forward-difference Jacobian, column per unknown.
        Eigen::Matrix<double, 7, 7> jac;
        bool jac_ok = true;
        for (int j = 0; j < 7 && jac_ok; ++j) {
            auto pert = rep.eta0;
            pert[j] += cfg.fd_step;
            try {
                const ResidualEval re = evaluate_residual(pert, pb, ev);
                for (int i = 0; i < 7; ++i)
                    jac(i, j) = (re.residual[i] - cur.residual[i]) / cfg.fd_step;
            } catch (const propagation_error&) {
                // Retry backward before giving up on the sample.
                pert[j] = rep.eta0[j] - cfg.fd_step;
                try {
                    const ResidualEval re = evaluate_residual(pert, pb, ev);
                    for (int i = 0; i < 7; ++i)
                        jac(i, j) = (cur.residual[i] - re.residual[i]) / cfg.fd_step;
                } catch (const propagation_error& pe) {
                    rep.failure = std::string("jacobian column failed: ") + pe.what();
                    jac_ok = false;
                }
            }
        }
        if (!jac_ok) return rep;

        Eigen::Matrix<double, 7, 1> r;
        for (int i = 0; i < 7; ++i) r(i) = cur.residual[i];
        const Eigen::Matrix<double, 7, 7> jtj = jac.transpose() * jac;
        const Eigen::Matrix<double, 7, 1> g = jac.transpose() * r;

        // Marquardt scaling keeps the step invariant under a uniform
        // rescaling of the residual weights.
        Eigen::Matrix<double, 7, 1> diag = jtj.diagonal();
        const double dmax = diag.maxCoeff();
        for (int i = 0; i < 7; ++i) diag(i) = std::max(diag(i), 1e-10 * dmax);

        bool accepted = false;
        while (!accepted) {
            Eigen::Matrix<double, 7, 7> lhs = jtj;
            lhs.diagonal() += lambda_damp * diag;
            const Eigen::Matrix<double, 7, 1> delta = lhs.ldlt().solve(-g);

            std::array<double, 7> trial;
            for (int i = 0; i < 7; ++i) trial[i] = rep.eta0[i] + delta(i);

            bool trial_ok = true;
            ResidualEval re;
            try {
                re = evaluate_residual(trial, pb, ev);
            } catch (const propagation_error&) {
                trial_ok = false;
            }

            const double cur2 = r.squaredNorm();
            double new2 = std::numeric_limits<double>::infinity();
            if (trial_ok) {
                new2 = 0.0;
                for (double v : re.residual) new2 += v * v;
            }

            if (trial_ok && new2 < cur2) {
                rep.eta0 = trial;
                cur = re;
                lambda_damp = std::max(lambda_damp * 0.25, 1e-14);
                accepted = true;
                ++rep.iterations;
            } else {
                lambda_damp *= 10.0;
                if (lambda_damp > 1e10) {
                    rep.failure = "damping exhausted (stalled)";
                    return rep;
                }
            }
        }
    }
    rep.failure = "iteration budget exhausted";
    return rep;
}

}  // namespace detail

/// Solve the TPBVP. With a guess, a single damped-LM run; without one,
/// up to cfg.multistart_samples random starts drawn uniformly from
/// [-1, 1]^7, processed in deterministic index order (batches may run
/// concurrently). Throws no_convergence_error when the budget is spent.
inline SolveReport solve_tpbvp(const std::optional<std::array<double, 7>>& guess,
                               const ShootingProblem& pb, const SolverConfig& cfg) {
    if (guess) {
        SolveReport rep = detail::lm_solve(*guess, pb, cfg);
        rep.samples_tried = 1;
        if (!rep.converged)
            throw no_convergence_error("solve_tpbvp: guess did not converge: " + rep.failure,
                                       rep.residual_inf);
        return rep;
    }

    // Draw all starts up front so parallel execution stays reproducible.
    std::uint64_t rng = cfg.seed;
    std::vector<std::array<double, 7>> starts(static_cast<std::size_t>(cfg.multistart_samples));
    for (auto& s : starts)
        for (double& v : s) v = detail::uniform_pm1(rng);

    int batch = cfg.parallel_samples;
    if (batch <= 0)
        batch = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 8);

    double best_residual = std::numeric_limits<double>::infinity();
    int tried = 0;
    for (std::size_t base = 0; base < starts.size(); base += batch) {
        const std::size_t n = std::min<std::size_t>(batch, starts.size() - base);
        std::vector<std::future<SolveReport>> futs;
        futs.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            futs.push_back(std::async(std::launch::async, [&, i] {
                return detail::lm_solve(starts[base + i], pb, cfg);
            }));
        for (std::size_t i = 0; i < n; ++i) {
            SolveReport rep = futs[i].get();
            ++tried;
            best_residual = std::min(best_residual, rep.residual_inf);
            if (rep.converged) {
                rep.samples_tried = tried;
                return rep;  // lowest index in this batch wins
            }
        }
    }
    throw no_convergence_error("solve_tpbvp: multistart budget exhausted", best_residual);
}

struct HomotopySchedule {
    double rho_start = 1.0;
    double rho_end = 1e-5;
    double factor = 0.1;  ///< geometric reduction per stage
    int max_steps = 40;

    void validate() const {
        if (!(rho_end > 0.0 && rho_end <= rho_start))
            throw std::domain_error("HomotopySchedule: need 0 < rho_end <= rho_start");
        if (!(factor > 0.0 && factor < 1.0))
            throw std::domain_error("HomotopySchedule: factor must lie in (0, 1)");
    }
};

struct StageRecord {
    double rho = 0.0;
    double m_final_kg = 0.0;
    int iterations = 0;
    bool cold_start = false;
    double residual_inf = 0.0;
};

struct HomotopyResult {
    SolveReport solution;              ///< at the last converged rho
    double rho_reached = 0.0;
    std::vector<StageRecord> stages;
    bool reached_end = false;
};

/// Integrator accuracy scheduling across homotopy stages: loose while the
/// smoothing is heavy, tight for the final stages.
struct TolSchedule {
    double coarse_rel_tol = 1e-9;
    double coarse_abs_tol = 1e-9;
    double coarse_above_rho = 1e-3;  ///< stages with rho strictly above use coarse
};

/// Sweep rho_b = rho_c geometrically from rho_start to rho_end,
/// warm-starting each stage from the previous solution; one bisection per
/// stage is attempted before aborting. Every stage's final mass is
/// recorded.
inline HomotopyResult homotopy_sweep(const ShootingProblem& problem,
                                     const HomotopySchedule& schedule,
                                     const SolverConfig& cfg,
                                     const std::optional<std::array<double, 7>>& guess = {},
                                     const TolSchedule& tols = {}) {
    schedule.validate();
    HomotopyResult out;

    ShootingProblem pb = problem;
    const IntegOptions fine = problem.ode;
    const auto tune = [&](double rho) {
        pb.ode = fine;
        if (rho > tols.coarse_above_rho) {
            pb.ode.rel_tol = std::max(fine.rel_tol, tols.coarse_rel_tol);
            pb.ode.abs_tol = std::max(fine.abs_tol, tols.coarse_abs_tol);
        }
    };

    const auto solve_at = [&](double rho, const std::optional<std::array<double, 7>>& g)
        -> std::optional<SolveReport> {
        pb.rho = {rho, rho};
        tune(rho);
        try {
            return solve_tpbvp(g, pb, cfg);
        } catch (const no_convergence_error&) {
            return std::nullopt;
        }
    };

    const auto record = [&](double rho, const SolveReport& rep, bool cold) {
        StageRecord rec;
        rec.rho = rho;
        rec.m_final_kg = pb.units.kg_from_mass(rep.z_final[6]);
        rec.iterations = rep.iterations;
        rec.cold_start = cold;
        rec.residual_inf = rep.residual_inf;
        out.stages.push_back(rec);
    };

    double rho = schedule.rho_start;
    auto first = solve_at(rho, guess);
    if (!first)
        throw no_convergence_error("homotopy_sweep: no solution at rho_start",
                                   std::numeric_limits<double>::quiet_NaN());
    out.solution = *first;
    out.rho_reached = rho;
    record(rho, *first, !guess.has_value());

    int steps = 0;
    while (rho > schedule.rho_end * (1.0 + 1e-12) && steps++ < schedule.max_steps) {
        const double next = std::max(rho * schedule.factor, schedule.rho_end);
        auto attempt = solve_at(next, out.solution.eta0);
        if (!attempt) {
            // One bisection of the rho-step (geometric midpoint).
            const double mid = std::sqrt(rho * next);
            auto midway = solve_at(mid, out.solution.eta0);
            if (!midway) return out;  // abort: carries last converged stage
            out.solution = *midway;
            out.rho_reached = mid;
            record(mid, *midway, false);
            rho = mid;
            attempt = solve_at(next, out.solution.eta0);
            if (!attempt) return out;
        }
        out.solution = *attempt;
        out.rho_reached = next;
        record(next, *attempt, false);
        rho = next;
    }
    out.reached_end = rho <= schedule.rho_end * (1.0 + 1e-12);
    return out;
}

struct NrevBranch {
    int nrev = 0;
    bool converged = false;
    double m_final_kg = 0.0;
    HomotopyResult result;
};

struct NrevSweepResult {
    std::vector<NrevBranch> branches;
    int best_nrev = -1;  ///< -1 when nothing converged
};

/// Run the full homotopy pipeline for each revolution count and pick the
/// one with the largest delivered mass. Non-converged branches stay in the
/// report.
inline NrevSweepResult nrev_sweep(const ShootingProblem& problem, int nrev_lo, int nrev_hi,
                                  const HomotopySchedule& schedule, const SolverConfig& cfg,
                                  const TolSchedule& tols = {}) {
    if (nrev_hi < nrev_lo) throw std::domain_error("nrev_sweep: empty range");
    NrevSweepResult out;
    double best_mass = -std::numeric_limits<double>::infinity();

    for (int n = nrev_lo; n <= nrev_hi; ++n) {
        ShootingProblem pb = problem;
        pb.set_nrev(n);
        NrevBranch branch;
        branch.nrev = n;
        try {
            branch.result = homotopy_sweep(pb, schedule, cfg, {}, tols);
            branch.converged = branch.result.reached_end;
            branch.m_final_kg = branch.result.solution.converged
                                    ? pb.units.kg_from_mass(branch.result.solution.z_final[6])
                                    : 0.0;
        } catch (const no_convergence_error&) {
            branch.converged = false;
        }
        if (branch.converged && branch.m_final_kg > best_mass) {
            best_mass = branch.m_final_kg;
            out.best_nrev = n;
        }
        out.branches.push_back(std::move(branch));
    }
    if (out.best_nrev < 0)
        throw no_convergence_error("nrev_sweep: no revolution count converged",
                                   std::numeric_limits<double>::quiet_NaN());
    return out;
}

}  // namespace csc
