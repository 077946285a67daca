/**
 * Scenario orchestration: revolution sweep (or fixed count), smoothing
 * homotopy, dense propagation of the winner, and output emission.
 */

#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "csc/output.hpp"
#include "csc/scenario.hpp"
#include "csc/shooting.hpp"

namespace csc {

struct RunOutcome {
    RunSummary summary;
    Trajectory trajectory;
    HomotopyResult homotopy;
    int exit_code = 0;  ///< 0 success, 2 no convergence
};

/// Execute a scenario end to end. Outputs are written to config.output.dir
/// (converged or not, as long as at least one stage solved); exit code 2
/// signals a run that failed to reach rho_end. Set `emit` to false to skip
/// file output (library/test use).
inline RunOutcome run_scenario(const ScenarioConfig& cfg,
                               const std::optional<std::array<double, 7>>& warm_start = {},
                               bool emit = true) {
    const auto wall_start = std::chrono::steady_clock::now();

    const Ephemeris eph = build_ephemeris(cfg);
    ShootingProblem pb = build_problem(cfg, eph);
    const SolverConfig sc = build_solver_config(cfg);
    const TolSchedule tols = build_tol_schedule(cfg);

    RunOutcome out;
    out.summary.scenario_name = cfg.name;
    out.summary.case_preset = cfg.case_preset;

    try {
        if (cfg.nrev_range) {
            const NrevSweepResult sweep =
                nrev_sweep(pb, (*cfg.nrev_range)[0], (*cfg.nrev_range)[1], cfg.homotopy, sc, tols);
            for (const NrevBranch& br : sweep.branches)
                if (br.nrev == sweep.best_nrev) out.homotopy = br.result;
            pb.set_nrev(sweep.best_nrev);
            out.summary.nrev = sweep.best_nrev;
        } else {
            pb.set_nrev(cfg.nrev.value_or(0));
            out.summary.nrev = pb.nrev;
            out.homotopy = homotopy_sweep(pb, cfg.homotopy, sc, warm_start, tols);
        }
    } catch (const no_convergence_error& nc) {
        out.summary.converged = false;
        out.summary.failure = nc.what();
        out.summary.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        out.exit_code = 2;
        return out;
    }

    out.summary.converged = out.homotopy.reached_end;
    out.summary.eta0 = out.homotopy.solution.eta0;
    out.summary.residual_inf = out.homotopy.solution.residual_inf;
    out.summary.rho_reached = out.homotopy.rho_reached;
    out.summary.stages = out.homotopy.stages;
    out.summary.multistart_samples_tried = out.homotopy.stages.empty()
                                               ? 0
                                               : out.homotopy.solution.samples_tried;
    if (!out.summary.converged) {
        out.summary.failure = "homotopy stopped at rho = " + std::to_string(out.homotopy.rho_reached);
        out.exit_code = 2;
    }

    // Dense propagation at the last converged rho for reporting.
    pb.rho = {out.homotopy.rho_reached, out.homotopy.rho_reached};
    out.trajectory = propagate(out.homotopy.solution.eta0, pb,
                               static_cast<std::size_t>(cfg.output.samples));
    out.summary.final_mass_kg = pb.units.kg_from_mass(out.trajectory.samples.back().z[6]);
    out.summary.isp_switch_count = count_isp_switches(out.trajectory, pb.engine);
    out.summary.min_switching_function = min_switching_function(out.trajectory);
    out.summary.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

    if (emit) emit_outputs(out.trajectory, out.summary, pb, cfg.output.dir);
    return out;
}

}  // namespace csc
