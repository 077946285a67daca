/**
 * Command-line front end.
 *
 *   csc run <scenario.json> [--case N] [--nrev N | --nrev-range A..B]
 *                           [--rho-end X] [--seed S] [--out DIR] [--tol R]
 *   csc check <scenario.json>
 *   csc oracle cx-vs-fd <scenario.json>
 *
 * Exit codes: 0 success, 2 no convergence, 3 configuration error,
 * 4 I/O error.
 */

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "csc/csc.hpp"
#include "csc/diagnostics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;

void print_error_json(const std::string& kind, const std::string& message) {
    nlohmann::json j{{"error", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuel-optimal low-thrust trajectory design with composite smooth control"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, nrev_range_arg;
    int case_preset = 0, nrev = -1;
    double rho_end = 0.0, tol = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;

    CLI::App* run = app.add_subcommand("run", "solve a scenario and write outputs");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--case", case_preset, "benchmark case preset (1|2|3)");
    run->add_option("--nrev", nrev, "fixed revolution count");
    run->add_option("--nrev-range", nrev_range_arg, "revolution sweep, e.g. 4..6");
    run->add_option("--rho-end", rho_end, "final smoothing parameter");
    run->add_option("--seed", seed, "multistart seed")->each([&](const std::string&) { seed_set = true; });
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--tol", tol, "shooting residual tolerance");

    CLI::App* check = app.add_subcommand("check", "validate a scenario file");
    check->add_option("scenario", scenario_path, "scenario file")->required();

    CLI::App* oracle = app.add_subcommand("oracle", "numerical cross-checks");
    CLI::App* cxfd = oracle->add_subcommand("cx-vs-fd",
                                            "complex-step vs finite-difference costate rates");
    cxfd->add_option("scenario", scenario_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    csc::ScenarioConfig cfg;
    try {
        cfg = csc::load_scenario(scenario_path);
    } catch (const csc::io_error& e) {
        print_error_json("io", e.what());
        return kExitIo;
    } catch (const csc::config_error& e) {
        print_error_json("config", e.what());
        return kExitConfig;
    }

    if (check->parsed()) {
        std::cout << "scenario \"" << cfg.name << "\" is valid\n";
        return kExitOk;
    }

    if (oracle->parsed()) {
        try {
            const csc::Ephemeris eph = csc::build_ephemeris(cfg);
            const csc::ShootingProblem pb = csc::build_problem(cfg, eph);
            const csc::CxFdReport rep = csc::cx_vs_fd_report(pb, 100, cfg.solver.seed);
            std::printf("states:             %d\n", rep.states);
            std::printf("max |cx - fd| rel:  %.3e   (cx at gamma=%.1e, fd at step=1e-7)\n",
                        rep.max_rel_deviation, pb.cx.gamma_c);
            std::printf("cx spread over gamma {1e-10..1e-20}: %.3e\n", rep.cx_spread);
            std::printf("fd error vs step:\n");
            for (std::size_t i = 0; i < rep.fd_steps.size(); ++i)
                std::printf("  %.1e  ->  %.3e\n", rep.fd_steps[i], rep.fd_errors[i]);
            return kExitOk;
        } catch (const std::exception& e) {
            print_error_json("oracle", e.what());
            return kExitNoConvergence;
        }
    }

    // run
    try {
        if (case_preset != 0) {
            if (case_preset < 1 || case_preset > 3)
                throw csc::config_error("--case must be 1, 2, or 3");
            csc::apply_case_preset(cfg, case_preset);
        }
        if (nrev >= 0 && !nrev_range_arg.empty())
            throw csc::config_error("give either --nrev or --nrev-range, not both");
        if (nrev >= 0) {
            cfg.nrev = nrev;
            cfg.nrev_range.reset();
        }
        if (!nrev_range_arg.empty()) {
            const auto pos = nrev_range_arg.find("..");
            if (pos == std::string::npos)
                throw csc::config_error("--nrev-range must look like A..B");
            const int lo = std::stoi(nrev_range_arg.substr(0, pos));
            const int hi = std::stoi(nrev_range_arg.substr(pos + 2));
            if (hi < lo) throw csc::config_error("--nrev-range: need A <= B");
            cfg.nrev_range = {{lo, hi}};
            cfg.nrev.reset();
        }
        if (rho_end > 0.0) {
            cfg.homotopy.rho_end = rho_end;
            cfg.homotopy.validate();
        }
        if (seed_set) cfg.solver.seed = seed;
        if (tol > 0.0) cfg.solver.tol = tol;
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        if (!cfg.nrev && !cfg.nrev_range)
            throw csc::config_error("scenario fixes no revolution count; use nrev/nrev_range "
                                    "or --nrev/--nrev-range");
    } catch (const csc::config_error& e) {
        print_error_json("config", e.what());
        return kExitConfig;
    }

    try {
        const csc::RunOutcome outcome = csc::run_scenario(cfg);
        std::printf("%s: %s, nrev=%d, m_f=%.4f kg, residual=%.3e, %.1f s\n",
                    cfg.name.c_str(), outcome.summary.converged ? "converged" : "NOT converged",
                    outcome.summary.nrev, outcome.summary.final_mass_kg,
                    outcome.summary.residual_inf, outcome.summary.wall_time_s);
        return outcome.exit_code;
    } catch (const csc::io_error& e) {
        print_error_json("io", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        print_error_json("run", e.what());
        return kExitNoConvergence;
    }
}
