/**
 * Scenario files: ingestion, strict validation, case presets, and
 * construction of the canonical shooting problem.
 *
 * The on-disk format is JSON with one object per section (boundary,
 * engine, power, perturbations, gates, homotopy, solver, output). Keys
 * and units are fixed; unknown keys are rejected so typos fail loudly.
 * See README.md for the full key reference.
 */

#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "csc/elements.hpp"
#include "csc/engine.hpp"
#include "csc/ephemeris.hpp"
#include "csc/errors.hpp"
#include "csc/power.hpp"
#include "csc/shooting.hpp"
#include "csc/units.hpp"

namespace csc {

struct BoundaryConfig {
    Vec3d r0_km{}, v0_km_s{};
    Vec3d rf_km{}, vf_km_s{};
    double epoch_jd_tdb = 0.0;
    double tof_days = 0.0;
    double m0_kg = 0.0;
};

struct PerturbationConfig {
    std::vector<Body> bodies;
    std::string ephemeris_mode = "mean_elements";  ///< or "table"
    std::string table_path;
    int interp_order = 7;
    ThirdBodyForm form = ThirdBodyForm::standard;
    double collision_floor_au = 1e-6;
    std::array<double, 8> planet_mu_km3_s2 = default_planet_mu();
};

struct GatesConfig {
    // Windows in days since departure.
    std::vector<std::array<double, 2>> zero_thrust_windows_days;
    struct ForcedDir {
        double from_days = 0.0, to_days = 0.0;
        Vec3d direction_lvlh{0.0, 1.0, 0.0};
    };
    std::vector<ForcedDir> forced_direction_windows;
};

struct SolverBlock {
    double tol = 1e-10;
    int max_iterations = 60;
    int multistart_samples = 100;
    std::uint64_t seed = 20121223;
    double fd_step = 1e-7;
    int parallel_samples = 0;
    double ode_rel_tol = 1e-12;
    double ode_abs_tol = 1e-12;
    double coarse_ode_rel_tol = 1e-9;
    double coarse_ode_abs_tol = 1e-9;
    double coarse_above_rho = 1e-3;
    double gamma_c = 1e-16;
    bool cx_parallel = false;
    std::array<double, 7> residual_weights{1, 1, 1, 1, 1, 1, 1};
};

struct OutputBlock {
    std::string dir = "out";
    int samples = 2001;
};

struct ScenarioConfig {
    std::string name = "scenario";
    int case_preset = 0;  ///< 0 = none; 1|2|3 expand the benchmark model flags
    BoundaryConfig boundary;
    EngineModel engine;
    PowerModel power;
    PerturbationConfig perturbations;
    GatesConfig gates;
    HomotopySchedule homotopy;
    SolverBlock solver;
    OutputBlock output;
    Constants constants;
    std::optional<int> nrev;
    std::optional<std::array<int, 2>> nrev_range;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& section,
                       const std::set<std::string>& allowed) {
    if (!j.is_object()) throw config_error("section \"" + section + "\" must be an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            throw config_error("unknown key \"" + key + "\" in section \"" + section + "\"");
}

template <class T>
T require(const json& j, const std::string& section, const std::string& key) {
    if (!j.contains(key))
        throw config_error("missing key \"" + key + "\" in section \"" + section + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error("key \"" + key + "\" in section \"" + section + "\" has wrong type");
    }
}

template <class T>
T take(const json& j, const std::string& section, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error("key \"" + key + "\" in section \"" + section + "\" has wrong type");
    }
}

inline Vec3d vec3(const json& j, const std::string& section, const std::string& key) {
    const auto v = require<std::vector<double>>(j, section, key);
    if (v.size() != 3)
        throw config_error("key \"" + key + "\" in section \"" + section +
                           "\" must have 3 components");
    return {v[0], v[1], v[2]};
}

}  // namespace detail

/// Expand one of the benchmark model-flag combinations: inverse-square
/// distance term for all three; degradation off/on/on; perturbing bodies
/// none/none/all eight.
inline void apply_case_preset(ScenarioConfig& cfg, int preset) {
    cfg.case_preset = preset;
    cfg.power.a_coeffs = PowerModel::inverse_square_coeffs();
    cfg.power.sigma_per_year = (preset >= 2) ? 0.02 : 0.0;
    cfg.perturbations.bodies.clear();
    if (preset == 3)
        for (int b = 0; b < 8; ++b) cfg.perturbations.bodies.push_back(static_cast<Body>(b));
}

/// Parse and validate a scenario file. Unknown keys are rejected; a case
/// preset may not be combined with explicit settings of the model flags it
/// controls.
inline ScenarioConfig load_scenario(const std::string& path) {
    using detail::check_keys;
    using detail::require;
    using detail::take;
    using nlohmann::json;

    std::ifstream in(path);
    if (!in) throw io_error("cannot open scenario file: " + path);

    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& pe) {
        throw config_error("scenario parse error in " + path + ": " + pe.what());
    }

    check_keys(j, "(root)",
               {"name", "case_preset", "boundary", "engine", "power", "perturbations",
                "gates", "homotopy", "solver", "output", "constants", "nrev", "nrev_range"});

    ScenarioConfig cfg;
    cfg.name = take<std::string>(j, "(root)", "name", "scenario");

    // ---- boundary ----
    const json& jb = j.contains("boundary") ? j.at("boundary") : json::object();
    if (!j.contains("boundary")) throw config_error("missing section \"boundary\"");
    check_keys(jb, "boundary",
               {"r0_km", "v0_kms", "rf_km", "vf_kms", "epoch_jd_tdb", "tof_days", "m0_kg"});
    cfg.boundary.r0_km = detail::vec3(jb, "boundary", "r0_km");
    cfg.boundary.v0_km_s = detail::vec3(jb, "boundary", "v0_kms");
    cfg.boundary.rf_km = detail::vec3(jb, "boundary", "rf_km");
    cfg.boundary.vf_km_s = detail::vec3(jb, "boundary", "vf_kms");
    cfg.boundary.epoch_jd_tdb = take<double>(jb, "boundary", "epoch_jd_tdb", 2451545.0);
    cfg.boundary.tof_days = require<double>(jb, "boundary", "tof_days");
    cfg.boundary.m0_kg = require<double>(jb, "boundary", "m0_kg");
    if (!(cfg.boundary.tof_days > 0.0)) throw config_error("boundary.tof_days must be positive");
    if (!(cfg.boundary.m0_kg > 0.0)) throw config_error("boundary.m0_kg must be positive");

    // ---- constants ----
    if (j.contains("constants")) {
        const json& jc = j.at("constants");
        check_keys(jc, "constants", {"mu_sun_km3_s2", "au_km", "g0_m_s2"});
        cfg.constants.mu_sun_km3_s2 =
            take<double>(jc, "constants", "mu_sun_km3_s2", cfg.constants.mu_sun_km3_s2);
        cfg.constants.au_km = take<double>(jc, "constants", "au_km", cfg.constants.au_km);
        cfg.constants.g0_m_s2 = take<double>(jc, "constants", "g0_m_s2", cfg.constants.g0_m_s2);
    }

    // ---- engine ----
    if (!j.contains("engine")) throw config_error("missing section \"engine\"");
    const json& je = j.at("engine");
    check_keys(je, "engine", {"efficiency", "isp_min_s", "isp_max_s", "p_min_w", "p_max_w"});
    cfg.engine.efficiency = require<double>(je, "engine", "efficiency");
    cfg.engine.c_min_m_s = require<double>(je, "engine", "isp_min_s") * cfg.constants.g0_m_s2;
    cfg.engine.c_max_m_s = require<double>(je, "engine", "isp_max_s") * cfg.constants.g0_m_s2;
    cfg.engine.p_min_w = take<double>(je, "engine", "p_min_w", 0.0);
    if (je.contains("p_max_w")) cfg.engine.p_max_w = require<double>(je, "engine", "p_max_w");
    cfg.engine.validate();

    // ---- power ----
    if (!j.contains("power")) throw config_error("missing section \"power\"");
    const json& jp = j.at("power");
    check_keys(jp, "power",
               {"p0_bol_w", "phi", "a_coeffs", "sigma_per_year", "d_coeffs_w", "p_ava_min_w",
                "p_sa_max_w"});
    cfg.power.p0_bol_w = require<double>(jp, "power", "p0_bol_w");
    const std::string phi_mode = take<std::string>(jp, "power", "phi", "inverse_square");
    if (phi_mode == "inverse_square") {
        cfg.power.a_coeffs = PowerModel::inverse_square_coeffs();
    } else if (phi_mode == "rational") {
        cfg.power.a_coeffs = PowerModel::rational_fit_coeffs();
    } else {
        throw config_error("power.phi must be \"inverse_square\" or \"rational\"");
    }
    if (jp.contains("a_coeffs")) {
        const auto a = require<std::vector<double>>(jp, "power", "a_coeffs");
        if (a.size() != 5) throw config_error("power.a_coeffs must have 5 entries");
        std::copy(a.begin(), a.end(), cfg.power.a_coeffs.begin());
    }
    cfg.power.sigma_per_year = take<double>(jp, "power", "sigma_per_year", 0.0);
    if (jp.contains("d_coeffs_w")) {
        const auto d = require<std::vector<double>>(jp, "power", "d_coeffs_w");
        if (d.size() != 3) throw config_error("power.d_coeffs_w must have 3 entries");
        std::copy(d.begin(), d.end(), cfg.power.d_coeffs_w.begin());
    }
    cfg.power.p_ava_min_w = take<double>(jp, "power", "p_ava_min_w", 0.0);
    if (jp.contains("p_sa_max_w")) cfg.power.p_sa_max_w = require<double>(jp, "power", "p_sa_max_w");

    // ---- perturbations ----
    if (j.contains("perturbations")) {
        const json& jq = j.at("perturbations");
        check_keys(jq, "perturbations",
                   {"bodies", "ephemeris", "table_path", "interp_order", "third_body_form",
                    "collision_floor_au", "planet_mu_km3_s2"});
        if (jq.contains("bodies")) {
            const auto names = require<std::vector<std::string>>(jq, "perturbations", "bodies");
            for (const auto& n : names) {
                if (n == "all") {
                    for (int b = 0; b < 8; ++b)
                        cfg.perturbations.bodies.push_back(static_cast<Body>(b));
                } else {
                    try {
                        cfg.perturbations.bodies.push_back(body_from_name(n));
                    } catch (const std::domain_error& de) {
                        throw config_error(std::string("perturbations.bodies: ") + de.what());
                    }
                }
            }
        }
        cfg.perturbations.ephemeris_mode =
            take<std::string>(jq, "perturbations", "ephemeris", "mean_elements");
        if (cfg.perturbations.ephemeris_mode != "mean_elements" &&
            cfg.perturbations.ephemeris_mode != "table")
            throw config_error("perturbations.ephemeris must be \"mean_elements\" or \"table\"");
        cfg.perturbations.table_path = take<std::string>(jq, "perturbations", "table_path", "");
        if (cfg.perturbations.ephemeris_mode == "table" && cfg.perturbations.table_path.empty())
            throw config_error("perturbations.table_path required in table mode");
        cfg.perturbations.interp_order = take<int>(jq, "perturbations", "interp_order", 7);
        const std::string form =
            take<std::string>(jq, "perturbations", "third_body_form", "standard");
        if (form == "standard") {
            cfg.perturbations.form = ThirdBodyForm::standard;
        } else if (form == "alternate") {
            cfg.perturbations.form = ThirdBodyForm::alternate;
        } else {
            throw config_error("perturbations.third_body_form must be \"standard\" or \"alternate\"");
        }
        cfg.perturbations.collision_floor_au =
            take<double>(jq, "perturbations", "collision_floor_au", 1e-6);
        if (jq.contains("planet_mu_km3_s2")) {
            const json& jm = jq.at("planet_mu_km3_s2");
            check_keys(jm, "perturbations.planet_mu_km3_s2",
                       {body_names().begin(), body_names().end()});
            for (int b = 0; b < 8; ++b)
                if (jm.contains(body_names()[b]))
                    cfg.perturbations.planet_mu_km3_s2[b] = jm.at(body_names()[b]).get<double>();
        }
    }

    // ---- gates ----
    if (j.contains("gates")) {
        const json& jg = j.at("gates");
        check_keys(jg, "gates", {"zero_thrust_windows_days", "forced_direction_windows"});
        if (jg.contains("zero_thrust_windows_days")) {
            for (const auto& w : jg.at("zero_thrust_windows_days")) {
                const auto v = w.get<std::vector<double>>();
                if (v.size() != 2 || !(v[0] < v[1]))
                    throw config_error("gates.zero_thrust_windows_days entries must be [from, to] with from < to");
                if (!(v[0] > 0.0 && v[1] < cfg.boundary.tof_days))
                    throw config_error("gates.zero_thrust_windows_days must lie strictly inside the flight");
                cfg.gates.zero_thrust_windows_days.push_back({v[0], v[1]});
            }
        }
        if (jg.contains("forced_direction_windows")) {
            for (const auto& w : jg.at("forced_direction_windows")) {
                check_keys(w, "gates.forced_direction_windows",
                           {"from_days", "to_days", "direction_lvlh"});
                GatesConfig::ForcedDir fd;
                fd.from_days = require<double>(w, "forced_direction_windows", "from_days");
                fd.to_days = require<double>(w, "forced_direction_windows", "to_days");
                fd.direction_lvlh = detail::vec3(w, "forced_direction_windows", "direction_lvlh");
                const double n = norm(fd.direction_lvlh);
                if (!(n > 0.0))
                    throw config_error("forced_direction_windows.direction_lvlh must be nonzero");
                fd.direction_lvlh = fd.direction_lvlh / n;
                if (!(fd.from_days < fd.to_days) || !(fd.from_days > 0.0) ||
                    !(fd.to_days < cfg.boundary.tof_days))
                    throw config_error("forced_direction_windows must lie strictly inside the flight");
                cfg.gates.forced_direction_windows.push_back(fd);
            }
        }
    }

    // ---- homotopy ----
    if (j.contains("homotopy")) {
        const json& jh = j.at("homotopy");
        check_keys(jh, "homotopy", {"rho_start", "rho_end", "factor", "max_steps"});
        cfg.homotopy.rho_start = take<double>(jh, "homotopy", "rho_start", 1.0);
        cfg.homotopy.rho_end = take<double>(jh, "homotopy", "rho_end", 1e-5);
        cfg.homotopy.factor = take<double>(jh, "homotopy", "factor", 0.1);
        cfg.homotopy.max_steps = take<int>(jh, "homotopy", "max_steps", 40);
        cfg.homotopy.validate();
    }

    // ---- solver ----
    if (j.contains("solver")) {
        const json& js = j.at("solver");
        check_keys(js, "solver",
                   {"tol", "max_iterations", "multistart_samples", "seed", "fd_step",
                    "parallel_samples", "ode_rel_tol", "ode_abs_tol", "coarse_ode_rel_tol",
                    "coarse_ode_abs_tol", "coarse_above_rho", "gamma_c", "cx_parallel",
                    "residual_weights"});
        cfg.solver.tol = take<double>(js, "solver", "tol", cfg.solver.tol);
        cfg.solver.max_iterations = take<int>(js, "solver", "max_iterations", 60);
        cfg.solver.multistart_samples = take<int>(js, "solver", "multistart_samples", 100);
        cfg.solver.seed = take<std::uint64_t>(js, "solver", "seed", cfg.solver.seed);
        cfg.solver.fd_step = take<double>(js, "solver", "fd_step", 1e-7);
        cfg.solver.parallel_samples = take<int>(js, "solver", "parallel_samples", 0);
        cfg.solver.ode_rel_tol = take<double>(js, "solver", "ode_rel_tol", 1e-12);
        cfg.solver.ode_abs_tol = take<double>(js, "solver", "ode_abs_tol", 1e-12);
        cfg.solver.coarse_ode_rel_tol = take<double>(js, "solver", "coarse_ode_rel_tol", 1e-9);
        cfg.solver.coarse_ode_abs_tol = take<double>(js, "solver", "coarse_ode_abs_tol", 1e-9);
        cfg.solver.coarse_above_rho = take<double>(js, "solver", "coarse_above_rho", 1e-3);
        cfg.solver.gamma_c = take<double>(js, "solver", "gamma_c", 1e-16);
        cfg.solver.cx_parallel = take<bool>(js, "solver", "cx_parallel", false);
        if (js.contains("residual_weights")) {
            const auto w = require<std::vector<double>>(js, "solver", "residual_weights");
            if (w.size() != 7) throw config_error("solver.residual_weights must have 7 entries");
            std::copy(w.begin(), w.end(), cfg.solver.residual_weights.begin());
        }
        for (double tolv : {cfg.solver.ode_rel_tol, cfg.solver.ode_abs_tol})
            if (!(tolv >= 1e-14 && tolv <= 1e-3))
                throw config_error("solver ode tolerances must lie in [1e-14, 1e-3]");
    }

    // ---- output ----
    if (j.contains("output")) {
        const json& jo = j.at("output");
        check_keys(jo, "output", {"dir", "samples"});
        cfg.output.dir = take<std::string>(jo, "output", "dir", "out");
        cfg.output.samples = take<int>(jo, "output", "samples", 2001);
        if (cfg.output.samples < 2) throw config_error("output.samples must be >= 2");
    }

    // ---- nrev ----
    if (j.contains("nrev")) cfg.nrev = require<int>(j, "(root)", "nrev");
    if (j.contains("nrev_range")) {
        const auto r = require<std::vector<int>>(j, "(root)", "nrev_range");
        if (r.size() != 2 || r[1] < r[0]) throw config_error("nrev_range must be [lo, hi]");
        cfg.nrev_range = {{r[0], r[1]}};
    }
    if (cfg.nrev && cfg.nrev_range)
        throw config_error("give either nrev or nrev_range, not both");
    if (cfg.nrev && *cfg.nrev < 0) throw config_error("nrev must be non-negative");

    // ---- case preset ----
    cfg.case_preset = take<int>(j, "(root)", "case_preset", 0);
    if (cfg.case_preset != 0) {
        if (cfg.case_preset < 1 || cfg.case_preset > 3)
            throw config_error("case_preset must be 1, 2, or 3");
        if (j.at("power").contains("sigma_per_year") || j.at("power").contains("phi") ||
            j.at("power").contains("a_coeffs") ||
            (j.contains("perturbations") && j.at("perturbations").contains("bodies")))
            throw config_error(
                "case_preset conflicts with explicit power.sigma_per_year/phi/a_coeffs or "
                "perturbations.bodies");
        apply_case_preset(cfg, cfg.case_preset);
    }

    cfg.power.validate();
    return cfg;
}

/// Build the ephemeris a scenario needs (mean elements or table), with the
/// scenario's constants and gravitational parameters applied.
inline Ephemeris build_ephemeris(const ScenarioConfig& cfg) {
    Ephemeris eph;
    eph.set_sun_mu(cfg.constants.mu_sun_km3_s2);
    eph.set_au_km(cfg.constants.au_km);
    for (int b = 0; b < 8; ++b)
        eph.set_planet_mu(static_cast<Body>(b), cfg.perturbations.planet_mu_km3_s2[b]);
    if (cfg.perturbations.ephemeris_mode == "table")
        eph.load_table_csv(cfg.perturbations.table_path, cfg.perturbations.interp_order);
    return eph;
}

/// Resolve the scenario into a canonical-unit shooting problem. The
/// ephemeris must outlive the problem.
inline ShootingProblem build_problem(const ScenarioConfig& cfg, const Ephemeris& eph) {
    const CanonicalUnits units(cfg.constants.au_km, cfg.constants.mu_sun_km3_s2,
                               cfg.boundary.m0_kg);

    ShootingProblem pb;
    pb.units = units;
    pb.au_km = cfg.constants.au_km;

    const double vu = units.velocity_unit_km_s();
    pb.x0 = cart_to_mee(cfg.boundary.r0_km / units.length_unit_km(),
                        cfg.boundary.v0_km_s / vu, 1.0);
    pb.m0 = 1.0;
    pb.t0 = 0.0;
    pb.tf = units.time_from_days(cfg.boundary.tof_days);

    pb.target = cart_to_mee(cfg.boundary.rf_km / units.length_unit_km(),
                            cfg.boundary.vf_km_s / vu, 1.0);
    pb.l_tilde_f = pb.target.l;
    pb.set_nrev(cfg.nrev.value_or(cfg.nrev_range ? (*cfg.nrev_range)[0] : 0));

    pb.engine.eta = cfg.engine.efficiency;
    pb.engine.c_min = units.velocity_from_m_s(cfg.engine.c_min_m_s);
    pb.engine.c_max = units.velocity_from_m_s(cfg.engine.c_max_m_s);
    pb.engine.p_min = units.power_from_w(cfg.engine.p_min_w);
    pb.engine.p_max = std::isfinite(cfg.engine.p_max_w)
                          ? units.power_from_w(cfg.engine.p_max_w)
                          : cfg.engine.p_max_w;

    pb.power = cfg.power;
    pb.p_ava_min = units.power_from_w(cfg.power.p_ava_min_w);

    for (const auto& w : cfg.gates.zero_thrust_windows_days)
        pb.gates.zero_thrust_windows.push_back(
            {units.time_from_days(w[0]), units.time_from_days(w[1])});
    for (const auto& fd : cfg.gates.forced_direction_windows)
        pb.gates.forced_direction_windows.push_back({units.time_from_days(fd.from_days),
                                                     units.time_from_days(fd.to_days),
                                                     fd.direction_lvlh});

    pb.rho = {cfg.homotopy.rho_start, cfg.homotopy.rho_start};

    pb.bodies = cfg.perturbations.bodies;
    pb.ephemeris = &eph;
    pb.epoch_jd0 = cfg.boundary.epoch_jd_tdb;
    pb.third_body_form = cfg.perturbations.form;
    pb.collision_floor =
        cfg.perturbations.collision_floor_au * cfg.constants.au_km / units.length_unit_km();

    pb.residual_weights = cfg.solver.residual_weights;
    pb.ode.rel_tol = cfg.solver.ode_rel_tol;
    pb.ode.abs_tol = cfg.solver.ode_abs_tol;
    pb.cx.gamma_c = cfg.solver.gamma_c;
    pb.cx.parallel = cfg.solver.cx_parallel;
    return pb;
}

inline SolverConfig build_solver_config(const ScenarioConfig& cfg) {
    SolverConfig sc;
    sc.tol = cfg.solver.tol;
    sc.max_iterations = cfg.solver.max_iterations;
    sc.multistart_samples = cfg.solver.multistart_samples;
    sc.seed = cfg.solver.seed;
    sc.fd_step = cfg.solver.fd_step;
    sc.parallel_samples = cfg.solver.parallel_samples;
    return sc;
}

inline TolSchedule build_tol_schedule(const ScenarioConfig& cfg) {
    TolSchedule ts;
    ts.coarse_rel_tol = cfg.solver.coarse_ode_rel_tol;
    ts.coarse_abs_tol = cfg.solver.coarse_ode_abs_tol;
    ts.coarse_above_rho = cfg.solver.coarse_above_rho;
    return ts;
}

}  // namespace csc
