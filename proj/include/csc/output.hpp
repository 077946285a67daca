/**
 * Machine-readable results: the normative trajectory CSV, a summary JSON,
 * and the per-figure plot-data files (thrust envelope, switching function,
 * powers, steering angles, per-body perturbation magnitudes).
 *
 * Column sets and their order are fixed (schema version below); plots are
 * reconstructible from the emitted files alone.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "csc/scenario.hpp"
#include "csc/shooting.hpp"

namespace csc {

inline constexpr const char* kOutputSchemaVersion = "1";

/// In-plane angle epsilon (from the transverse axis, positive toward
/// radial) and out-of-plane angle delta (positive toward the orbit
/// normal) of an LVLH unit vector:
///   alpha_hat = [sin(eps) cos(delta), cos(eps) cos(delta), sin(delta)].
/// Poles (|alpha . u_h| = 1) map to eps = 0 by convention.
inline std::pair<double, double> steering_angles(const Vec3d& alpha_hat) {
    constexpr double rad2deg = 180.0 / std::numbers::pi;
    const double sd = std::clamp(alpha_hat.z, -1.0, 1.0);
    const double delta = std::asin(sd);
    double eps = 0.0;
    if (std::abs(alpha_hat.x) > 1e-14 || std::abs(alpha_hat.y) > 1e-14)
        eps = std::atan2(alpha_hat.x, alpha_hat.y);
    return {eps * rad2deg, delta * rad2deg};
}

struct RunSummary {
    std::string scenario_name;
    int case_preset = 0;
    bool converged = false;
    int nrev = 0;
    double final_mass_kg = 0.0;
    std::array<double, 7> eta0{};
    double residual_inf = 0.0;
    double rho_reached = 0.0;
    int isp_switch_count = 0;
    double min_switching_function = 0.0;
    double wall_time_s = 0.0;
    int multistart_samples_tried = 0;
    std::vector<StageRecord> stages;
    std::string failure;
};

/// Classify the Isp profile per sample into {min, intermediate, max} with
/// a 1% band at the bounds and count the mode transitions.
inline int count_isp_switches(const Trajectory& traj, const CanonicalEngine& eng) {
    const double band = 0.01 * (eng.c_max - eng.c_min);
    int prev = -2, count = 0;
    for (const TrajectorySample& s : traj.samples) {
        const double c = s.u.exhaust_velocity;
        int mode = 0;
        if (c <= eng.c_min + band) mode = -1;
        else if (c >= eng.c_max - band) mode = 1;
        if (prev != -2 && mode != prev) ++count;
        prev = mode;
    }
    return count;
}

inline double min_switching_function(const Trajectory& traj) {
    double m = std::numeric_limits<double>::infinity();
    for (const TrajectorySample& s : traj.samples) m = std::min(m, s.s);
    return m;
}

namespace detail {

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) {
        out_.open(path);
        if (!out_) throw io_error("cannot write " + path.string());
        out_ << header << "\n";
    }
    void row(const std::vector<double>& vals) {
        char buf[32];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12g", vals[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

}  // namespace detail

/// Write every output file for one run into `dir`. Partial (non-converged)
/// trajectories are written the same way.
inline void emit_outputs(const Trajectory& traj, const RunSummary& summary,
                         const ShootingProblem& pb, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory " + dir);

    const CanonicalUnits& u = pb.units;
    const double g0 = 9.80665;
    const double v_m_s = u.velocity_unit_km_s() * 1e3;

    // Normative column order; p in LU (= AU for the standard scaling),
    // l in rad (unwrapped), S in canonical units.
    detail::CsvWriter tr(fs::path(dir) / "trajectory.csv",
                         "t_days,p,f,g,h,k,l,m_kg,x_km,y_km,z_km,vx_kms,vy_kms,vz_kms,"
                         "T_N,Isp_s,P_W,S,eps_deg,delta_deg,P_SA_W,P_ava_W");
    for (const TrajectorySample& s : traj.samples) {
        const auto [eps, delta] = steering_angles(s.u.alpha_hat);
        tr.row({u.days_from_time(s.t), s.z[0], s.z[1], s.z[2], s.z[3], s.z[4], s.z[5],
                u.kg_from_mass(s.z[6]), u.km_from_length(s.cart.r.x),
                u.km_from_length(s.cart.r.y), u.km_from_length(s.cart.r.z),
                u.km_s_from_velocity(s.cart.v.x), u.km_s_from_velocity(s.cart.v.y),
                u.km_s_from_velocity(s.cart.v.z), u.n_from_force(s.thrust),
                s.u.exhaust_velocity * v_m_s / g0, u.w_from_power(s.u.power), s.s, eps, delta,
                u.w_from_power(s.p_sa), u.w_from_power(s.p_ava)});
    }

    // Thrust envelope: operating value plus the admissible bounds
    // 2 eta P_ava / c at the three characteristic exhaust velocities.
    detail::CsvWriter env(fs::path(dir) / "thrust_envelope.csv",
                          "t_days,T_N,T_min_N,T_op_N,T_max_N");
    for (const TrajectorySample& s : traj.samples) {
        const double p_ava = std::max(s.p_ava, 0.0);
        const double t_min = 2.0 * pb.engine.eta * p_ava / pb.engine.c_max;
        const double t_max = 2.0 * pb.engine.eta * p_ava / pb.engine.c_min;
        const double t_op =
            s.c_op > 1e-12 ? 2.0 * pb.engine.eta * p_ava / s.c_op : 0.0;
        env.row({u.days_from_time(s.t), u.n_from_force(s.thrust), u.n_from_force(t_min),
                 u.n_from_force(t_op), u.n_from_force(t_max)});
    }

    detail::CsvWriter sw(fs::path(dir) / "switching.csv", "t_days,S");
    for (const TrajectorySample& s : traj.samples)
        sw.row({u.days_from_time(s.t), s.s});

    detail::CsvWriter pw(fs::path(dir) / "power.csv",
                         "t_days,P_SA_W,P_ava_W,P_thruster_W");
    for (const TrajectorySample& s : traj.samples)
        pw.row({u.days_from_time(s.t), u.w_from_power(s.p_sa), u.w_from_power(s.p_ava),
                u.w_from_power(s.u.power)});

    // Steering angles; the unwrapped in-plane angle keeps plot continuity,
    // the raw value stays alongside.
    {
        detail::CsvWriter st(fs::path(dir) / "steering.csv",
                             "t_days,eps_deg,eps_unwrapped_deg,delta_deg");
        double offset = 0.0, prev = 0.0;
        bool first = true;
        for (const TrajectorySample& s : traj.samples) {
            const auto [eps, delta] = steering_angles(s.u.alpha_hat);
            if (!first) {
                if (eps - prev > 180.0) offset -= 360.0;
                else if (prev - eps > 180.0) offset += 360.0;
            }
            first = false;
            prev = eps;
            st.row({u.days_from_time(s.t), eps, eps + offset, delta});
        }
    }

    if (!pb.bodies.empty()) {
        std::string header = "t_days";
        for (Body b : pb.bodies) header += ",a_" + body_names()[static_cast<int>(b)] + "_ms2";
        detail::CsvWriter pe(fs::path(dir) / "perturbations.csv", header);
        const double a_unit = u.accel_unit_m_s2();
        for (const TrajectorySample& s : traj.samples) {
            std::vector<double> row{u.days_from_time(s.t)};
            for (double a : s.body_accel_norms) row.push_back(a * a_unit);
            pe.row(row);
        }
    }

    // Summary JSON.
    nlohmann::json js;
    js["schema_version"] = kOutputSchemaVersion;
    js["scenario"] = summary.scenario_name;
    js["case_preset"] = summary.case_preset;
    js["converged"] = summary.converged;
    js["nrev"] = summary.nrev;
    js["final_mass_kg"] = summary.final_mass_kg;
    js["eta0"] = summary.eta0;
    js["residual_inf"] = summary.residual_inf;
    js["rho_reached"] = summary.rho_reached;
    js["isp_switch_count"] = summary.isp_switch_count;
    js["min_switching_function"] = summary.min_switching_function;
    js["wall_time_s"] = summary.wall_time_s;
    js["multistart_samples_tried"] = summary.multistart_samples_tried;
    if (!summary.failure.empty()) js["failure"] = summary.failure;
    js["stages"] = nlohmann::json::array();
    for (const StageRecord& st : summary.stages)
        js["stages"].push_back({{"rho", st.rho},
                                {"m_final_kg", st.m_final_kg},
                                {"iterations", st.iterations},
                                {"cold_start", st.cold_start},
                                {"residual_inf", st.residual_inf}});

    std::ofstream out(fs::path(dir) / "summary.json");
    if (!out) throw io_error("cannot write " + (fs::path(dir) / "summary.json").string());
    out << js.dump(2) << "\n";
}

}  // namespace csc
