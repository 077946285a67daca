/**
 * Planetary state source and secondary-body perturbing acceleration.
 *
 * Default mode propagates J2000 mean Keplerian elements with linear
 * per-century rates (the classic approximate-positions table, valid
 * 1800-2050), heliocentric ecliptic J2000 frame. A CSV state table with
 * Lagrange interpolation can be loaded as a higher-fidelity override.
 *
 * The third-body kernel is generic over the scalar field: body positions
 * depend only on time and stay real, while the spacecraft state may carry
 * a complex perturbation.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "csc/elements.hpp"
#include "csc/errors.hpp"
#include "csc/vec.hpp"

namespace csc {

enum class Body { Mercury = 0, Venus, Earth, Mars, Jupiter, Saturn, Uranus, Neptune };

inline const std::array<std::string, 8>& body_names() {
    static const std::array<std::string, 8> names{
        "mercury", "venus", "earth", "mars", "jupiter", "saturn", "uranus", "neptune"};
    return names;
}

inline Body body_from_name(const std::string& name) {
    const auto& names = body_names();
    for (int i = 0; i < 8; ++i)
        if (names[i] == name) return static_cast<Body>(i);
    throw std::domain_error("unknown body: " + name);
}

/// Mean classical elements at J2000 plus linear per-century rates.
/// Order: a [AU], e, i [deg], L [deg], long.peri [deg], long.node [deg].
struct PlanetModel {
    double mu_km3_s2 = 0.0;
    std::array<double, 6> elements_j2000{};
    std::array<double, 6> rates_per_century{};
};

inline constexpr double kJ2000Jd = 2451545.0;
inline constexpr double kDaysPerCentury = 36525.0;

/// System GM values (planet plus satellites) [km^3/s^2].
inline const std::array<double, 8>& default_planet_mu() {
    static const std::array<double, 8> mu{
        2.203178e4,    // Mercury
        3.24858592e5,  // Venus
        4.03503236e5,  // Earth-Moon barycenter
        4.2828375e4,   // Mars system
        1.267127648e8, // Jupiter system
        3.79405852e7,  // Saturn system
        5.7945486e6,   // Uranus system
        6.8365271e6    // Neptune system
    };
    return mu;
}

/// Keplerian elements for approximate planetary positions, 1800-2050.
inline const std::array<PlanetModel, 8>& default_planet_models() {
    static const std::array<PlanetModel, 8> models = [] {
        std::array<PlanetModel, 8> m{};
        const auto& mu = default_planet_mu();
        // a, e, i, L, long.peri, long.node
        m[0] = {mu[0],
                {0.38709927, 0.20563593, 7.00497902, 252.25032350, 77.45779628, 48.33076593},
                {0.00000037, 0.00001906, -0.00594749, 149472.67411175, 0.16047689, -0.12534081}};
        m[1] = {mu[1],
                {0.72333566, 0.00677672, 3.39467605, 181.97909950, 131.60246718, 76.67984255},
                {0.00000390, -0.00004107, -0.00078890, 58517.81538729, 0.00268329, -0.27769418}};
        m[2] = {mu[2],
                {1.00000261, 0.01671123, -0.00001531, 100.46457166, 102.93768193, 0.0},
                {0.00000562, -0.00004392, -0.01294668, 35999.37244981, 0.32327364, 0.0}};
        m[3] = {mu[3],
                {1.52371034, 0.09339410, 1.84969142, -4.55343205, -23.94362959, 49.55953891},
                {0.00001847, 0.00007882, -0.00813131, 19140.30268499, 0.44441088, -0.29257343}};
        m[4] = {mu[4],
                {5.20288700, 0.04838624, 1.30439695, 34.39644051, 14.72847983, 100.47390909},
                {-0.00011607, -0.00013253, -0.00183714, 3034.74612775, 0.21252668, 0.20469106}};
        m[5] = {mu[5],
                {9.53667594, 0.05386179, 2.48599187, 49.95424423, 92.59887831, 113.66242448},
                {-0.00125060, -0.00050991, 0.00193609, 1222.49362201, -0.41897216, -0.28867794}};
        m[6] = {mu[6],
                {19.18916464, 0.04725744, 0.77263783, 313.23810451, 170.95427630, 74.01692503},
                {-0.00196176, -0.00004397, -0.00242939, 428.48202785, 0.40805281, 0.04240589}};
        m[7] = {mu[7],
                {30.06992276, 0.00859048, 1.77004347, -55.12002969, 44.96476227, 131.78422574},
                {0.00026291, 0.00005105, 0.00035372, 218.45945325, -0.32241464, -0.00508664}};
        return m;
    }();
    return models;
}

/// Solve Kepler's equation M = E - e sin E by Newton iteration.
inline double solve_kepler(double mean_anomaly_rad, double e) {
    double E = mean_anomaly_rad + e * std::sin(mean_anomaly_rad);
    for (int it = 0; it < 20; ++it) {
        const double fval = E - e * std::sin(E) - mean_anomaly_rad;
        const double step = fval / (1.0 - e * std::cos(E));
        E -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return E;
}

/// Tabulated Cartesian states with Lagrange interpolation centered on the
/// nearest epochs. CSV columns: epoch_jd, body, x_km, y_km, z_km,
/// vx_kms, vy_kms, vz_kms. Header row required.
class EphemerisTable {
public:
    void insert(Body body, double epoch_jd, const CartesianState& state_km) {
        auto& rows = rows_[body];
        rows.push_back({epoch_jd, state_km});
    }

    void finalize(int interp_order) {
        if (interp_order < 2) throw std::domain_error("EphemerisTable: interp_order must be >= 2");
        interp_order_ = interp_order;
        for (auto& [body, rows] : rows_) {
            std::sort(rows.begin(), rows.end(),
                      [](const Row& a, const Row& b) { return a.epoch_jd < b.epoch_jd; });
            for (size_t i = 1; i < rows.size(); ++i)
                if (!(rows[i].epoch_jd > rows[i - 1].epoch_jd))
                    throw std::domain_error("EphemerisTable: epochs must be strictly increasing");
            if (static_cast<int>(rows.size()) < interp_order_ + 1)
                throw std::domain_error("EphemerisTable: need at least interp_order+1 epochs per body");
        }
    }

    bool has(Body body) const { return rows_.count(body) != 0; }

    CartesianState state_km(Body body, double epoch_jd) const {
        const auto it = rows_.find(body);
        if (it == rows_.end()) throw std::domain_error("EphemerisTable: body not in table");
        const auto& rows = it->second;
        if (epoch_jd < rows.front().epoch_jd || epoch_jd > rows.back().epoch_jd)
            throw std::domain_error("EphemerisTable: epoch outside table range");

        // Support window of interp_order+1 points centered on the query.
        const int n = interp_order_ + 1;
        auto upper = std::upper_bound(rows.begin(), rows.end(), epoch_jd,
                                      [](double t, const Row& r) { return t < r.epoch_jd; });
        int idx = static_cast<int>(upper - rows.begin());
        int lo = std::clamp(idx - n / 2 - (n % 2 == 0 ? 0 : 1) + 1, 0,
                            static_cast<int>(rows.size()) - n);

        CartesianState out{};
        for (int i = 0; i < n; ++i) {
            double weight = 1.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                weight *= (epoch_jd - rows[lo + j].epoch_jd) /
                          (rows[lo + i].epoch_jd - rows[lo + j].epoch_jd);
            }
            out.r = out.r + weight * rows[lo + i].state.r;
            out.v = out.v + weight * rows[lo + i].state.v;
        }
        return out;
    }

private:
    struct Row {
        double epoch_jd;
        CartesianState state;
    };
    std::map<Body, std::vector<Row>> rows_;
    int interp_order_ = 7;
};

class Ephemeris {
public:
    Ephemeris() : models_(default_planet_models()) {}

    void set_planet_mu(Body body, double mu_km3_s2) {
        models_[static_cast<int>(body)].mu_km3_s2 = mu_km3_s2;
    }
    double planet_mu_km3_s2(Body body) const {
        return models_[static_cast<int>(body)].mu_km3_s2;
    }

    /// Load a CSV state table; bodies present in the table are served from
    /// it, everything else falls back to mean elements.
    void load_table_csv(const std::string& path, int interp_order = 7) {
        std::ifstream in(path);
        if (!in) throw io_error("cannot open ephemeris table: " + path);
        std::string line;
        if (!std::getline(in, line)) throw config_error("ephemeris table is empty: " + path);

        EphemerisTable table;
        size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            if (fields.size() != 8)
                throw config_error("ephemeris table line " + std::to_string(line_no) +
                                   ": expected 8 columns");
            try {
                const double jd = std::stod(fields[0]);
                const Body body = body_from_name(fields[1]);
                CartesianState st;
                st.r = {std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4])};
                st.v = {std::stod(fields[5]), std::stod(fields[6]), std::stod(fields[7])};
                table.insert(body, jd, st);
            } catch (const std::invalid_argument&) {
                throw config_error("ephemeris table line " + std::to_string(line_no) +
                                   ": malformed number");
            }
        }
        table.finalize(interp_order);
        table_ = std::move(table);
        has_table_ = true;
    }

    /// Heliocentric ecliptic-J2000 state [km, km/s].
    CartesianState planet_state_km(Body body, double epoch_jd) const {
        if (has_table_ && table_.has(body)) return table_.state_km(body, epoch_jd);
        return mean_element_state_km(body, epoch_jd);
    }

    CartesianState mean_element_state_km(Body body, double epoch_jd) const {
        constexpr double deg = std::numbers::pi / 180.0;
        const PlanetModel& pm = models_[static_cast<int>(body)];
        const double T = (epoch_jd - kJ2000Jd) / kDaysPerCentury;

        const double a_au = pm.elements_j2000[0] + pm.rates_per_century[0] * T;
        const double e = pm.elements_j2000[1] + pm.rates_per_century[1] * T;
        const double inc = (pm.elements_j2000[2] + pm.rates_per_century[2] * T) * deg;
        const double L = (pm.elements_j2000[3] + pm.rates_per_century[3] * T) * deg;
        const double lp = (pm.elements_j2000[4] + pm.rates_per_century[4] * T) * deg;
        const double node = (pm.elements_j2000[5] + pm.rates_per_century[5] * T) * deg;

        const double argp = lp - node;
        double M = std::fmod(L - lp, 2.0 * std::numbers::pi);
        if (M > std::numbers::pi) M -= 2.0 * std::numbers::pi;
        if (M < -std::numbers::pi) M += 2.0 * std::numbers::pi;

        const double E = solve_kepler(M, e);
        const double a_km = a_au * au_km_;
        const double p_km = a_km * (1.0 - e * e);

        // Perifocal position/velocity, then rotate by argp, inc, node.
        const double cosE = std::cos(E), sinE = std::sin(E);
        const double r_km = a_km * (1.0 - e * cosE);
        const double xp = a_km * (cosE - e);
        const double yp = a_km * std::sqrt(1.0 - e * e) * sinE;
        const double vf = std::sqrt(mu_sun_km3_s2_ * a_km) / r_km;
        const double vxp = -vf * sinE;
        const double vyp = vf * std::sqrt(1.0 - e * e) * cosE;
        (void)p_km;

        const double co = std::cos(argp), so = std::sin(argp);
        const double ci = std::cos(inc), si = std::sin(inc);
        const double cn = std::cos(node), sn = std::sin(node);

        const auto rotate = [&](double x, double y) -> Vec3d {
            const double x1 = co * x - so * y;
            const double y1 = so * x + co * y;
            const double y2 = ci * y1;
            const double z2 = si * y1;
            return {cn * x1 - sn * y2, sn * x1 + cn * y2, z2};
        };

        CartesianState out;
        out.r = rotate(xp, yp);
        out.v = rotate(vxp, vyp);
        return out;
    }

    void set_sun_mu(double mu_km3_s2) { mu_sun_km3_s2_ = mu_km3_s2; }
    void set_au_km(double au_km) { au_km_ = au_km; }

private:
    std::array<PlanetModel, 8> models_;
    EphemerisTable table_;
    bool has_table_ = false;
    double mu_sun_km3_s2_ = 1.32712440018e11;
    double au_km_ = 1.495978707e8;
};

/// Which algebraic form of the disturbing acceleration to use. `standard`
/// is the tidal form mu_j [ (r_j - r)/|r_j - r|^3 - r_j/|r_j|^3 ];
/// `alternate` replaces the indirect term with the heliocentric central
/// direction, mu_j [ (r_j - r)/|r_j - r|^3 - r/|r|^3 ].
enum class ThirdBodyForm { standard, alternate };

/// Snapshot of one perturbing body at a fixed time, canonical units.
struct BodyState {
    Vec3d r;       ///< heliocentric position [LU]
    double mu;     ///< gravitational parameter [LU^3/TU^2]
};

/// Perturbing acceleration from a set of secondary bodies, rotated into
/// the spacecraft's LVLH frame. Body states are real snapshots (functions
/// of time only); the spacecraft state may carry a complex step.
template <class T>
Vec3<T> third_body_accel_lvlh(const Vec3<T>& r_sc, const Vec3<T>& v_sc,
                              const std::vector<BodyState>& bodies,
                              ThirdBodyForm form, double collision_floor) {
    using std::sqrt;
    if (bodies.empty()) return {T(0), T(0), T(0)};

    Vec3<T> accel{T(0), T(0), T(0)};
    for (const BodyState& b : bodies) {
        const Vec3<T> d = lift<T>(b.r) - r_sc;  // body-relative direct term
        const T d2 = dot(d, d);
        if (real_part(d2) < collision_floor * collision_floor)
            throw std::domain_error("third_body_accel: spacecraft too close to a perturbing body");
        accel = accel + b.mu * (d / (d2 * sqrt(d2)));

        if (form == ThirdBodyForm::standard) {
            const double rj2 = dot(b.r, b.r);
            accel = accel - (b.mu / (rj2 * std::sqrt(rj2))) * lift<T>(b.r);
        } else {
            const T r2 = dot(r_sc, r_sc);
            accel = accel - b.mu * (r_sc / (r2 * sqrt(r2)));
        }
    }
    const LvlhRotation<T> rot = lvlh_rotation(r_sc, v_sc);
    return rot.to_lvlh(accel);
}

/// Dimensional convenience wrapper: spacecraft state in km and km/s,
/// bodies resolved from the ephemeris at the given epoch, acceleration
/// returned in km/s^2 (LVLH). Returns zero for an empty body set.
inline Vec3d secondary_body_accel(const Ephemeris& eph, const Vec3d& r_sc_km,
                                  const Vec3d& v_sc_km_s, double epoch_jd,
                                  const std::vector<Body>& bodies,
                                  ThirdBodyForm form = ThirdBodyForm::standard,
                                  double collision_floor_km = 150.0) {
    if (bodies.empty()) return {0.0, 0.0, 0.0};
    std::vector<BodyState> states;
    states.reserve(bodies.size());
    for (Body b : bodies) {
        const CartesianState st = eph.planet_state_km(b, epoch_jd);
        states.push_back({st.r, eph.planet_mu_km3_s2(b)});
    }
    return third_body_accel_lvlh(r_sc_km, v_sc_km_s, states, form, collision_floor_km);
}

}  // namespace csc
