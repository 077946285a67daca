/**
 * Canonical (nondimensional) unit system for heliocentric work.
 *
 * Lengths scale by one astronomical unit, time by the value that makes the
 * Sun's gravitational parameter exactly 1 LU^3/TU^2, and mass by the
 * spacecraft wet mass. All propagation and shooting happens in these units;
 * scenario I/O converts at the boundary.
 */

#pragma once

#include <cmath>
#include <stdexcept>

namespace csc {

/// Physical constants the scenario may override. The defaults are the
/// IAU 2009/2012 values.
struct Constants {
    double mu_sun_km3_s2 = 1.32712440018e11;
    double au_km = 1.495978707e8;
    double g0_m_s2 = 9.80665;
};

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerJulianYear = 365.25;

class CanonicalUnits {
public:
    /// @param length_unit_km  kilometers per LU (normally one AU)
    /// @param mu_sun_km3_s2   Sun's gravitational parameter
    /// @param mass_unit_kg    kilograms per MU (normally the wet mass m0)
    CanonicalUnits(double length_unit_km, double mu_sun_km3_s2, double mass_unit_kg)
        : lu_km_(length_unit_km),
          tu_s_(std::sqrt(length_unit_km * length_unit_km * length_unit_km / mu_sun_km3_s2)),
          mu_kg_(mass_unit_kg) {
        if (length_unit_km <= 0.0 || mu_sun_km3_s2 <= 0.0 || mass_unit_kg <= 0.0)
            throw std::domain_error("CanonicalUnits: units must be positive");
    }

    double length_unit_km() const { return lu_km_; }
    double time_unit_s() const { return tu_s_; }
    double mass_unit_kg() const { return mu_kg_; }

    double velocity_unit_km_s() const { return lu_km_ / tu_s_; }
    double accel_unit_m_s2() const { return 1e3 * lu_km_ / (tu_s_ * tu_s_); }
    double force_unit_n() const { return mu_kg_ * accel_unit_m_s2(); }
    double power_unit_w() const { return force_unit_n() * 1e3 * velocity_unit_km_s(); }

    // to canonical
    double length_from_km(double km) const { return km / lu_km_; }
    double velocity_from_km_s(double km_s) const { return km_s / velocity_unit_km_s(); }
    double time_from_days(double d) const { return d * kSecondsPerDay / tu_s_; }
    double time_from_s(double s) const { return s / tu_s_; }
    double mass_from_kg(double kg) const { return kg / mu_kg_; }
    double power_from_w(double w) const { return w / power_unit_w(); }
    double velocity_from_m_s(double m_s) const { return velocity_from_km_s(m_s * 1e-3); }

    // from canonical
    double km_from_length(double lu) const { return lu * lu_km_; }
    double km_s_from_velocity(double v) const { return v * velocity_unit_km_s(); }
    double days_from_time(double t) const { return t * tu_s_ / kSecondsPerDay; }
    double s_from_time(double t) const { return t * tu_s_; }
    double kg_from_mass(double m) const { return m * mu_kg_; }
    double w_from_power(double p) const { return p * power_unit_w(); }
    double n_from_force(double f) const { return f * force_unit_n(); }

    double years_from_time(double t) const {
        return t * tu_s_ / (kDaysPerJulianYear * kSecondsPerDay);
    }

private:
    double lu_km_;
    double tu_s_;
    double mu_kg_;
};

}  // namespace csc
