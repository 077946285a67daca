/**
 * Variable-Isp, variable-thrust engine map.
 *
 * The engine is controlled by input power P and exhaust velocity
 * c = Isp * g0, both confined to bounded sets. Thrust and mass flow follow
 * from the jet-power relation T = 2 eta P / c. The formulas are valid in
 * any coherent unit system, so the same free functions serve both the SI
 * model and the canonical dynamics.
 */

#pragma once

#include <limits>
#include <stdexcept>

#include "csc/vec.hpp"

namespace csc {

/// T = 2 eta P / c.
template <class T>
T thrust_magnitude(double eta, T power, T exhaust_velocity) {
    if (real_part(exhaust_velocity) <= 0.0)
        throw std::domain_error("thrust_magnitude: exhaust velocity must be positive");
    return 2.0 * eta * power / exhaust_velocity;
}

/// dm/dt = -2 eta P / c^2 = -T/c. Negative while thrusting.
template <class T>
T mass_flow_rate(double eta, T power, T exhaust_velocity) {
    if (real_part(exhaust_velocity) <= 0.0)
        throw std::domain_error("mass_flow_rate: exhaust velocity must be positive");
    return -2.0 * eta * power / (exhaust_velocity * exhaust_velocity);
}

struct EngineModel {
    double efficiency = 0.0;
    double c_min_m_s = 0.0;  ///< Isp_min * g0
    double c_max_m_s = 0.0;  ///< Isp_max * g0
    double p_min_w = 0.0;
    double p_max_w = std::numeric_limits<double>::infinity();  ///< no cap by default

    double thrust_n(double power_w, double c_m_s) const {
        return thrust_magnitude(efficiency, power_w, c_m_s);
    }
    double mass_flow_kg_s(double power_w, double c_m_s) const {
        return mass_flow_rate(efficiency, power_w, c_m_s);
    }

    void validate() const {
        if (!(efficiency > 0.0 && efficiency <= 1.0))
            throw std::domain_error("EngineModel: efficiency must lie in (0, 1]");
        if (!(0.0 < c_min_m_s && c_min_m_s < c_max_m_s))
            throw std::domain_error("EngineModel: need 0 < c_min < c_max");
        if (!(0.0 <= p_min_w && p_min_w < p_max_w))
            throw std::domain_error("EngineModel: need 0 <= p_min < p_max");
    }
};

/// Engine bounds expressed in canonical units, used in the dynamics.
struct CanonicalEngine {
    double eta = 0.0;
    double c_min = 0.0;
    double c_max = 0.0;
    double p_min = 0.0;
    double p_max = std::numeric_limits<double>::infinity();
};

}  // namespace csc
