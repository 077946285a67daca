/**
 * Modified equinoctial elements, Cartesian conversions, and the LVLH frame.
 *
 * Element set: p (semi-latus rectum), f, g (eccentricity vector),
 * h, k (node/inclination), l (true longitude). Regular for e < 1 and
 * inclinations strictly below 180 degrees. The true longitude is kept
 * unwrapped by the propagator; the conversion routines return l in
 * [0, 2*pi).
 *
 * mee_to_cart and the LVLH rotation are generic over the scalar field so
 * the complex-step costate machinery can evaluate them off the real axis.
 */

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csc/vec.hpp"

namespace csc {

template <class T>
struct Mee {
    T p{}, f{}, g{}, h{}, k{}, l{};
};

using MeeState = Mee<double>;

template <class T>
Mee<T> lift_mee(const MeeState& x) {
    return {T(x.p), T(x.f), T(x.g), T(x.h), T(x.k), T(x.l)};
}

template <class T>
struct Cart {
    Vec3<T> r{}, v{};
};

using CartesianState = Cart<double>;

/// w = 1 + f cos l + g sin l; proportional to 1/r. Must stay positive for
/// a finite radius.
template <class T>
T mee_w(const Mee<T>& x) {
    using std::cos;
    using std::sin;
    return T(1) + x.f * cos(x.l) + x.g * sin(x.l);
}

/// Position/velocity from modified equinoctial elements.
template <class T>
Cart<T> mee_to_cart(const Mee<T>& x, T mu) {
    using std::cos;
    using std::sin;
    using std::sqrt;

    if (real_part(x.p) <= 0.0)
        throw std::domain_error("mee_to_cart: semi-latus rectum must be positive");

    const T cl = cos(x.l);
    const T sl = sin(x.l);
    const T alpha2 = x.h * x.h - x.k * x.k;
    const T s2 = T(1) + x.h * x.h + x.k * x.k;
    const T w = T(1) + x.f * cl + x.g * sl;
    if (real_part(w) <= 0.0)
        throw std::domain_error("mee_to_cart: radius is not finite (w <= 0)");

    const T r = x.p / w;
    const T sqrt_mu_p = sqrt(mu / x.p);

    Cart<T> out;
    out.r = {r / s2 * (cl + alpha2 * cl + T(2) * x.h * x.k * sl),
             r / s2 * (sl - alpha2 * sl + T(2) * x.h * x.k * cl),
             T(2) * r / s2 * (x.h * sl - x.k * cl)};
    out.v = {-sqrt_mu_p / s2 * (sl + alpha2 * sl - T(2) * x.h * x.k * cl + x.g - T(2) * x.f * x.h * x.k + alpha2 * x.g),
             -sqrt_mu_p / s2 * (-cl + alpha2 * cl + T(2) * x.h * x.k * sl - x.f + T(2) * x.g * x.h * x.k + alpha2 * x.f),
             T(2) * sqrt_mu_p / s2 * (x.h * cl + x.k * sl + x.f * x.h + x.g * x.k)};
    return out;
}

/// Elements from position/velocity. l is returned in [0, 2*pi).
/// Rejects rectilinear states and the retrograde-equatorial singularity
/// (i = 180 deg), where h and k blow up.
inline MeeState cart_to_mee(const Vec3d& r, const Vec3d& v, double mu) {
    const double rmag = norm(r);
    if (!(rmag > 0.0)) throw std::domain_error("cart_to_mee: zero position vector");

    const Vec3d hv = cross(r, v);
    const double hmag = norm(hv);
    if (!(hmag > 0.0)) throw std::domain_error("cart_to_mee: rectilinear orbit");

    const Vec3d hhat = hv / hmag;
    const double denom = 1.0 + hhat.z;
    if (denom < 1e-12)
        throw std::domain_error("cart_to_mee: retrograde-equatorial orbit (i = 180 deg)");

    MeeState x;
    x.p = hmag * hmag / mu;
    x.h = -hhat.y / denom;
    x.k = hhat.x / denom;

    // Eccentricity vector, then its components on the equinoctial axes.
    const Vec3d evec = cross(v, hv) / mu - r / rmag;
    const double s2 = 1.0 + x.h * x.h + x.k * x.k;
    const double alpha2 = x.h * x.h - x.k * x.k;
    const Vec3d fhat{(1.0 + alpha2) / s2, 2.0 * x.h * x.k / s2, -2.0 * x.k / s2};
    const Vec3d ghat{2.0 * x.h * x.k / s2, (1.0 - alpha2) / s2, 2.0 * x.h / s2};
    x.f = dot(evec, fhat);
    x.g = dot(evec, ghat);

    x.l = std::atan2(dot(r, ghat), dot(r, fhat));
    if (x.l < 0.0) x.l += 2.0 * std::numbers::pi;
    return x;
}

/// Rotation from the inertial frame to LVLH, stored as the three frame
/// unit vectors (rows): radial, transverse, orbit-normal.
template <class T>
struct LvlhRotation {
    Vec3<T> ur, ut, uh;

    Vec3<T> to_lvlh(const Vec3<T>& a) const { return {dot(ur, a), dot(ut, a), dot(uh, a)}; }
    Vec3<T> to_inertial(const Vec3<T>& a) const {
        return {ur.x * a.x + ut.x * a.y + uh.x * a.z,
                ur.y * a.x + ut.y * a.y + uh.y * a.z,
                ur.z * a.x + ut.z * a.y + uh.z * a.z};
    }
};

template <class T>
LvlhRotation<T> lvlh_rotation(const Vec3<T>& r, const Vec3<T>& v) {
    const Vec3<T> hv = cross(r, v);
    const T hmag = norm(hv);
    const T rmag = norm(r);
    if (!(real_part(rmag) > 0.0) || real_part(hmag) < 1e-12 * real_part(rmag) * real_part(norm(v)))
        throw std::domain_error("lvlh_rotation: degenerate (rectilinear) state");

    LvlhRotation<T> rot;
    rot.ur = r / rmag;
    rot.uh = hv / hmag;
    rot.ut = cross(rot.uh, rot.ur);
    return rot;
}

}  // namespace csc
