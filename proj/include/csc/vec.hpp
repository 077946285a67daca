/**
 * Minimal fixed-size vector algebra, generic over the scalar field.
 *
 * Every reduction here is non-conjugating: dot(a, b) = sum a_i * b_i even
 * for complex scalars, and norm(v) = sqrt(dot(v, v)). This is the analytic
 * continuation required by complex-step differentiation; the conjugating
 * inner product of std::complex / Eigen would destroy the imaginary parts
 * that carry the derivatives.
 */

#pragma once

#include <cmath>
#include <complex>

namespace csc {

/// Real part of a scalar; identity for double.
inline double real_part(double x) { return x; }
inline double real_part(const std::complex<double>& x) { return x.real(); }

/// Imaginary part of a scalar; zero for double.
inline double imag_part(double) { return 0.0; }
inline double imag_part(const std::complex<double>& x) { return x.imag(); }

template <class A, class B>
using promote_t = decltype(std::declval<A>() + std::declval<B>());

template <class T>
struct Vec3 {
    T x{}, y{}, z{};

    T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

using Vec3d = Vec3<double>;

template <class T>
Vec3<T> lift(const Vec3d& v) {
    return {T(v.x), T(v.y), T(v.z)};
}

template <class A, class B>
Vec3<promote_t<A, B>> operator+(const Vec3<A>& a, const Vec3<B>& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

template <class A, class B>
Vec3<promote_t<A, B>> operator-(const Vec3<A>& a, const Vec3<B>& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

template <class T>
Vec3<T> operator-(const Vec3<T>& a) {
    return {-a.x, -a.y, -a.z};
}

template <class A, class B>
Vec3<promote_t<A, B>> operator*(const A& s, const Vec3<B>& v) {
    return {s * v.x, s * v.y, s * v.z};
}

template <class A, class B>
Vec3<promote_t<A, B>> operator*(const Vec3<A>& v, const B& s) {
    return s * v;
}

template <class A, class B>
Vec3<promote_t<A, B>> operator/(const Vec3<A>& v, const B& s) {
    return {v.x / s, v.y / s, v.z / s};
}

/// Non-conjugating inner product.
template <class A, class B>
promote_t<A, B> dot(const Vec3<A>& a, const Vec3<B>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class A, class B>
Vec3<promote_t<A, B>> cross(const Vec3<A>& a, const Vec3<B>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// sqrt(v . v) without conjugation; for complex inputs this is the
/// analytic continuation of the Euclidean norm (valid while the real
/// part of v . v stays positive, which holds for small imaginary steps).
template <class T>
T norm(const Vec3<T>& v) {
    using std::sqrt;
    return sqrt(dot(v, v));
}

template <class T>
Vec3<T> normalized(const Vec3<T>& v) {
    return v / norm(v);
}

}  // namespace csc
