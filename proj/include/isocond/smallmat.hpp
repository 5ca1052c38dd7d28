// Closed-form singular values and condition numbers for 2x2 and 3x3
// matrices. This is the reference route every analytic conditioning formula
// in the library is checked against.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "core.hpp"

namespace isocond {

struct Mat2 {
    // row-major
    std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};

    double& operator()(int r, int c) { return v[static_cast<size_t>(2 * r + c)]; }
    double operator()(int r, int c) const { return v[static_cast<size_t>(2 * r + c)]; }

    static Mat2 from_rows(Vec2 r0, Vec2 r1) { return {{r0.x, r0.y, r1.x, r1.y}}; }
    static Mat2 diagonal(double d0, double d1) { return {{d0, 0.0, 0.0, d1}}; }
    static Mat2 identity() { return diagonal(1.0, 1.0); }

    double det() const { return v[0] * v[3] - v[1] * v[2]; }

    friend Vec2 operator*(const Mat2& m, Vec2 x) {
        return {m.v[0] * x.x + m.v[1] * x.y, m.v[2] * x.x + m.v[3] * x.y};
    }
};

struct Mat3 {
    // row-major
    std::array<double, 9> v{};

    double& operator()(int r, int c) { return v[static_cast<size_t>(3 * r + c)]; }
    double operator()(int r, int c) const { return v[static_cast<size_t>(3 * r + c)]; }

    static Mat3 from_rows(Vec3 r0, Vec3 r1, Vec3 r2) {
        return {{r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z}};
    }
    static Mat3 diagonal(double d0, double d1, double d2) {
        Mat3 m;
        m(0, 0) = d0;
        m(1, 1) = d1;
        m(2, 2) = d2;
        return m;
    }
    static Mat3 identity() { return diagonal(1.0, 1.0, 1.0); }

    Vec3 row(int r) const { return {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}; }

    double det() const {
        return v[0] * (v[4] * v[8] - v[5] * v[7]) - v[1] * (v[3] * v[8] - v[5] * v[6]) +
               v[2] * (v[3] * v[7] - v[4] * v[6]);
    }

    friend Vec3 operator*(const Mat3& m, Vec3 x) {
        return {dot(m.row(0), x), dot(m.row(1), x), dot(m.row(2), x)};
    }
};

inline bool all_finite(const Mat2& m) {
    for (double e : m.v)
        if (!std::isfinite(e)) return false;
    return true;
}

inline bool all_finite(const Mat3& m) {
    for (double e : m.v)
        if (!std::isfinite(e)) return false;
    return true;
}

namespace detail {

// Eigenvalues of the symmetric positive-semidefinite 3x3 matrix S, from the
// roots of its characteristic cubic (trigonometric form), descending.
inline std::array<double, 3> sym3_eigenvalues(const Mat3& s) {
    const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
    const double q = (s(0, 0) + s(1, 1) + s(2, 2)) / 3.0;
    const double d0 = s(0, 0) - q, d1 = s(1, 1) - q, d2 = s(2, 2) - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    if (!(p > 0.0)) return {q, q, q};  // scalar multiple of the identity

    Mat3 b;  // (S - q*I) / p
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) b(r, c) = (s(r, c) - (r == c ? q : 0.0)) / p;
    const double r = std::clamp(b.det() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;

    const double e0 = q + 2.0 * p * std::cos(phi);
    const double e2 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
    const double e1 = 3.0 * q - e0 - e2;
    return {e0, e1, e2};
}

// Product M * M^T for the 3x3 case.
inline Mat3 gram(const Mat3& m) {
    Mat3 s;
    for (int r = 0; r < 3; ++r)
        for (int c = r; c < 3; ++c) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += m(r, k) * m(c, k);
            s(r, c) = acc;
            s(c, r) = acc;
        }
    return s;
}

// Eigenvalues of M*M^T are nonnegative analytically; tiny negatives are
// roundoff and get clamped.
inline double clamp_nonneg(double e, double scale) {
    assert(e >= -1e-12 * std::max(1.0, scale));
    (void)scale;
    return e < 0.0 ? 0.0 : e;
}

}  // namespace detail

/// Singular values, descending. Uses the half-sum/half-difference form,
/// which keeps full precision in the small singular value where the
/// eigenvalues-of-M*M^T route would lose half the digits.
inline std::array<double, 2> singular_values(const Mat2& m) {
    if (!all_finite(m)) throw Error(errc::non_finite, "matrix has non-finite entries");
    const double s1 = std::hypot(m(0, 0) - m(1, 1), m(0, 1) + m(1, 0));
    const double s2 = std::hypot(m(0, 0) + m(1, 1), m(0, 1) - m(1, 0));
    const double hi = (s1 + s2) / 2.0;
    const double lo = std::abs(s2 - s1) / 2.0;
    return {hi, lo};
}

/// Singular values, descending, as square roots of the clamped eigenvalues
/// of M*M^T.
inline std::array<double, 3> singular_values(const Mat3& m) {
    if (!all_finite(m)) throw Error(errc::non_finite, "matrix has non-finite entries");
    const Mat3 s = detail::gram(m);
    auto e = detail::sym3_eigenvalues(s);
    const double scale = e[0];
    return {std::sqrt(detail::clamp_nonneg(e[0], scale)),
            std::sqrt(detail::clamp_nonneg(e[1], scale)),
            std::sqrt(detail::clamp_nonneg(e[2], scale))};
}

namespace detail {

inline double cond_from_extremes(double smax, double smin) {
    if (smax == 0.0) throw Error(errc::zero_matrix, "condition number of the zero matrix");
    if (smin <= 1e-14 * smax) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

}  // namespace detail

/// Ratio of the largest to the smallest singular value; +infinity encodes a
/// singular matrix (loci code treats it as a level-set sentinel, so it is a
/// value, not an exception).
inline double condition_number(const Mat2& m) {
    auto s = singular_values(m);
    return detail::cond_from_extremes(s[0], s[1]);
}

inline double condition_number(const Mat3& m) {
    auto s = singular_values(m);
    return detail::cond_from_extremes(s[0], s[2]);
}

}  // namespace isocond
