// Shared value types for the five-bar manipulator library: plane/space
// vectors, angle helpers, geometry, postures, working/assembly modes and
// the error taxonomy. Everything here is an immutable value; all functions
// are pure and safe to call concurrently.
#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace isocond {

inline constexpr double pi = std::numbers::pi;

// Tolerances used across the library. Sine tolerances are dimensionless;
// the assembly tolerance is absolute in length units.
inline constexpr double serial_sine_tol = 1e-12;   // |sin| below this = serial singularity
inline constexpr double beta_min_tol = 1e-14;      // smallest singular value treated as zero
inline constexpr double assembly_tol = 1e-9;       // C==D / flattened assembly detection
inline constexpr double loop_closure_tol = 1e-9;   // relative to l2

// ---------------------------------------------------------------------------
// Small vectors

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend Vec2 operator*(Vec2 v, double s) { return s * v; }
    friend Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }  // +90 degree rotation
inline Vec2 unit_vec(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend Vec3 operator*(Vec3 v, double s) { return s * v; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

// ---------------------------------------------------------------------------
// Angles

/// Normalizes an angle to (-pi, pi].
inline double normalize_angle(double a) {
    double r = std::remainder(a, 2.0 * pi);
    return r <= -pi ? pi : r;
}

/// Distance from `delta` to the nearest multiple of pi, in [0, pi/2].
inline double fold_half_pi(double delta) {
    return std::abs(std::remainder(delta, pi));
}

/// Shortest signed angular distance from a to b.
inline double angle_dist(double a, double b) {
    return std::remainder(b - a, 2.0 * pi);
}

// ---------------------------------------------------------------------------
// Errors

enum class errc {
    non_positive_link,
    negative_base,
    non_finite,
    zero_matrix,
    no_assembly,
    singular_assembly,
    unreachable,
    serial_singularity,
    parallel_singularity,
    invalid_level,
    empty_generator,
    invalid_mesh,
    invalid_config,
    write_failure,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::non_positive_link: return "non_positive_link";
        case errc::negative_base: return "negative_base";
        case errc::non_finite: return "non_finite";
        case errc::zero_matrix: return "zero_matrix";
        case errc::no_assembly: return "no_assembly";
        case errc::singular_assembly: return "singular_assembly";
        case errc::unreachable: return "unreachable";
        case errc::serial_singularity: return "serial_singularity";
        case errc::parallel_singularity: return "parallel_singularity";
        case errc::invalid_level: return "invalid_level";
        case errc::empty_generator: return "empty_generator";
        case errc::invalid_mesh: return "invalid_mesh";
        case errc::invalid_config: return "invalid_config";
        case errc::write_failure: return "write_failure";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

// ---------------------------------------------------------------------------
// Geometry
//
// Symmetric five-bar: base pivots A=(0,0) and B=(l0,0), proximal links of
// length l1 at both pivots, distal links of length l2 meeting at the end
// point P. All angles are absolute, counterclockwise from the +x axis.

struct Geometry {
    double l0 = 0.0;  // base segment |AB|
    double l1 = 0.0;  // proximal links |AC| = |BD|
    double l2 = 0.0;  // distal links |CP| = |DP|

    Vec2 a() const { return {0.0, 0.0}; }
    Vec2 b() const { return {l0, 0.0}; }
    double lambda1() const { return l2 / l1; }  // distal/proximal length ratio
};

/// Returns g unchanged when the link lengths admit a manipulator; l0 == 0
/// (coincident base pivots) is allowed but pathological: A == B and the two
/// annuli coincide.
inline Geometry validate_geometry(const Geometry& g) {
    if (!(std::isfinite(g.l0) && std::isfinite(g.l1) && std::isfinite(g.l2)))
        throw Error(errc::non_finite, "geometry has non-finite lengths");
    if (!(g.l1 > 0.0) || !(g.l2 > 0.0))
        throw Error(errc::non_positive_link, "l1 and l2 must be positive");
    if (g.l0 < 0.0)
        throw Error(errc::negative_base, "l0 must be nonnegative");
    return g;
}

// ---------------------------------------------------------------------------
// Working and assembly modes

/// One of the four posture classes free of serial singularities, labeled by
/// the signs of the inverse-kinematics matrix diagonal: sign_a = sign of
/// sin(theta3-theta1), sign_b = sign of sin(theta4-theta2).
struct WorkingMode {
    int sign_a = +1;
    int sign_b = +1;

    bool operator==(const WorkingMode&) const = default;

    /// Two-character label, e.g. "-+".
    std::string label() const {
        return std::string() + (sign_a > 0 ? '+' : '-') + (sign_b > 0 ? '+' : '-');
    }

    /// Working mode of the mirror image about the base midline x = l0/2.
    WorkingMode mirrored() const { return {-sign_b, -sign_a}; }

    static WorkingMode from_signs(int sa, int sb) {
        if ((sa != 1 && sa != -1) || (sb != 1 && sb != -1))
            throw Error(errc::invalid_config, "working-mode signs must be +1 or -1");
        return {sa, sb};
    }

    static std::optional<WorkingMode> parse(const std::string& s) {
        if (s.size() != 2) return std::nullopt;
        auto sign = [](char c) { return c == '+' ? +1 : c == '-' ? -1 : 0; };
        int sa = sign(s[0]), sb = sign(s[1]);
        if (sa == 0 || sb == 0) return std::nullopt;
        return WorkingMode{sa, sb};
    }

    static std::array<WorkingMode, 4> all() {
        return {WorkingMode{+1, +1}, WorkingMode{+1, -1},
                WorkingMode{-1, +1}, WorkingMode{-1, -1}};
    }
};

/// Direct-kinematics branch: sign of cross(D-C, P-C), i.e. which side of the
/// oriented segment CD the end point lies on.
struct AssemblyMode {
    int branch = +1;

    bool operator==(const AssemblyMode&) const = default;

    static AssemblyMode from_sign(int s) {
        if (s != 1 && s != -1)
            throw Error(errc::invalid_config, "assembly branch must be +1 or -1");
        return {s};
    }
};

// ---------------------------------------------------------------------------
// Postures

/// Full planar configuration. theta1/theta2 are the actuated pivot angles at
/// A and B; theta3/theta4 are the absolute angles of the distal links CP and
/// DP. All angles normalized to (-pi, pi]. c and d are the elbow points.
struct PlanarPosture {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
    double theta4 = 0.0;
    Vec2 p;
    Vec2 c;
    Vec2 d;
};

/// Largest loop-closure residual of the posture, in length units. Valid
/// postures keep this below loop_closure_tol * l2.
inline double loop_closure_error(const Geometry& g, const PlanarPosture& q) {
    const Vec2 via_c = q.c + g.l2 * unit_vec(q.theta3);
    const Vec2 via_d = q.d + g.l2 * unit_vec(q.theta4);
    double e = norm(via_c - via_d);
    e = std::max(e, std::abs(norm(q.p - q.c) - g.l2));
    e = std::max(e, std::abs(norm(q.p - q.d) - g.l2));
    e = std::max(e, std::abs(norm(q.c - g.a()) - g.l1));
    e = std::max(e, std::abs(norm(q.d - g.b()) - g.l1));
    return e;
}

/// Posture of the three-dof hybrid manipulator: the planar five-bar mounted
/// on a base revolute whose axis is the line AB.
///
/// Angle naming follows the three-dof convention; the embedded planar
/// posture uses the two-dof names:
///
///   hybrid   theta1   theta2   theta3   theta4   theta5
///   planar      -     theta1   theta2   theta3   theta4
///
/// World frame: the rotation axis AB is the Y axis; the moving plane at
/// theta1 = 0 is the X-Y plane. A planar point (px, py) embeds as
///   p3 = (py*cos(theta1), px, -py*sin(theta1)),
/// i.e. planar x runs along the axis and planar y is the radial coordinate.
struct HybridPosture {
    double theta1 = 0.0;   // base rotation about line AB
    PlanarPosture planar;  // embedded five-bar posture (two-dof naming)
    Vec3 p3;

    double theta2() const { return planar.theta1; }
    double theta3() const { return planar.theta2; }
    double theta4() const { return planar.theta3; }
    double theta5() const { return planar.theta4; }
};

/// Serial-singularity report; carries the degenerate posture so callers can
/// still inspect the boundary configuration.
class SerialSingularity : public Error {
public:
    SerialSingularity(const PlanarPosture& q, const std::string& msg)
        : Error(errc::serial_singularity, msg), posture(q) {}

    PlanarPosture posture;
};

}  // namespace isocond
