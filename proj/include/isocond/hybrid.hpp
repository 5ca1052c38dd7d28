// Kinematics and conditioning of the three-dof hybrid manipulator: the
// planar five-bar mounted on a base revolute whose axis is the line AB.
//
// World frame: the rotation axis is Y. The moving-plane triad is
//   j = (0,1,0)                      along the axis (planar x direction)
//   i(t1) = ( cos t1, 0, -sin t1)    radial (planar y direction)
//   k(t1) = (-sin t1, 0, -cos t1)    moving-plane normal, k = j x i
// chosen so that k . p_dot = (i . p) * theta1_dot holds; a planar point
// (px, py) embeds as p3 = py*i + px*j.
//
// Three-dof angle naming: theta1 = base rotation, theta2/theta3 actuated at
// A and B, theta4/theta5 passive (the planar theta1..theta4 in that order).
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "core.hpp"
#include "fivebar.hpp"
#include "isocurves.hpp"
#include "smallmat.hpp"

namespace isocond {

// ---------------------------------------------------------------------------
// Frame embedding

inline Vec3 hybrid_axis_i(double theta1) { return {std::cos(theta1), 0.0, -std::sin(theta1)}; }
inline Vec3 hybrid_axis_j() { return {0.0, 1.0, 0.0}; }
inline Vec3 hybrid_axis_k(double theta1) { return {-std::sin(theta1), 0.0, -std::cos(theta1)}; }

/// Planar point (px, py) placed in the moving plane at base angle theta1.
inline Vec3 embed_planar_point(Vec2 p, double theta1) {
    return {p.y * std::cos(theta1), p.x, -p.y * std::sin(theta1)};
}

/// Inverse of embed_planar_point; the out-of-plane component is discarded.
inline Vec2 unembed_point(Vec3 w, double theta1) {
    return {w.y, w.x * std::cos(theta1) - w.z * std::sin(theta1)};
}

// ---------------------------------------------------------------------------
// Forward kinematics

/// Solves the embedded five-bar for the actuated pair (theta2, theta3), then
/// rotates the plane by theta1 about the axis.
inline HybridPosture hybrid_forward(const Geometry& g, double theta1, double theta2,
                                    double theta3, AssemblyMode mode) {
    HybridPosture h;
    h.theta1 = normalize_angle(theta1);
    h.planar = direct_kinematics(g, theta2, theta3, mode);
    h.p3 = embed_planar_point(h.planar.p, h.theta1);
    return h;
}

// ---------------------------------------------------------------------------
// Jacobians and conditioning

/// a: rows l2*k^T, (p-c)^T, (p-d)^T in the world frame (k rotates with the
///    base angle). b: l1*l2*diag(sin Q2 + lambda1 sin Q4, sin(Q4-Q2),
///    sin(Q5-Q3)) with Q the three-dof angles; the first entry equals
///    l2 * (signed distance of P to the axis).
struct Jacobian3Pair {
    Mat3 a;
    Mat3 b;
};

inline Jacobian3Pair jacobians3(const HybridPosture& h, const Geometry& g) {
    const Vec3 c3 = embed_planar_point(h.planar.c, h.theta1);
    const Vec3 d3 = embed_planar_point(h.planar.d, h.theta1);
    Jacobian3Pair j;
    j.a = Mat3::from_rows(g.l2 * hybrid_axis_k(h.theta1), h.p3 - c3, h.p3 - d3);
    const double f = g.l1 * g.l2;
    j.b = Mat3::diagonal(f * (std::sin(h.theta2()) + g.lambda1() * std::sin(h.theta4())),
                         f * std::sin(h.theta4() - h.theta2()),
                         f * std::sin(h.theta5() - h.theta3()));
    return j;
}

/// Same closed form as the planar kappa(A), now in the passive pair
/// (theta4, theta5); independent of the base angle.
inline double kappa_a3(const HybridPosture& h) {
    const double k = kappa_of_delta(h.theta4() - h.theta5());
#ifndef NDEBUG
    {
        const Vec3 c3 = embed_planar_point(h.planar.c, h.theta1);
        const Vec3 d3 = embed_planar_point(h.planar.d, h.theta1);
        const Mat3 a = Mat3::from_rows(hybrid_axis_k(h.theta1), h.p3 - c3, h.p3 - d3);
        // unit first row: kappa is scale-free in l2
        assert(detail::kappa_matches_svd(
            k, condition_number(Mat3::from_rows(norm(h.p3 - c3) * hybrid_axis_k(h.theta1),
                                                a.row(1), a.row(2)))));
    }
#endif
    return k;
}

namespace detail {

inline std::array<double, 3> hybrid_betas(const HybridPosture& h, const Geometry& g) {
    return {std::abs(std::sin(h.theta2()) + g.lambda1() * std::sin(h.theta4())),
            std::abs(std::sin(h.theta4() - h.theta2())),
            std::abs(std::sin(h.theta5() - h.theta3()))};
}

}  // namespace detail

/// Singular-value ratio of the inverse-kinematics matrix: beta_max/beta_min
/// over beta1 = |sin Q2 + lambda1 sin Q4|, beta2 = |sin(Q2-Q4)|,
/// beta3 = |sin(Q3-Q5)|; +infinity when the smallest vanishes.
inline double kappa_b3(const HybridPosture& h, const Geometry& g) {
    const auto b = detail::hybrid_betas(h, g);
    const double bmin = std::min({b[0], b[1], b[2]});
    const double bmax = std::max({b[0], b[1], b[2]});
    if (bmin < beta_min_tol) return std::numeric_limits<double>::infinity();
    return bmax / bmin;
}

/// Distances of P to the three actuated revolute axes: d1 to the base axis
/// (line AB), d2/d3 to the in-plane joint axes through A and B. d1 is
/// reported as a nonnegative distance; the signed value l1 sin Q2 + l2 sin Q4
/// lives in the first diagonal entry of B.
struct AxisDistances {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

inline AxisDistances axis_distances(const HybridPosture& h, const Geometry& g) {
    const auto b = detail::hybrid_betas(h, g);
    return {g.l1 * b[0], g.l2 * b[1], g.l2 * b[2]};
}

/// Vanishing diagonal entries of the three-dof inverse-kinematics matrix.
struct SingularityFlags3 {
    bool axis_d1_zero = false;  // P on the base axis
    bool leg1_serial = false;   // leg at A stretched or folded
    bool leg2_serial = false;   // leg at B stretched or folded

    bool any() const { return axis_d1_zero || leg1_serial || leg2_serial; }
    bool operator==(const SingularityFlags3&) const = default;
};

inline SingularityFlags3 singularity_flags_b3(const HybridPosture& h, const Geometry& g) {
    const auto b = detail::hybrid_betas(h, g);
    return {b[0] < serial_sine_tol, b[1] < serial_sine_tol, b[2] < serial_sine_tol};
}

// ---------------------------------------------------------------------------
// Surfaces of revolution

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double span() const { return hi - lo; }
};

inline constexpr Interval full_turn{-pi, pi};

/// Triangle mesh obtained by sweeping planar generator curves about the base
/// axis. Generator points on the axis collapse to single pole vertices; full
/// revolutions share the seam ring exactly.
struct IsoSurface {
    double kappa = 1.0;
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<IsoCurve> generators;
};

namespace detail {

inline void sweep_curve(const IsoCurve& curve, Interval range, int rings, double axis_tol,
                        IsoSurface& out) {
    const size_t npts = curve.points.size();
    if (npts == 0) return;
    const bool full = range.span() >= 2.0 * pi - 1e-9;
    const int nr = std::max(rings, full ? 3 : 2);
    const bool degenerate_range = std::abs(range.span()) <= 1e-15;

    // ring angles; a full revolution reuses ring 0 as ring nr
    std::vector<double> angles;
    if (degenerate_range) {
        angles.push_back(range.lo);
    } else if (full) {
        for (int r = 0; r < nr; ++r) angles.push_back(range.lo + r * 2.0 * pi / nr);
    } else {
        for (int r = 0; r < nr; ++r)
            angles.push_back(range.lo + r * range.span() / (nr - 1));
    }
    const size_t nrings = angles.size();

    // vertex indices: on-axis generator points get one shared vertex
    std::vector<int> pole_index(npts, -1);
    std::vector<std::vector<int>> ring_index(nrings, std::vector<int>(npts, -1));
    for (size_t ip = 0; ip < npts; ++ip) {
        const Vec2 gp = curve.points[ip];
        if (std::abs(gp.y) <= axis_tol) {
            pole_index[ip] = static_cast<int>(out.vertices.size());
            out.vertices.push_back(embed_planar_point({gp.x, 0.0}, angles[0]));
        } else {
            for (size_t r = 0; r < nrings; ++r) {
                ring_index[r][ip] = static_cast<int>(out.vertices.size());
                out.vertices.push_back(embed_planar_point(gp, angles[r]));
            }
        }
    }
    auto vid = [&](size_t ring, size_t ip) {
        return pole_index[ip] >= 0 ? pole_index[ip] : ring_index[ring % nrings][ip];
    };

    if (degenerate_range) return;  // zero-width sweep: vertices only

    const size_t nseg_ring = full ? nrings : nrings - 1;
    const size_t nseg_curve = curve.closed ? npts : npts - 1;
    for (size_t r = 0; r < nseg_ring; ++r) {
        for (size_t s = 0; s < nseg_curve; ++s) {
            const int a = vid(r, s);
            const int b = vid(r, (s + 1) % npts);
            const int c = vid(r + 1, (s + 1) % npts);
            const int d = vid(r + 1, s);
            if (a != b && b != c && a != c) out.triangles.push_back({a, b, c});
            if (a != c && c != d && a != d) out.triangles.push_back({a, c, d});
        }
    }
}

}  // namespace detail

/// Sweeps the constant-kappa curves of one working mode through a base-angle
/// range. Throws Error(empty_generator) when the level has no curve.
inline IsoSurface iso_surface(const Geometry& g, double kappa_target, WorkingMode wm,
                              Interval theta1_range = full_turn, int samples_curve = 512,
                              int samples_revolution = 96) {
    validate_geometry(g);
    if (!(kappa_target >= 1.0))
        throw Error(errc::invalid_level, "kappa level must be >= 1");
    TraceOptions opts;
    opts.samples = samples_curve;
    auto curves = iso_curve_cartesian(g, kappa_target, wm, opts);
    if (curves.empty())
        throw Error(errc::empty_generator, "no isoconditioning curve at this level");

    IsoSurface s;
    s.kappa = kappa_target;
    const double axis_tol = 1e-12 * g.l2;
    for (auto& c : curves) detail::sweep_curve(c, theta1_range, samples_revolution, axis_tol, s);
    s.generators = std::move(curves);
    return s;
}

/// Boundary of the three-dof workspace: the planar boundary revolved one
/// full turn. Generators are clipped to the nonnegative-radial half plane
/// (the planar region is mirror-symmetric about the axis, so full loops
/// would cover every surface twice); clip points land on the axis and
/// revolve to poles, making each swept component watertight.
inline IsoSurface workspace_boundary_surface(const Geometry& g, int samples = 256) {
    auto loops = workspace_boundary(g, samples);

    std::vector<IsoCurve> generators;
    for (const auto& loop : loops) {
        const auto& pts = loop.points;
        const size_t n = pts.size();
        std::vector<std::vector<Vec2>> pieces;
        std::vector<Vec2> cur;
        auto flush = [&] {
            if (cur.size() >= 2) pieces.push_back(std::move(cur));
            cur.clear();
        };
        for (size_t k = 0; k <= n; ++k) {
            const Vec2 p = pts[k % n];
            const Vec2 prev = pts[(k + n - 1) % n];
            if (k > 0 && ((prev.y < 0.0) != (p.y < 0.0)) && prev.y != p.y) {
                const double t = prev.y / (prev.y - p.y);
                const Vec2 xp{prev.x + t * (p.x - prev.x), 0.0};
                if (prev.y >= 0.0) {
                    cur.push_back(xp);
                    flush();
                } else {
                    flush();
                    cur.push_back(xp);
                }
            }
            if (k < n && p.y >= 0.0) cur.push_back(p);
            if (k < n && p.y < 0.0) flush();
        }
        flush();
        // a loop entirely above the axis stays a closed generator
        if (pieces.size() == 1 && pieces[0].size() == n) {
            IsoCurve c = loop;
            generators.push_back(std::move(c));
            continue;
        }
        for (auto& piece : pieces) {
            IsoCurve c;
            c.kappa = loop.kappa;
            c.space = CurveSpace::cartesian;
            c.closed = false;
            c.locked_delta = loop.locked_delta;
            c.chord_tolerance = loop.chord_tolerance;
            c.points = std::move(piece);
            generators.push_back(std::move(c));
        }
    }

    IsoSurface s;
    s.kappa = std::numeric_limits<double>::infinity();
    const double axis_tol = 1e-12 * g.l2;
    for (auto& c : generators)
        detail::sweep_curve(c, full_turn, std::max(samples, 8), axis_tol, s);
    s.generators = std::move(generators);
    return s;
}

}  // namespace isocond
