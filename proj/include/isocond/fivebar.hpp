// Position and velocity kinematics of the symmetric planar five-bar:
// direct/inverse kinematics, the direct- and inverse-kinematics matrices,
// their condition numbers, working modes, singularity predicates and
// workspace membership.
//
// Conventions: A = (0,0), B = (l0,0), C = l1*u(theta1), D = B + l1*u(theta2),
// P = C + l2*u(theta3) = D + l2*u(theta4), with u(t) = (cos t, sin t) and all
// angles absolute, counterclockwise from +x.
#pragma once

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "core.hpp"
#include "smallmat.hpp"

namespace isocond {

// ---------------------------------------------------------------------------
// Trig-equation solver

/// Roots of a*cos(t) + b*sin(t) = c on (-pi, pi].
///
/// Writing the left side as R*cos(t - phi), the roots are phi +- gamma with
/// gamma = atan2(sqrt(R^2 - c^2), c); the form is exact at tangency
/// (gamma = 0 or pi) where the two roots merge.
struct TrigRoots {
    enum class Kind { none, tangent, two, any };
    Kind kind = Kind::none;
    std::array<double, 2> t{0.0, 0.0};

    int count() const {
        switch (kind) {
            case Kind::none: return 0;
            case Kind::tangent: return 1;
            case Kind::two: return 2;
            case Kind::any: return -1;
        }
        return 0;
    }
};

inline TrigRoots solve_cos_sin(double a, double b, double c) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    TrigRoots out;
    if (scale == 0.0) {
        out.kind = TrigRoots::Kind::any;  // 0 = 0: every angle solves
        return out;
    }
    a /= scale;
    b /= scale;
    c /= scale;
    const double r = std::hypot(a, b);
    if (r < 1e-14) {
        out.kind = std::abs(c) < 1e-14 ? TrigRoots::Kind::any : TrigRoots::Kind::none;
        return out;
    }
    double disc = (r - c) * (r + c);
    if (disc < 0.0) {
        if (disc < -4e-16 * r * r) return out;  // no real root
        disc = 0.0;
    }
    const double phi = std::atan2(b, a);
    const double gamma = std::atan2(std::sqrt(disc), c);
    if (gamma == 0.0 || gamma == pi) {
        out.kind = TrigRoots::Kind::tangent;
        out.t[0] = normalize_angle(phi + gamma);
        return out;
    }
    out.kind = TrigRoots::Kind::two;
    out.t[0] = normalize_angle(phi + gamma);
    out.t[1] = normalize_angle(phi - gamma);
    return out;
}

// ---------------------------------------------------------------------------
// Conditioning closed forms

/// Condition number of the direct-kinematics matrix as a function of the
/// passive-angle difference theta3 - theta4. The fold to [0, pi/2] makes the
/// closed form match the singular-value ratio on the whole circle; the value
/// is 1 at |delta| = pi/2 (mod pi) and +infinity at delta = k*pi.
inline double kappa_of_delta(double delta) {
    const double f = fold_half_pi(delta);
    const double t = std::tan(f / 2.0);
    if (t == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / t;
}

/// Passive-angle difference (in (0, pi/2]) whose condition number is kappa;
/// inverse of kappa_of_delta. kappa = +infinity maps to 0.
inline double delta_of_kappa(double kappa) {
    return 2.0 * std::atan2(1.0, kappa);
}

// ---------------------------------------------------------------------------
// Jacobians

/// a: direct-kinematics matrix, rows (p-c)^T and (p-d)^T (length units).
/// b: inverse-kinematics matrix, l1*l2*diag(sin(theta3-theta1),
///    sin(theta4-theta2)); diagonal by construction, off-diagonals exact 0.
struct JacobianPair {
    Mat2 a;
    Mat2 b;
};

inline JacobianPair jacobians(const PlanarPosture& q, const Geometry& g) {
    JacobianPair j;
    j.a = Mat2::from_rows(q.p - q.c, q.p - q.d);
    const double f = g.l1 * g.l2;
    j.b = Mat2::diagonal(f * std::sin(q.theta3 - q.theta1), f * std::sin(q.theta4 - q.theta2));
    return j;
}

namespace detail {

inline bool kappa_matches_svd(double analytic, double svd) {
    // The oracle comparison is meaningful only while both routes are well
    // conditioned; close to a singularity the singular-value route keeps
    // ~1e-16*kappa absolute accuracy only.
    if (std::isinf(analytic) || std::isinf(svd)) return true;
    if (std::min(analytic, svd) > 1e6) return true;
    return std::abs(analytic - svd) <= 1e-9 * std::max(analytic, svd);
}

}  // namespace detail

/// kappa(A) = 1/|tan((theta3-theta4)/2)| with the difference folded; equals
/// the singular-value ratio of the direct-kinematics matrix.
inline double kappa_a(const PlanarPosture& q) {
    const double k = kappa_of_delta(q.theta3 - q.theta4);
#ifndef NDEBUG
    assert(detail::kappa_matches_svd(
        k, condition_number(Mat2::from_rows(q.p - q.c, q.p - q.d))));
#endif
    return k;
}

/// kappa(B) = sqrt(beta_max/beta_min) over beta = |sin(theta3-theta1)|,
/// |sin(theta4-theta2)|. Note this is the square root of the plain
/// singular-value ratio of B, which condition_number(B) returns; both hit 1
/// and +infinity together, which is what the loci need.
inline double kappa_b(const PlanarPosture& q, const Geometry& g) {
    const double b1 = std::abs(std::sin(q.theta3 - q.theta1));
    const double b2 = std::abs(std::sin(q.theta4 - q.theta2));
    const double bmin = std::min(b1, b2), bmax = std::max(b1, b2);
    if (bmin < beta_min_tol) return std::numeric_limits<double>::infinity();
    const double k = std::sqrt(bmax / bmin);
#ifndef NDEBUG
    assert(detail::kappa_matches_svd(k * k, condition_number(jacobians(q, g).b)));
#else
    (void)g;
#endif
    return k;
}

// ---------------------------------------------------------------------------
// Direct kinematics

namespace detail {

inline PlanarPosture assemble_posture(double theta1, double theta2, Vec2 p, Vec2 c, Vec2 d) {
    PlanarPosture q;
    q.theta1 = normalize_angle(theta1);
    q.theta2 = normalize_angle(theta2);
    q.theta3 = angle_of(p - c);
    q.theta4 = angle_of(p - d);
    q.p = p;
    q.c = c;
    q.d = d;
    return q;
}

}  // namespace detail

/// End point for given actuated angles: P is the intersection of the circles
/// of radius l2 about C and D, on the side selected by `mode`.
inline PlanarPosture direct_kinematics(const Geometry& g, double theta1, double theta2,
                                       AssemblyMode mode) {
    validate_geometry(g);
    const Vec2 c = g.l1 * unit_vec(theta1);
    const Vec2 d = g.b() + g.l1 * unit_vec(theta2);
    const Vec2 v = d - c;
    const double q = norm(v);
    if (q < assembly_tol)
        throw Error(errc::singular_assembly,
                    "C and D coincide; P is indeterminate on a circle");
    if (std::abs(q - 2.0 * g.l2) <= assembly_tol)
        throw Error(errc::singular_assembly, "flattened assembly; both branches coincide");
    if (q > 2.0 * g.l2)
        throw Error(errc::no_assembly, "distal links cannot close: |CD| > 2*l2");
    const Vec2 mid = 0.5 * (c + d);
    const double h = std::sqrt(std::max(0.0, g.l2 * g.l2 - 0.25 * q * q));
    const Vec2 n = perp(v) / q;
    const Vec2 p = mid + (mode.branch > 0 ? h : -h) * n;
    return detail::assemble_posture(theta1, theta2, p, c, d);
}

/// Branch label of an existing posture: sign of cross(D-C, P-C).
inline AssemblyMode assembly_mode_of(const PlanarPosture& q) {
    return {cross(q.d - q.c, q.p - q.c) >= 0.0 ? +1 : -1};
}

// ---------------------------------------------------------------------------
// Workspace membership

/// True iff p lies in both annuli |l1-l2| <= |p-A| <= l1+l2 and the same
/// about B (boundaries included).
inline bool workspace_contains(const Geometry& g, Vec2 p) {
    const double rin = std::abs(g.l1 - g.l2);
    const double rout = g.l1 + g.l2;
    const double da = norm(p - g.a());
    const double db = norm(p - g.b());
    return rin <= da && da <= rout && rin <= db && db <= rout;
}

// ---------------------------------------------------------------------------
// Inverse kinematics

namespace detail {

// Roots of |p - pivot - l1*u(theta)| = l2 for the actuated angle theta,
// i.e. (p-pivot)^T u(theta) = (|p-pivot|^2 + l1^2 - l2^2) / (2*l1).
inline TrigRoots leg_roots(const Geometry& g, Vec2 p, Vec2 pivot) {
    const Vec2 q = p - pivot;
    const double e = (dot(q, q) + g.l1 * g.l1 - g.l2 * g.l2) / (2.0 * g.l1);
    return solve_cos_sin(q.x, q.y, e);
}

struct LegSolution {
    double theta = 0.0;       // actuated angle
    double passive = 0.0;     // absolute angle of the distal link
    double sine = 0.0;        // sin(passive - theta), the B-diagonal sign term
};

inline std::vector<LegSolution> leg_solutions(const Geometry& g, Vec2 p, Vec2 pivot) {
    std::vector<LegSolution> out;
    const TrigRoots roots = leg_roots(g, p, pivot);
    for (int i = 0; i < roots.count(); ++i) {
        LegSolution s;
        s.theta = roots.t[static_cast<size_t>(i)];
        s.passive = angle_of(p - pivot - g.l1 * unit_vec(s.theta));
        s.sine = std::sin(s.passive - s.theta);
        out.push_back(s);
    }
    return out;
}

}  // namespace detail

/// The unique posture reaching p whose working-mode sign pair equals wm.
/// Throws Error(unreachable) outside the workspace and SerialSingularity
/// (with the degenerate posture attached) when the requested branch sits on
/// a stretched/folded-leg boundary.
inline PlanarPosture inverse_kinematics(const Geometry& g, Vec2 p, WorkingMode wm) {
    validate_geometry(g);
    if (!workspace_contains(g, p)) throw Error(errc::unreachable, "point outside workspace");

    auto legs_a = detail::leg_solutions(g, p, g.a());
    auto legs_b = detail::leg_solutions(g, p, g.b());
    if (legs_a.empty() || legs_b.empty())
        throw Error(errc::unreachable, "point outside workspace");

    auto pick = [](const std::vector<detail::LegSolution>& ls, int want)
        -> std::pair<const detail::LegSolution*, bool> {
        const detail::LegSolution* best = &ls.front();
        for (const auto& s : ls) {
            if (std::abs(s.sine) > std::abs(best->sine)) best = &s;
            if (std::abs(s.sine) >= serial_sine_tol &&
                (s.sine > 0.0 ? +1 : -1) == want)
                return {&s, true};
        }
        return {best, false};  // boundary: no branch with the requested sign
    };

    auto [sa, oka] = pick(legs_a, wm.sign_a);
    auto [sb, okb] = pick(legs_b, wm.sign_b);
    PlanarPosture q = detail::assemble_posture(
        sa->theta, sb->theta, p, g.l1 * unit_vec(sa->theta),
        g.b() + g.l1 * unit_vec(sb->theta));
    if (!oka || !okb)
        throw SerialSingularity(q, "requested working mode lies on a serial singularity");
    return q;
}

/// All postures reaching p with a well-defined working mode, in the
/// canonical mode order of WorkingMode::all(). Empty when p is unreachable;
/// boundary points lose the merged branches.
inline std::vector<std::pair<WorkingMode, PlanarPosture>> all_inverse_solutions(
    const Geometry& g, Vec2 p) {
    validate_geometry(g);
    std::vector<std::pair<WorkingMode, PlanarPosture>> out;
    if (!workspace_contains(g, p)) return out;
    auto legs_a = detail::leg_solutions(g, p, g.a());
    auto legs_b = detail::leg_solutions(g, p, g.b());
    for (const auto& sa : legs_a) {
        if (std::abs(sa.sine) < serial_sine_tol) continue;
        for (const auto& sb : legs_b) {
            if (std::abs(sb.sine) < serial_sine_tol) continue;
            WorkingMode wm{sa.sine > 0.0 ? +1 : -1, sb.sine > 0.0 ? +1 : -1};
            out.emplace_back(wm, detail::assemble_posture(
                                     sa.theta, sb.theta, p, g.l1 * unit_vec(sa.theta),
                                     g.b() + g.l1 * unit_vec(sb.theta)));
        }
    }
    auto mode_index = [](WorkingMode m) {
        int i = 0;
        for (WorkingMode w : WorkingMode::all()) {
            if (w == m) return i;
            ++i;
        }
        return 4;
    };
    std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
        return mode_index(x.first) < mode_index(y.first);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Working mode and velocities

/// Sign pair of the inverse-kinematics matrix diagonal. Throws
/// SerialSingularity when either sine magnitude is below serial_sine_tol.
inline WorkingMode working_mode_of(const PlanarPosture& q) {
    const double s1 = std::sin(q.theta3 - q.theta1);
    const double s2 = std::sin(q.theta4 - q.theta2);
    if (std::min(std::abs(s1), std::abs(s2)) < serial_sine_tol)
        throw SerialSingularity(q, "posture lies on a serial singularity");
    return {s1 > 0.0 ? +1 : -1, s2 > 0.0 ? +1 : -1};
}

/// Cartesian velocity for actuated rates: p_dot = A^-1 * B * theta_dot.
/// Throws Error(parallel_singularity) when A is singular.
inline Vec2 velocity_forward(const PlanarPosture& q, const Geometry& g, Vec2 theta_dot) {
    if (!std::isfinite(kappa_a(q)))
        throw Error(errc::parallel_singularity, "direct-kinematics matrix is singular");
    const JacobianPair j = jacobians(q, g);
    const Vec2 rhs = j.b * theta_dot;
    const double det = j.a.det();
    return {(rhs.x * j.a(1, 1) - rhs.y * j.a(0, 1)) / det,
            (rhs.y * j.a(0, 0) - rhs.x * j.a(1, 0)) / det};
}

}  // namespace isocond
