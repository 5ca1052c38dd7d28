// Isoconditioning-curve extraction for the planar five-bar.
//
// Locking the passive-angle difference theta3 - theta4 turns the five-bar
// into a four-bar whose coupler point is P; the constant-kappa loci of the
// direct-kinematics matrix are exactly those coupler curves. The closure
// condition for a locked difference is linear in (cos theta3, sin theta3),
// so every sample is solved in closed form.
//
// Also here: the sampled kappa field (verification raster), and the
// workspace boundary as exact circular arcs plus sampled polylines.
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "core.hpp"
#include "fivebar.hpp"

namespace isocond {

// ---------------------------------------------------------------------------
// Curve containers

enum class CurveSpace { cartesian, joint };

/// Polyline of constant-kappa points. Cartesian curves hold end-point
/// positions; joint curves hold (theta1, theta2) on the torus. Closed curves
/// store distinct vertices (no duplicated endpoint).
struct IsoCurve {
    double kappa = 1.0;                 // target level; +infinity for singular loci
    std::optional<WorkingMode> mode;    // nullopt: not mode-specific (boundary)
    std::vector<Vec2> points;
    CurveSpace space = CurveSpace::cartesian;
    bool closed = false;
    double locked_delta = 0.0;          // theta3 - theta4 lock that generated the curve
    double chord_tolerance = 0.0;
};

struct TraceOptions {
    int samples = 1024;              // base parameter grid
    double chord_tolerance = 0.0;    // cartesian; 0 = workspace diameter / 1000
    double joint_chord_tolerance = 0.0;  // torus metric; 0 = 2*pi/500
    int max_refine_depth = 22;
};

// ---------------------------------------------------------------------------
// Workspace extents

/// Axis-aligned rectangle; used for field sampling and export framing.
struct Rect {
    Vec2 lo;
    Vec2 hi;

    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
};

inline Rect workspace_bounding_box(const Geometry& g) {
    const double r = g.l1 + g.l2;
    if (g.l0 >= 2.0 * r) return {{g.l0 / 2.0, 0.0}, {g.l0 / 2.0, 0.0}};
    const double ymax = g.l0 == 0.0 ? r : std::sqrt(std::max(0.0, r * r - 0.25 * g.l0 * g.l0));
    return {{g.l0 - r, -ymax}, {r, ymax}};
}

/// Largest distance between two workspace points (0 when empty).
inline double workspace_diameter(const Geometry& g) {
    const double r = g.l1 + g.l2;
    if (g.l0 >= 2.0 * r) return 0.0;
    const double ymax = g.l0 == 0.0 ? r : std::sqrt(std::max(0.0, r * r - 0.25 * g.l0 * g.l0));
    return std::max(2.0 * ymax, 2.0 * r - g.l0);
}

// ---------------------------------------------------------------------------
// Fixed-delta tracing

namespace detail {

struct TraceCandidate {
    double theta3 = 0.0;
    PlanarPosture posture;
    bool valid = false;  // nonsingular and in the requested working mode
};

struct DeltaTracer {
    Geometry g;
    double delta;  // locked theta3 - theta4
    WorkingMode wm;
    double cosd, sind;

    DeltaTracer(const Geometry& geom, double d, WorkingMode m)
        : g(geom), delta(d), wm(m), cosd(std::cos(d)), sind(std::sin(d)) {}

    // Closure |C + l2*(u(t3) - u(t3-delta)) - B| = l1 as a*cos+b*sin = c.
    TrigRoots roots_at(double theta1) const {
        const Vec2 q = g.l1 * unit_vec(theta1) - g.b();
        const double a = 2.0 * g.l2 * (q.x * (1.0 - cosd) + q.y * sind);
        const double b = 2.0 * g.l2 * (q.y * (1.0 - cosd) - q.x * sind);
        const double c =
            g.l1 * g.l1 - dot(q, q) - 2.0 * g.l2 * g.l2 * (1.0 - cosd);
        return solve_cos_sin(a, b, c);
    }

    TraceCandidate make(double theta1, double theta3) const {
        TraceCandidate cand;
        cand.theta3 = theta3;
        const Vec2 c = g.l1 * unit_vec(theta1);
        const Vec2 p = c + g.l2 * unit_vec(theta3);
        const double theta4 = theta3 - delta;
        const Vec2 d = p - g.l2 * unit_vec(theta4);
        const double theta2 = angle_of(d - g.b());
        PlanarPosture q;
        q.theta1 = normalize_angle(theta1);
        q.theta2 = theta2;
        q.theta3 = normalize_angle(theta3);
        q.theta4 = normalize_angle(theta4);
        q.p = p;
        q.c = c;
        q.d = d;
        const double s1 = std::sin(theta3 - theta1);
        const double s2 = std::sin(q.theta4 - theta2);
        cand.valid = std::abs(s1) >= serial_sine_tol && std::abs(s2) >= serial_sine_tol &&
                     (s1 > 0.0 ? +1 : -1) == wm.sign_a && (s2 > 0.0 ? +1 : -1) == wm.sign_b;
        cand.posture = q;
        return cand;
    }

    std::vector<TraceCandidate> candidates(double theta1, bool valid_only) const {
        std::vector<TraceCandidate> out;
        const TrigRoots r = roots_at(theta1);
        for (int i = 0; i < r.count(); ++i) {
            TraceCandidate c = make(theta1, r.t[static_cast<size_t>(i)]);
            if (!valid_only || c.valid) out.push_back(c);
        }
        return out;
    }
};

struct TraceEntry {
    double theta1;
    TraceCandidate cand;
};

struct Chain {
    std::vector<TraceEntry> entries;
    bool closed = false;
    bool active = true;
    int last_index = -1;
};

// Matching cap for branch tracking between adjacent parameter samples.
inline constexpr double trace_match_cap = 0.9;

inline void refine_edge(const DeltaTracer& tr, const TraceEntry& e0, const TraceEntry& e1,
                        double ctol, double jtol, int depth, std::vector<TraceEntry>& out) {
    const Vec2 p0 = e0.cand.posture.p, p1 = e1.cand.posture.p;
    const double jd = std::hypot(angle_dist(e0.cand.posture.theta1, e1.cand.posture.theta1),
                                 angle_dist(e0.cand.posture.theta2, e1.cand.posture.theta2));
    if ((norm(p1 - p0) <= ctol && jd <= jtol) || depth <= 0) {
        out.push_back(e1);
        return;
    }
    const double tm = e0.theta1 + 0.5 * angle_dist(e0.theta1, e1.theta1);
    const double anchor = e0.cand.theta3 + 0.5 * angle_dist(e0.cand.theta3, e1.cand.theta3);
    auto cands = tr.candidates(tm, /*valid_only=*/true);
    const TraceCandidate* best = nullptr;
    double best_d = trace_match_cap;
    for (const auto& c : cands) {
        const double d = std::abs(angle_dist(anchor, c.theta3));
        if (d < best_d) {
            best_d = d;
            best = &c;
        }
    }
    if (!best) {
        out.push_back(e1);  // cannot refine across an invalid notch
        return;
    }
    const TraceEntry mid{tm, *best};
    refine_edge(tr, e0, mid, ctol, jtol, depth - 1, out);
    refine_edge(tr, mid, e1, ctol, jtol, depth - 1, out);
}

// Extends an open chain end beyond the last valid grid sample toward the
// fold or mode boundary by bisection on candidate validity.
inline std::optional<TraceEntry> extend_end(const DeltaTracer& tr, const TraceEntry& last,
                                            double toward_theta1) {
    double lo = last.theta1;           // valid side
    double hi = toward_theta1;         // invalid side
    double anchor = last.cand.theta3;
    std::optional<TraceEntry> found;
    for (int it = 0; it < 40; ++it) {
        const double mid = lo + 0.5 * angle_dist(lo, hi);
        auto cands = tr.candidates(mid, /*valid_only=*/true);
        const TraceCandidate* best = nullptr;
        double best_d = trace_match_cap;
        for (const auto& c : cands) {
            const double d = std::abs(angle_dist(anchor, c.theta3));
            if (d < best_d) {
                best_d = d;
                best = &c;
            }
        }
        if (best) {
            lo = mid;
            anchor = best->theta3;
            found = TraceEntry{mid, *best};
        } else {
            hi = mid;
        }
    }
    return found;
}

inline std::vector<Chain> build_chains(const DeltaTracer& tr, int samples) {
    const int n = std::max(samples, 16);
    const double step = 2.0 * pi / n;
    std::vector<std::vector<TraceCandidate>> cands(static_cast<size_t>(n));
    std::vector<double> theta1s(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        theta1s[static_cast<size_t>(i)] = -pi + (i + 0.5) * step;
        cands[static_cast<size_t>(i)] =
            tr.candidates(theta1s[static_cast<size_t>(i)], /*valid_only=*/true);
    }

    std::vector<Chain> chains;
    std::vector<size_t> active;  // indices into chains
    for (int i = 0; i < n; ++i) {
        const auto& cs = cands[static_cast<size_t>(i)];
        std::vector<bool> cand_used(cs.size(), false);
        std::vector<bool> chain_matched(active.size(), false);

        // greedy unique matching by theta3 proximity
        while (true) {
            double best = trace_match_cap;
            size_t bi = active.size(), bj = cs.size();
            for (size_t ai = 0; ai < active.size(); ++ai) {
                if (chain_matched[ai]) continue;
                const Chain& ch = chains[active[ai]];
                if (ch.last_index != i - 1) continue;
                for (size_t cj = 0; cj < cs.size(); ++cj) {
                    if (cand_used[cj]) continue;
                    const double d =
                        std::abs(angle_dist(ch.entries.back().cand.theta3, cs[cj].theta3));
                    if (d < best) {
                        best = d;
                        bi = ai;
                        bj = cj;
                    }
                }
            }
            if (bi == active.size()) break;
            chain_matched[bi] = true;
            cand_used[bj] = true;
            Chain& ch = chains[active[bi]];
            ch.entries.push_back({theta1s[static_cast<size_t>(i)], cs[bj]});
            ch.last_index = i;
        }

        // retire unmatched chains, open new ones for unmatched candidates
        std::vector<size_t> next_active;
        for (size_t ai = 0; ai < active.size(); ++ai)
            if (chain_matched[ai]) next_active.push_back(active[ai]);
        for (size_t cj = 0; cj < cs.size(); ++cj) {
            if (cand_used[cj]) continue;
            Chain ch;
            ch.entries.push_back({theta1s[static_cast<size_t>(i)], cs[cj]});
            ch.last_index = i;
            chains.push_back(std::move(ch));
            next_active.push_back(chains.size() - 1);
        }
        active = std::move(next_active);
    }

    // cyclic continuation: chains ending at the last sample may continue in
    // chains starting at the first (same branch across the -pi/pi seam)
    bool merged = true;
    while (merged) {
        merged = false;
        for (size_t x = 0; x < chains.size() && !merged; ++x) {
            Chain& cx = chains[x];
            if (cx.entries.empty() || cx.closed || cx.last_index != n - 1) continue;
            for (size_t y = 0; y < chains.size(); ++y) {
                Chain& cy = chains[y];
                if (cy.entries.empty() || cy.closed) continue;
                // cy must start at sample 0
                const bool starts_at_zero =
                    std::abs(angle_dist(cy.entries.front().theta1, -pi + 0.5 * step)) < 1e-12;
                if (!starts_at_zero) continue;
                const double d = std::abs(
                    angle_dist(cx.entries.back().cand.theta3, cy.entries.front().cand.theta3));
                if (d >= trace_match_cap) continue;
                if (x == y) {
                    cx.closed = true;
                } else {
                    cx.entries.insert(cx.entries.end(), cy.entries.begin(), cy.entries.end());
                    cx.last_index = cy.last_index;
                    cy.entries.clear();
                }
                merged = true;
                break;
            }
        }
    }
    std::erase_if(chains, [](const Chain& c) { return c.entries.size() < 2; });
    return chains;
}

struct TracedRun {
    std::vector<PlanarPosture> postures;
    bool closed = false;
};

inline std::vector<TracedRun> trace_runs(const Geometry& g, double delta, WorkingMode wm,
                                         double ctol, double jtol, const TraceOptions& opts) {
    const DeltaTracer tr(g, delta, wm);
    auto chains = build_chains(tr, opts.samples);
    const double step = 2.0 * pi / std::max(opts.samples, 16);

    std::vector<TracedRun> runs;
    for (auto& ch : chains) {
        std::vector<TraceEntry> ext = ch.entries;
        if (!ch.closed) {
            if (auto e = extend_end(tr, ext.front(), ext.front().theta1 - step))
                ext.insert(ext.begin(), *e);
            if (auto e = extend_end(tr, ext.back(), ext.back().theta1 + step))
                ext.push_back(*e);
        }
        std::vector<TraceEntry> fine;
        fine.push_back(ext.front());
        for (size_t i = 0; i + 1 < ext.size(); ++i)
            refine_edge(tr, ext[i], ext[i + 1], ctol, jtol, opts.max_refine_depth, fine);
        if (ch.closed)
            refine_edge(tr, ext.back(), ext.front(), ctol, jtol, opts.max_refine_depth, fine);

        TracedRun run;
        run.closed = ch.closed;
        run.postures.reserve(fine.size());
        for (auto& e : fine) run.postures.push_back(e.cand.posture);
        if (run.closed && run.postures.size() > 1) run.postures.pop_back();  // seam duplicate
        if (run.postures.size() >= 2) runs.push_back(std::move(run));
    }
    return runs;
}

// Locus for the degenerate lock delta = 0: C and D coincide, which pins
// theta1 to cos(theta1) = l0/(2*l1) and leaves P free on the circle of
// radius l2 about C. Joint angles are frozen along each circle.
inline std::vector<TracedRun> trace_coincident_runs(const Geometry& g, WorkingMode wm,
                                                    double ctol, const TraceOptions& opts) {
    std::vector<TracedRun> runs;
    if (g.l0 == 0.0) return runs;  // every theta1 qualifies; locus is not a curve
    const double cos1 = g.l0 / (2.0 * g.l1);
    if (cos1 > 1.0) return runs;
    std::vector<double> theta1s{std::acos(cos1)};
    if (theta1s[0] != 0.0) theta1s.push_back(-theta1s[0]);

    int n = std::max(opts.samples, 16);
    if (ctol > 0.0) n = std::max<int>(n, static_cast<int>(2.0 * pi * g.l2 / ctol) + 1);

    for (double t1 : theta1s) {
        const Vec2 c = g.l1 * unit_vec(t1);
        const double t2 = angle_of(c - g.b());
        auto valid_at = [&](double t3) {
            const double s1 = std::sin(t3 - t1);
            const double s2 = std::sin(t3 - t2);
            return std::abs(s1) >= serial_sine_tol && std::abs(s2) >= serial_sine_tol &&
                   (s1 > 0.0 ? +1 : -1) == wm.sign_a && (s2 > 0.0 ? +1 : -1) == wm.sign_b;
        };
        auto posture_at = [&](double t3) {
            PlanarPosture q;
            q.theta1 = normalize_angle(t1);
            q.theta2 = normalize_angle(t2);
            q.theta3 = normalize_angle(t3);
            q.theta4 = q.theta3;
            q.c = c;
            q.d = c;
            q.p = c + g.l2 * unit_vec(t3);
            return q;
        };

        // contiguous valid runs over the cyclic theta3 grid
        std::vector<double> grid(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) grid[static_cast<size_t>(i)] = -pi + (i + 0.5) * 2.0 * pi / n;
        int start = -1;
        for (int i = 0; i < n; ++i)
            if (!valid_at(grid[static_cast<size_t>(i)])) {
                start = i;
                break;
            }
        if (start < 0) continue;  // cannot happen: the sines change sign on the circle
        TracedRun cur;
        for (int k = 1; k <= n; ++k) {
            const double t3 = grid[static_cast<size_t>((start + k) % n)];
            if (valid_at(t3)) {
                cur.postures.push_back(posture_at(t3));
            } else if (!cur.postures.empty()) {
                if (cur.postures.size() >= 2) runs.push_back(std::move(cur));
                cur = TracedRun{};
            }
        }
        if (cur.postures.size() >= 2) runs.push_back(std::move(cur));
    }
    return runs;
}

inline double resolve_chord_tol(const Geometry& g, const TraceOptions& opts) {
    if (opts.chord_tolerance > 0.0) return opts.chord_tolerance;
    const double d = workspace_diameter(g);
    return d > 0.0 ? d / 1000.0 : 1e-3;
}

inline double resolve_joint_tol(const TraceOptions& opts) {
    return opts.joint_chord_tolerance > 0.0 ? opts.joint_chord_tolerance : 2.0 * pi / 500.0;
}

// Locked theta3-theta4 values realizing a kappa level: +-delta and its
// supplement, deduplicated (kappa=1 collapses to +-pi/2; the singular
// sentinel to {0, pi}).
inline std::vector<double> locks_for_level(double kappa) {
    const double d = delta_of_kappa(kappa);
    std::vector<double> locks;
    for (double cand : {d, -d, pi - d, -(pi - d)}) {
        const double v = normalize_angle(cand);
        bool dup = false;
        for (double l : locks)
            if (std::abs(angle_dist(l, v)) < 1e-15) dup = true;
        if (!dup) locks.push_back(v);
    }
    return locks;
}

}  // namespace detail

/// Postures with theta3 - theta4 locked to `delta`, in the given working
/// mode, as connected runs. The locus is the coupler curve of the four-bar
/// obtained by freezing the middle joint.
inline std::vector<detail::TracedRun> trace_fixed_delta(const Geometry& g, double delta,
                                                        WorkingMode wm,
                                                        const TraceOptions& opts = {}) {
    validate_geometry(g);
    const double ctol = detail::resolve_chord_tol(g, opts);
    const double jtol = detail::resolve_joint_tol(opts);
    if (fold_half_pi(delta) == 0.0 && std::abs(normalize_angle(delta)) < pi / 2.0)
        return detail::trace_coincident_runs(g, wm, ctol, opts);
    return detail::trace_runs(g, delta, wm, ctol, jtol, opts);
}

/// Constant-kappa(A) curves of one working mode in the Cartesian workspace.
/// kappa_target = +infinity traces the singularity loci (flattened-coupler
/// curves and the coincident-elbow circles).
inline std::vector<IsoCurve> iso_curve_cartesian(const Geometry& g, double kappa_target,
                                                 WorkingMode wm, const TraceOptions& opts = {}) {
    validate_geometry(g);
    if (!(kappa_target >= 1.0))
        throw Error(errc::invalid_level, "kappa level must be >= 1");
    const double ctol = detail::resolve_chord_tol(g, opts);
    std::vector<IsoCurve> curves;
    for (double lock : detail::locks_for_level(kappa_target)) {
        for (auto& run : trace_fixed_delta(g, lock, wm, opts)) {
            IsoCurve c;
            c.kappa = kappa_target;
            c.mode = wm;
            c.space = CurveSpace::cartesian;
            c.closed = run.closed;
            c.locked_delta = lock;
            c.chord_tolerance = ctol;
            c.points.reserve(run.postures.size());
            for (const auto& q : run.postures) c.points.push_back(q.p);
            curves.push_back(std::move(c));
        }
    }
    return curves;
}

/// Images of the constant-kappa curves in the joint space (theta1, theta2),
/// for all four working modes, split wherever a coordinate wraps so each
/// polyline is chart-continuous.
inline std::vector<IsoCurve> iso_curve_jointspace(const Geometry& g, double kappa_target,
                                                  const TraceOptions& opts = {}) {
    validate_geometry(g);
    if (!(kappa_target >= 1.0))
        throw Error(errc::invalid_level, "kappa level must be >= 1");
    const double jtol = detail::resolve_joint_tol(opts);
    std::vector<IsoCurve> curves;
    auto wraps = [](const PlanarPosture& a, const PlanarPosture& b) {
        return std::abs(b.theta1 - a.theta1) > pi || std::abs(b.theta2 - a.theta2) > pi;
    };
    for (WorkingMode wm : WorkingMode::all()) {
        for (double lock : detail::locks_for_level(kappa_target)) {
            for (auto& run : trace_fixed_delta(g, lock, wm, opts)) {
                const auto& qs = run.postures;
                // closed runs crossing the chart seam restart right after a
                // wrap so every emitted piece is chart-continuous
                size_t start = 0;
                bool seam_wrap = false;
                if (run.closed) {
                    for (size_t k = 0; k < qs.size(); ++k) {
                        if (wraps(qs[k], qs[(k + 1) % qs.size()])) {
                            start = (k + 1) % qs.size();
                            seam_wrap = true;
                            break;
                        }
                    }
                }
                std::vector<std::vector<Vec2>> pieces;
                std::vector<Vec2> cur;
                for (size_t k = 0; k < qs.size(); ++k) {
                    const auto& q = qs[(start + k) % qs.size()];
                    if (!cur.empty() && wraps(qs[(start + k - 1) % qs.size()], q)) {
                        pieces.push_back(std::move(cur));
                        cur.clear();
                    }
                    const Vec2 v{q.theta1, q.theta2};
                    // frozen-joint loci (coincident-elbow circles) collapse
                    // to a single joint-space point
                    if (cur.empty() || cur.back().x != v.x || cur.back().y != v.y)
                        cur.push_back(v);
                }
                pieces.push_back(std::move(cur));

                for (auto& pts : pieces) {
                    if (pts.size() < 2 && !(pieces.size() == 1 && !pts.empty())) continue;
                    IsoCurve c;
                    c.kappa = kappa_target;
                    c.mode = wm;
                    c.space = CurveSpace::joint;
                    c.closed = run.closed && !seam_wrap && pieces.size() == 1;
                    c.locked_delta = lock;
                    c.chord_tolerance = jtol;
                    c.points = std::move(pts);
                    curves.push_back(std::move(c));
                }
            }
        }
    }
    return curves;
}

// ---------------------------------------------------------------------------
// Kappa field (verification raster)

/// kappa(A) sampled over a rectangle via inverse kinematics in a fixed
/// working mode. NaN marks unreachable nodes, +infinity singular ones; the
/// two encodings stay distinct for rendering and contouring.
struct KappaField {
    Rect region;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;  // row-major, index j*nx + i

    double at(int i, int j) const { return values[static_cast<size_t>(j) * nx + i]; }
    Vec2 node(int i, int j) const {
        const double fx = nx > 1 ? static_cast<double>(i) / (nx - 1) : 0.0;
        const double fy = ny > 1 ? static_cast<double>(j) / (ny - 1) : 0.0;
        return {region.lo.x + fx * region.width(), region.lo.y + fy * region.height()};
    }
    static bool is_unreachable(double v) { return std::isnan(v); }
    static bool is_singular(double v) { return std::isinf(v); }
};

inline KappaField kappa_field(const Geometry& g, WorkingMode wm, Rect region, int nx, int ny) {
    validate_geometry(g);
    if (nx < 2 || ny < 2) throw Error(errc::invalid_config, "field resolution must be >= 2");
    KappaField f;
    f.region = region;
    f.nx = nx;
    f.ny = ny;
    f.values.resize(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Vec2 p = f.node(i, j);
            double v;
            if (!workspace_contains(g, p)) {
                v = std::numeric_limits<double>::quiet_NaN();
            } else {
                try {
                    v = kappa_a(inverse_kinematics(g, p, wm));
                } catch (const SerialSingularity& e) {
                    v = kappa_a(e.posture);  // boundary: A is still well defined
                }
            }
            f.values[static_cast<size_t>(j) * nx + i] = v;
        }
    return f;
}

// ---------------------------------------------------------------------------
// Workspace boundary

/// Counterclockwise-parameterized circular arc: center + radius * u(t),
/// t in [a0, a0 + span], span in (0, 2*pi].
struct CircularArc {
    Vec2 center;
    double radius = 0.0;
    double a0 = 0.0;
    double span = 0.0;

    Vec2 point_at(double t) const { return center + radius * unit_vec(a0 + t * span); }

    /// True when the angle hits the arc (tolerance in radians).
    bool covers_angle(double ang, double tol = 0.0) const {
        double rel = std::fmod(ang - a0, 2.0 * pi);
        if (rel < 0.0) rel += 2.0 * pi;
        return rel <= span + tol || rel >= 2.0 * pi - tol;
    }
};

/// Distance from p to the arc (nearest of the radial projection when the
/// angle is covered, else the nearer endpoint).
inline double distance_to_arc(const CircularArc& arc, Vec2 p) {
    const Vec2 d = p - arc.center;
    const double r = norm(d);
    if (r > 0.0 && arc.covers_angle(angle_of(d))) return std::abs(r - arc.radius);
    return std::min(norm(p - arc.point_at(0.0)), norm(p - arc.point_at(1.0)));
}

namespace detail {

struct BoundaryCircle {
    Vec2 center;
    double radius;
    bool outer;  // outer: region requires d <= R; inner: d >= R
};

inline std::vector<BoundaryCircle> boundary_circles(const Geometry& g) {
    const double rin = std::abs(g.l1 - g.l2);
    const double rout = g.l1 + g.l2;
    std::vector<BoundaryCircle> cs;
    cs.push_back({g.a(), rout, true});
    cs.push_back({g.b(), rout, true});
    if (rin > 0.0) {
        cs.push_back({g.a(), rin, false});
        cs.push_back({g.b(), rin, false});
    }
    // coincident base pivots collapse duplicate circles
    std::vector<BoundaryCircle> out;
    for (const auto& c : cs) {
        bool dup = false;
        for (const auto& o : out)
            dup = dup || (norm(c.center - o.center) < 1e-12 * rout &&
                          std::abs(c.radius - o.radius) < 1e-12 * rout && c.outer == o.outer);
        if (!dup) out.push_back(c);
    }
    return out;
}

inline double circle_margin(const BoundaryCircle& c, Vec2 p) {
    const double d = norm(p - c.center);
    return c.outer ? c.radius - d : d - c.radius;
}

}  // namespace detail

/// The exact boundary of the workspace as a flat set of circular arcs: the
/// pieces of the four constraint circles whose points satisfy every other
/// annulus constraint. Deterministically ordered.
inline std::vector<CircularArc> workspace_boundary_arcs(const Geometry& g) {
    validate_geometry(g);
    const auto circles = detail::boundary_circles(g);
    const double scale = g.l1 + g.l2;
    std::vector<CircularArc> arcs;

    for (size_t i = 0; i < circles.size(); ++i) {
        const auto& ci = circles[i];
        std::vector<double> cuts;
        for (size_t j = 0; j < circles.size(); ++j) {
            if (j == i) continue;
            const auto& cj = circles[j];
            const Vec2 v = cj.center - ci.center;
            const double d = norm(v);
            if (d < 1e-12 * scale) continue;  // concentric
            if (d > ci.radius + cj.radius + 1e-9 * scale) continue;
            if (d < std::abs(ci.radius - cj.radius) - 1e-9 * scale) continue;
            const double cosphi = std::clamp(
                (d * d + ci.radius * ci.radius - cj.radius * cj.radius) / (2.0 * d * ci.radius),
                -1.0, 1.0);
            const double base = angle_of(v);
            const double phi = std::acos(cosphi);
            cuts.push_back(normalize_angle(base + phi));
            if (phi > 1e-12) cuts.push_back(normalize_angle(base - phi));
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   cuts.end());
        if (cuts.size() > 1 && std::abs((cuts.front() + 2.0 * pi) - cuts.back()) < 1e-12)
            cuts.pop_back();

        auto keep = [&](const CircularArc& arc) {
            const Vec2 mid = arc.point_at(0.5);
            for (size_t j = 0; j < circles.size(); ++j) {
                if (j == i) continue;
                if (detail::circle_margin(circles[j], mid) < -1e-9 * scale) return false;
            }
            return true;
        };

        if (cuts.empty()) {
            CircularArc arc{ci.center, ci.radius, -pi, 2.0 * pi};
            if (keep(arc)) arcs.push_back(arc);
            continue;
        }
        for (size_t k = 0; k < cuts.size(); ++k) {
            const double a0 = cuts[k];
            const double a1 = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + 2.0 * pi;
            const double span = a1 - a0;
            if (span <= 1e-12) continue;
            CircularArc arc{ci.center, ci.radius, a0, span};
            if (keep(arc)) arcs.push_back(arc);
        }
    }

    std::sort(arcs.begin(), arcs.end(), [](const CircularArc& x, const CircularArc& y) {
        if (x.center.x != y.center.x) return x.center.x < y.center.x;
        if (x.center.y != y.center.y) return x.center.y < y.center.y;
        if (x.radius != y.radius) return x.radius < y.radius;
        return x.a0 < y.a0;
    });
    return arcs;
}

/// Workspace boundary as closed polylines (counterclockwise), built by
/// stitching the exact arcs and sampling each with about
/// samples * span / (2*pi) segments.
inline std::vector<IsoCurve> workspace_boundary(const Geometry& g, int samples = 512) {
    auto arcs = workspace_boundary_arcs(g);
    const double scale = g.l1 + g.l2;
    const double match_tol = 1e-7 * scale;
    samples = std::max(samples, 8);

    std::vector<bool> used(arcs.size(), false);
    std::vector<IsoCurve> loops;
    double max_step = 0.0;

    auto sample_arc = [&](const CircularArc& arc, bool forward, std::vector<Vec2>& pts) {
        const int n = std::max<int>(
            2, static_cast<int>(std::llround(samples * arc.span / (2.0 * pi))) + 1);
        max_step = std::max(max_step, arc.radius * arc.span / (n - 1));
        for (int k = 0; k < n; ++k) {
            const double t = forward ? static_cast<double>(k) / (n - 1)
                                     : 1.0 - static_cast<double>(k) / (n - 1);
            const Vec2 p = arc.point_at(t);
            if (!pts.empty() && norm(pts.back() - p) <= match_tol) continue;
            pts.push_back(p);
        }
    };

    for (size_t s = 0; s < arcs.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<Vec2> pts;
        sample_arc(arcs[s], true, pts);
        const Vec2 loop_start = arcs[s].point_at(0.0);
        Vec2 cur = arcs[s].point_at(1.0);
        while (norm(cur - loop_start) > match_tol) {
            bool found = false;
            for (size_t t = 0; t < arcs.size() && !found; ++t) {
                if (used[t]) continue;
                if (norm(arcs[t].point_at(0.0) - cur) <= match_tol) {
                    used[t] = true;
                    sample_arc(arcs[t], true, pts);
                    cur = arcs[t].point_at(1.0);
                    found = true;
                } else if (norm(arcs[t].point_at(1.0) - cur) <= match_tol) {
                    used[t] = true;
                    sample_arc(arcs[t], false, pts);
                    cur = arcs[t].point_at(0.0);
                    found = true;
                }
            }
            if (!found) break;  // open chain would indicate a degenerate geometry
        }
        if (pts.size() >= 2 && norm(pts.back() - pts.front()) <= match_tol) pts.pop_back();
        if (pts.size() < 3) continue;

        double area = 0.0;
        for (size_t k = 0; k < pts.size(); ++k)
            area += cross(pts[k], pts[(k + 1) % pts.size()]);
        if (area < 0.0) std::reverse(pts.begin(), pts.end());

        IsoCurve c;
        c.kappa = std::numeric_limits<double>::infinity();
        c.space = CurveSpace::cartesian;
        c.closed = true;
        c.locked_delta = std::numeric_limits<double>::quiet_NaN();
        c.points = std::move(pts);
        loops.push_back(std::move(c));
    }
    for (auto& l : loops) l.chord_tolerance = max_step;
    return loops;
}

}  // namespace isocond
