#pragma once

#include "minsurf/catalog.hpp"
#include "minsurf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace minsurf {

enum class GeodesicMethod { fast_marching, graph_dijkstra };

inline std::string to_string(GeodesicMethod m) {
    return m == GeodesicMethod::fast_marching ? "fast-marching" : "graph-dijkstra";
}

inline GeodesicMethod parse_geodesic_method(const std::string& s) {
    if (s == "fast-marching") return GeodesicMethod::fast_marching;
    if (s == "graph-dijkstra") return GeodesicMethod::graph_dijkstra;
    throw ArgumentError("unknown geodesic method '" + s + "'");
}

struct GeodesicOptions {
    GeodesicMethod method = GeodesicMethod::fast_marching;
    int steiner_points = 3;     ///< per edge, graph-dijkstra only
    bool split_obtuse = true;   ///< virtual splitting of obtuse corners
};

/// Intrinsic distance from a base vertex, one value per mesh vertex.
struct DistanceField {
    int base_vertex = 0;
    Vec3 base_x = Vec3::Zero();  ///< ambient image of the base, the origin for |x|
    std::vector<double> r;
    GeodesicMethod method = GeodesicMethod::fast_marching;
    double eps_solver = 0.0;     ///< error bound; 0 until calibrated
    std::size_t unreachable = 0;
    std::vector<std::string> warnings;

    /// Ambient position of vertex v relative to the base image.
    Vec3 x(const MetricMesh& mesh, int v) const { return mesh.vertices[static_cast<std::size_t>(v)].x - base_x; }
};

namespace detail {

/// Planar layout of a triangle from its side lengths (l[k] opposite corner
/// k): corner 0 at the origin, corner 1 on the positive x-axis, corner 2 in
/// the upper half plane.
inline std::array<Vec2, 3> layout_triangle(const std::array<double, 3>& l) {
    const double c = l[2];
    const double x = (l[1] * l[1] + c * c - l[0] * l[0]) / (2.0 * c);
    const double y = std::sqrt(std::max(0.0, l[1] * l[1] - x * x));
    return {Vec2(0.0, 0.0), Vec2(c, 0.0), Vec2(x, y)};
}

/// Distance at C from a point source unfolded across edge AB, given the
/// distances at A and B. Returns +inf unless the straight ray from the
/// virtual source to C crosses the segment AB.
inline double unfolded_update(double ra, double rb, double ab, double ac, double bc) {
    if (!(ab > 0.0)) return kInf;
    const double xc = (ac * ac + ab * ab - bc * bc) / (2.0 * ab);
    const double yc2 = ac * ac - xc * xc;
    if (!(yc2 > 0.0)) return kInf;
    const double yc = std::sqrt(yc2);
    const double xs = (ra * ra - rb * rb + ab * ab) / (2.0 * ab);
    const double ys2 = ra * ra - xs * xs;
    if (ys2 < 0.0) return kInf;
    const double ys = -std::sqrt(ys2);
    const double xp = xs + (xc - xs) * (-ys) / (yc - ys);
    const double slack = 1e-12 * ab;
    if (xp < -slack || xp > ab + slack) return kInf;
    return std::hypot(xc - xs, yc - ys);
}

} // namespace detail

/// Single-source fast marching on the intrinsic triangle geometry.
///
/// Triangle updates place a virtual point source from the two accepted
/// distances and measure straight to the updated vertex, which reproduces
/// Euclidean distance on flat meshes whenever the source ray crosses the
/// opposite edge. Edge updates bound every value by a mesh path. Obtuse
/// corners are split by unfolding neighbours until a vertex inside the
/// acute cone is found.
class FastMarching {
public:
    explicit FastMarching(const MetricMesh& mesh, bool split_obtuse = true) : mesh_(mesh) {
        split_of_.assign(mesh.triangles.size() * 3, -1);
        dependents_.assign(mesh.vertices.size(), {});
        if (split_obtuse) build_splits();
    }

    std::size_t num_split_corners() const { return splits_.size(); }

    std::vector<double> solve(int base) const {
        const std::size_t nv = mesh_.vertices.size();
        std::vector<double> r(nv, kInf);
        std::vector<char> accepted(nv, 0);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        r[static_cast<std::size_t>(base)] = 0.0;
        heap.emplace(0.0, base);
        while (!heap.empty()) {
            const auto [val, v] = heap.top();
            heap.pop();
            const auto vi = static_cast<std::size_t>(v);
            if (accepted[vi] || val > r[vi]) continue;
            accepted[vi] = 1;
            const auto relax = [&](int c) {
                const auto ci = static_cast<std::size_t>(c);
                if (accepted[ci]) return;
                const double cand = candidate(c, r, accepted);
                if (cand < r[ci]) {
                    r[ci] = cand;
                    heap.emplace(cand, c);
                }
            };
            for (int c : mesh_.vertex_neighbors(v)) relax(c);
            for (int c : dependents_[vi]) relax(c);
        }
        return r;
    }

private:
    struct Split {
        int w = -1;
        double cw = 0.0, aw = 0.0, bw = 0.0;
    };

    double candidate(int c, const std::vector<double>& r, const std::vector<char>& acc) const {
        double best = kInf;
        const auto R = [&](int v) { return r[static_cast<std::size_t>(v)]; };
        const auto A = [&](int v) { return acc[static_cast<std::size_t>(v)] != 0; };
        for (int t : mesh_.vertex_triangles(c)) {
            const auto& tri = mesh_.triangles[static_cast<std::size_t>(t)];
            const int k = tri[0] == c ? 0 : (tri[1] == c ? 1 : 2);
            const int a = tri[static_cast<std::size_t>((k + 1) % 3)];
            const int b = tri[static_cast<std::size_t>((k + 2) % 3)];
            const auto l = mesh_.side_lengths(static_cast<std::size_t>(t));
            const double ab = l[static_cast<std::size_t>(k)];
            const double ac = l[static_cast<std::size_t>((k + 2) % 3)];
            const double bc = l[static_cast<std::size_t>((k + 1) % 3)];
            if (A(a)) best = std::min(best, R(a) + ac);
            if (A(b)) best = std::min(best, R(b) + bc);
            if (A(a) && A(b)) best = std::min(best, detail::unfolded_update(R(a), R(b), ab, ac, bc));
            const int s = split_of_[static_cast<std::size_t>(3 * t + k)];
            if (s >= 0) {
                const Split& sp = splits_[static_cast<std::size_t>(s)];
                if (A(sp.w)) {
                    best = std::min(best, R(sp.w) + sp.cw);
                    if (A(a)) best = std::min(best, detail::unfolded_update(R(a), R(sp.w), sp.aw, ac, sp.cw));
                    if (A(b)) best = std::min(best, detail::unfolded_update(R(sp.w), R(b), sp.bw, sp.cw, bc));
                }
            }
        }
        return best;
    }

    static int other_triangle(const MetricMesh& mesh, int e, int t) {
        const auto& et = mesh.edge_triangles(e);
        return et[0] == t ? et[1] : et[0];
    }

    void build_splits() {
        for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
            const auto l = mesh_.side_lengths(t);
            for (int k = 0; k < 3; ++k) {
                const double ab = l[static_cast<std::size_t>(k)];
                const double ac = l[static_cast<std::size_t>((k + 2) % 3)];
                const double bc = l[static_cast<std::size_t>((k + 1) % 3)];
                if (ab * ab <= ac * ac + bc * bc) continue;
                find_split(static_cast<int>(t), k, ab, ac, bc);
            }
        }
    }

    void find_split(int t, int k, double ab, double ac, double bc) {
        const auto& tri = mesh_.triangles[static_cast<std::size_t>(t)];
        const int c = tri[static_cast<std::size_t>(k)];
        const int a = tri[static_cast<std::size_t>((k + 1) % 3)];
        const int b = tri[static_cast<std::size_t>((k + 2) % 3)];
        // A at the origin, B on the x-axis, C above.
        const Vec2 pa(0.0, 0.0), pb(ab, 0.0);
        const double xc = (ac * ac + ab * ab - bc * bc) / (2.0 * ab);
        const Vec2 pc(xc, std::sqrt(std::max(0.0, ac * ac - xc * xc)));
        const Vec2 da = pa - pc, db = pb - pc;

        int p = a, q = b, cur = t;
        Vec2 pp = pa, pq = pb, papex = pc;
        for (int depth = 0; depth < 12; ++depth) {
            const int e = mesh_.find_edge(p, q);
            const int next = other_triangle(mesh_, e, cur);
            if (next < 0) return;
            const auto& nt = mesh_.triangles[static_cast<std::size_t>(next)];
            int w = -1;
            for (int v : nt) {
                if (v != p && v != q) w = v;
            }
            const double lpw = mesh_.edge_length(p, w), lqw = mesh_.edge_length(q, w);
            const double dpq = (pq - pp).norm();
            const Vec2 ex = (pq - pp) / dpq;
            const Vec2 ey(-ex[1], ex[0]);
            const double along = (lpw * lpw - lqw * lqw + dpq * dpq) / (2.0 * dpq);
            const double hgt = std::sqrt(std::max(0.0, lpw * lpw - along * along));
            const double apex_side = ey.dot(papex - pp);
            const Vec2 pw = pp + along * ex - (apex_side > 0.0 ? 1.0 : -1.0) * hgt * ey;
            const Vec2 dw = pw - pc;
            const bool ok_a = dw.dot(da) > 0.0;
            const bool ok_b = dw.dot(db) > 0.0;
            if (ok_a && ok_b) {
                split_of_[static_cast<std::size_t>(3 * t + k)] = static_cast<int>(splits_.size());
                splits_.push_back({w, dw.norm(), (pw - pa).norm(), (pw - pb).norm()});
                dependents_[static_cast<std::size_t>(w)].push_back(c);
                return;
            }
            // The acute cone passes entirely on one side of W.
            if (!ok_b) {
                papex = pp;
                p = w;
                pp = pw;
            } else {
                papex = pq;
                q = w;
                pq = pw;
            }
            cur = next;
        }
    }

    const MetricMesh& mesh_;
    std::vector<Split> splits_;
    std::vector<int> split_of_;
    std::vector<std::vector<int>> dependents_;
};

/// Dijkstra on the graph of mesh vertices plus `k` Steiner points per edge,
/// with straight connections across each triangle.
inline std::vector<double> steiner_dijkstra(const MetricMesh& mesh, int base, int k) {
    if (k < 0) throw ArgumentError("steiner_dijkstra: negative Steiner count");
    const std::size_t nv = mesh.vertices.size();
    const std::size_t nt = mesh.triangles.size();
    const std::size_t ku = static_cast<std::size_t>(k);
    std::vector<std::array<Vec2, 3>> layouts(nt);
    for (std::size_t t = 0; t < nt; ++t) layouts[t] = detail::layout_triangle(mesh.side_lengths(t));
    const std::size_t nn = nv + ku * mesh.edges.size();

    // Node ids of the points on triangle t with their layout positions.
    std::vector<std::pair<int, Vec2>> pts;
    const auto gather = [&](std::size_t t) {
        pts.clear();
        const auto& tri = mesh.triangles[t];
        const auto& lay = layouts[t];
        for (int j = 0; j < 3; ++j) pts.emplace_back(tri[static_cast<std::size_t>(j)], lay[static_cast<std::size_t>(j)]);
        for (int j = 0; j < 3; ++j) {
            const int e = mesh.triangle_edge(t, j);
            const auto& edge = mesh.edges[static_cast<std::size_t>(e)];
            const int ca = tri[0] == edge.a ? 0 : (tri[1] == edge.a ? 1 : 2);
            const int cb = tri[0] == edge.b ? 0 : (tri[1] == edge.b ? 1 : 2);
            for (std::size_t s = 1; s <= ku; ++s) {
                const double f = static_cast<double>(s) / static_cast<double>(k + 1);
                const Vec2 pos = lay[static_cast<std::size_t>(ca)] +
                                 f * (lay[static_cast<std::size_t>(cb)] - lay[static_cast<std::size_t>(ca)]);
                pts.emplace_back(static_cast<int>(nv + ku * static_cast<std::size_t>(e) + (s - 1)), pos);
            }
        }
    };

    std::vector<double> dist(nn, kInf);
    std::vector<char> done(nn, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(base)] = 0.0;
    heap.emplace(0.0, base);
    std::vector<int> tris;
    while (!heap.empty()) {
        const auto [d0, p] = heap.top();
        heap.pop();
        const auto pi = static_cast<std::size_t>(p);
        if (done[pi] || d0 > dist[pi]) continue;
        done[pi] = 1;
        tris.clear();
        if (pi < nv) {
            tris = mesh.vertex_triangles(p);
        } else {
            const int e = static_cast<int>((pi - nv) / ku);
            for (int t : mesh.edge_triangles(e)) {
                if (t >= 0) tris.push_back(t);
            }
        }
        for (int t : tris) {
            gather(static_cast<std::size_t>(t));
            Vec2 pos = Vec2::Zero();
            for (const auto& [id, q] : pts) {
                if (id == p) pos = q;
            }
            for (const auto& [id, q] : pts) {
                const auto qi = static_cast<std::size_t>(id);
                if (done[qi]) continue;
                const double cand = d0 + (q - pos).norm();
                if (cand < dist[qi]) {
                    dist[qi] = cand;
                    heap.emplace(cand, id);
                }
            }
        }
    }
    dist.resize(nv);
    return dist;
}

/// Intrinsic distance field from `base_vertex`. Unreachable vertices keep
/// +inf and produce a warning. eps_solver is left at zero; see
/// calibrate_solver_error().
inline DistanceField distance_field(const MetricMesh& mesh, int base_vertex, const GeodesicOptions& opts = {}) {
    if (base_vertex < 0 || static_cast<std::size_t>(base_vertex) >= mesh.vertices.size()) {
        throw ArgumentError("distance_field: base vertex out of range");
    }
    DistanceField f;
    f.base_vertex = base_vertex;
    f.base_x = mesh.vertices[static_cast<std::size_t>(base_vertex)].x;
    f.method = opts.method;
    if (opts.method == GeodesicMethod::fast_marching) {
        f.r = FastMarching(mesh, opts.split_obtuse).solve(base_vertex);
    } else {
        f.r = steiner_dijkstra(mesh, base_vertex, opts.steiner_points);
    }
    f.unreachable = static_cast<std::size_t>(std::count(f.r.begin(), f.r.end(), kInf));
    if (f.unreachable > 0) {
        f.warnings.push_back(std::to_string(f.unreachable) + " vertices unreachable from base (disconnected mesh)");
    }
    return f;
}

/// Sup over vertices of |r - |x|| for a field on a flat mesh.
inline double plane_sup_error(const MetricMesh& mesh, const DistanceField& field) {
    double err = 0.0;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        err = std::max(err, std::abs(field.r[v] - field.x(mesh, static_cast<int>(v)).norm()));
    }
    return err;
}

struct SolverCalibration {
    double sup_error = 0.0;
    double eps_solver = 0.0;
    double plane_half_width = 0.0;
    std::size_t vertices = 0;
};

/// Error bar for a solver at mesh size target_h: twice the measured sup
/// error against |x| on a plane mesh built with the same spacing law,
/// `half_width_factor * target_h` wide. Scale-covariant in target_h.
inline SolverCalibration calibrate_solver_error(double target_h, bool graded, const GeodesicOptions& opts = {},
                                                double half_width_factor = 40.0) {
    SolverCalibration cal;
    cal.plane_half_width = half_width_factor * target_h;
    const ImmersionChart plane = make_plane(cal.plane_half_width);
    const GradingPolicy grading = graded ? GradingPolicy::graded_at(Vec2(0.0, 0.0)) : GradingPolicy::uniform();
    const MetricMesh mesh = triangulate(plane, target_h, grading);
    const int base = nearest_vertex(mesh, plane.domain(), Vec2(0.0, 0.0));
    const DistanceField f = distance_field(mesh, base, opts);
    cal.sup_error = plane_sup_error(mesh, f);
    // The solver is exact on flat meshes, so the bar is floored at round-off scale.
    cal.eps_solver = std::max(2.0 * cal.sup_error, 64.0 * std::numeric_limits<double>::epsilon() * cal.plane_half_width);
    cal.vertices = mesh.vertices.size();
    return cal;
}

/// Sup over the vertices of `coarse` of |r_coarse - r_fine|, where the mesh of
/// `fine` is a refine() of the mesh of `coarse` (shared vertices come first).
inline double nested_field_difference(const DistanceField& coarse, const DistanceField& fine) {
    if (fine.r.size() < coarse.r.size()) throw ArgumentError("nested_field_difference: fine field is smaller");
    double diff = 0.0;
    for (std::size_t v = 0; v < coarse.r.size(); ++v) {
        if (!std::isfinite(coarse.r[v]) || !std::isfinite(fine.r[v])) continue;
        diff = std::max(diff, std::abs(coarse.r[v] - fine.r[v]));
    }
    return diff;
}

/// Error bar for a field on a curved mesh: the plane calibration at the
/// same spacing, or twice the change under one nested refinement, whichever
/// is larger.
inline double solver_error_bound(const SolverCalibration& plane, double nested_difference) {
    return std::max(plane.eps_solver, 2.0 * nested_difference);
}

/// Per-triangle unit vector in R^3: the intrinsic gradient of the
/// piecewise-linear distance, pushed into the ambient triangle and
/// normalised. Triangles touching the base, with non-finite values, or with
/// gradient norm below `min_gradient_norm` (creases such as the cut locus)
/// are invalid.
struct GradientField {
    std::vector<Vec3> nu;
    std::vector<char> valid;
    std::vector<double> grad_norm;  ///< intrinsic |grad r| before normalisation
    double invalid_area_fraction = 0.0;
    std::size_t invalid_count = 0;
};

inline GradientField gradient_field(const MetricMesh& mesh, const DistanceField& field,
                                    double min_gradient_norm = 0.5) {
    GradientField g;
    const std::size_t nt = mesh.triangles.size();
    g.nu.assign(nt, Vec3::Zero());
    g.valid.assign(nt, 0);
    g.grad_norm.assign(nt, 0.0);
    double total = 0.0, bad = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = mesh.triangle_area(t);
        total += area;
        std::array<double, 3> rv{};
        bool ok = true;
        for (int j = 0; j < 3; ++j) {
            rv[static_cast<std::size_t>(j)] = field.r[static_cast<std::size_t>(tri[static_cast<std::size_t>(j)])];
            if (!std::isfinite(rv[static_cast<std::size_t>(j)])) ok = false;
            if (tri[static_cast<std::size_t>(j)] == field.base_vertex) ok = false;
        }
        if (ok) {
            const auto lay = detail::layout_triangle(mesh.side_lengths(t));
            Mat2 P;
            P.col(0) = lay[1] - lay[0];
            P.col(1) = lay[2] - lay[0];
            const Vec2 dr(rv[1] - rv[0], rv[2] - rv[0]);
            const Vec2 grad = P.transpose().inverse() * dr;
            const double gn = grad.norm();
            g.grad_norm[t] = gn;
            if (gn >= min_gradient_norm && std::isfinite(gn)) {
                Mat32 X;
                X.col(0) = mesh.vertices[static_cast<std::size_t>(tri[1])].x - mesh.vertices[static_cast<std::size_t>(tri[0])].x;
                X.col(1) = mesh.vertices[static_cast<std::size_t>(tri[2])].x - mesh.vertices[static_cast<std::size_t>(tri[0])].x;
                const Vec3 push = X * (P.inverse() * (grad / gn));
                const double pn = push.norm();
                if (pn > 0.0 && std::isfinite(pn)) {
                    g.nu[t] = push / pn;
                    g.valid[t] = 1;
                }
            }
        }
        if (!g.valid[t]) {
            bad += area;
            ++g.invalid_count;
        }
    }
    g.invalid_area_fraction = total > 0.0 ? bad / total : 0.0;
    return g;
}

} // namespace minsurf
