#pragma once

#include "minsurf/chart.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace minsurf {

struct MeshVertex {
    Vec2 u;  ///< parameter point
    Vec3 x;  ///< ambient point i(u)
};

struct MeshEdge {
    int a = 0;
    int b = 0;
    double length = 0.0;  ///< intrinsic (pullback-metric) length
};

/// Spacing law for triangulate(). Graded meshes use target_h * fine_factor
/// at the base point and grow linearly with intrinsic distance (slope
/// `growth`, i.e. roughly geometric growth per cell) until target_h.
struct GradingPolicy {
    bool graded = false;
    Vec2 base_u{0.0, 0.0};
    double fine_factor = 0.25;
    double growth = 0.04;

    static GradingPolicy uniform() { return {}; }
    static GradingPolicy graded_at(const Vec2& base) {
        GradingPolicy g;
        g.graded = true;
        g.base_u = base;
        return g;
    }

    double spacing(double target_h, double dist) const {
        if (!graded) return target_h;
        return std::min(target_h, target_h * fine_factor + growth * dist);
    }
};

inline constexpr std::size_t kDefaultVertexCap = 5'000'000;

/// Triangulation of a chart's parameter domain carrying intrinsic edge
/// lengths and ambient vertex positions. Seams of periodic domains are
/// identified, so a vertex on a seam appears once.
class MetricMesh {
public:
    std::string chart_label;
    int d = 2;
    int N = 3;
    double h = 0.0;         ///< max intrinsic edge length
    double target_h = 0.0;  ///< nominal spacing the mesh was built for
    std::vector<MeshVertex> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<MeshEdge> edges;
    std::vector<int> boundary_vertices;

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_triangles() const { return triangles.size(); }

    static std::uint64_t edge_key(int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    }

    int find_edge(int a, int b) const {
        const auto it = edge_lookup_.find(edge_key(a, b));
        return it == edge_lookup_.end() ? -1 : it->second;
    }

    double edge_length(int a, int b) const {
        const int e = find_edge(a, b);
        if (e < 0) throw ArgumentError("no edge between vertices");
        return edges[static_cast<std::size_t>(e)].length;
    }

    /// Edge index opposite corner k of triangle t.
    int triangle_edge(std::size_t t, int k) const { return tri_edges_[t][static_cast<std::size_t>(k)]; }

    /// Side lengths of triangle t; entry k is opposite corner k.
    std::array<double, 3> side_lengths(std::size_t t) const {
        const auto& te = tri_edges_[t];
        return {edges[static_cast<std::size_t>(te[0])].length, edges[static_cast<std::size_t>(te[1])].length,
                edges[static_cast<std::size_t>(te[2])].length};
    }

    double triangle_area(std::size_t t) const { return heron_area(side_lengths(t)); }

    double total_area() const {
        double a = 0.0;
        for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
        return a;
    }

    const std::vector<int>& vertex_triangles(int v) const { return vertex_tris_[static_cast<std::size_t>(v)]; }
    const std::vector<int>& vertex_neighbors(int v) const { return vertex_nbrs_[static_cast<std::size_t>(v)]; }

    /// Triangles on each side of edge e (-1 where absent).
    const std::array<int, 2>& edge_triangles(int e) const { return edge_tris_[static_cast<std::size_t>(e)]; }

    bool is_boundary(int v) const { return is_boundary_[static_cast<std::size_t>(v)] != 0; }

    /// Heron's formula in Kahan's cancellation-free ordering; 0 for
    /// degenerate or violated triangle inequalities.
    static double heron_area(std::array<double, 3> l) {
        std::sort(l.begin(), l.end(), std::greater<>());
        const double a = l[0], b = l[1], c = l[2];
        const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
        return p > 0.0 ? 0.25 * std::sqrt(p) : 0.0;
    }

    /// Rebuilds adjacency from triangles. When `edges` is empty it is filled
    /// from the triangles with zero lengths (lengths assigned by the caller).
    void build_topology() {
        const bool fill_edges = edges.empty();
        edge_lookup_.clear();
        edge_lookup_.reserve(edges.empty() ? triangles.size() * 2 : edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e) {
            edge_lookup_.emplace(edge_key(edges[e].a, edges[e].b), static_cast<int>(e));
        }
        tri_edges_.assign(triangles.size(), {-1, -1, -1});
        for (std::size_t t = 0; t < triangles.size(); ++t) {
            for (int k = 0; k < 3; ++k) {
                const int a = triangles[t][static_cast<std::size_t>((k + 1) % 3)];
                const int b = triangles[t][static_cast<std::size_t>((k + 2) % 3)];
                int e = find_edge(a, b);
                if (e < 0) {
                    if (!fill_edges) throw FormatError("triangle references an edge missing from the edge list");
                    e = static_cast<int>(edges.size());
                    edges.push_back({std::min(a, b), std::max(a, b), 0.0});
                    edge_lookup_.emplace(edge_key(a, b), e);
                }
                tri_edges_[t][static_cast<std::size_t>(k)] = e;
            }
        }
        vertex_tris_.assign(vertices.size(), {});
        edge_tris_.assign(edges.size(), {-1, -1});
        for (std::size_t t = 0; t < triangles.size(); ++t) {
            for (int k = 0; k < 3; ++k) {
                vertex_tris_[static_cast<std::size_t>(triangles[t][static_cast<std::size_t>(k)])].push_back(
                    static_cast<int>(t));
                auto& et = edge_tris_[static_cast<std::size_t>(tri_edges_[t][static_cast<std::size_t>(k)])];
                if (et[0] < 0) {
                    et[0] = static_cast<int>(t);
                } else if (et[1] < 0) {
                    et[1] = static_cast<int>(t);
                } else {
                    non_manifold_edges_ = true;
                }
            }
        }
        vertex_nbrs_.assign(vertices.size(), {});
        for (const auto& e : edges) {
            vertex_nbrs_[static_cast<std::size_t>(e.a)].push_back(e.b);
            vertex_nbrs_[static_cast<std::size_t>(e.b)].push_back(e.a);
        }
        for (auto& n : vertex_nbrs_) std::sort(n.begin(), n.end());
        is_boundary_.assign(vertices.size(), 0);
        for (int v : boundary_vertices) is_boundary_[static_cast<std::size_t>(v)] = 1;
        h = 0.0;
        for (const auto& e : edges) h = std::max(h, e.length);
    }

    bool has_non_manifold_edges() const { return non_manifold_edges_; }

private:
    std::unordered_map<std::uint64_t, int> edge_lookup_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<std::vector<int>> vertex_tris_;
    std::vector<std::vector<int>> vertex_nbrs_;
    std::vector<std::array<int, 2>> edge_tris_;
    std::vector<char> is_boundary_;
    bool non_manifold_edges_ = false;
};

/// Length of the parameter segment [ua, ub] under the pullback metric by
/// 3-point Gauss quadrature of sqrt(du^T g du). Periodic seams are crossed
/// along the shortest representative.
inline double edge_length(const ImmersionChart& chart, const Vec2& ua, const Vec2& ub) {
    detail::require_in_domain(chart, ua);
    detail::require_in_domain(chart, ub);
    const Vec2 dlt = chart.domain().delta(ua, ub);
    static constexpr std::array<double, 3> nodes{0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
    static constexpr std::array<double, 3> weights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    double len = 0.0;
    for (std::size_t q = 0; q < 3; ++q) {
        const Vec2 u = ua + nodes[q] * dlt;
        len += weights[q] * std::sqrt(dlt.dot(chart.metric(u) * dlt));
    }
    return len;
}

namespace detail {

/// Nodes on [anchor, end] (either orientation) equidistributing
/// stretch(s) / spacing(dist(s)), where dist accumulates stretch from the
/// anchor (plus `offset`). Both endpoints are included; returned in
/// anchor-to-end order.
inline std::vector<double> march_nodes(double anchor, double end, double offset,
                                       const std::function<double(double)>& stretch,
                                       const std::function<double(double)>& spacing, int min_cells) {
    constexpr int kSamples = 1024;
    std::vector<double> cum(kSamples + 1, 0.0);
    const double ds = (end - anchor) / kSamples;
    const double step = std::abs(ds);
    double dist = 0.0;
    double prev_l = stretch(anchor);
    double prev_rho = prev_l / spacing(std::hypot(offset, 0.0));
    for (int i = 1; i <= kSamples; ++i) {
        const double s = anchor + ds * i;
        const double l = stretch(s);
        dist += 0.5 * (l + prev_l) * step;
        const double rho = l / spacing(std::hypot(offset, dist));
        cum[static_cast<std::size_t>(i)] = cum[static_cast<std::size_t>(i - 1)] + 0.5 * (rho + prev_rho) * step;
        prev_l = l;
        prev_rho = rho;
    }
    const double total = cum.back();
    const int n = std::max(min_cells, static_cast<int>(std::ceil(total - 1e-9)));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(anchor);
    std::size_t j = 0;
    for (int k = 1; k < n; ++k) {
        const double target = total * k / n;
        while (j + 1 < cum.size() && cum[j + 1] < target) ++j;
        const double c0 = cum[j], c1 = cum[j + 1];
        const double frac = c1 > c0 ? (target - c0) / (c1 - c0) : 0.0;
        out.push_back(anchor + ds * (static_cast<double>(j) + frac));
    }
    out.push_back(end);
    return out;
}

/// Cumulative metric length from the anchor to each node.
inline std::vector<double> node_distances(const std::vector<double>& nodes,
                                          const std::function<double(double)>& stretch) {
    std::vector<double> dist(nodes.size(), 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double a = nodes[i - 1], b = nodes[i];
        dist[i] = dist[i - 1] + std::abs(b - a) * (stretch(a) + 4.0 * stretch(0.5 * (a + b)) + stretch(b)) / 6.0;
    }
    return dist;
}

struct Row {
    std::vector<int> ids;     ///< vertex indices in increasing t
    std::vector<double> t;    ///< along-row coordinate
};

class Stitcher {
public:
    Stitcher(const ImmersionChart& chart, const std::vector<Vec2>& params,
             std::vector<std::array<int, 3>>& tris)
        : chart_(chart), params_(params), tris_(tris) {}

    void stitch(const Row& a, const Row& b, bool periodic) {
        std::vector<int> ai = a.ids, bi = b.ids;
        if (periodic) {
            ai.push_back(a.ids.front());
            bi.push_back(b.ids.front());
        }
        const std::size_t m = ai.size() - 1, n = bi.size() - 1;
        std::size_t i = 0, k = 0;
        while (i < m || k < n) {
            bool advance_a;
            if (i == m) {
                advance_a = false;
            } else if (k == n) {
                advance_a = true;
            } else {
                const double da = diag2(ai[i + 1], bi[k]);
                const double db = diag2(ai[i], bi[k + 1]);
                advance_a = !(db < da * (1.0 - 1e-9));
            }
            if (advance_a) {
                tris_.push_back({ai[i], bi[k], ai[i + 1]});
                ++i;
            } else {
                tris_.push_back({ai[i], bi[k], bi[k + 1]});
                ++k;
            }
        }
    }

    void fan(int centre, const Row& ring) {
        const std::size_t n = ring.ids.size();
        for (std::size_t i = 0; i < n; ++i) tris_.push_back({centre, ring.ids[i], ring.ids[(i + 1) % n]});
    }

private:
    double diag2(int p, int q) const {
        const Vec2& up = params_[static_cast<std::size_t>(p)];
        const Vec2 dlt = chart_.domain().delta(up, params_[static_cast<std::size_t>(q)]);
        return dlt.dot(chart_.metric(up + 0.5 * dlt) * dlt);
    }

    const ImmersionChart& chart_;
    const std::vector<Vec2>& params_;
    std::vector<std::array<int, 3>>& tris_;
};

inline void check_budget(std::size_t count, std::size_t cap) {
    if (count > cap) {
        throw ResourceError("vertex budget exceeded: " + std::to_string(count) + " > " + std::to_string(cap));
    }
}

/// Computes ambient positions, edge lengths and topology.
inline MetricMesh assemble(const ImmersionChart& chart, std::vector<Vec2> params,
                           std::vector<std::array<int, 3>> tris, std::vector<int> boundary, double target_h) {
    MetricMesh mesh;
    mesh.chart_label = chart.label();
    mesh.d = chart.d();
    mesh.N = chart.N();
    mesh.target_h = target_h;
    mesh.vertices.reserve(params.size());
    for (const Vec2& u : params) mesh.vertices.push_back({u, chart.map(u)});
    mesh.triangles = std::move(tris);
    std::sort(boundary.begin(), boundary.end());
    boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
    mesh.boundary_vertices = std::move(boundary);
    mesh.build_topology();
    for (auto& e : mesh.edges) {
        e.length = edge_length(chart, mesh.vertices[static_cast<std::size_t>(e.a)].u,
                               mesh.vertices[static_cast<std::size_t>(e.b)].u);
    }
    mesh.build_topology();
    return mesh;
}

inline MetricMesh triangulate_rectangle(const ImmersionChart& chart, double target_h, const GradingPolicy& grading,
                                        std::size_t vertex_cap) {
    const ParamDomain& dom = chart.domain();
    if (dom.periodic[0]) throw ArgumentError("triangulate: only the second parameter may be periodic");
    const bool periodic = dom.periodic[1];
    const Vec2 base = grading.graded ? dom.wrap(grading.base_u) : Vec2(dom.lo[0], dom.lo[1]);
    const auto spacing = [&](double dist) { return grading.spacing(target_h, dist); };

    // Row stretch: worst-case metric factor along the first axis.
    constexpr int kRowSamples = 48;
    const auto stretch0 = [&](double s) {
        double best = 0.0;
        for (int j = 0; j <= kRowSamples; ++j) {
            const double t = dom.lo[1] + (dom.hi[1] - dom.lo[1]) * j / kRowSamples;
            best = std::max(best, std::sqrt(chart.metric(Vec2(s, t))(0, 0)));
        }
        return best;
    };

    std::vector<double> rows;
    std::vector<double> row_dist;
    {
        const double b0 = std::clamp(base[0], dom.lo[0], dom.hi[0]);
        std::vector<double> lower, upper;
        if (b0 > dom.lo[0]) lower = march_nodes(b0, dom.lo[0], 0.0, stretch0, spacing, 1);
        if (b0 < dom.hi[0]) upper = march_nodes(b0, dom.hi[0], 0.0, stretch0, spacing, 1);
        const auto dl = lower.empty() ? std::vector<double>{} : node_distances(lower, stretch0);
        const auto du = upper.empty() ? std::vector<double>{} : node_distances(upper, stretch0);
        for (std::size_t i = lower.size(); i-- > 1;) {
            rows.push_back(lower[i]);
            row_dist.push_back(dl[i]);
        }
        rows.push_back(b0);
        row_dist.push_back(0.0);
        for (std::size_t i = 1; i < upper.size(); ++i) {
            rows.push_back(upper[i]);
            row_dist.push_back(du[i]);
        }
    }

    std::vector<Vec2> params;
    std::vector<Row> row_nodes;
    std::vector<int> boundary;
    const double b1 = base[1];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double s = rows[r];
        const auto stretch1 = [&](double t) { return std::sqrt(chart.metric(Vec2(s, t))(1, 1)); };
        std::vector<double> ts;
        if (periodic) {
            const double half = 0.5 * dom.period(1);
            const auto fwd = march_nodes(b1, b1 + half, row_dist[r], stretch1, spacing, 2);
            const auto bwd = march_nodes(b1, b1 - half, row_dist[r], stretch1, spacing, 2);
            for (std::size_t i = bwd.size(); i-- > 1;) ts.push_back(bwd[i]);
            for (std::size_t i = 0; i + 1 < fwd.size(); ++i) ts.push_back(fwd[i]);
        } else {
            const double bb = std::clamp(b1, dom.lo[1], dom.hi[1]);
            if (bb > dom.lo[1]) {
                const auto bwd = march_nodes(bb, dom.lo[1], row_dist[r], stretch1, spacing, 1);
                for (std::size_t i = bwd.size(); i-- > 1;) ts.push_back(bwd[i]);
            }
            ts.push_back(bb);
            if (bb < dom.hi[1]) {
                const auto fwd = march_nodes(bb, dom.hi[1], row_dist[r], stretch1, spacing, 1);
                for (std::size_t i = 1; i < fwd.size(); ++i) ts.push_back(fwd[i]);
            }
        }
        check_budget(params.size() + ts.size(), vertex_cap);
        Row row;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const int id = static_cast<int>(params.size());
            params.push_back(dom.wrap(Vec2(s, ts[i])));
            row.ids.push_back(id);
            row.t.push_back(ts[i]);
            const bool edge_row = (r == 0 || r + 1 == rows.size());
            const bool edge_col = !periodic && (i == 0 || i + 1 == ts.size());
            if (edge_row || edge_col) boundary.push_back(id);
        }
        row_nodes.push_back(std::move(row));
    }

    std::vector<std::array<int, 3>> tris;
    Stitcher stitcher(chart, params, tris);
    for (std::size_t r = 0; r + 1 < row_nodes.size(); ++r) stitcher.stitch(row_nodes[r], row_nodes[r + 1], periodic);
    return assemble(chart, std::move(params), std::move(tris), std::move(boundary), target_h);
}

inline MetricMesh triangulate_disk(const ImmersionChart& chart, double target_h, const GradingPolicy& grading,
                                   std::size_t vertex_cap) {
    const ParamDomain& dom = chart.domain();
    const double rmax = dom.radius;
    const Vec2 base = grading.graded ? grading.base_u : Vec2(0.0, 0.0);
    const double rb = std::min(base.norm(), rmax);
    const double phib = rb > 0.0 ? std::atan2(base[1], base[0]) : 0.0;
    const auto spacing = [&](double dist) { return grading.spacing(target_h, dist); };

    constexpr int kRingSamples = 48;
    const auto stretch0 = [&](double rho) {
        double best = 0.0;
        for (int j = 0; j < kRingSamples; ++j) {
            const double phi = 2.0 * kPi * j / kRingSamples;
            const Vec2 dir(std::cos(phi), std::sin(phi));
            best = std::max(best, std::sqrt(dir.dot(chart.metric(rho * dir) * dir)));
        }
        return best;
    };

    std::vector<double> radii;
    std::vector<double> ring_dist;
    {
        std::vector<double> lower, upper;
        if (rb > 0.0) lower = march_nodes(rb, 0.0, 0.0, stretch0, spacing, 1);
        if (rb < rmax) upper = march_nodes(rb, rmax, 0.0, stretch0, spacing, 1);
        const auto dl = lower.empty() ? std::vector<double>{} : node_distances(lower, stretch0);
        const auto du = upper.empty() ? std::vector<double>{} : node_distances(upper, stretch0);
        for (std::size_t i = lower.size(); i-- > 1;) {
            radii.push_back(lower[i]);
            ring_dist.push_back(dl[i]);
        }
        radii.push_back(rb);
        ring_dist.push_back(0.0);
        for (std::size_t i = 1; i < upper.size(); ++i) {
            radii.push_back(upper[i]);
            ring_dist.push_back(du[i]);
        }
    }

    std::vector<Vec2> params{Vec2(0.0, 0.0)};
    std::vector<Row> rings;
    std::vector<int> boundary;
    for (std::size_t r = 1; r < radii.size(); ++r) {
        const double rho = radii[r];
        const auto stretch1 = [&](double phi) {
            const Vec2 tan(-std::sin(phi), std::cos(phi));
            return rho * std::sqrt(tan.dot(chart.metric(rho * Vec2(std::cos(phi), std::sin(phi))) * tan));
        };
        const auto fwd = march_nodes(phib, phib + kPi, ring_dist[r], stretch1, spacing, 3);
        const auto bwd = march_nodes(phib, phib - kPi, ring_dist[r], stretch1, spacing, 3);
        std::vector<double> phis;
        for (std::size_t i = bwd.size(); i-- > 1;) phis.push_back(bwd[i]);
        for (std::size_t i = 0; i + 1 < fwd.size(); ++i) phis.push_back(fwd[i]);
        check_budget(params.size() + phis.size(), vertex_cap);
        Row ring;
        for (double phi : phis) {
            const int id = static_cast<int>(params.size());
            params.push_back(rho * Vec2(std::cos(phi), std::sin(phi)));
            ring.ids.push_back(id);
            ring.t.push_back(phi);
            if (r + 1 == radii.size()) boundary.push_back(id);
        }
        rings.push_back(std::move(ring));
    }

    std::vector<std::array<int, 3>> tris;
    Stitcher stitcher(chart, params, tris);
    stitcher.fan(0, rings.front());
    for (std::size_t r = 0; r + 1 < rings.size(); ++r) stitcher.stitch(rings[r], rings[r + 1], true);
    return assemble(chart, std::move(params), std::move(tris), std::move(boundary), target_h);
}

} // namespace detail

/// Structured triangulation of the chart's domain: rows along the first
/// parameter, nodes along the second with metric-adapted spacing, stitched
/// by shortest diagonal. Disks use concentric rings around the origin. The
/// grading base point is always a mesh vertex.
inline MetricMesh triangulate(const ImmersionChart& chart, double target_h,
                              const GradingPolicy& grading = GradingPolicy::uniform(),
                              std::size_t vertex_cap = kDefaultVertexCap) {
    if (!(target_h > 0.0)) throw ArgumentError("triangulate: target_h must be positive");
    if (grading.graded) detail::require_in_domain(chart, grading.base_u);
    if (chart.domain().shape == DomainShape::disk) return detail::triangulate_disk(chart, target_h, grading, vertex_cap);
    return detail::triangulate_rectangle(chart, target_h, grading, vertex_cap);
}

/// 1-to-4 midpoint subdivision; midpoints are re-evaluated through the chart.
inline MetricMesh refine(const MetricMesh& mesh, const ImmersionChart& chart,
                         std::size_t vertex_cap = kDefaultVertexCap) {
    if (mesh.chart_label != chart.label()) throw ArgumentError("refine: chart does not match mesh");
    const ParamDomain& dom = chart.domain();
    detail::check_budget(mesh.vertices.size() + mesh.edges.size(), vertex_cap);
    std::vector<Vec2> params;
    params.reserve(mesh.vertices.size() + mesh.edges.size());
    for (const auto& v : mesh.vertices) params.push_back(v.u);
    const int nv = static_cast<int>(mesh.vertices.size());
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        const auto& edge = mesh.edges[e];
        const Vec2& ua = mesh.vertices[static_cast<std::size_t>(edge.a)].u;
        const Vec2& ub = mesh.vertices[static_cast<std::size_t>(edge.b)].u;
        Vec2 mid = dom.wrap(ua + 0.5 * dom.delta(ua, ub));
        // Curved domain boundaries are followed, not their chords.
        if (dom.shape == DomainShape::disk && mesh.edge_triangles(static_cast<int>(e))[1] < 0 && mid.norm() > 0.0) {
            mid *= dom.radius / mid.norm();
        }
        params.push_back(mid);
    }
    std::vector<std::array<int, 3>> tris;
    tris.reserve(mesh.triangles.size() * 4);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        // m[k] is the midpoint of the edge opposite corner k.
        std::array<int, 3> m{};
        for (int k = 0; k < 3; ++k) m[static_cast<std::size_t>(k)] = nv + mesh.triangle_edge(t, k);
        tris.push_back({tri[0], m[2], m[1]});
        tris.push_back({tri[1], m[0], m[2]});
        tris.push_back({tri[2], m[1], m[0]});
        tris.push_back({m[0], m[1], m[2]});
    }
    std::vector<int> boundary = mesh.boundary_vertices;
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        const auto& et = mesh.edge_triangles(static_cast<int>(e));
        if (et[1] < 0) boundary.push_back(nv + static_cast<int>(e));
    }
    return detail::assemble(chart, std::move(params), std::move(tris), std::move(boundary), 0.5 * mesh.target_h);
}

/// Index of the vertex closest to `u` in parameter space.
inline int nearest_vertex(const MetricMesh& mesh, const ParamDomain& domain, const Vec2& u) {
    int best = -1;
    double best_d = kInf;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const double dd = domain.delta(u, mesh.vertices[i].u).squaredNorm();
        if (dd < best_d) {
            best_d = dd;
            best = static_cast<int>(i);
        }
    }
    return best;
}

/// Empty string when every interior edge borders two triangles, boundary
/// edges join boundary vertices, and all triangles are non-degenerate.
inline std::string validate_mesh(const MetricMesh& mesh) {
    if (mesh.has_non_manifold_edges()) return "edge shared by more than two triangles";
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        const auto& et = mesh.edge_triangles(static_cast<int>(e));
        if (et[0] < 0) return "edge without triangles";
        if (et[1] < 0 && !(mesh.is_boundary(mesh.edges[e].a) && mesh.is_boundary(mesh.edges[e].b))) {
            return "open edge between non-boundary vertices";
        }
    }
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) return "repeated vertex in triangle";
        auto l = mesh.side_lengths(t);
        std::sort(l.begin(), l.end());
        if (!(l[0] + l[1] > l[2])) return "triangle violates strict triangle inequality";
    }
    return {};
}

} // namespace minsurf
