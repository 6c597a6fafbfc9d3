#pragma once

#include "minsurf/geodesic.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/report.hpp"
#include "minsurf/unit_ball.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace minsurf {

namespace detail {

/// Convex polygon in barycentric coordinates of a triangle (at most 5
/// corners after two half-plane cuts).
struct BaryPolygon {
    std::array<Vec3, 8> p;
    std::array<double, 8> f{};
    int n = 0;
};

inline BaryPolygon clip_half_plane(const BaryPolygon& in, double level, bool keep_above) {
    BaryPolygon out;
    auto inside = [&](double v) { return keep_above ? v >= level : v <= level; };
    for (int i = 0; i < in.n; ++i) {
        const int j = (i + 1) % in.n;
        const bool a = inside(in.f[static_cast<std::size_t>(i)]);
        const bool b = inside(in.f[static_cast<std::size_t>(j)]);
        if (a) {
            out.p[static_cast<std::size_t>(out.n)] = in.p[static_cast<std::size_t>(i)];
            out.f[static_cast<std::size_t>(out.n)] = in.f[static_cast<std::size_t>(i)];
            ++out.n;
        }
        if (a != b) {
            const double fi = in.f[static_cast<std::size_t>(i)];
            const double fj = in.f[static_cast<std::size_t>(j)];
            const double t = (level - fi) / (fj - fi);
            out.p[static_cast<std::size_t>(out.n)] =
                in.p[static_cast<std::size_t>(i)] + t * (in.p[static_cast<std::size_t>(j)] - in.p[static_cast<std::size_t>(i)]);
            out.f[static_cast<std::size_t>(out.n)] = level;
            ++out.n;
        }
    }
    return out;
}

} // namespace detail

/// Part of a triangle where a linear field lies in [lo, hi]: area as a
/// fraction of the triangle and barycentric centroid.
struct ClippedPiece {
    double fraction = 0.0;
    Vec3 centroid{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

inline ClippedPiece clip_linear(const std::array<double, 3>& f, double lo, double hi) {
    ClippedPiece piece;
    const double fmin = std::min({f[0], f[1], f[2]});
    const double fmax = std::max({f[0], f[1], f[2]});
    if (fmax < lo || fmin > hi) return piece;
    if (fmin >= lo && fmax <= hi) {
        piece.fraction = 1.0;
        return piece;
    }
    detail::BaryPolygon poly;
    poly.n = 3;
    poly.p[0] = Vec3(1, 0, 0);
    poly.p[1] = Vec3(0, 1, 0);
    poly.p[2] = Vec3(0, 0, 1);
    poly.f = {f[0], f[1], f[2]};
    if (fmin < lo) poly = detail::clip_half_plane(poly, lo, true);
    if (poly.n >= 3 && fmax > hi) poly = detail::clip_half_plane(poly, hi, false);
    if (poly.n < 3) return piece;
    // Shoelace in the (l1, l2) chart of the reference triangle, area 1/2.
    double a2 = 0.0;
    Vec3 c = Vec3::Zero();
    for (int i = 0; i < poly.n; ++i) {
        const Vec3& p = poly.p[static_cast<std::size_t>(i)];
        const Vec3& q = poly.p[static_cast<std::size_t>((i + 1) % poly.n)];
        const double cross = p[1] * q[2] - q[1] * p[2];
        a2 += cross;
        c += cross * (p + q);
    }
    if (!(std::abs(a2) > 0.0)) return piece;
    piece.fraction = std::clamp(std::abs(a2), 0.0, 1.0);
    c /= 3.0 * a2;
    c[0] = 1.0 - c[1] - c[2];
    piece.centroid = c;
    return piece;
}

inline std::vector<double> triangle_areas(const MetricMesh& mesh) {
    std::vector<double> a(mesh.triangles.size());
    for (std::size_t t = 0; t < a.size(); ++t) a[t] = mesh.triangle_area(t);
    return a;
}

/// Area of {f <= R} for the piecewise-linear interpolant of per-vertex
/// values f. Triangles with a non-finite corner (unreachable vertices) are
/// skipped.
inline double sublevel_area(const MetricMesh& mesh, const std::vector<double>& areas, const std::vector<double>& f,
                            double R) {
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const std::array<double, 3> v{f[static_cast<std::size_t>(tri[0])], f[static_cast<std::size_t>(tri[1])],
                                      f[static_cast<std::size_t>(tri[2])]};
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) continue;
        if (std::min({v[0], v[1], v[2]}) >= R) continue;
        total += areas[t] * clip_linear(v, -kInf, R).fraction;
    }
    return total;
}

/// |x - x(base)| at every vertex.
inline std::vector<double> extrinsic_values(const MetricMesh& mesh, const DistanceField& field) {
    std::vector<double> v(mesh.vertices.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = field.x(mesh, static_cast<int>(i)).norm();
    return v;
}

/// Radii beyond which the truncated mesh would be felt: 0.9 x the nearest
/// boundary vertex in r (intrinsic) and in |x| (extrinsic). +inf without
/// boundary.
struct GuardRadii {
    double intrinsic = kInf;
    double extrinsic = kInf;
    double combined() const { return std::min(intrinsic, extrinsic); }
    bool closed() const { return std::isinf(intrinsic) && std::isinf(extrinsic); }
};

inline GuardRadii guard_radii(const MetricMesh& mesh, const DistanceField& field) {
    GuardRadii g;
    double rmin = kInf, xmin = kInf;
    for (int v : mesh.boundary_vertices) {
        rmin = std::min(rmin, field.r[static_cast<std::size_t>(v)]);
        xmin = std::min(xmin, field.x(mesh, v).norm());
    }
    if (std::isfinite(rmin)) g.intrinsic = 0.9 * rmin;
    if (std::isfinite(xmin)) g.extrinsic = 0.9 * xmin;
    return g;
}

inline double guard_radius(const MetricMesh& mesh, const DistanceField& field) {
    return guard_radii(mesh, field).combined();
}

/// Smallest admissible radius: 10 x the nominal spacing.
inline double min_radius(const MetricMesh& mesh) {
    return 10.0 * (mesh.target_h > 0.0 ? mesh.target_h : mesh.h);
}

namespace detail {

inline void require_radius(const MetricMesh& mesh, double R, double guard, const char* what) {
    const double lo = min_radius(mesh);
    if (!(R >= lo * (1.0 - 1e-12)) || !(R <= guard * (1.0 + 1e-12))) {
        std::ostringstream os;
        os << what << ": radius " << R << " outside valid window [" << lo << ", " << guard << "]";
        throw RangeError(os.str());
    }
}

} // namespace detail

inline double intrinsic_density(const MetricMesh& mesh, const DistanceField& field, double R) {
    detail::require_radius(mesh, R, guard_radii(mesh, field).intrinsic, "intrinsic_density");
    return sublevel_area(mesh, triangle_areas(mesh), field.r, R) / std::pow(R, mesh.d);
}

/// Area with multiplicity of {|x| < R}, integrated over the parameter
/// domain, divided by R^d. The base image is taken from `field`.
inline double extrinsic_density(const MetricMesh& mesh, const DistanceField& field, double R) {
    detail::require_radius(mesh, R, guard_radii(mesh, field).extrinsic, "extrinsic_density");
    return sublevel_area(mesh, triangle_areas(mesh), extrinsic_values(mesh, field), R) / std::pow(R, mesh.d);
}

/// Default density tolerance: solver error at the smallest radius plus a
/// second-order quadrature term.
inline double profile_tolerance(double eps_solver, double r_min, double h) {
    return 3.0 * eps_solver / r_min + 5.0 * h * h;
}

/// `count` radii spaced geometrically from r_min to r_max inclusive.
inline std::vector<double> geometric_radii(double r_min, double r_max, int count) {
    if (count < 1 || !(r_min > 0.0) || !(r_max >= r_min)) throw ArgumentError("geometric_radii: bad schedule");
    std::vector<double> out;
    if (count == 1) return {r_min};
    const double q = std::pow(r_max / r_min, 1.0 / (count - 1));
    for (int k = 0; k < count; ++k) out.push_back(k + 1 == count ? r_max : r_min * std::pow(q, k));
    return out;
}

struct DensityProfile {
    std::vector<double> radii;
    std::vector<double> m_int;
    std::vector<double> m_ext;
    GuardRadii guard;
    double guard_radius = kInf;
    int d = 2;
    int base_vertex = 0;
    Vec2 base_u = Vec2::Zero();
    double eps_solver = 0.0;
    double h = 0.0;
    double tol_profile = 0.0;
    /// Violations of the monotone / ordering / lower-bound properties beyond
    /// tol_profile, recorded whether or not the chart is minimal.
    std::vector<std::string> findings;
    int int_decreases = 0;
    int ext_decreases = 0;
    int int_above_ext = 0;
    int below_omega = 0;

    /// Largest computed density; a lower bound for any admissible Lambda.
    double lambda() const {
        double m = 0.0;
        for (double v : m_int) m = std::max(m, v);
        for (double v : m_ext) m = std::max(m, v);
        return m;
    }
};

inline DensityProfile density_profile(const MetricMesh& mesh, const DistanceField& field,
                                      const std::vector<double>& radii) {
    if (radii.empty()) throw RangeError("density_profile: empty radius list");
    if (!std::is_sorted(radii.begin(), radii.end())) throw ArgumentError("density_profile: radii not ascending");
    DensityProfile p;
    p.guard = guard_radii(mesh, field);
    p.guard_radius = p.guard.combined();
    for (double R : radii) detail::require_radius(mesh, R, p.guard_radius, "density_profile");
    p.radii = radii;
    p.d = mesh.d;
    p.base_vertex = field.base_vertex;
    p.base_u = mesh.vertices[static_cast<std::size_t>(field.base_vertex)].u;
    p.eps_solver = field.eps_solver;
    p.h = mesh.target_h > 0.0 ? mesh.target_h : mesh.h;
    p.tol_profile = profile_tolerance(p.eps_solver, radii.front(), p.h);

    const auto areas = triangle_areas(mesh);
    const auto ext = extrinsic_values(mesh, field);
    for (double R : radii) {
        const double scale = std::pow(R, mesh.d);
        p.m_int.push_back(sublevel_area(mesh, areas, field.r, R) / scale);
        p.m_ext.push_back(sublevel_area(mesh, areas, ext, R) / scale);
    }

    const double tol = p.tol_profile;
    const double w = omega(mesh.d);
    auto note = [&](const std::string& what, std::size_t k, double lhs, double rhs) {
        std::ostringstream os;
        os.precision(10);
        os << what << " at R=" << p.radii[k] << ": " << lhs << " vs " << rhs;
        p.findings.push_back(os.str());
    };
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (k > 0 && p.m_int[k] < p.m_int[k - 1] - tol) {
            ++p.int_decreases;
            note("m_int decreases", k, p.m_int[k], p.m_int[k - 1]);
        }
        if (k > 0 && p.m_ext[k] < p.m_ext[k - 1] - tol) {
            ++p.ext_decreases;
            note("m_ext decreases", k, p.m_ext[k], p.m_ext[k - 1]);
        }
        if (p.m_int[k] > p.m_ext[k] + tol) {
            ++p.int_above_ext;
            note("m_int exceeds m_ext", k, p.m_int[k], p.m_ext[k]);
        }
        if (p.m_int[k] < w - tol) {
            ++p.below_omega;
            note("m_int below omega_d", k, p.m_int[k], w);
        }
    }
    return p;
}

struct LimitEstimate {
    bool infinite = false;
    double value = 0.0;
    double error_bar = 0.0;
    double slope = 0.0;  ///< fitted c in m_inf - c/R
    std::size_t fit_points = 0;
    std::string method;
};

/// Extrapolated R -> infinity limit of a sampled density.
///
/// Divergence is declared when the last three increments are nondecreasing
/// and the last one exceeds omega_d/10. Otherwise m_inf - c/R is fitted by
/// least squares over the top half of the radii. The error bar is the
/// larger of (a) the largest fit residual plus the spread of the intercept
/// over the fit windows that drop one end point and (b) the extrapolation
/// increment |m_inf - m(R_last)|, so the model is never trusted beyond the
/// size of its own correction.
inline LimitEstimate limit_estimate(const std::vector<double>& radii, const std::vector<double>& m, int d) {
    const std::size_t n = radii.size();
    if (n < 4 || m.size() != n) throw ArgumentError("limit_estimate: needs at least 4 profile points");
    LimitEstimate est;
    const double d1 = m[n - 3] - m[n - 4];
    const double d2 = m[n - 2] - m[n - 3];
    const double d3 = m[n - 1] - m[n - 2];
    if (d1 <= d2 && d2 <= d3 && d3 > omega(d) / 10.0) {
        est.infinite = true;
        est.value = kInf;
        est.method = "divergent: last three increments nondecreasing, last > omega_d/10";
        return est;
    }

    struct Fit {
        double a = 0.0, c = 0.0, max_res = 0.0;
    };
    auto fit = [&](std::size_t first, std::size_t last) {
        Fit f;
        const double cnt = static_cast<double>(last - first);
        double sx = 0.0, sy = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            sx += 1.0 / radii[k];
            sy += m[k];
        }
        const double xb = sx / cnt, yb = sy / cnt;
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            const double dx = 1.0 / radii[k] - xb;
            sxx += dx * dx;
            sxy += dx * (m[k] - yb);
        }
        const double b = sxx > 0.0 ? sxy / sxx : 0.0;
        f.a = yb - b * xb;
        f.c = -b;
        for (std::size_t k = first; k < last; ++k) {
            f.max_res = std::max(f.max_res, std::abs(m[k] - (f.a - f.c / radii[k])));
        }
        return f;
    };

    const std::size_t first = n / 2;
    const Fit main = fit(first, n);
    est.value = main.a;
    est.slope = main.c;
    est.fit_points = n - first;
    double spread = 0.0;
    if (n - first >= 3) {
        spread = std::max(std::abs(fit(first + 1, n).a - main.a), std::abs(fit(first, n - 1).a - main.a));
    } else {
        spread = std::abs(fit(first - 1, n).a - main.a);
    }
    est.error_bar = std::max(main.max_res + spread, std::abs(main.a - m[n - 1]));
    est.method = "least-squares m_inf - c/R over top half";
    return est;
}

inline LimitEstimate limit_estimate(const DensityProfile& p, bool extrinsic) {
    return limit_estimate(p.radii, extrinsic ? p.m_ext : p.m_int, p.d);
}

inline Json to_json(const LimitEstimate& e) {
    Json j;
    j["infinite"] = e.infinite;
    j["value"] = num(e.value);
    j["error_bar"] = num(e.error_bar);
    j["slope"] = num(e.slope);
    j["fit_points"] = e.fit_points;
    j["method"] = e.method;
    return j;
}

inline Finding limit_equality_check(const LimitEstimate& p_int, const LimitEstimate& p_ext, double tol_limit = 0.0) {
    Finding f;
    f.check = "limits";
    f.values["int"] = to_json(p_int);
    f.values["ext"] = to_json(p_ext);
    f.tolerances["tol_limit"] = tol_limit;
    if (p_int.infinite && p_ext.infinite) {
        f.status = Status::pass;
        f.message = "both limits infinite";
        return f;
    }
    if (p_int.infinite != p_ext.infinite) {
        f.status = Status::fail;
        f.message = std::string("one limit infinite, the other finite (") + (p_int.infinite ? "intrinsic" : "extrinsic") +
                    " diverges)";
        return f;
    }
    const double gap = std::abs(p_int.value - p_ext.value);
    const double allowed = p_int.error_bar + p_ext.error_bar + tol_limit;
    f.values["gap"] = gap;
    f.tolerances["allowed"] = allowed;
    f.status = gap <= allowed ? Status::pass : Status::fail;
    std::ostringstream os;
    os << "|v_int - v_ext| = " << gap << (gap <= allowed ? " <= " : " > ") << allowed;
    f.message = os.str();
    return f;
}

/// Vertexwise check of {|x| < R} within {r < (1+eps) R + eps_solver}.
inline Finding ball_sandwich_check(const MetricMesh& mesh, const DistanceField& field, double R, double eps) {
    const GuardRadii g = guard_radii(mesh, field);
    detail::require_radius(mesh, (1.0 + eps) * R, g.intrinsic, "ball_sandwich_check");
    detail::require_radius(mesh, R, g.extrinsic, "ball_sandwich_check");
    const double bound = (1.0 + eps) * R + field.eps_solver;
    double worst_r = 0.0, worst_ratio = 0.0;
    std::size_t inside = 0, outside = 0;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const double xn = field.x(mesh, static_cast<int>(v)).norm();
        if (!(xn < R)) continue;
        ++inside;
        const double r = field.r[v];
        worst_r = std::max(worst_r, r);
        if (!(r < bound)) ++outside;
        if (xn >= 0.5 * R) worst_ratio = std::max(worst_ratio, r / xn);
    }
    Finding f;
    f.check = "sandwich";
    f.values["R"] = R;
    f.values["eps"] = eps;
    f.values["vertices_in_ball"] = inside;
    f.values["max_r_in_ball"] = num(worst_r);
    f.values["worst_ratio_shell"] = worst_ratio;
    f.values["violations"] = outside;
    f.tolerances["r_bound"] = bound;
    f.tolerances["eps_solver"] = field.eps_solver;
    f.status = outside == 0 ? Status::pass : Status::fail;
    std::ostringstream os;
    os << "max r over {|x|<" << R << "} = " << worst_r << (outside == 0 ? " < " : " >= ") << bound;
    f.message = os.str();
    return f;
}

} // namespace minsurf
