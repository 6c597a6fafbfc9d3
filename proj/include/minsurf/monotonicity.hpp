#pragma once

#include "minsurf/chart.hpp"
#include "minsurf/density.hpp"
#include "minsurf/geodesic.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/report.hpp"
#include "minsurf/unit_ball.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace minsurf {

/// |Delta |x|^2 - 2d - 2 x.H| at u. The Laplacian is evaluated in
/// divergence form (1/sqrt g) d_i(sqrt g g^ij d_j |x|^2) with fourth-order
/// differences of the flux, independently of the second derivatives used
/// for H. With include_h = false the x.H term is dropped (negative control).
inline double laplacian_identity_check(const ImmersionChart& chart, const Vec2& u, bool include_h = true,
                                       double step = 1e-3) {
    detail::require_in_domain(chart, u);
    detail::checked_inverse(chart.metric(u), chart.label());

    auto flux = [&](const Vec2& p) {
        const Mat32 jac = chart.jacobian(p);
        const Mat2 g = jac.transpose() * jac;
        const Vec3 x = chart.map(p);
        const Vec2 df = 2.0 * (jac.transpose() * x);
        return Vec2(std::sqrt(g.determinant()) * (g.inverse() * df));
    };
    double div = 0.0;
    for (int i = 0; i < 2; ++i) {
        Vec2 e = Vec2::Zero();
        e[i] = step;
        const double d1 = flux(u + e)[i] - flux(u - e)[i];
        const double d2 = flux(u + 2.0 * e)[i] - flux(u - 2.0 * e)[i];
        div += (8.0 * d1 - d2) / (12.0 * step);
    }
    const double lap = div / std::sqrt(chart.metric(u).determinant());
    double defect = lap - 2.0 * chart.d();
    if (include_h) defect -= 2.0 * chart.map(u).dot(mean_curvature(chart, u));
    return std::abs(defect);
}

/// Both evaluations of the error integrand at one point.
struct ErrorIntegrand {
    double primary = 0.0;  ///< [(r - |x|) + (|x|/2)|x/|x| - nu|^2] / r^(d+1)
    double dual = 0.0;     ///< (r - x.nu) / r^(d+1)
};

inline ErrorIntegrand error_integrand(double r, const Vec3& x, const Vec3& nu, int d) {
    ErrorIntegrand e;
    const double xn = x.norm();
    const double w = 1.0 / std::pow(r, d + 1);
    const double sq = xn > 0.0 ? (x / xn - nu).squaredNorm() : 0.0;
    e.primary = ((r - xn) + 0.5 * xn * sq) * w;
    e.dual = (r - x.dot(nu)) * w;
    return e;
}

struct ErrorIntegral {
    double value = 0.0;
    double dual_value = 0.0;
    double max_form_gap = 0.0;  ///< largest per-piece |primary - dual| relative to max(1, |primary|)
    double min_integrand = kInf;
    double annulus_area = 0.0;
    double excluded_area = 0.0;
    double excluded_area_fraction = 0.0;
    std::vector<std::string> warnings;
};

/// Midpoint quadrature over {R1 <= r <= R2}, each triangle clipped to the
/// annulus and evaluated at the centroid of the clipped piece. Invalid
/// gradient triangles are left out and their area reported.
inline ErrorIntegral annulus_error_integral(const MetricMesh& mesh, const DistanceField& field,
                                            const GradientField& grad, double R1, double R2) {
    if (!(R1 < R2)) throw RangeError("annulus_error_integral: need R1 < R2");
    const GuardRadii g = guard_radii(mesh, field);
    detail::require_radius(mesh, R1, g.intrinsic, "annulus_error_integral");
    detail::require_radius(mesh, R2, g.intrinsic, "annulus_error_integral");
    ErrorIntegral out;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        std::array<double, 3> rv{};
        for (int k = 0; k < 3; ++k) rv[static_cast<std::size_t>(k)] = field.r[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])];
        if (!std::isfinite(rv[0]) || !std::isfinite(rv[1]) || !std::isfinite(rv[2])) continue;
        const ClippedPiece piece = clip_linear(rv, R1, R2);
        if (piece.fraction <= 0.0) continue;
        const double area = mesh.triangle_area(t) * piece.fraction;
        out.annulus_area += area;
        if (!grad.valid[t]) {
            out.excluded_area += area;
            continue;
        }
        double r = 0.0;
        Vec3 x = Vec3::Zero();
        for (int k = 0; k < 3; ++k) {
            const double l = piece.centroid[k];
            r += l * rv[static_cast<std::size_t>(k)];
            x += l * field.x(mesh, tri[static_cast<std::size_t>(k)]);
        }
        const ErrorIntegrand e = error_integrand(r, x, grad.nu[t], mesh.d);
        out.value += area * e.primary;
        out.dual_value += area * e.dual;
        out.min_integrand = std::min(out.min_integrand, e.primary);
        out.max_form_gap = std::max(out.max_form_gap, std::abs(e.primary - e.dual) / std::max(1.0, std::abs(e.primary)));
    }
    out.excluded_area_fraction = out.annulus_area > 0.0 ? out.excluded_area / out.annulus_area : 0.0;
    if (out.excluded_area_fraction > 0.05) {
        std::ostringstream os;
        os << "excluded (critical) area fraction " << out.excluded_area_fraction << " exceeds 5%";
        out.warnings.push_back(os.str());
    }
    return out;
}

/// x.H at every vertex, x relative to the base image.
inline std::vector<double> vertex_x_dot_h(const MetricMesh& mesh, const ImmersionChart& chart, const DistanceField& field) {
    std::vector<double> out(mesh.vertices.size());
    for (std::size_t v = 0; v < out.size(); ++v) {
        out[v] = field.x(mesh, static_cast<int>(v)).dot(mean_curvature(chart, mesh.vertices[v].u));
    }
    return out;
}

/// Integral of the piecewise-linear interpolant of `f` over {r < t}.
inline double ball_integral(const MetricMesh& mesh, const std::vector<double>& areas, const DistanceField& field,
                            const std::vector<double>& f, double t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& tri = mesh.triangles[k];
        const std::array<double, 3> rv{field.r[static_cast<std::size_t>(tri[0])], field.r[static_cast<std::size_t>(tri[1])],
                                       field.r[static_cast<std::size_t>(tri[2])]};
        if (!std::isfinite(rv[0]) || !std::isfinite(rv[1]) || !std::isfinite(rv[2])) continue;
        if (std::min({rv[0], rv[1], rv[2]}) >= t) continue;
        const ClippedPiece piece = clip_linear(rv, -kInf, t);
        if (piece.fraction <= 0.0) continue;
        double val = 0.0;
        for (int j = 0; j < 3; ++j) val += piece.centroid[j] * f[static_cast<std::size_t>(tri[static_cast<std::size_t>(j)])];
        sum += areas[k] * piece.fraction * val;
    }
    return sum;
}

/// int_{R1}^{R2} t^-(d+1) int_{B_t} x.H dx dt: composite Simpson in t with
/// n_t nodes (raised to the next odd count), inner integral by clipped
/// quadrature of the linear interpolant of x.H.
inline double mean_curvature_term(const MetricMesh& mesh, const ImmersionChart& chart, const DistanceField& field,
                                  double R1, double R2, int n_t = 17) {
    if (n_t < 8) throw ArgumentError("mean_curvature_term: n_t must be at least 8");
    if (!(R1 < R2)) throw RangeError("mean_curvature_term: need R1 < R2");
    const double guard = guard_radii(mesh, field).intrinsic;
    detail::require_radius(mesh, R1, guard, "mean_curvature_term");
    detail::require_radius(mesh, R2, guard, "mean_curvature_term");
    if (n_t % 2 == 0) ++n_t;
    const auto areas = triangle_areas(mesh);
    const auto xh = vertex_x_dot_h(mesh, chart, field);
    const double step = (R2 - R1) / (n_t - 1);
    double sum = 0.0;
    for (int k = 0; k < n_t; ++k) {
        const double t = k + 1 == n_t ? R2 : R1 + k * step;
        const double w = (k == 0 || k + 1 == n_t) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        sum += w * ball_integral(mesh, areas, field, xh, t) / std::pow(t, mesh.d + 1);
    }
    return sum * step / 3.0;
}

inline double quadrature_tolerance(double h, double eps_solver, double R1, double R2, double annulus_area, int d) {
    const double w = std::pow(R1, d + 1);
    return 5.0 * h * (R2 - R1) / w + 3.0 * eps_solver * annulus_area / w;
}

struct ResidualOptions {
    int n_t = 17;
    bool include_h = true;  ///< false forces h_term = 0 (negative control)
};

struct ResidualReport {
    double R1 = 0.0, R2 = 0.0;
    double lhs = 0.0;
    double error_integral = 0.0;
    double error_integral_dual = 0.0;
    double max_form_gap = 0.0;
    double min_integrand = 0.0;
    double h_term = 0.0;
    double residual = 0.0;
    double excluded_area_fraction = 0.0;
    double annulus_area = 0.0;
    double h = 0.0;
    double eps_solver = 0.0;
    double tol_quadrature = 0.0;
    bool include_h = true;
    std::vector<std::string> warnings;
};

inline ResidualReport monotonicity_residual(const MetricMesh& mesh, const ImmersionChart& chart,
                                            const DistanceField& field, const GradientField& grad, double R1,
                                            double R2, const ResidualOptions& opts = {}) {
    ResidualReport rep;
    rep.R1 = R1;
    rep.R2 = R2;
    rep.include_h = opts.include_h;
    rep.h = mesh.target_h > 0.0 ? mesh.target_h : mesh.h;
    rep.eps_solver = field.eps_solver;
    const ErrorIntegral ei = annulus_error_integral(mesh, field, grad, R1, R2);
    rep.lhs = intrinsic_density(mesh, field, R2) - intrinsic_density(mesh, field, R1);
    rep.error_integral = ei.value;
    rep.error_integral_dual = ei.dual_value;
    rep.max_form_gap = ei.max_form_gap;
    rep.min_integrand = ei.min_integrand;
    rep.excluded_area_fraction = ei.excluded_area_fraction;
    rep.annulus_area = ei.annulus_area;
    rep.warnings = ei.warnings;
    rep.h_term = opts.include_h ? mean_curvature_term(mesh, chart, field, R1, R2, opts.n_t) : 0.0;
    rep.residual = rep.lhs - rep.error_integral - rep.h_term;
    rep.tol_quadrature = quadrature_tolerance(rep.h, rep.eps_solver, R1, R2, rep.annulus_area, mesh.d);
    return rep;
}

inline Json to_json(const ResidualReport& r) {
    Json j;
    j["R1"] = r.R1;
    j["R2"] = r.R2;
    j["lhs"] = num(r.lhs);
    j["error_integral"] = num(r.error_integral);
    j["error_integral_dual"] = num(r.error_integral_dual);
    j["h_term"] = num(r.h_term);
    j["residual"] = num(r.residual);
    j["excluded_area_fraction"] = num(r.excluded_area_fraction);
    j["max_form_gap"] = num(r.max_form_gap);
    j["h"] = r.h;
    j["include_h"] = r.include_h;
    return j;
}

/// Classifies a residual report. Minimal charts additionally need
/// lhs >= -tol and |h_term| <= tol.
inline Finding residual_finding(const ResidualReport& r, bool minimal) {
    Finding f;
    f.check = "residual";
    f.values = to_json(r);
    f.tolerances["tol_quadrature"] = r.tol_quadrature;
    f.tolerances["eps_solver"] = r.eps_solver;
    f.tolerances["form_agreement"] = 1e-10;
    const double tol = r.tol_quadrature;
    std::vector<std::string> bad;
    if (!(std::abs(r.residual) <= tol)) bad.push_back("|residual| above tol_quadrature");
    if (!(r.error_integral >= -tol)) bad.push_back("negative error integral");
    if (!(r.max_form_gap <= 1e-10)) bad.push_back("integrand forms disagree");
    if (minimal && !(r.lhs >= -tol)) bad.push_back("intrinsic density decreases");
    if (minimal && !(std::abs(r.h_term) <= tol)) bad.push_back("nonzero mean-curvature term on a minimal chart");
    std::ostringstream os;
    os << "residual " << r.residual << " (lhs " << r.lhs << ", error integral " << r.error_integral << ", h_term "
       << r.h_term << ")";
    for (const auto& b : bad) os << "; " << b;
    for (const auto& w : r.warnings) os << "; warning: " << w;
    f.message = os.str();
    f.status = !bad.empty() ? Status::fail : (r.warnings.empty() ? Status::pass : Status::warn);
    return f;
}

inline Finding lower_bound_check(const DensityProfile& p, bool minimal) {
    Finding f;
    f.check = "lower-bound";
    const double w = omega(p.d);
    f.values["omega_d"] = w;
    f.values["min_m_int"] = num(*std::min_element(p.m_int.begin(), p.m_int.end()));
    f.tolerances["tol_profile"] = p.tol_profile;
    if (!minimal) {
        f.status = Status::warn;
        f.message = "skipped: non-minimal chart";
        return f;
    }
    std::size_t bad = 0;
    for (double m : p.m_int) bad += m < w - p.tol_profile ? 1 : 0;
    f.values["violations"] = bad;
    f.status = bad == 0 ? Status::pass : Status::fail;
    f.message = bad == 0 ? "every m_int >= omega_d - tol" : std::to_string(bad) + " radii with m_int below omega_d - tol";
    return f;
}

/// Explicit density-pinching threshold eps^(d+1) omega_d / (2^(4d+3) (1+eps)^d).
inline double delta_threshold(double eps, int d) {
    if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("delta_threshold: eps must lie in (0, 1)");
    if (d < 1) throw ArgumentError("delta_threshold: d must be positive");
    return std::pow(eps, d + 1) * omega(d) / (std::ldexp(1.0, 4 * d + 3) * std::pow(1.0 + eps, d));
}

struct ChordArcCertificate {
    double R = 0.0;
    double eps = 0.0;
    double delta_required = 0.0;
    double density_gap = 0.0;  ///< M_8R^int - M_R^int
    bool hypothesis_met = false;
    /// gap <= delta + tol_profile: the hypothesis up to discretisation error.
    bool hypothesis_met_tolerant = false;
    double worst_ratio = 0.0;  ///< max r/|x| over vertices with 2R <= r <= 4R
    std::size_t shell_vertices = 0;
    bool conclusion_met = false;
    double tol_ca = 0.0;
    double tol_profile = 0.0;

    /// Hypothesis (tolerant form) holds but the conclusion does not.
    bool violation() const { return hypothesis_met_tolerant && !conclusion_met; }
};

inline ChordArcCertificate chord_arc_check(const MetricMesh& mesh, const DistanceField& field, double R, double eps) {
    const double guard = guard_radii(mesh, field).intrinsic;
    detail::require_radius(mesh, 2.0 * R, guard, "chord_arc_check");
    detail::require_radius(mesh, 8.0 * R, guard, "chord_arc_check");
    ChordArcCertificate c;
    c.R = R;
    c.eps = eps;
    c.delta_required = delta_threshold(eps, mesh.d);
    const auto areas = triangle_areas(mesh);
    const double m1 = sublevel_area(mesh, areas, field.r, R) / std::pow(R, mesh.d);
    const double m8 = sublevel_area(mesh, areas, field.r, 8.0 * R) / std::pow(8.0 * R, mesh.d);
    c.density_gap = m8 - m1;
    const double h = mesh.target_h > 0.0 ? mesh.target_h : mesh.h;
    c.tol_profile = profile_tolerance(field.eps_solver, R, h);
    c.hypothesis_met = c.density_gap <= c.delta_required;
    c.hypothesis_met_tolerant = c.density_gap <= c.delta_required + c.tol_profile;
    c.tol_ca = 2.0 * field.eps_solver / (2.0 * R);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const double r = field.r[v];
        if (!(r >= 2.0 * R && r <= 4.0 * R)) continue;
        ++c.shell_vertices;
        c.worst_ratio = std::max(c.worst_ratio, r / field.x(mesh, static_cast<int>(v)).norm());
    }
    c.conclusion_met = c.worst_ratio <= 1.0 + eps + c.tol_ca;
    return c;
}

inline Json to_json(const ChordArcCertificate& c) {
    Json j;
    j["R"] = c.R;
    j["eps"] = c.eps;
    j["delta_required"] = c.delta_required;
    j["density_gap"] = num(c.density_gap);
    j["hypothesis_met"] = c.hypothesis_met;
    j["hypothesis_met_tolerant"] = c.hypothesis_met_tolerant;
    j["worst_ratio"] = num(c.worst_ratio);
    j["shell_vertices"] = c.shell_vertices;
    j["conclusion_met"] = c.conclusion_met;
    j["tol_ca"] = c.tol_ca;
    j["tol_profile"] = c.tol_profile;
    return j;
}

inline Finding chord_arc_finding(const std::vector<ChordArcCertificate>& certs) {
    Finding f;
    f.check = "chord-arc";
    f.values["certificates"] = Json::array();
    std::size_t violations = 0, low = 0;
    for (const auto& c : certs) {
        f.values["certificates"].push_back(to_json(c));
        violations += c.violation() ? 1 : 0;
        // r >= |x| up to the solver bar.
        if (c.shell_vertices > 0 && c.worst_ratio < 1.0 - c.tol_ca) ++low;
    }
    f.values["violations"] = violations;
    f.values["ratio_below_one"] = low;
    f.status = violations == 0 && low == 0 ? Status::pass : Status::fail;
    std::ostringstream os;
    os << certs.size() << " certificates, " << violations << " hypothesis-without-conclusion violations";
    if (low > 0) os << ", " << low << " with worst ratio below 1 - tol_ca";
    f.message = os.str();
    return f;
}

} // namespace minsurf
