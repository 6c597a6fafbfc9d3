#pragma once

#include "minsurf/chart.hpp"
#include "minsurf/unit_ball.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace minsurf {

/// Closed-form density entry for a minimal cone. Radial rays from the apex
/// are geodesics, so intrinsic and extrinsic densities from the apex agree
/// and equal link_area / d at every radius.
struct AnalyticConeEntry {
    std::string label;
    int d = 0;
    double link_area = 0.0;
    std::string remark;

    AnalyticConeEntry(std::string label_, int d_, double link_area_, std::string remark_)
        : label(std::move(label_)), d(d_), link_area(link_area_), remark(std::move(remark_)) {
        if (d <= 0) throw ArgumentError("cone entry '" + label + "': dimension must be positive");
        if (!(link_area > 0.0)) throw ArgumentError("cone entry '" + label + "': link area must be positive");
        if (link_area / d < omega(d) * (1.0 - 1e-12)) {
            throw ArgumentError("cone entry '" + label + "': density below omega_d");
        }
    }
};

inline double cone_density(const AnalyticConeEntry& entry) { return entry.link_area / entry.d; }

struct SurfaceOptions {
    /// Surface-specific size: plane half-width, catenoid |v| bound, helicoid
    /// half-extent in both parameters, Enneper disk radius.
    std::optional<double> extent;
    /// Sphere radius.
    std::optional<double> radius;
};

inline ImmersionChart make_plane(double half_width = 5.0) {
    ImmersionChart chart(
        "plane", ParamDomain::rectangle(Vec2(-half_width, -half_width), Vec2(half_width, half_width)),
        [](const Vec2& u) { return Vec3(u[0], u[1], 0.0); }, true,
        [](const Vec2&) {
            Mat32 j = Mat32::Zero();
            j(0, 0) = 1.0;
            j(1, 1) = 1.0;
            return j;
        },
        [](const Vec2&) { return SecondDerivs{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()}; });
    chart.analytic_area = 4.0 * half_width * half_width;
    return chart;
}

/// (v, theta) -> (cosh v cos theta, cosh v sin theta, v), theta periodic.
inline ImmersionChart make_catenoid(double v_max = 2.0) {
    ImmersionChart chart(
        "catenoid", ParamDomain::rectangle(Vec2(-v_max, -kPi), Vec2(v_max, kPi), true),
        [](const Vec2& u) {
            const double c = std::cosh(u[0]);
            return Vec3(c * std::cos(u[1]), c * std::sin(u[1]), u[0]);
        },
        true,
        [](const Vec2& u) {
            const double c = std::cosh(u[0]), s = std::sinh(u[0]);
            const double ct = std::cos(u[1]), st = std::sin(u[1]);
            Mat32 j;
            j << s * ct, -c * st, s * st, c * ct, 1.0, 0.0;
            return j;
        },
        [](const Vec2& u) {
            const double c = std::cosh(u[0]), s = std::sinh(u[0]);
            const double ct = std::cos(u[1]), st = std::sin(u[1]);
            return SecondDerivs{Vec3(c * ct, c * st, 0.0), Vec3(-s * st, s * ct, 0.0),
                                Vec3(-c * ct, -c * st, 0.0)};
        });
    chart.analytic_area = 2.0 * kPi * (v_max + 0.5 * std::sinh(2.0 * v_max));
    return chart;
}

/// (u, theta) -> (u cos theta, u sin theta, theta) on [-e,e]^2. The helicoid
/// is not periodic in theta as an immersion, so no seam is identified.
inline ImmersionChart make_helicoid(double extent = 12.0) {
    ImmersionChart chart(
        "helicoid", ParamDomain::rectangle(Vec2(-extent, -extent), Vec2(extent, extent)),
        [](const Vec2& u) { return Vec3(u[0] * std::cos(u[1]), u[0] * std::sin(u[1]), u[1]); }, true,
        [](const Vec2& u) {
            const double ct = std::cos(u[1]), st = std::sin(u[1]);
            Mat32 j;
            j << ct, -u[0] * st, st, u[0] * ct, 0.0, 1.0;
            return j;
        },
        [](const Vec2& u) {
            const double ct = std::cos(u[1]), st = std::sin(u[1]);
            return SecondDerivs{Vec3::Zero(), Vec3(-st, ct, 0.0), Vec3(-u[0] * ct, -u[0] * st, 0.0)};
        });
    chart.analytic_area = 2.0 * extent * (extent * std::sqrt(1.0 + extent * extent) + std::asinh(extent));
    return chart;
}

/// Enneper's surface over the parameter disk of radius rho_max. For
/// rho_max > sqrt(3) the immersion is not injective; areas are counted over
/// the parameter domain, hence with multiplicity.
inline ImmersionChart make_enneper(double rho_max = 3.0) {
    ImmersionChart chart(
        "enneper", ParamDomain::disk(rho_max),
        [](const Vec2& p) {
            const double u = p[0], v = p[1];
            return Vec3(u - u * u * u / 3.0 + u * v * v, v - v * v * v / 3.0 + u * u * v, u * u - v * v);
        },
        true,
        [](const Vec2& p) {
            const double u = p[0], v = p[1];
            Mat32 j;
            j << 1.0 - u * u + v * v, 2.0 * u * v, 2.0 * u * v, 1.0 - v * v + u * u, 2.0 * u, -2.0 * v;
            return j;
        },
        [](const Vec2& p) {
            const double u = p[0], v = p[1];
            return SecondDerivs{Vec3(-2.0 * u, 2.0 * v, 2.0), Vec3(2.0 * v, 2.0 * u, 0.0),
                                Vec3(2.0 * u, -2.0 * v, -2.0)};
        });
    const double q = 1.0 + rho_max * rho_max;
    chart.analytic_area = kPi * (q * q * q - 1.0) / 3.0;
    return chart;
}

/// Round sphere of radius rho in polar coordinates (theta, phi), with polar
/// caps of angle `polar_margin` removed. Non-minimal control: |H| = 2/rho.
inline ImmersionChart make_sphere(double rho = 2.0, double polar_margin = 0.3) {
    ImmersionChart chart(
        "sphere", ParamDomain::rectangle(Vec2(polar_margin, -kPi), Vec2(kPi - polar_margin, kPi), true),
        [rho](const Vec2& u) {
            const double st = std::sin(u[0]);
            return Vec3(rho * st * std::cos(u[1]), rho * st * std::sin(u[1]), rho * std::cos(u[0]));
        },
        false,
        [rho](const Vec2& u) {
            const double st = std::sin(u[0]), ct = std::cos(u[0]);
            const double sp = std::sin(u[1]), cp = std::cos(u[1]);
            Mat32 j;
            j << rho * ct * cp, -rho * st * sp, rho * ct * sp, rho * st * cp, -rho * st, 0.0;
            return j;
        },
        [rho](const Vec2& u) {
            const double st = std::sin(u[0]), ct = std::cos(u[0]);
            const double sp = std::sin(u[1]), cp = std::cos(u[1]);
            return SecondDerivs{Vec3(-rho * st * cp, -rho * st * sp, -rho * ct),
                                Vec3(-rho * ct * sp, rho * ct * cp, 0.0),
                                Vec3(-rho * st * cp, -rho * st * sp, 0.0)};
        });
    chart.analytic_area = 4.0 * kPi * rho * rho * std::cos(polar_margin);
    return chart;
}

inline const std::vector<std::string>& mesh_surface_labels() {
    static const std::vector<std::string> labels{"plane", "catenoid", "helicoid", "enneper", "sphere"};
    return labels;
}

inline ImmersionChart make_surface(const std::string& label, const SurfaceOptions& opts = {}) {
    if (label == "plane") return make_plane(opts.extent.value_or(5.0));
    if (label == "catenoid") return make_catenoid(opts.extent.value_or(2.0));
    if (label == "helicoid") return make_helicoid(opts.extent.value_or(12.0));
    if (label == "enneper") return make_enneper(opts.extent.value_or(3.0));
    if (label == "sphere") return make_sphere(opts.radius.value_or(2.0));
    throw ArgumentError("unknown surface label '" + label + "'");
}

/// Default base point (parameter coordinates) for each catalog surface.
inline Vec2 default_base(const std::string& label) {
    if (label == "sphere") return Vec2(kPi / 2.0, 0.0);
    return Vec2(0.0, 0.0);
}

inline std::vector<AnalyticConeEntry> cone_entries() {
    // Simons cone link S^3(1/sqrt2) x S^3(1/sqrt2): (2 pi^2 r^3)^2 with r^3 = 2^{-3/2}.
    const double sphere3 = 2.0 * kPi * kPi * std::pow(2.0, -1.5);
    return {
        AnalyticConeEntry("plane-cone", 2, 2.0 * kPi, "plane as a cone over the unit circle"),
        AnalyticConeEntry("simons-cone", 7, sphere3 * sphere3,
                          "cone over S^3(1/sqrt2) x S^3(1/sqrt2) in R^8"),
    };
}

inline std::string list_surfaces() {
    std::ostringstream os;
    os << "label\td\tN\tminimal\tdomain\tkind\n";
    for (const auto& label : mesh_surface_labels()) {
        const ImmersionChart chart = make_surface(label);
        os << label << '\t' << chart.d() << '\t' << chart.N() << '\t' << (chart.is_minimal() ? "yes" : "no")
           << '\t' << chart.domain().describe() << '\t' << "meshable\n";
    }
    for (const auto& cone : cone_entries()) {
        os << cone.label << '\t' << cone.d << '\t' << "-" << '\t' << "yes" << '\t' << "link_area=" << cone.link_area
           << '\t' << "analytic-only\n";
    }
    return os.str();
}

} // namespace minsurf
