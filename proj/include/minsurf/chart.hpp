#pragma once

#include "minsurf/errors.hpp"
#include "minsurf/types.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace minsurf {

enum class DomainShape { rectangle, disk };

/// Parameter domain of a chart: an axis-aligned rectangle (either axis may be
/// periodic) or a disk centred at the origin.
struct ParamDomain {
    DomainShape shape = DomainShape::rectangle;
    Vec2 lo{0.0, 0.0};
    Vec2 hi{1.0, 1.0};
    std::array<bool, 2> periodic{false, false};
    double radius = 0.0;

    static ParamDomain rectangle(const Vec2& lo, const Vec2& hi, bool periodic_second = false) {
        ParamDomain dom;
        dom.shape = DomainShape::rectangle;
        dom.lo = lo;
        dom.hi = hi;
        dom.periodic = {false, periodic_second};
        return dom;
    }

    static ParamDomain disk(double radius) {
        ParamDomain dom;
        dom.shape = DomainShape::disk;
        dom.radius = radius;
        dom.lo = Vec2(-radius, -radius);
        dom.hi = Vec2(radius, radius);
        return dom;
    }

    double period(int axis) const { return hi[axis] - lo[axis]; }

    /// Maps periodic coordinates into [lo, hi).
    Vec2 wrap(Vec2 u) const {
        if (shape != DomainShape::rectangle) return u;
        for (int k = 0; k < 2; ++k) {
            if (!periodic[k]) continue;
            const double p = period(k);
            double s = std::fmod(u[k] - lo[k], p);
            if (s < 0.0) s += p;
            if (s >= p) s -= p;
            u[k] = lo[k] + s;
        }
        return u;
    }

    /// b - a, taking the shortest representative across periodic seams.
    Vec2 delta(const Vec2& a, const Vec2& b) const {
        Vec2 dlt = b - a;
        if (shape != DomainShape::rectangle) return dlt;
        for (int k = 0; k < 2; ++k) {
            if (!periodic[k]) continue;
            const double p = period(k);
            dlt[k] -= p * std::round(dlt[k] / p);
        }
        return dlt;
    }

    bool contains(const Vec2& u, double rel_tol = 1e-12) const {
        if (!u.allFinite()) return false;
        const double slack = rel_tol * diameter();
        if (shape == DomainShape::disk) return u.norm() <= radius + slack;
        for (int k = 0; k < 2; ++k) {
            if (periodic[k]) continue;
            if (u[k] < lo[k] - slack || u[k] > hi[k] + slack) return false;
        }
        return true;
    }

    double diameter() const {
        if (shape == DomainShape::disk) return 2.0 * radius;
        return (hi - lo).norm();
    }

    /// Maps the unit square onto the domain (area-uniform on disks).
    Vec2 sample(double q0, double q1) const {
        if (shape == DomainShape::disk) {
            const double rho = radius * std::sqrt(q0);
            const double phi = 2.0 * kPi * q1;
            return {rho * std::cos(phi), rho * std::sin(phi)};
        }
        return {lo[0] + q0 * (hi[0] - lo[0]), lo[1] + q1 * (hi[1] - lo[1])};
    }

    std::string describe() const {
        std::ostringstream os;
        if (shape == DomainShape::disk) {
            os << "disk |u|<=" << radius;
        } else {
            os << "[" << lo[0] << "," << hi[0] << "]" << (periodic[0] ? "(periodic)" : "") << "x["
               << lo[1] << "," << hi[1] << "]" << (periodic[1] ? "(periodic)" : "");
        }
        return os.str();
    }
};

/// An analytic parametrized immersion piece u in R^2 -> x in R^3.
///
/// Derivatives are analytic when supplied, otherwise central differences
/// with step 1e-5 times the domain diameter. Member evaluators do not check
/// the domain; the free functions below do.
class ImmersionChart {
public:
    using EvalFn = std::function<Vec3(const Vec2&)>;
    using JacobianFn = std::function<Mat32(const Vec2&)>;
    using HessianFn = std::function<SecondDerivs(const Vec2&)>;

    ImmersionChart(std::string label, ParamDomain domain, EvalFn eval, bool is_minimal,
                   JacobianFn jacobian = {}, HessianFn hessian = {})
        : label_(std::move(label)),
          domain_(domain),
          eval_(std::move(eval)),
          jacobian_(std::move(jacobian)),
          hessian_(std::move(hessian)),
          is_minimal_(is_minimal) {}

    const std::string& label() const { return label_; }
    int d() const { return 2; }
    int N() const { return 3; }
    const ParamDomain& domain() const { return domain_; }
    bool is_minimal() const { return is_minimal_; }
    bool has_analytic_derivatives() const { return jacobian_ && hessian_; }
    double fd_step() const { return 1e-5 * domain_.diameter(); }

    /// Closed-form total area of the domain, when known.
    std::optional<double> analytic_area;

    Vec3 map(const Vec2& u) const { return eval_(domain_.wrap(u)); }

    Mat32 jacobian(const Vec2& u) const {
        if (jacobian_) return jacobian_(domain_.wrap(u));
        const double h = fd_step();
        Mat32 jac;
        for (int k = 0; k < 2; ++k) {
            Vec2 e = Vec2::Zero();
            e[k] = h;
            jac.col(k) = (eval_(u + e) - eval_(u - e)) / (2.0 * h);
        }
        return jac;
    }

    SecondDerivs second_derivatives(const Vec2& u) const {
        if (hessian_) return hessian_(domain_.wrap(u));
        const double h = fd_step();
        const Vec2 e0(h, 0.0);
        const Vec2 e1(0.0, h);
        const Vec3 x0 = eval_(u);
        SecondDerivs out;
        out[0] = (eval_(u + e0) - 2.0 * x0 + eval_(u - e0)) / (h * h);
        out[1] = (eval_(u + e0 + e1) - eval_(u + e0 - e1) - eval_(u - e0 + e1) + eval_(u - e0 - e1)) /
                 (4.0 * h * h);
        out[2] = (eval_(u + e1) - 2.0 * x0 + eval_(u - e1)) / (h * h);
        return out;
    }

    /// Pullback metric J^T J without domain or rank checks.
    Mat2 metric(const Vec2& u) const {
        const Mat32 jac = jacobian(u);
        return jac.transpose() * jac;
    }

    /// Returns a chart whose ambient map is scaled by `factor`.
    ImmersionChart scaled(double factor) const {
        ImmersionChart out = *this;
        auto eval = eval_;
        out.eval_ = [eval, factor](const Vec2& u) { return Vec3(factor * eval(u)); };
        if (jacobian_) {
            auto jac = jacobian_;
            out.jacobian_ = [jac, factor](const Vec2& u) { return Mat32(factor * jac(u)); };
        }
        if (hessian_) {
            auto hess = hessian_;
            out.hessian_ = [hess, factor](const Vec2& u) {
                SecondDerivs s = hess(u);
                for (auto& v : s) v *= factor;
                return s;
            };
        }
        if (analytic_area) out.analytic_area = *analytic_area * factor * factor;
        return out;
    }

private:
    std::string label_;
    ParamDomain domain_;
    EvalFn eval_;
    JacobianFn jacobian_;
    HessianFn hessian_;
    bool is_minimal_;
};

namespace detail {

inline void require_in_domain(const ImmersionChart& chart, const Vec2& u) {
    if (!chart.domain().contains(u)) {
        std::ostringstream os;
        os << "parameter point (" << u[0] << ", " << u[1] << ") outside domain of '" << chart.label()
           << "' " << chart.domain().describe();
        throw DomainError(os.str());
    }
}

/// Inverse of an SPD 2x2 metric; throws when the smaller eigenvalue is not
/// resolvable against the larger one at double precision.
inline Mat2 checked_inverse(const Mat2& g, const std::string& label) {
    Eigen::SelfAdjointEigenSolver<Mat2> eig(g);
    const double lmin = eig.eigenvalues()[0];
    const double lmax = eig.eigenvalues()[1];
    if (!(lmin > 1e-14 * std::max(1.0, lmax))) {
        throw DegeneracyError("degenerate pullback metric on '" + label + "'");
    }
    return g.inverse();
}

} // namespace detail

inline Vec3 evaluate(const ImmersionChart& chart, const Vec2& u) {
    detail::require_in_domain(chart, u);
    return chart.map(u);
}

inline Mat2 pullback_metric(const ImmersionChart& chart, const Vec2& u) {
    detail::require_in_domain(chart, u);
    const Mat2 g = chart.metric(u);
    detail::checked_inverse(g, chart.label());
    return g;
}

/// Trace over the pullback metric of the normal part of the second
/// derivatives, i.e. the surface Laplacian of the coordinate functions.
inline Vec3 mean_curvature(const ImmersionChart& chart, const Vec2& u) {
    detail::require_in_domain(chart, u);
    const Mat32 jac = chart.jacobian(u);
    const Mat2 g = jac.transpose() * jac;
    const Mat2 ginv = detail::checked_inverse(g, chart.label());
    const SecondDerivs xx = chart.second_derivatives(u);
    const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - jac * ginv * jac.transpose();
    const Vec3 trace = ginv(0, 0) * xx[0] + 2.0 * ginv(0, 1) * xx[1] + ginv(1, 1) * xx[2];
    return proj * trace;
}

/// Radical inverse of `index` in `base` (Halton component).
inline double halton(std::uint64_t index, std::uint64_t base) {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

/// Deterministic quasi-random points in the domain (2-3 Halton sequence,
/// starting after `skip` points).
inline std::vector<Vec2> quasi_random_points(const ParamDomain& domain, std::size_t count,
                                             std::uint64_t skip = 0) {
    std::vector<Vec2> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t idx = skip + i + 1;
        pts.push_back(domain.sample(halton(idx, 2), halton(idx, 3)));
    }
    return pts;
}

} // namespace minsurf
