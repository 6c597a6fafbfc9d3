#include "minsurf/catalog.hpp"
#include "minsurf/monotonicity.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace minsurf;

namespace {

struct Solved {
    MetricMesh mesh;
    DistanceField field;
    GradientField grad;
};

Solved solve(const ImmersionChart& chart, double h, const Vec2& base) {
    MetricMesh mesh = triangulate(chart, h, GradingPolicy::graded_at(base));
    DistanceField f = distance_field(mesh, nearest_vertex(mesh, chart.domain(), base));
    f.eps_solver = calibrate_solver_error(h, true).eps_solver;
    GradientField g = gradient_field(mesh, f);
    return {std::move(mesh), std::move(f), std::move(g)};
}

// Flat Laplacian of |x|^2 in conformal coordinates, divided by the
// conformal factor, from the evaluation map only.
double conformal_laplacian_of_norm2(const ImmersionChart& chart, const Vec2& u, double lambda, double s) {
    auto f = [&](const Vec2& p) { return chart.map(p).squaredNorm(); };
    const double fuu = (f(u + Vec2(s, 0)) - 2 * f(u) + f(u - Vec2(s, 0))) / (s * s);
    const double fvv = (f(u + Vec2(0, s)) - 2 * f(u) + f(u - Vec2(0, s))) / (s * s);
    return (fuu + fvv) / lambda;
}

// Integral over the geodesic ball of radius t of x.H on a sphere of radius
// rho, x measured from a point of the sphere.
double sphere_ball_x_dot_h(double t, double rho) {
    const double c = 1 - std::cos(t / rho);
    return -2 * oracle::pi * rho * rho * c * c;
}

} // namespace

TEST(LaplacianIdentity, PlaneIsExact) {
    const auto p = make_plane();
    for (const Vec2& u : quasi_random_points(p.domain(), 50)) EXPECT_LE(laplacian_identity_check(p, u), 1e-10);
}

TEST(LaplacianIdentity, CatenoidAgainstConformalOracle) {
    const auto c = make_catenoid();
    const Vec2 u(0.5, 0.3);
    // |x|^2 = cosh^2 v + v^2 and the conformal factor is cosh^2 v.
    const double ch2 = std::cosh(0.5) * std::cosh(0.5);
    EXPECT_NEAR(conformal_laplacian_of_norm2(c, u, ch2, 1e-4), 4.0, 1e-5);
    EXPECT_LE(laplacian_identity_check(c, u), 1e-8);
    for (const Vec2& q : quasi_random_points(c.domain(), 200)) EXPECT_LE(laplacian_identity_check(c, q), 1e-6);
}

TEST(LaplacianIdentity, EnneperAgainstConformalOracle) {
    const auto e = make_enneper();
    for (const Vec2& u : {Vec2(0.4, -0.7), Vec2(1.5, 1.0), Vec2(-2.0, 0.3)}) {
        const double lam = std::pow(1 + u.squaredNorm(), 2);
        EXPECT_NEAR(conformal_laplacian_of_norm2(e, u, lam, 1e-4), 4.0, 1e-4) << u.transpose();
        EXPECT_LE(laplacian_identity_check(e, u), 1e-6) << u.transpose();
    }
}

TEST(LaplacianIdentity, SphereNeedsTheMeanCurvatureTerm) {
    // |x|^2 is constant on a centred sphere, so Delta |x|^2 = 0 and x.H = -2.
    const auto s = make_sphere(2.0);
    for (const Vec2& u : quasi_random_points(s.domain(), 100)) {
        EXPECT_LE(laplacian_identity_check(s, u, true), 1e-6);
        EXPECT_NEAR(laplacian_identity_check(s, u, false), 4.0, 1e-6);
    }
}

TEST(ErrorIntegrand, PrimaryAndDualFormsAgree) {
    const Vec3 xs[] = {{1, 2, 3}, {-0.5, 0.1, 0.0}, {1e-3, 0, 2e-3}};
    const Vec3 nus[] = {Vec3(1, 1, 0).normalized(), Vec3(0, 0, 1), Vec3(-3, 2, 1).normalized()};
    for (const auto& x : xs) {
        for (const auto& nu : nus) {
            const ErrorIntegrand e = error_integrand(x.norm() * 1.3 + 0.1, x, nu, 2);
            EXPECT_NEAR(e.primary, e.dual, 1e-12 * std::max(1.0, std::abs(e.primary)));
        }
    }
    // Radial nu and r = |x| give zero.
    const Vec3 x(0.3, 0.4, 0);
    EXPECT_NEAR(error_integrand(0.5, x, x.normalized(), 2).primary, 0.0, 1e-15);
}

TEST(ErrorIntegral, PlaneIsNearlyZero) {
    const Solved s = solve(make_plane(5), 0.05, Vec2(0, 0));
    const ErrorIntegral e = annulus_error_integral(s.mesh, s.field, s.grad, 0.5, 2.0);
    const double tol = quadrature_tolerance(0.05, s.field.eps_solver, 0.5, 2.0, e.annulus_area, 2);
    EXPECT_LE(std::abs(e.value), tol);
    EXPECT_GE(e.min_integrand, -tol);
    EXPECT_LE(e.max_form_gap, 1e-10);
    EXPECT_NEAR(e.annulus_area, oracle::pi * (4.0 - 0.25), 0.01);
    EXPECT_TRUE(e.warnings.empty());
}

TEST(ErrorIntegral, AdditiveOverAnnuli) {
    const Solved s = solve(make_catenoid(2), 0.1, Vec2(0, 0));
    const ErrorIntegral a = annulus_error_integral(s.mesh, s.field, s.grad, 1.0, 2.0);
    const ErrorIntegral b = annulus_error_integral(s.mesh, s.field, s.grad, 2.0, 3.0);
    const ErrorIntegral ab = annulus_error_integral(s.mesh, s.field, s.grad, 1.0, 3.0);
    // Areas split exactly; the midpoint values only up to quadrature error.
    EXPECT_NEAR(a.annulus_area + b.annulus_area, ab.annulus_area, 1e-10 * ab.annulus_area);
    EXPECT_NEAR(a.value + b.value, ab.value, 0.01 * std::abs(ab.value) + 1e-6);
    EXPECT_GT(ab.value, 0.0);
    EXPECT_THROW(annulus_error_integral(s.mesh, s.field, s.grad, 2.0, 1.0), RangeError);
}

TEST(MeanCurvatureTerm, VanishesOnMinimalCharts) {
    const auto c = make_catenoid(2);
    const Solved s = solve(c, 0.1, Vec2(0, 0));
    EXPECT_LE(std::abs(mean_curvature_term(s.mesh, c, s.field, 1.0, 3.0)), 1e-6);
}

TEST(MeanCurvatureTerm, SphereMatchesClosedForm) {
    const double rho = 2.0;
    const auto sp = make_sphere(rho);
    const Solved s = solve(sp, 0.05, default_base("sphere"));
    const double R1 = 0.5, R2 = 2.0;
    const double ref = oracle::simpson([&](double t) { return sphere_ball_x_dot_h(t, rho) / (t * t * t); }, R1, R2);
    const double got = mean_curvature_term(s.mesh, sp, s.field, R1, R2);
    EXPECT_NEAR(got, ref, 0.01 * std::abs(ref));
    const double tol = quadrature_tolerance(0.05, s.field.eps_solver, R1, R2, 0.0, 2);
    EXPECT_LE(std::abs(mean_curvature_term(s.mesh, sp, s.field, R1, R2, 33) - got), tol / 2);
    EXPECT_THROW(mean_curvature_term(s.mesh, sp, s.field, R1, R2, 4), ArgumentError);
}

TEST(Residual, SphereBalancesOnlyWithMeanCurvature) {
    const auto sp = make_sphere(2.0);
    const Solved s = solve(sp, 0.05, default_base("sphere"));
    const ResidualReport with = monotonicity_residual(s.mesh, sp, s.field, s.grad, 0.5, 2.0);
    ResidualOptions off;
    off.include_h = false;
    const ResidualReport without = monotonicity_residual(s.mesh, sp, s.field, s.grad, 0.5, 2.0, off);
    EXPECT_LE(std::abs(with.residual), with.tol_quadrature);
    EXPECT_LT(with.lhs, 0.0);  // sphere densities decrease
    EXPECT_GT(std::abs(without.residual), 10 * std::abs(with.residual));
    EXPECT_EQ(residual_finding(with, false).status, Status::pass);
}

TEST(Residual, CatenoidDecaysUnderRefinement) {
    const auto c = make_catenoid(2);
    std::vector<double> res;
    for (double h : {0.1, 0.05}) {
        const Solved s = solve(c, h, Vec2(0, 0));
        const ResidualReport r = monotonicity_residual(s.mesh, c, s.field, s.grad, 1.0, 3.0);
        EXPECT_GE(r.error_integral, -r.tol_quadrature);
        EXPECT_LE(std::abs(r.residual), r.tol_quadrature);
        EXPECT_GE(r.lhs, 0.0);
        EXPECT_EQ(residual_finding(r, true).status, Status::pass) << residual_finding(r, true).message;
        res.push_back(std::abs(r.residual));
    }
    EXPECT_GE(res[0] / res[1], 1.5);
}

TEST(DeltaThreshold, SpotValuesAndMonotonicity) {
    EXPECT_NEAR(delta_threshold(1.0 - 1e-12, 2), oracle::pi / 8192, 1e-14);
    EXPECT_NEAR(delta_threshold(0.5, 2), oracle::pi / 36864, 1e-15);
    EXPECT_NEAR(delta_threshold(0.5, 1), 0.25 * 2 / (128 * 1.5), 1e-15);
    double prev = 0.0;
    for (double e = 0.05; e < 1.0; e += 0.05) {
        const double d = delta_threshold(e, 2);
        EXPECT_GT(d, prev);
        prev = d;
    }
    EXPECT_THROW(delta_threshold(0.0, 2), ArgumentError);
    EXPECT_THROW(delta_threshold(1.0, 2), ArgumentError);
    EXPECT_THROW(delta_threshold(0.5, 0), ArgumentError);
}

TEST(ChordArc, PlaneCertificatesHold) {
    const Solved s = solve(make_plane(5), 0.05, Vec2(0, 0));
    std::vector<ChordArcCertificate> certs;
    for (double eps : {0.1, 0.5, 0.9}) {
        const ChordArcCertificate c = chord_arc_check(s.mesh, s.field, 0.5, eps);
        EXPECT_TRUE(c.hypothesis_met_tolerant);
        EXPECT_TRUE(c.conclusion_met);
        EXPECT_FALSE(c.violation());
        EXPECT_LE(c.worst_ratio, 1.0 + c.tol_ca);
        EXPECT_GT(c.shell_vertices, 100u);
        certs.push_back(c);
    }
    EXPECT_EQ(chord_arc_finding(certs).status, Status::pass);
    EXPECT_THROW(chord_arc_check(s.mesh, s.field, 1.0, 0.5), RangeError);   // 8R beyond guard
    EXPECT_THROW(chord_arc_check(s.mesh, s.field, 0.2, 0.5), RangeError);   // 2R below 10 h
}

TEST(ChordArc, ImplicationOnCatenoid) {
    const Solved s = solve(make_catenoid(3), 0.05, Vec2(0, 0));
    for (double eps : {0.1, 0.5, 0.9}) {
        const ChordArcCertificate c = chord_arc_check(s.mesh, s.field, 0.25, eps);
        EXPECT_FALSE(c.violation()) << eps;
        EXPECT_GE(c.worst_ratio, 1.0 - c.tol_ca);
    }
}

TEST(ChordArc, ViolationIsReported) {
    ChordArcCertificate c;
    c.hypothesis_met_tolerant = true;
    c.conclusion_met = false;
    c.shell_vertices = 3;
    c.worst_ratio = 3.0;
    EXPECT_TRUE(c.violation());
    EXPECT_EQ(chord_arc_finding({c}).status, Status::fail);
}

TEST(LowerBound, PlanePassesSphereIsSkipped) {
    const Solved p = solve(make_plane(5), 0.05, Vec2(0, 0));
    EXPECT_EQ(lower_bound_check(density_profile(p.mesh, p.field, {0.5, 1, 2, 4}), true).status, Status::pass);
    const auto sp = make_sphere(2.0);
    const Solved s = solve(sp, 0.05, default_base("sphere"));
    const auto prof = density_profile(s.mesh, s.field, {0.5, 1, 2});
    EXPECT_EQ(lower_bound_check(prof, false).status, Status::warn);
    EXPECT_LT(prof.m_int.back(), oracle::pi);  // below omega_2 on a sphere
    EXPECT_EQ(lower_bound_check(prof, true).status, Status::fail);
}
