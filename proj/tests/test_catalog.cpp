#include "minsurf/catalog.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace minsurf;

TEST(Evaluate, PlaneIsIdentityEmbedding) {
    const Vec3 x = evaluate(make_plane(), Vec2(3, 4));
    EXPECT_EQ(x, Vec3(3, 4, 0));
}

TEST(Evaluate, CatenoidNeckPoint) {
    const Vec3 x = evaluate(make_catenoid(), Vec2(0, 0));
    EXPECT_NEAR((x - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(Evaluate, EnneperCentre) { EXPECT_EQ(evaluate(make_enneper(), Vec2(0, 0)), Vec3(0, 0, 0)); }

TEST(Evaluate, OutsideDomainThrows) {
    EXPECT_THROW(evaluate(make_plane(5), Vec2(6, 0)), DomainError);
    EXPECT_THROW(evaluate(make_enneper(3), Vec2(2.5, 2.5)), DomainError);
    EXPECT_THROW(evaluate(make_catenoid(2), Vec2(2.5, 0)), DomainError);
    // theta is periodic: any angle is inside.
    EXPECT_NO_THROW(evaluate(make_catenoid(2), Vec2(0, 10.0)));
}

TEST(Evaluate, Deterministic) {
    const auto c = make_helicoid();
    EXPECT_EQ(evaluate(c, Vec2(0.3, -1.7)), evaluate(c, Vec2(0.3, -1.7)));
}

TEST(PullbackMetric, PlaneIsIdentity) {
    EXPECT_NEAR((pullback_metric(make_plane(), Vec2(1.5, -2)) - Mat2::Identity()).norm(), 0.0, 1e-15);
}

TEST(PullbackMetric, CatenoidIsConformal) {
    for (double v : {-1.5, 0.0, 0.7}) {
        const Mat2 g = pullback_metric(make_catenoid(), Vec2(v, 0.4));
        const double c2 = std::cosh(v) * std::cosh(v);
        EXPECT_NEAR((g - c2 * Mat2::Identity()).norm(), 0.0, 1e-12 * c2);
    }
}

TEST(PullbackMetric, SymmetricAndPositiveEverywhere) {
    for (const auto& label : mesh_surface_labels()) {
        const auto chart = make_surface(label);
        for (const Vec2& u : quasi_random_points(chart.domain(), 200)) {
            const Mat2 g = pullback_metric(chart, u);
            EXPECT_NEAR(g(0, 1), g(1, 0), 1e-12 * g.norm()) << label;
            EXPECT_GT(g.determinant(), 0.0) << label;
        }
    }
}

TEST(PullbackMetric, DeterminantIsSquaredAreaElement) {
    for (const auto& label : mesh_surface_labels()) {
        const auto chart = make_surface(label);
        for (const Vec2& u : quasi_random_points(chart.domain(), 100)) {
            const Mat32 j = chart.jacobian(u);
            const double cross = j.col(0).cross(j.col(1)).squaredNorm();
            EXPECT_NEAR(pullback_metric(chart, u).determinant(), cross, 1e-10 * std::max(1.0, cross)) << label;
        }
    }
}

TEST(PullbackMetric, RankDeficientThrows) {
    const ImmersionChart flat("degenerate", ParamDomain::rectangle(Vec2(-1, -1), Vec2(1, 1)),
                              [](const Vec2& u) { return Vec3(u[0], 0, 0); }, true);
    EXPECT_THROW(pullback_metric(flat, Vec2(0, 0)), DegeneracyError);
    EXPECT_THROW(mean_curvature(flat, Vec2(0, 0)), DegeneracyError);
}

TEST(MeanCurvature, PlaneIsZero) { EXPECT_EQ(mean_curvature(make_plane(), Vec2(1, 2)).norm(), 0.0); }

TEST(MeanCurvature, CatenoidMatchesFiniteDifferenceOracle) {
    const auto c = make_catenoid();
    const Vec2 u(0.7, 1.2);
    EXPECT_LE(mean_curvature(c, u).norm(), 1e-6);
    // Shrinking stencils agree with the analytic value.
    for (double s : {1e-3, 5e-4}) {
        EXPECT_LE((oracle::fd_coordinate_laplacian(c, u, s) - mean_curvature(c, u)).norm(), 1e-5) << s;
    }
}

TEST(MeanCurvature, SphereHasUnitNormPointingInward) {
    const auto s = make_sphere(2.0);
    for (const Vec2& u : quasi_random_points(s.domain(), 1000)) {
        const Vec3 H = mean_curvature(s, u);
        const Vec3 x = s.map(u);
        EXPECT_NEAR(H.norm(), 1.0, 0.01);
        EXPECT_NEAR(H.dot(x) / (H.norm() * x.norm()), -1.0, 1e-9);
    }
    const Vec2 u(1.1, 0.5);
    EXPECT_NEAR((oracle::fd_coordinate_laplacian(s, u, 5e-4) - mean_curvature(s, u)).norm(), 0.0, 1e-5);
}

TEST(MeanCurvature, MinimalChartsVanishOnThousandPoints) {
    for (const auto& label : mesh_surface_labels()) {
        const auto chart = make_surface(label);
        if (!chart.is_minimal()) continue;
        ASSERT_TRUE(chart.has_analytic_derivatives()) << label;
        double worst = 0.0;
        for (const Vec2& u : quasi_random_points(chart.domain(), 1000)) {
            worst = std::max(worst, mean_curvature(chart, u).norm());
        }
        EXPECT_LE(worst, 1e-6) << label;
    }
}

TEST(MeanCurvature, FiniteDifferenceFallbackWithinTolerance) {
    // Catenoid map without analytic derivatives: FD tolerance 10 h_fd.
    const auto ref = make_catenoid();
    const ImmersionChart fd("catenoid-fd", ref.domain(), [ref](const Vec2& u) { return ref.map(u); }, true);
    ASSERT_FALSE(fd.has_analytic_derivatives());
    for (const Vec2& u : quasi_random_points(fd.domain(), 200)) {
        EXPECT_LE(mean_curvature(fd, u).norm(), 10.0 * fd.fd_step());
        EXPECT_NEAR((fd.jacobian(u) - ref.jacobian(u)).norm(), 0.0, 1e-6 * std::cosh(u[0]));
    }
}

TEST(Omega, RecursionMatchesGammaOracle) {
    EXPECT_EQ(omega(1), 2.0);
    EXPECT_NEAR(omega(2), oracle::pi, 1e-15);
    for (int d = 1; d <= 12; ++d) EXPECT_NEAR(omega(d), oracle::omega(d), 1e-13) << d;
    EXPECT_NEAR(omega(7), 16 * std::pow(oracle::pi, 3) / 105, 1e-13);
    EXPECT_THROW(omega(0), ArgumentError);
    EXPECT_THROW(omega(-3), ArgumentError);
}

TEST(Cones, PlaneConeHasDensityPi) {
    const auto cones = cone_entries();
    ASSERT_EQ(cones.front().label, "plane-cone");
    EXPECT_NEAR(cone_density(cones.front()), oracle::pi, 1e-15);
}

TEST(Cones, SimonsConeDensity) {
    const auto cones = cone_entries();
    ASSERT_EQ(cones.back().label, "simons-cone");
    // Round S^3 of radius r has area 2 pi^2 r^3.
    const double r = 1.0 / std::sqrt(2.0);
    const double link = std::pow(2 * oracle::pi * oracle::pi * r * r * r, 2);
    EXPECT_NEAR(cones.back().link_area, link, 1e-12);
    EXPECT_NEAR(link, std::pow(oracle::pi, 4) / 2, 1e-12);
    EXPECT_NEAR(cone_density(cones.back()), std::pow(oracle::pi, 4) / 14, 1e-12);
    EXPECT_GE(cone_density(cones.back()), oracle::omega(7));
}

TEST(Cones, ConstructionValidates) {
    EXPECT_THROW(AnalyticConeEntry("bad", 2, -1.0, ""), ArgumentError);
    EXPECT_THROW(AnalyticConeEntry("thin", 2, 3.0, ""), ArgumentError);  // 1.5 < pi
    EXPECT_THROW(AnalyticConeEntry("nodim", 0, 3.0, ""), ArgumentError);
}

TEST(Catalog, LabelsAndListing) {
    const std::string text = list_surfaces();
    for (const char* label : {"plane", "catenoid", "helicoid", "enneper", "sphere"}) {
        EXPECT_NE(text.find(label), std::string::npos) << label;
    }
    EXPECT_NE(text.find("simons-cone"), std::string::npos);
    EXPECT_NE(text.find("analytic-only"), std::string::npos);
    EXPECT_EQ(text, list_surfaces());
    EXPECT_LT(text.find("plane\t"), text.find("catenoid\t"));
    EXPECT_THROW(make_surface("torus"), ArgumentError);
}

TEST(Catalog, SphereIsTheOnlyNonMinimalEntry) {
    for (const auto& label : mesh_surface_labels()) {
        EXPECT_EQ(make_surface(label).is_minimal(), label != "sphere") << label;
    }
}

TEST(Catalog, ScaledChartScalesEverything) {
    const auto c = make_catenoid();
    const auto s = c.scaled(2.0);
    const Vec2 u(0.3, 0.9);
    EXPECT_EQ(s.map(u), 2.0 * c.map(u));
    EXPECT_EQ(pullback_metric(s, u), 4.0 * pullback_metric(c, u));
    EXPECT_DOUBLE_EQ(*s.analytic_area, 4.0 * *c.analytic_area);
}
