#include "minsurf/catalog.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/mesh_io.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace minsurf;

namespace {

double max_edge(const MetricMesh& m) {
    double h = 0.0;
    for (const auto& e : m.edges) h = std::max(h, e.length);
    return h;
}

double area_order(const ImmersionChart& chart, double target_h, double exact) {
    MetricMesh m = triangulate(chart, target_h);
    const double e0 = std::abs(m.total_area() - exact);
    m = refine(m, chart);
    const double e1 = std::abs(m.total_area() - exact);
    return std::log2(e0 / e1);
}

} // namespace

TEST(Triangulate, PlaneEdgeLengthsAndTriangleCount) {
    const MetricMesh m = triangulate(make_plane(5), 0.1);
    EXPECT_LE(max_edge(m), 1.5 * 0.1);
    EXPECT_EQ(m.h, max_edge(m));
    // Equilateral cells of side 0.1 on a 10 x 10 square: about 23000.
    EXPECT_GT(m.num_triangles(), 20000u / 4);
    EXPECT_LT(m.num_triangles(), 20000u * 4);
    EXPECT_NEAR(m.total_area(), 100.0, 1e-9);
    EXPECT_EQ(validate_mesh(m), "");
}

TEST(Triangulate, CatenoidAreaAgainstQuadrature) {
    const MetricMesh m = triangulate(make_catenoid(2), 0.05);
    const double exact = oracle::catenoid_area(2.0);
    EXPECT_NEAR(m.total_area(), exact, 0.005 * exact);
}

TEST(Triangulate, CatalogAreasAgreeWithOracles) {
    EXPECT_NEAR(*make_catenoid(1.5).analytic_area, oracle::catenoid_area(1.5), 1e-9);
    // The ball radius is larger than any point of the disk image.
    EXPECT_NEAR(*make_enneper(1.0).analytic_area, oracle::enneper_ball_area(1e3, 1.0, 400, 400), 1e-3);
}

TEST(Triangulate, EveryCatalogSurfaceIsAValidManifoldMesh) {
    for (const auto& label : mesh_surface_labels()) {
        SurfaceOptions o;
        if (label == "helicoid") o.extent = 3.0;
        const auto chart = make_surface(label, o);
        const MetricMesh m = triangulate(chart, 0.2, GradingPolicy::graded_at(default_base(label)));
        EXPECT_EQ(validate_mesh(m), "") << label;
        EXPECT_FALSE(m.has_non_manifold_edges()) << label;
        EXPECT_LE(m.h, 1.5 * 0.2) << label;
        EXPECT_LT(std::abs(m.total_area() - *chart.analytic_area), 0.02 * *chart.analytic_area) << label;
    }
}

TEST(Triangulate, EdgeLengthsDominateChords) {
    for (const auto& label : {"catenoid", "enneper", "sphere"}) {
        const auto chart = make_surface(label);
        const MetricMesh m = triangulate(chart, 0.2);
        for (const auto& e : m.edges) {
            const double chord = (m.vertices[static_cast<std::size_t>(e.a)].x -
                                  m.vertices[static_cast<std::size_t>(e.b)].x).norm();
            EXPECT_GE(e.length, chord * (1 - 1e-12)) << label;
        }
    }
}

TEST(Triangulate, GradedBaseIsAVertex) {
    const auto chart = make_catenoid();
    const Vec2 base(0.3, 0.2);
    const MetricMesh m = triangulate(chart, 0.2, GradingPolicy::graded_at(base));
    const int b = nearest_vertex(m, chart.domain(), base);
    EXPECT_LT((m.vertices[static_cast<std::size_t>(b)].u - base).norm(), 1e-12);
}

TEST(Triangulate, SeamVerticesAreIdentified) {
    const auto chart = make_catenoid(1.0);
    const MetricMesh m = triangulate(chart, 0.2);
    // Only the two rims are boundary: the theta seam is glued.
    for (int v : m.boundary_vertices) {
        EXPECT_NEAR(std::abs(m.vertices[static_cast<std::size_t>(v)].u[0]), 1.0, 1e-12);
    }
}

TEST(Triangulate, InvalidArgumentsThrow) {
    EXPECT_THROW(triangulate(make_plane(), 0.0), ArgumentError);
    EXPECT_THROW(triangulate(make_plane(), 0.01, GradingPolicy::uniform(), 1000), ResourceError);
    EXPECT_THROW(triangulate(make_plane(1), 0.1, GradingPolicy::graded_at(Vec2(3, 0))), DomainError);
}

TEST(EdgeLength, PlaneAndCatenoidExamples) {
    EXPECT_NEAR(edge_length(make_plane(), Vec2(0, 0), Vec2(3, 4)), 5.0, 1e-12);
    // Along the neck circle the metric factor is 1.
    EXPECT_NEAR(edge_length(make_catenoid(), Vec2(0, 0), Vec2(0, 0.1)), 0.1, 1e-12);
    // Along a meridian the length is sinh(b) - sinh(a); quadrature is close.
    EXPECT_NEAR(edge_length(make_catenoid(), Vec2(0.5, 0), Vec2(0.6, 0)), std::sinh(0.6) - std::sinh(0.5), 1e-8);
}

TEST(Refine, HalvesSpacingAndKeepsBoundary) {
    const auto chart = make_enneper(2.0);
    const MetricMesh a = triangulate(chart, 0.2);
    const MetricMesh b = refine(a, chart);
    EXPECT_LE(b.h, 0.6 * a.h);
    EXPECT_EQ(b.num_triangles(), 4 * a.num_triangles());
    EXPECT_EQ(validate_mesh(b), "");
    std::set<int> fine(b.boundary_vertices.begin(), b.boundary_vertices.end());
    for (int v : a.boundary_vertices) EXPECT_TRUE(fine.count(v)) << v;
    for (std::size_t v = 0; v < a.num_vertices(); ++v) EXPECT_EQ(a.vertices[v].u, b.vertices[v].u);
    // Boundary midpoints stay on the disk rim.
    for (int v : b.boundary_vertices) EXPECT_NEAR(b.vertices[static_cast<std::size_t>(v)].u.norm(), 2.0, 1e-12);
}

TEST(Refine, AreaConvergesAtSecondOrder) {
    EXPECT_GE(area_order(make_catenoid(2), 0.2, oracle::catenoid_area(2.0)), 1.9);
    const auto hel = make_helicoid(3.0);
    const double hel_exact = 2 * oracle::simpson([](double s) { return std::sqrt(1 + s * s); }, -3.0, 3.0) * 3.0;
    EXPECT_GE(area_order(hel, 0.2, hel_exact), 1.9);
    const auto enn = make_enneper(1.5);
    const double enn_exact = oracle::enneper_ball_area(1e3, 1.5, 1000, 1000);
    MetricMesh m = triangulate(enn, 0.2);
    double prev = std::abs(m.total_area() - enn_exact);
    for (int k = 0; k < 2; ++k) {
        m = refine(m, enn);
        const double err = std::abs(m.total_area() - enn_exact);
        EXPECT_LT(err, 0.5 * prev);
        prev = err;
    }
}

TEST(Refine, ChartMismatchThrows) {
    const MetricMesh m = triangulate(make_plane(1), 0.2);
    EXPECT_THROW(refine(m, make_catenoid()), ArgumentError);
}

TEST(MeshIo, RoundTripIsExact) {
    const auto chart = make_catenoid(1.0);
    const MetricMesh m = triangulate(chart, 0.2, GradingPolicy::graded_at(Vec2(0, 0)));
    const std::string text = mesh_to_string(m);
    const MetricMesh back = mesh_from_string(text);
    EXPECT_EQ(mesh_to_string(back), text);
    ASSERT_EQ(back.num_vertices(), m.num_vertices());
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
        EXPECT_EQ(back.vertices[v].u, m.vertices[v].u);
        EXPECT_EQ(back.vertices[v].x, m.vertices[v].x);
    }
    for (std::size_t e = 0; e < m.edges.size(); ++e) EXPECT_EQ(back.edges[e].length, m.edges[e].length);
    EXPECT_EQ(back.h, m.h);
    EXPECT_EQ(back.boundary_vertices, m.boundary_vertices);
}

TEST(MeshIo, MalformedInputThrows) {
    EXPECT_THROW(mesh_from_string("not a mesh"), FormatError);
    std::string text = mesh_to_string(triangulate(make_plane(1), 0.5));
    text.resize(text.size() / 2);
    EXPECT_THROW(mesh_from_string(text), FormatError);
}
