#include "minsurf/harness.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace minsurf;

namespace {

RunConfig from_text(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

const char* kPlane =
    "surface = plane\n"
    "extent = 5\n"
    "target_h = 0.1   # coarse\n"
    "levels = 2\n"
    "radii = 1 1.5 2 3 4\n"
    "annulus = 1 2\n"
    "checks = all\n";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST(Config, ParsesKeysCommentsAndLists) {
    const RunConfig c = from_text(kPlane);
    EXPECT_EQ(c.surface, "plane");
    EXPECT_EQ(*c.extent, 5.0);
    EXPECT_EQ(c.target_h, 0.1);
    EXPECT_EQ(c.levels, 2);
    EXPECT_EQ(c.radii, (std::vector<double>{1, 1.5, 2, 3, 4}));
    EXPECT_EQ(c.annulus_r1, 1.0);
    EXPECT_EQ(c.annulus_r2, 2.0);
    EXPECT_EQ(c.checks, check_ids());
    EXPECT_FALSE(c.base_u.has_value());
    EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, OverridesAndErrors) {
    RunConfig c = from_text(kPlane);
    apply_override(c, "levels=3");
    apply_override(c, "checks=profile,limits");
    apply_override(c, "base_u=0.5 -0.25");
    apply_override(c, "method=graph-dijkstra");
    EXPECT_EQ(c.levels, 3);
    EXPECT_EQ(c.checks, (std::vector<std::string>{"profile", "limits"}));
    EXPECT_EQ(*c.base_u, Vec2(0.5, -0.25));
    EXPECT_EQ(c.method, GeodesicMethod::graph_dijkstra);
    EXPECT_THROW(apply_override(c, "levels"), ArgumentError);
    EXPECT_THROW(apply_override(c, "colour=red"), ArgumentError);
    EXPECT_THROW(apply_override(c, "levels=2.5"), ArgumentError);
    EXPECT_THROW(apply_override(c, "target_h=fast"), ArgumentError);
    EXPECT_THROW(apply_override(c, "graded=maybe"), ArgumentError);
    EXPECT_THROW(from_text("surface plane\n"), ArgumentError);
    RunConfig bad = c;
    bad.surface = "torus";
    EXPECT_THROW(validate_config(bad), ArgumentError);
    bad = c;
    bad.checks = {"everything"};
    EXPECT_THROW(validate_config(bad), ArgumentError);
    bad = c;
    bad.annulus_r1 = 3.0;
    EXPECT_THROW(validate_config(bad), ArgumentError);
    bad = c;
    bad.chord_arc_eps = {1.0};
    EXPECT_THROW(validate_config(bad), ArgumentError);
}

TEST(Config, ShippedConfigsLoad) {
    for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(MINSURF_SOURCE_DIR) / "configs")) {
        if (e.path().extension() != ".cfg") continue;
        EXPECT_NO_THROW(validate_config(load_config(e.path().string()))) << e.path();
    }
    EXPECT_THROW(load_config("/nonexistent/minsurf.cfg"), ArgumentError);
}

TEST(Run, PlaneAllChecksPass) {
    const RunResult r = run(from_text(kPlane));
    EXPECT_FALSE(r.failed());
    EXPECT_EQ(r.findings.size(), 2 * check_ids().size());
    for (const auto& f : r.findings) EXPECT_EQ(f.status, Status::pass) << f.level << " " << f.check << ": " << f.message;
    EXPECT_EQ(r.report["summary"]["fail"], 0);
    EXPECT_EQ(r.report["levels"].size(), 2u);
    EXPECT_EQ(r.report["chart"]["label"], "plane");
    EXPECT_FALSE(r.report["environment"].contains("timestamp"));
}

TEST(Run, SphereWithoutMeanCurvatureFails) {
    RunConfig c = from_text("surface = sphere\ntarget_h = 0.1\nchecks = identity\ninclude_h = false\n");
    c.identity_points = 50;
    const RunResult r = run(c);
    ASSERT_EQ(r.findings.size(), 1u);
    EXPECT_EQ(r.findings[0].status, Status::fail);
    c.include_h = true;
    EXPECT_FALSE(run(c).failed());
}

TEST(Run, NonMinimalFindingsAreNotFailures) {
    RunConfig c = from_text("surface = sphere\ntarget_h = 0.1\nradius_count = 6\nannulus = 1 2\n");
    c.checks = {"profile", "limits", "chord-arc", "residual"};
    const RunResult r = run(c);
    EXPECT_FALSE(r.failed());
    bool warned = false;
    for (const auto& f : r.findings) warned = warned || f.status == Status::warn;
    EXPECT_TRUE(warned);
}

TEST(Run, InvalidScheduleIsAnError) {
    RunConfig c = from_text(kPlane);
    c.radii = {};
    c.radius_min = 0.2;  // below 10 h
    EXPECT_THROW(run(c), RangeError);
    c = from_text(kPlane);
    c.radii = {10.0, 20.0};
    EXPECT_THROW(run(c), RangeError);
}

TEST(Run, DeterministicOutputs) {
    RunConfig c = from_text(kPlane);
    c.levels = 1;
    const RunResult a = run(c);
    const RunResult b = run(c);
    EXPECT_EQ(a.report.dump(2), b.report.dump(2));
    EXPECT_EQ(a.profile_csv, b.profile_csv);
    EXPECT_EQ(a.residual_csv, b.residual_csv);

    const auto dir = std::filesystem::temp_directory_path() / "minsurf-test-harness";
    std::filesystem::remove_all(dir);
    write_outputs(a, dir.string());
    EXPECT_EQ(slurp(dir / "report.json"), a.report.dump(2) + "\n");
    EXPECT_EQ(slurp(dir / "profile.csv").rfind("# minsurf profile v1\n", 0), 0u);
    EXPECT_EQ(slurp(dir / "residual.csv"), a.residual_csv);
    const Json back = Json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(back["config"]["surface"], "plane");
    std::filesystem::remove_all(dir);
}

TEST(Convergence, CatenoidAreaIsSecondOrder) {
    RunConfig c = from_text("surface = catenoid\ntarget_h = 0.2\nlevels = 3\ngraded = false\n");
    const ConvergenceTable t = convergence_study(c, "mesh-area");
    ASSERT_EQ(t.rows.size(), 3u);
    ASSERT_TRUE(t.reference.has_value());
    EXPECT_NEAR(*t.reference, oracle::catenoid_area(2.0), 1e-9);
    for (std::size_t l = 1; l < 3; ++l) {
        ASSERT_TRUE(t.rows[l].order.has_value());
        EXPECT_GE(*t.rows[l].order, 1.9);
    }
    const std::string csv = to_csv(t);
    EXPECT_EQ(csv.rfind("# minsurf convergence v1 quantity=mesh-area\n", 0), 0u);
}

TEST(Convergence, PlaneDensityExtrapolatesToPi) {
    RunConfig c = from_text("surface = plane\nextent = 3\ntarget_h = 0.1\nlevels = 3\n");
    const ConvergenceTable t = convergence_study(c, "intrinsic-density");
    ASSERT_TRUE(t.extrapolated.has_value());
    EXPECT_NEAR(*t.extrapolated, oracle::pi, 1e-4);
    EXPECT_NEAR(t.rows.back().value, oracle::pi, 1e-3);
    EXPECT_THROW(convergence_study(c, "curvature"), ArgumentError);
}

TEST(Convergence, DistanceErrorOnPlaneIsRoundOff) {
    RunConfig c = from_text("surface = plane\nextent = 3\ntarget_h = 0.2\nlevels = 2\n");
    const ConvergenceTable t = convergence_study(c, "distance-error");
    for (const auto& row : t.rows) EXPECT_LE(row.value, 64 * std::numeric_limits<double>::epsilon() * 3 * std::sqrt(2.0));
}
