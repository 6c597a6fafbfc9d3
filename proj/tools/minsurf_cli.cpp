// minsurf: command-line front end for the density laboratory.
//
//   minsurf list-surfaces
//   minsurf run <config> [--set key=value]... [--output-dir DIR]
//   minsurf converge <config> --quantity ID [--set key=value]... [--output-dir DIR]
//   minsurf export-mesh --surface LABEL [--target-h H] [--refine N] [-o FILE]
//
// MINSURF_OUTPUT_DIR overrides the output directory of the config file;
// --output-dir overrides both. Exit status: 0 when no check failed, 1 when
// at least one did, 2 on errors.

#include "minsurf/catalog.hpp"
#include "minsurf/config.hpp"
#include "minsurf/geodesic.hpp"
#include "minsurf/harness.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/mesh_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

minsurf::RunConfig load(const std::string& path, const std::vector<std::string>& overrides,
                        const std::string& output_dir) {
    minsurf::RunConfig cfg = minsurf::load_config(path);
    for (const auto& o : overrides) minsurf::apply_override(cfg, o);
    if (const char* env = std::getenv("MINSURF_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    minsurf::validate_config(cfg);
    return cfg;
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides, const std::string& output_dir) {
    const minsurf::RunConfig cfg = load(path, overrides, output_dir);
    const minsurf::RunResult r = minsurf::run(cfg);
    minsurf::write_outputs(r, cfg.output_dir);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : r.findings) {
        std::cout << minsurf::to_string(f.status) << "  level " << f.level << "  " << f.check << "  " << f.message
                  << "\n";
    }
    std::cout << "report written to " << (std::filesystem::path(cfg.output_dir) / "report.json").string() << "\n";
    return r.failed() ? 1 : 0;
}

int cmd_converge(const std::string& path, const std::string& quantity, const std::vector<std::string>& overrides,
                 const std::string& output_dir) {
    const minsurf::RunConfig cfg = load(path, overrides, output_dir);
    const minsurf::ConvergenceTable t = minsurf::convergence_study(cfg, quantity);
    const std::string csv = minsurf::to_csv(t);
    std::filesystem::create_directories(cfg.output_dir);
    minsurf::write_text(std::filesystem::path(cfg.output_dir) / ("converge-" + quantity + ".csv"), csv);
    std::cout << csv;
    return 0;
}

int cmd_export(const std::string& label, double target_h, int refinements, std::optional<double> extent,
               bool uniform, const std::string& out, const std::string& field_out) {
    minsurf::SurfaceOptions opts;
    opts.extent = extent;
    const minsurf::ImmersionChart chart = minsurf::make_surface(label, opts);
    const minsurf::Vec2 base = minsurf::default_base(label);
    const auto grading = uniform ? minsurf::GradingPolicy::uniform() : minsurf::GradingPolicy::graded_at(base);
    minsurf::MetricMesh mesh = minsurf::triangulate(chart, target_h, grading);
    for (int k = 0; k < refinements; ++k) mesh = minsurf::refine(mesh, chart);
    if (out.empty() || out == "-") {
        minsurf::write_mesh(std::cout, mesh);
    } else {
        std::ofstream os(out);
        if (!os) throw minsurf::ResourceError("cannot write '" + out + "'");
        minsurf::write_mesh(os, mesh);
    }
    if (!field_out.empty()) {
        const int b = minsurf::nearest_vertex(mesh, chart.domain(), base);
        const minsurf::DistanceField f = minsurf::distance_field(mesh, b);
        std::ofstream os(field_out);
        if (!os) throw minsurf::ResourceError("cannot write '" + field_out + "'");
        minsurf::write_field_csv(os, mesh, f);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intrinsic and extrinsic area densities of minimal surfaces"};
    app.require_subcommand(1);

    app.add_subcommand("list-surfaces", "List catalog surfaces and analytic cone entries");

    auto* run = app.add_subcommand("run", "Run the configured checks at every refinement level");
    std::string run_config, run_out;
    std::vector<std::string> run_set;
    run->add_option("config", run_config, "Config file (key = value lines)")->required()->check(CLI::ExistingFile);
    run->add_option("--set", run_set, "Override a config key (key=value)");
    run->add_option("--output-dir", run_out, "Output directory");

    auto* conv = app.add_subcommand("converge", "Refinement study of one quantity");
    std::string conv_config, conv_quantity, conv_out;
    std::vector<std::string> conv_set;
    conv->add_option("config", conv_config, "Config file")->required()->check(CLI::ExistingFile);
    conv->add_option("--quantity", conv_quantity, "mesh-area | intrinsic-density | extrinsic-density | residual | "
                                                  "error-integral | distance-error")
        ->required();
    conv->add_option("--set", conv_set, "Override a config key (key=value)");
    conv->add_option("--output-dir", conv_out, "Output directory");

    auto* exp = app.add_subcommand("export-mesh", "Triangulate a catalog surface and write the mesh");
    std::string exp_surface, exp_out = "-", exp_field;
    double exp_h = 0.1;
    int exp_refine = 0;
    std::optional<double> exp_extent;
    bool exp_uniform = false;
    exp->add_option("--surface", exp_surface, "Catalog label")->required();
    exp->add_option("--target-h", exp_h, "Target intrinsic spacing")->check(CLI::PositiveNumber);
    exp->add_option("--refine", exp_refine, "Midpoint refinements after meshing")->check(CLI::NonNegativeNumber);
    exp->add_option("--extent", exp_extent, "Domain size parameter of the surface");
    exp->add_flag("--uniform", exp_uniform, "Disable grading toward the base point");
    exp->add_option("-o,--output", exp_out, "Mesh file ('-' for stdout)");
    exp->add_option("--field-csv", exp_field, "Also write the distance field from the default base point");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-surfaces")) {
            std::cout << minsurf::list_surfaces();
            return 0;
        }
        if (app.got_subcommand(run)) return cmd_run(run_config, run_set, run_out);
        if (app.got_subcommand(conv)) return cmd_converge(conv_config, conv_quantity, conv_set, conv_out);
        if (app.got_subcommand(exp)) {
            return cmd_export(exp_surface, exp_h, exp_refine, exp_extent, exp_uniform, exp_out, exp_field);
        }
    } catch (const minsurf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
