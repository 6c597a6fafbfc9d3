#pragma once

#include "minsurf/catalog.hpp"
#include "minsurf/config.hpp"
#include "minsurf/density.hpp"
#include "minsurf/geodesic.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/monotonicity.hpp"
#include "minsurf/report.hpp"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace minsurf {

inline constexpr const char* kVersion = "1.0.0";

/// Nested meshes and one distance field per level from a fixed base vertex.
/// Each field carries eps_solver = max(plane calibration, 2 x change under
/// the neighbouring nested refinement).
struct LevelStack {
    std::vector<MetricMesh> meshes;        ///< requested levels
    std::optional<MetricMesh> extra;       ///< one more refinement, single-level runs only
    int base_vertex = 0;
    std::vector<DistanceField> fields;
    std::vector<SolverCalibration> plane;
    std::vector<double> nested_difference;

    std::vector<const MetricMesh*> chain() const {
        std::vector<const MetricMesh*> c;
        for (const auto& m : meshes) c.push_back(&m);
        if (extra) c.push_back(&*extra);
        return c;
    }
};

namespace detail {

inline GeodesicOptions geodesic_options(const RunConfig& cfg) {
    GeodesicOptions o;
    o.method = cfg.method;
    o.steiner_points = cfg.steiner_points;
    return o;
}

inline std::vector<MetricMesh> build_meshes(const ImmersionChart& chart, const RunConfig& cfg, const Vec2& base_u,
                                            int count) {
    const GradingPolicy grading = cfg.graded ? GradingPolicy::graded_at(base_u) : GradingPolicy::uniform();
    std::vector<MetricMesh> out;
    out.push_back(triangulate(chart, cfg.target_h, grading, cfg.vertex_cap));
    for (int l = 1; l < count; ++l) out.push_back(refine(out.back(), chart, cfg.vertex_cap));
    return out;
}

/// Fields from `base` on every mesh of the chain, with error bars.
inline void solve_fields(const std::vector<const MetricMesh*>& chain, std::size_t used, int base, const RunConfig& cfg,
                         const std::vector<SolverCalibration>& plane, std::vector<DistanceField>& fields,
                         std::vector<double>& nested) {
    const GeodesicOptions opts = geodesic_options(cfg);
    std::vector<DistanceField> all;
    for (const MetricMesh* m : chain) all.push_back(distance_field(*m, base, opts));
    fields.clear();
    nested.clear();
    for (std::size_t l = 0; l < used; ++l) {
        const double diff = l + 1 < all.size() ? nested_field_difference(all[l], all[l + 1])
                                               : nested_field_difference(all[l - 1], all[l]);
        all[l].eps_solver = solver_error_bound(plane[l], diff);
        nested.push_back(diff);
        fields.push_back(all[l]);
    }
}

} // namespace detail

inline LevelStack build_level_stack(const ImmersionChart& chart, const RunConfig& cfg, const Vec2& base_u) {
    LevelStack s;
    const int count = std::max(cfg.levels, 2);
    auto meshes = detail::build_meshes(chart, cfg, base_u, count);
    if (cfg.levels == 1) s.extra = std::move(meshes.back());
    meshes.resize(static_cast<std::size_t>(cfg.levels));
    s.meshes = std::move(meshes);
    s.base_vertex = nearest_vertex(s.meshes.front(), chart.domain(), base_u);
    const GeodesicOptions opts = detail::geodesic_options(cfg);
    for (const auto& m : s.meshes) s.plane.push_back(calibrate_solver_error(m.target_h, cfg.graded, opts));
    detail::solve_fields(s.chain(), s.meshes.size(), s.base_vertex, cfg, s.plane, s.fields, s.nested_difference);
    return s;
}

/// Quasi-random base points pulled halfway toward the domain centre so
/// each keeps a usable guard radius.
inline std::vector<Vec2> sample_base_points(const ParamDomain& dom, int count, std::uint64_t seed) {
    std::vector<Vec2> out;
    const Vec2 centre = dom.shape == DomainShape::disk ? Vec2(0.0, 0.0) : Vec2(0.5 * (dom.lo + dom.hi));
    for (const Vec2& u : quasi_random_points(dom, static_cast<std::size_t>(count), seed)) {
        out.push_back(centre + 0.5 * (u - centre));
    }
    return out;
}

struct ConvergenceRow {
    int level = 0;
    double h = 0.0;
    double value = 0.0;
    double error = 0.0;
    std::optional<double> order;
};

struct ConvergenceTable {
    std::string quantity;
    std::vector<ConvergenceRow> rows;
    std::optional<double> reference;
    std::optional<double> extrapolated;
    std::string note;
};

/// Orders log(e_{l-1}/e_l)/log(h_{l-1}/h_l) between consecutive rows.
inline void fill_orders(std::vector<ConvergenceRow>& rows) {
    for (std::size_t l = 1; l < rows.size(); ++l) {
        const double e0 = rows[l - 1].error, e1 = rows[l].error;
        if (e0 > 0.0 && e1 > 0.0 && std::isfinite(e0) && std::isfinite(e1)) {
            rows[l].order = std::log(e0 / e1) / std::log(rows[l - 1].h / rows[l].h);
        }
    }
}

struct RunResult {
    Json report;
    std::vector<Finding> findings;
    std::string profile_csv;
    std::string residual_csv;
    std::vector<std::string> warnings;

    bool failed() const { return any_fail(findings); }
};

namespace detail {

inline Json environment_fingerprint(bool timestamp) {
    Json j;
    j["tool"] = "minsurf";
    j["version"] = kVersion;
#if defined(__VERSION__)
    j["compiler"] = __VERSION__;
#endif
    if (timestamp) {
        const std::time_t t = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        j["timestamp"] = buf;
    }
    return j;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// Demotes FAIL to WARN with a note (property not claimed for this chart).
inline void demote(Finding& f, const std::string& why) {
    if (f.status == Status::fail) {
        f.status = Status::warn;
        f.message += "; " + why;
    }
}

inline Finding profile_finding(const DensityProfile& p, bool minimal) {
    Finding f;
    f.check = "profile";
    f.values["radii"] = num_array(p.radii);
    f.values["m_int"] = num_array(p.m_int);
    f.values["m_ext"] = num_array(p.m_ext);
    f.values["lambda"] = num(p.lambda());
    f.values["guard_intrinsic"] = num(p.guard.intrinsic);
    f.values["guard_extrinsic"] = num(p.guard.extrinsic);
    f.values["violations"] = p.findings;
    f.tolerances["tol_profile"] = p.tol_profile;
    f.tolerances["eps_solver"] = p.eps_solver;
    const bool ordering = p.int_above_ext == 0;
    const bool monotone = p.int_decreases == 0 && p.ext_decreases == 0 && p.below_omega == 0;
    std::ostringstream os;
    os << p.radii.size() << " radii; " << p.findings.size() << " recorded violations";
    f.message = os.str();
    if (!ordering) {
        f.status = Status::fail;
    } else if (!monotone) {
        f.status = minimal ? Status::fail : Status::warn;
        if (!minimal) f.message += " (monotonicity not claimed for a non-minimal chart)";
    }
    return f;
}

inline Finding merge(Finding into, const Finding& part, const std::string& key) {
    into.values[key] = to_json(part);
    if (part.status == Status::fail) into.status = Status::fail;
    else if (part.status == Status::warn && into.status == Status::pass) into.status = Status::warn;
    if (part.status != Status::pass) into.message += "; " + key + ": " + part.message;
    return into;
}

inline std::vector<double> radius_schedule(const RunConfig& cfg, double r_lo, double r_hi,
                                           std::vector<std::string>& warnings) {
    std::vector<double> radii;
    if (!cfg.radii.empty()) {
        for (double r : cfg.radii) {
            if (r >= r_lo * (1.0 - 1e-12) && r <= r_hi * (1.0 + 1e-12)) {
                radii.push_back(r);
            } else {
                warnings.push_back("radius " + fmt(r) + " outside valid window, dropped");
            }
        }
    } else {
        const double lo = cfg.radius_min > 0.0 ? cfg.radius_min : r_lo;
        double hi = cfg.radius_max > 0.0 ? cfg.radius_max : r_hi;
        if (hi > r_hi) {
            warnings.push_back("radius_max " + fmt(hi) + " truncated to guard " + fmt(r_hi));
            hi = r_hi;
        }
        if (lo < r_lo * (1.0 - 1e-12)) throw RangeError("radius_min below the small-radius cutoff " + fmt(r_lo));
        if (lo <= hi) radii = geometric_radii(lo, hi, cfg.radius_count);
    }
    if (radii.empty()) throw RangeError("empty valid radius window [" + fmt(r_lo) + ", " + fmt(r_hi) + "]");
    return radii;
}

} // namespace detail

/// Meshes the configured surface at all levels, runs the requested checks
/// at each level and assembles the report.
inline RunResult run(const RunConfig& cfg) {
    validate_config(cfg);
    RunResult out;
    const ImmersionChart chart = make_surface(cfg.surface, cfg.surface_options());
    const bool minimal = chart.is_minimal();
    const Vec2 base_u = cfg.base_u.value_or(default_base(cfg.surface));
    detail::require_in_domain(chart, base_u);
    const LevelStack stack = build_level_stack(chart, cfg, base_u);
    const std::size_t L = stack.meshes.size();

    // One radius schedule shared by all levels: valid on the coarsest mesh and
    // inside every level's guard.
    double guard_int = kInf, guard_ext = kInf;
    for (std::size_t l = 0; l < L; ++l) {
        const GuardRadii g = guard_radii(stack.meshes[l], stack.fields[l]);
        guard_int = std::min(guard_int, g.intrinsic);
        guard_ext = std::min(guard_ext, g.extrinsic);
    }
    const double r_lo = min_radius(stack.meshes.front());
    const double guard = std::min(guard_int, guard_ext);
    std::vector<double> radii;
    if (cfg.wants("profile") || cfg.wants("limits")) {
        radii = detail::radius_schedule(cfg, r_lo, guard, out.warnings);
    }

    // Identity defect is a property of the chart alone.
    double identity_defect = 0.0;
    if (cfg.wants("identity")) {
        for (const Vec2& u : quasi_random_points(chart.domain(), static_cast<std::size_t>(cfg.identity_points))) {
            identity_defect = std::max(identity_defect, laplacian_identity_check(chart, u, cfg.include_h));
        }
    }

    // Extra base points for the lower bound share the meshes.
    std::vector<Vec2> samples = sample_base_points(chart.domain(), cfg.base_samples, cfg.seed);
    std::vector<std::vector<DistanceField>> sample_fields;
    for (const Vec2& su : samples) {
        std::vector<DistanceField> fs;
        std::vector<double> nd;
        detail::solve_fields(stack.chain(), L, nearest_vertex(stack.meshes.front(), chart.domain(), su), cfg,
                             stack.plane, fs, nd);
        sample_fields.push_back(std::move(fs));
    }

    std::ostringstream prof_csv, res_csv;
    prof_csv.precision(17);
    res_csv.precision(17);
    prof_csv << "# minsurf profile v1\nlevel,R,m_int,m_ext,within_guard_int,within_guard_ext\n";
    res_csv << "# minsurf residual v1\nlevel,h,lhs,error_integral,h_term,residual,order\n";

    Json levels = Json::array();
    std::vector<double> residuals;
    for (std::size_t l = 0; l < L; ++l) {
        const MetricMesh& mesh = stack.meshes[l];
        const DistanceField& field = stack.fields[l];
        const GuardRadii g = guard_radii(mesh, field);
        const GradientField grad = gradient_field(mesh, field);
        Json lv;
        lv["level"] = l;
        lv["target_h"] = mesh.target_h;
        lv["h"] = mesh.h;
        lv["vertices"] = mesh.vertices.size();
        lv["triangles"] = mesh.triangles.size();
        lv["mesh_area"] = mesh.total_area();
        lv["base_vertex"] = stack.base_vertex;
        lv["base_u"] = Json::array({mesh.vertices[static_cast<std::size_t>(stack.base_vertex)].u[0],
                                    mesh.vertices[static_cast<std::size_t>(stack.base_vertex)].u[1]});
        lv["eps_solver"] = field.eps_solver;
        lv["eps_plane"] = stack.plane[l].eps_solver;
        lv["nested_difference"] = stack.nested_difference[l];
        lv["guard_intrinsic"] = num(g.intrinsic);
        lv["guard_extrinsic"] = num(g.extrinsic);
        lv["invalid_area_fraction"] = grad.invalid_area_fraction;
        lv["unreachable"] = field.unreachable;
        auto add = [&](Finding f) {
            f.level = static_cast<int>(l);
            out.findings.push_back(std::move(f));
        };

        std::optional<DensityProfile> profile;
        if (!radii.empty()) profile = density_profile(mesh, field, radii);
        if (profile) {
            for (std::size_t k = 0; k < radii.size(); ++k) {
                prof_csv << l << ',' << radii[k] << ',' << profile->m_int[k] << ',' << profile->m_ext[k] << ','
                         << (radii[k] <= g.intrinsic ? 1 : 0) << ',' << (radii[k] <= g.extrinsic ? 1 : 0) << "\n";
            }
        }

        if (cfg.wants("profile")) {
            Finding f = detail::profile_finding(*profile, minimal);
            f = detail::merge(f, lower_bound_check(*profile, minimal), "lower_bound");
            for (std::size_t s = 0; s < samples.size(); ++s) {
                const DistanceField& sf = sample_fields[s][l];
                const double sg = guard_radius(mesh, sf);
                const std::string key = "lower_bound_sample_" + std::to_string(s);
                if (!(sg >= r_lo)) {
                    Finding skip;
                    skip.check = "lower-bound";
                    skip.status = Status::warn;
                    skip.message = "sample base " + std::to_string(s) + " has no valid radius window";
                    f = detail::merge(f, skip, key);
                    continue;
                }
                const DensityProfile sp = density_profile(mesh, sf, geometric_radii(r_lo, sg, cfg.radius_count));
                f = detail::merge(f, lower_bound_check(sp, minimal), key);
            }
            add(f);
        }

        if (cfg.wants("residual")) {
            ResidualOptions ro;
            ro.n_t = cfg.n_t;
            ro.include_h = cfg.include_h;
            const ResidualReport rep = monotonicity_residual(mesh, chart, field, grad, cfg.annulus_r1, cfg.annulus_r2, ro);
            residuals.push_back(rep.residual);
            Finding f = residual_finding(rep, minimal);
            std::optional<double> order;
            if (l > 0 && residuals[l - 1] != 0.0 && rep.residual != 0.0) {
                order = std::log2(std::abs(residuals[l - 1]) / std::abs(rep.residual));
                f.values["order"] = *order;
            }
            res_csv << l << ',' << rep.h << ',' << rep.lhs << ',' << rep.error_integral << ',' << rep.h_term << ','
                    << rep.residual << ',' << (order ? detail::fmt(*order) : std::string()) << "\n";
            lv["residual"] = to_json(rep);
            add(f);
        }

        if (cfg.wants("chord-arc")) {
            std::vector<double> cr = cfg.chord_arc_radii;
            if (cr.empty()) {
                for (double R = 0.5 * r_lo; 8.0 * R <= g.intrinsic && cr.size() < 4; R *= 2.0) cr.push_back(R);
            }
            std::vector<ChordArcCertificate> certs;
            for (double R : cr) {
                for (double e : cfg.chord_arc_eps) certs.push_back(chord_arc_check(mesh, field, R, e));
            }
            Finding f = chord_arc_finding(certs);
            if (certs.empty()) {
                f.status = Status::warn;
                f.message = "no radius with 2R >= 10h and 8R <= guard";
            }
            if (!minimal) detail::demote(f, "lemma not claimed for a non-minimal chart");
            add(f);
        }

        if (cfg.wants("identity")) {
            Finding f;
            f.check = "identity";
            f.values["max_defect"] = identity_defect;
            f.values["points"] = cfg.identity_points;
            f.values["include_h"] = cfg.include_h;
            f.tolerances["defect"] = 1e-6;
            f.status = identity_defect <= 1e-6 ? Status::pass : Status::fail;
            f.message = "max |Delta|x|^2 - 2d - 2x.H| = " + detail::fmt(identity_defect) +
                        (cfg.include_h ? "" : " (x.H term disabled)");
            add(f);
        }

        if (cfg.wants("limits")) {
            Finding f;
            if (radii.size() < 4) {
                f.check = "limits";
                f.status = Status::warn;
                f.message = "fewer than 4 radii; no extrapolation";
            } else {
                const LimitEstimate li = limit_estimate(*profile, false);
                const LimitEstimate le = limit_estimate(*profile, true);
                f = limit_equality_check(li, le, cfg.tol_limit);
                const double w = omega(mesh.d);
                if (minimal) {
                    for (const LimitEstimate* e : {&li, &le}) {
                        if (!e->infinite && e->value < w - e->error_bar) {
                            f.status = Status::fail;
                            f.message += "; limit below omega_d beyond its error bar";
                        }
                    }
                }
            }
            if (!minimal) detail::demote(f, "limit equality not claimed for a non-minimal chart");
            add(f);
        }

        if (cfg.wants("sandwich")) {
            const double R = std::min(g.intrinsic / (1.0 + cfg.sandwich_eps), g.extrinsic);
            Finding f;
            if (std::isfinite(R) && R >= r_lo) {
                f = ball_sandwich_check(mesh, field, R, cfg.sandwich_eps);
            } else {
                f.check = "sandwich";
                f.status = Status::warn;
                f.message = std::isfinite(R) ? "guard too small for the sandwich radius" : "closed surface: no guard";
                f.values["R"] = num(R);
            }
            if (!minimal) detail::demote(f, "properness not claimed for a non-minimal chart");
            add(f);
        }
        levels.push_back(lv);
    }

    Json orders = Json::array();
    for (std::size_t l = 1; l < residuals.size(); ++l) {
        orders.push_back(residuals[l] != 0.0 ? num(std::log2(std::abs(residuals[l - 1]) / std::abs(residuals[l])))
                                             : Json(nullptr));
    }

    Json report;
    report["environment"] = detail::environment_fingerprint(cfg.timestamp);
    report["config"] = to_json(cfg);
    report["chart"] = {{"label", chart.label()}, {"d", chart.d()}, {"N", chart.N()}, {"minimal", minimal},
                       {"domain", chart.domain().describe()}};
    report["radii"] = num_array(radii);
    report["levels"] = levels;
    report["residual_orders"] = orders;
    report["warnings"] = out.warnings;
    Json fs = Json::array();
    int np = 0, nw = 0, nf = 0;
    for (const auto& f : out.findings) {
        fs.push_back(to_json(f));
        (f.status == Status::pass ? np : f.status == Status::warn ? nw : nf)++;
    }
    report["findings"] = fs;
    report["summary"] = {{"pass", np}, {"warn", nw}, {"fail", nf}};
    out.report = std::move(report);
    out.profile_csv = prof_csv.str();
    out.residual_csv = res_csv.str();
    return out;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream o(p, std::ios::binary);
    if (!o) throw ResourceError("cannot write '" + p.string() + "'");
    o << s;
}

/// Writes report.json, profile.csv and residual.csv into `dir`.
inline void write_outputs(const RunResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_text(std::filesystem::path(dir) / "report.json", r.report.dump(2) + "\n");
    write_text(std::filesystem::path(dir) / "profile.csv", r.profile_csv);
    write_text(std::filesystem::path(dir) / "residual.csv", r.residual_csv);
}

inline const std::vector<std::string>& convergence_quantities() {
    static const std::vector<std::string> q{"mesh-area", "intrinsic-density", "extrinsic-density", "residual",
                                            "error-integral", "distance-error"};
    return q;
}

/// Per-level values of one quantity under nested refinement, with errors,
/// observed orders and, for densities, a Richardson-extrapolated value.
inline ConvergenceTable convergence_study(const RunConfig& cfg, const std::string& quantity) {
    validate_config(cfg);
    const auto& qs = convergence_quantities();
    if (std::find(qs.begin(), qs.end(), quantity) == qs.end()) {
        throw ArgumentError("unknown convergence quantity '" + quantity + "'");
    }
    const ImmersionChart chart = make_surface(cfg.surface, cfg.surface_options());
    const Vec2 base_u = cfg.base_u.value_or(default_base(cfg.surface));
    detail::require_in_domain(chart, base_u);
    ConvergenceTable t;
    t.quantity = quantity;
    const bool flat = cfg.surface == "plane";

    std::vector<double> values;
    std::vector<double> hs;
    if (quantity == "mesh-area") {
        const auto meshes = detail::build_meshes(chart, cfg, base_u, cfg.levels);
        for (const auto& m : meshes) {
            values.push_back(m.total_area());
            hs.push_back(m.target_h);
        }
        t.reference = chart.analytic_area;
    } else {
        const LevelStack s = build_level_stack(chart, cfg, base_u);
        for (std::size_t l = 0; l < s.meshes.size(); ++l) {
            const MetricMesh& m = s.meshes[l];
            const DistanceField& f = s.fields[l];
            hs.push_back(m.target_h);
            if (quantity == "intrinsic-density") {
                values.push_back(intrinsic_density(m, f, cfg.study_radius));
            } else if (quantity == "extrinsic-density") {
                values.push_back(extrinsic_density(m, f, cfg.study_radius));
            } else if (quantity == "distance-error") {
                if (flat) {
                    values.push_back(plane_sup_error(m, f));
                } else {
                    values.push_back(s.nested_difference[l]);
                    t.note = "curved chart: value is the sup change under one nested refinement";
                }
            } else {
                ResidualOptions ro;
                ro.n_t = cfg.n_t;
                ro.include_h = cfg.include_h;
                const ResidualReport rep =
                    monotonicity_residual(m, chart, f, gradient_field(m, f), cfg.annulus_r1, cfg.annulus_r2, ro);
                values.push_back(quantity == "residual" ? rep.residual : rep.error_integral);
            }
        }
        if (quantity == "residual" || quantity == "distance-error") t.reference = 0.0;
    }

    for (std::size_t l = 0; l < values.size(); ++l) {
        ConvergenceRow row;
        row.level = static_cast<int>(l);
        row.h = hs[l];
        row.value = values[l];
        if (t.reference) {
            row.error = std::abs(values[l] - *t.reference);
        } else {
            row.error = l > 0 ? std::abs(values[l] - values[l - 1]) : std::nan("");
        }
        t.rows.push_back(row);
    }
    fill_orders(t.rows);

    if (!t.reference && values.size() >= 2) {
        // Richardson with the observed order when three levels give one,
        // second order otherwise (sublevel areas of linear interpolants).
        const std::size_t n = values.size();
        double p = 2.0;
        if (n >= 3 && t.rows[n - 1].order && *t.rows[n - 1].order > 0.5) p = *t.rows[n - 1].order;
        const double ratio = hs[n - 2] / hs[n - 1];
        t.extrapolated = values[n - 1] + (values[n - 1] - values[n - 2]) / (std::pow(ratio, p) - 1.0);
    }
    return t;
}

inline std::string to_csv(const ConvergenceTable& t) {
    std::ostringstream os;
    os.precision(17);
    os << "# minsurf convergence v1 quantity=" << t.quantity << "\n";
    os << "level,h,value,error,order\n";
    for (const auto& r : t.rows) {
        os << r.level << ',' << r.h << ',' << r.value << ',' << r.error << ',';
        if (r.order) os << *r.order;
        os << "\n";
    }
    if (t.reference) os << "# reference " << *t.reference << "\n";
    if (t.extrapolated) os << "# extrapolated " << *t.extrapolated << "\n";
    if (!t.note.empty()) os << "# " << t.note << "\n";
    return os.str();
}

} // namespace minsurf
