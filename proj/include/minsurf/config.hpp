#pragma once

#include "minsurf/catalog.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/geodesic.hpp"
#include "minsurf/report.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace minsurf {

inline const std::vector<std::string>& check_ids() {
    static const std::vector<std::string> ids{"profile", "residual", "chord-arc", "identity", "limits", "sandwich"};
    return ids;
}

/// Run configuration. See docs/config.md for the file format; every field
/// maps to one key of the same name.
struct RunConfig {
    std::string surface = "plane";
    std::optional<double> extent;          ///< domain half-width / v_max / rho_max
    std::optional<double> sphere_radius;
    std::optional<Vec2> base_u;            ///< defaults to the catalog base point
    double target_h = 0.1;
    int levels = 1;
    bool graded = true;
    std::size_t vertex_cap = kDefaultVertexCap;
    GeodesicMethod method = GeodesicMethod::fast_marching;
    int steiner_points = 3;

    double radius_min = 0.0;               ///< 0: 10 x target_h of the coarsest level
    double radius_max = 0.0;               ///< 0: guard radius
    int radius_count = 12;
    std::vector<double> radii;             ///< explicit schedule, overrides min/max/count

    double annulus_r1 = 0.5;
    double annulus_r2 = 2.0;
    int n_t = 17;
    bool include_h = true;                 ///< debug: false drops x.H terms

    std::vector<double> chord_arc_eps{0.1, 0.5, 0.9};
    std::vector<double> chord_arc_radii;   ///< empty: automatic
    double sandwich_eps = 0.5;
    int identity_points = 1000;
    double tol_limit = 0.0;
    double study_radius = 1.0;             ///< radius for density convergence studies

    int base_samples = 0;                  ///< extra quasi-random base points for the lower bound
    std::uint64_t seed = 0;                ///< Halton offset for base sampling

    std::vector<std::string> checks = check_ids();
    std::string output_dir = "minsurf-out";
    bool timestamp = false;

    bool wants(const std::string& check) const {
        return std::find(checks.begin(), checks.end(), check) != checks.end();
    }

    SurfaceOptions surface_options() const {
        SurfaceOptions o;
        o.extent = extent;
        o.radius = sphere_radius;
        return o;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ArgumentError("config: '" + key + "' expects a number, got '" + v + "'");
    }
    if (pos != v.size()) throw ArgumentError("config: '" + key + "' expects a number, got '" + v + "'");
    return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    const double d = parse_real(key, v);
    if (d != static_cast<double>(static_cast<long long>(d))) {
        throw ArgumentError("config: '" + key + "' expects an integer, got '" + v + "'");
    }
    return static_cast<long long>(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ArgumentError("config: '" + key + "' expects true/false, got '" + v + "'");
}

inline std::vector<double> parse_reals(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& tok : split_list(v)) out.push_back(parse_real(key, tok));
    return out;
}

} // namespace detail

/// Applies one `key = value` assignment.
inline void set_config_value(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
    using namespace detail;
    const std::string key = trim(raw_key);
    const std::string v = trim(raw_value);
    if (key == "surface") {
        c.surface = v;
    } else if (key == "extent") {
        c.extent = parse_real(key, v);
    } else if (key == "sphere_radius") {
        c.sphere_radius = parse_real(key, v);
    } else if (key == "base_u") {
        if (v == "default") {
            c.base_u.reset();
        } else {
            const auto xs = parse_reals(key, v);
            if (xs.size() != 2) throw ArgumentError("config: base_u expects two numbers");
            c.base_u = Vec2(xs[0], xs[1]);
        }
    } else if (key == "target_h") {
        c.target_h = parse_real(key, v);
    } else if (key == "levels") {
        c.levels = static_cast<int>(parse_int(key, v));
    } else if (key == "graded") {
        c.graded = parse_bool(key, v);
    } else if (key == "vertex_cap") {
        c.vertex_cap = static_cast<std::size_t>(parse_int(key, v));
    } else if (key == "method") {
        c.method = parse_geodesic_method(v);
    } else if (key == "steiner_points") {
        c.steiner_points = static_cast<int>(parse_int(key, v));
    } else if (key == "radius_min") {
        c.radius_min = parse_real(key, v);
    } else if (key == "radius_max") {
        c.radius_max = parse_real(key, v);
    } else if (key == "radius_count") {
        c.radius_count = static_cast<int>(parse_int(key, v));
    } else if (key == "radii") {
        c.radii = parse_reals(key, v);
    } else if (key == "annulus") {
        const auto xs = parse_reals(key, v);
        if (xs.size() != 2) throw ArgumentError("config: annulus expects two radii");
        c.annulus_r1 = xs[0];
        c.annulus_r2 = xs[1];
    } else if (key == "n_t") {
        c.n_t = static_cast<int>(parse_int(key, v));
    } else if (key == "include_h") {
        c.include_h = parse_bool(key, v);
    } else if (key == "chord_arc_eps") {
        c.chord_arc_eps = parse_reals(key, v);
    } else if (key == "chord_arc_radii") {
        c.chord_arc_radii = parse_reals(key, v);
    } else if (key == "sandwich_eps") {
        c.sandwich_eps = parse_real(key, v);
    } else if (key == "identity_points") {
        c.identity_points = static_cast<int>(parse_int(key, v));
    } else if (key == "tol_limit") {
        c.tol_limit = parse_real(key, v);
    } else if (key == "study_radius") {
        c.study_radius = parse_real(key, v);
    } else if (key == "base_samples") {
        c.base_samples = static_cast<int>(parse_int(key, v));
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    } else if (key == "checks") {
        c.checks = v == "all" ? check_ids() : split_list(v);
    } else if (key == "output_dir") {
        c.output_dir = v;
    } else if (key == "timestamp") {
        c.timestamp = parse_bool(key, v);
    } else {
        throw ArgumentError("config: unknown key '" + key + "'");
    }
}

/// Applies an override of the form `key=value`.
inline void apply_override(RunConfig& c, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ArgumentError("override '" + assignment + "' is not key=value");
    set_config_value(c, assignment.substr(0, eq), assignment.substr(eq + 1));
}

/// Schema checks that do not need a mesh.
inline void validate_config(const RunConfig& c) {
    const auto& labels = mesh_surface_labels();
    if (std::find(labels.begin(), labels.end(), c.surface) == labels.end()) {
        throw ArgumentError("config: unknown surface '" + c.surface + "'");
    }
    if (!(c.target_h > 0.0)) throw ArgumentError("config: target_h must be positive");
    if (c.levels < 1) throw ArgumentError("config: levels must be at least 1");
    if (c.radius_count < 1) throw ArgumentError("config: radius_count must be at least 1");
    if (c.radius_min < 0.0 || c.radius_max < 0.0) throw ArgumentError("config: radii must be nonnegative");
    if (!std::is_sorted(c.radii.begin(), c.radii.end())) throw ArgumentError("config: radii must be ascending");
    for (double r : c.radii) {
        if (!(r > 0.0)) throw ArgumentError("config: radii must be positive");
    }
    if (!(c.annulus_r1 > 0.0 && c.annulus_r1 < c.annulus_r2)) throw ArgumentError("config: annulus needs 0 < R1 < R2");
    if (c.n_t < 8) throw ArgumentError("config: n_t must be at least 8");
    for (double e : c.chord_arc_eps) {
        if (!(e > 0.0 && e < 1.0)) throw ArgumentError("config: chord_arc_eps entries must lie in (0, 1)");
    }
    if (!(c.sandwich_eps > 0.0)) throw ArgumentError("config: sandwich_eps must be positive");
    if (c.identity_points < 1) throw ArgumentError("config: identity_points must be positive");
    if (!(c.study_radius > 0.0)) throw ArgumentError("config: study_radius must be positive");
    if (c.base_samples < 0) throw ArgumentError("config: base_samples must be nonnegative");
    for (const auto& id : c.checks) {
        if (std::find(check_ids().begin(), check_ids().end(), id) == check_ids().end()) {
            throw ArgumentError("config: unknown check '" + id + "'");
        }
    }
}

inline RunConfig parse_config(std::istream& is) {
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        set_config_value(c, line.substr(0, eq), line.substr(eq + 1));
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config '" + path + "'");
    return parse_config(in);
}

inline Json to_json(const RunConfig& c) {
    Json j;
    j["surface"] = c.surface;
    j["extent"] = c.extent ? Json(*c.extent) : Json(nullptr);
    j["sphere_radius"] = c.sphere_radius ? Json(*c.sphere_radius) : Json(nullptr);
    j["base_u"] = c.base_u ? Json::array({(*c.base_u)[0], (*c.base_u)[1]}) : Json("default");
    j["target_h"] = c.target_h;
    j["levels"] = c.levels;
    j["graded"] = c.graded;
    j["vertex_cap"] = c.vertex_cap;
    j["method"] = to_string(c.method);
    j["steiner_points"] = c.steiner_points;
    j["radius_min"] = c.radius_min;
    j["radius_max"] = c.radius_max;
    j["radius_count"] = c.radius_count;
    j["radii"] = c.radii;
    j["annulus"] = Json::array({c.annulus_r1, c.annulus_r2});
    j["n_t"] = c.n_t;
    j["include_h"] = c.include_h;
    j["chord_arc_eps"] = c.chord_arc_eps;
    j["chord_arc_radii"] = c.chord_arc_radii;
    j["sandwich_eps"] = c.sandwich_eps;
    j["identity_points"] = c.identity_points;
    j["tol_limit"] = c.tol_limit;
    j["study_radius"] = c.study_radius;
    j["base_samples"] = c.base_samples;
    j["seed"] = c.seed;
    j["checks"] = c.checks;
    return j;
}

} // namespace minsurf
