#pragma once

#include "minsurf/errors.hpp"
#include "minsurf/geodesic.hpp"
#include "minsurf/mesh.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace minsurf {

// Plain-text mesh format, one record per line:
//
//   minsurf-mesh 1
//   chart <label>
//   d <d>
//   N <N>
//   h <max edge length>
//   target_h <nominal spacing>
//   vertices <n>        then n lines: u0 u1 x0 x1 x2
//   triangles <m>       then m lines: a b c
//   edges <k>           then k lines: a b length
//   boundary <b>        then one line of b indices
//
// Reals are written with 17 significant digits, which round-trips doubles.

inline void write_mesh(std::ostream& os, const MetricMesh& mesh) {
    os.precision(17);
    os << "minsurf-mesh 1\n";
    os << "chart " << mesh.chart_label << "\n";
    os << "d " << mesh.d << "\nN " << mesh.N << "\n";
    os << "h " << mesh.h << "\ntarget_h " << mesh.target_h << "\n";
    os << "vertices " << mesh.vertices.size() << "\n";
    for (const auto& v : mesh.vertices) {
        os << v.u[0] << ' ' << v.u[1] << ' ' << v.x[0] << ' ' << v.x[1] << ' ' << v.x[2] << "\n";
    }
    os << "triangles " << mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
    os << "edges " << mesh.edges.size() << "\n";
    for (const auto& e : mesh.edges) os << e.a << ' ' << e.b << ' ' << e.length << "\n";
    os << "boundary " << mesh.boundary_vertices.size() << "\n";
    for (std::size_t i = 0; i < mesh.boundary_vertices.size(); ++i) {
        os << (i ? " " : "") << mesh.boundary_vertices[i];
    }
    os << "\n";
}

namespace detail {

inline void expect_key(std::istream& is, const std::string& key) {
    std::string got;
    if (!(is >> got) || got != key) throw FormatError("mesh file: expected '" + key + "', got '" + got + "'");
}

template <class T>
T read_value(std::istream& is, const std::string& what) {
    T v{};
    if (!(is >> v)) throw FormatError("mesh file: bad or missing " + what);
    return v;
}

} // namespace detail

inline MetricMesh read_mesh(std::istream& is) {
    MetricMesh mesh;
    detail::expect_key(is, "minsurf-mesh");
    if (detail::read_value<int>(is, "version") != 1) throw FormatError("mesh file: unsupported version");
    detail::expect_key(is, "chart");
    mesh.chart_label = detail::read_value<std::string>(is, "chart label");
    detail::expect_key(is, "d");
    mesh.d = detail::read_value<int>(is, "d");
    detail::expect_key(is, "N");
    mesh.N = detail::read_value<int>(is, "N");
    detail::expect_key(is, "h");
    const double h = detail::read_value<double>(is, "h");
    detail::expect_key(is, "target_h");
    mesh.target_h = detail::read_value<double>(is, "target_h");

    detail::expect_key(is, "vertices");
    const auto nv = detail::read_value<std::size_t>(is, "vertex count");
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) {
        for (int k = 0; k < 2; ++k) v.u[k] = detail::read_value<double>(is, "vertex");
        for (int k = 0; k < 3; ++k) v.x[k] = detail::read_value<double>(is, "vertex");
    }
    auto index = [&](const char* what) {
        const long long i = detail::read_value<long long>(is, what);
        if (i < 0 || static_cast<std::size_t>(i) >= nv) throw FormatError(std::string("mesh file: ") + what + " index out of range");
        return static_cast<int>(i);
    };
    detail::expect_key(is, "triangles");
    mesh.triangles.resize(detail::read_value<std::size_t>(is, "triangle count"));
    for (auto& t : mesh.triangles) {
        for (auto& c : t) c = index("triangle");
    }
    detail::expect_key(is, "edges");
    mesh.edges.resize(detail::read_value<std::size_t>(is, "edge count"));
    for (auto& e : mesh.edges) {
        e.a = index("edge");
        e.b = index("edge");
        e.length = detail::read_value<double>(is, "edge length");
    }
    detail::expect_key(is, "boundary");
    mesh.boundary_vertices.resize(detail::read_value<std::size_t>(is, "boundary count"));
    for (auto& b : mesh.boundary_vertices) b = index("boundary");
    mesh.build_topology();
    if (mesh.h != h) throw FormatError("mesh file: header h does not match the edge lengths");
    return mesh;
}

inline std::string mesh_to_string(const MetricMesh& mesh) {
    std::ostringstream os;
    write_mesh(os, mesh);
    return os.str();
}

inline MetricMesh mesh_from_string(const std::string& s) {
    std::istringstream is(s);
    return read_mesh(is);
}

/// Distance field as CSV: vertex, u0, u1, x0, x1, x2, r (x relative to the
/// base image).
inline void write_field_csv(std::ostream& os, const MetricMesh& mesh, const DistanceField& field) {
    os.precision(17);
    os << "# minsurf distance-field v1\n";
    os << "vertex,u0,u1,x0,x1,x2,r\n";
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const Vec3 x = field.x(mesh, static_cast<int>(v));
        os << v << ',' << mesh.vertices[v].u[0] << ',' << mesh.vertices[v].u[1] << ',' << x[0] << ',' << x[1] << ','
           << x[2] << ',' << field.r[v] << "\n";
    }
}

} // namespace minsurf
