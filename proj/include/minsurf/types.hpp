#pragma once

#include <Eigen/Dense>

#include <array>
#include <limits>

namespace minsurf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Second parameter derivatives of an immersion, ordered (uu, uv, vv).
using SecondDerivs = std::array<Vec3, 3>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

} // namespace minsurf
