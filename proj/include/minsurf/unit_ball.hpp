#pragma once

#include "minsurf/errors.hpp"
#include "minsurf/types.hpp"

namespace minsurf {

/// Volume of the unit ball in R^d, via omega_d = (2 pi / d) omega_{d-2}.
inline double omega(int d) {
    if (d <= 0) throw ArgumentError("omega: dimension must be positive");
    double w = (d % 2 == 1) ? 2.0 : kPi;
    for (int k = (d % 2 == 1) ? 3 : 4; k <= d; k += 2) w *= 2.0 * kPi / k;
    return w;
}

} // namespace minsurf
