#pragma once

#include <cmath>

namespace tlc {

/// Phase wrapped to (-pi, pi].
inline double wrap_phase(double phi)
{
    double w = std::remainder(phi, 2.0 * M_PI);
    if (w <= -M_PI) {
        w += 2.0 * M_PI;
    }
    return w;
}

/// Distance between two phases on the circle, in [0, pi].
inline double phase_distance(double a, double b)
{
    return std::abs(wrap_phase(a - b));
}

}  // namespace tlc
