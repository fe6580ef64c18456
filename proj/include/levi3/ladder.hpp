#pragma once

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace levi3 {

/// Geometric ladder of |xi| values between lo and hi (inclusive).
inline std::vector<double> geometric_ladder(double lo, double hi, int steps) {
    if (!(lo > 0) || !(hi >= lo) || steps < 1) throw ConfigError("invalid xi ladder");
    std::vector<double> v;
    if (steps == 1) return {lo};
    for (int k = 0; k < steps; ++k) v.push_back(lo * std::pow(hi / lo, double(k) / (steps - 1)));
    return v;
}

inline std::vector<double> default_ladder() { return geometric_ladder(64, 16384, 9); }

inline std::vector<double> unit_axis(int n, int axis = 0, double sign = 1) {
    std::vector<double> d(n, 0.0);
    d[axis] = sign;
    return d;
}

}  // namespace levi3
