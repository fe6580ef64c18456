#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cubic.hpp"

namespace levi3 {

/// Portable uniform double in [0, 1) from a 64-bit engine; std::uniform_real_distribution
/// is implementation-defined, so reports would differ across standard libraries.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& g, double lo, double hi) { return lo + (hi - lo) * uniform01(g); }

struct IdentityStat {
    std::string name;
    double max_rel = 0;
    double tol = 0;
    long samples = 0;
    bool passed = true;
};

/// Test hook: perturbs the discriminant formula so the suite has a negative control.
struct IdentityHooks {
    bool corrupt_discriminant = false;
};

/// Randomized algebraic identities over hyperbolic cubics built from random real roots.
/// Residuals are relative to the summed magnitude of the terms being compared.
inline std::vector<IdentityStat> algebraic_identities(long samples, std::uint64_t seed, IdentityHooks hooks = {}) {
    std::vector<IdentityStat> out = {
        {"discriminant_root_product", 0, 1e-8},   // gaps > 1e-3 only
        {"delta1_squared_differences", 0, 1e-9},
        {"delta1_critical_gap", 0, 1e-9},         // delta1 = 9/2 (sigma2 - sigma1)^2
        {"regularized_discriminant", 0, 1e-9},    // four-term expansion in s = eps^2 |xi|^2
        {"regularized_derivative_shift", 0, 1e-12},  // exactly 72 s
        {"vieta", 0, 1e-9},
        {"critical_interlacing", 0, 1e-9},
    };
    if (samples <= 0) return {};
    std::mt19937_64 g(seed);
    auto record = [&](std::size_t k, double rel) {
        out[k].max_rel = std::max(out[k].max_rel, rel);
        ++out[k].samples;
    };
    for (long n = 0; n < samples; ++n) {
        const double R = std::exp2(uniform(g, -2, 6));
        std::array<double, 3> r{uniform(g, -R, R), uniform(g, -R, R), uniform(g, -R, R)};
        // a quarter of the samples get a double or triple root
        const double kind = uniform01(g);
        if (kind < 0.15) r[1] = r[0];
        else if (kind < 0.25) r[2] = r[1] = r[0];
        std::sort(r.begin(), r.end());
        const Cubic c{-(r[0] + r[1] + r[2]), r[0] * r[1] + r[1] * r[2] + r[0] * r[2], -r[0] * r[1] * r[2]};
        const double eps = std::exp2(uniform(g, -8, 0));
        const double xi = std::exp2(uniform(g, 0, 8));
        const double s = eps * eps * xi * xi;

        const auto tau = solve_cubic_real(c, 1e-9);
        const double scale = 1 + std::max({std::abs(c.A1), std::abs(c.A2), std::abs(c.A3)});
        record(5, std::max({std::abs(tau[0] + tau[1] + tau[2] + c.A1),
                            std::abs(tau[0] * tau[1] + tau[1] * tau[2] + tau[2] * tau[0] - c.A2),
                            std::abs(tau[0] * tau[1] * tau[2] + c.A3)}) /
                       scale);

        const double d01 = tau[1] - tau[0], d12 = tau[2] - tau[1], d02 = tau[2] - tau[0];
        if (std::min(d01, d12) > 1e-3) {
            double D = discriminant(c);
            if (hooks.corrupt_discriminant) D += 1e-3 * discriminant_magnitude(c);
            const double prod = d01 * d01 * d12 * d12 * d02 * d02;
            record(0, std::abs(D - prod) / std::max(discriminant_magnitude(c), prod));
        }
        const double sq = d01 * d01 + d12 * d12 + d02 * d02;
        const double mag1 = 2 * (c.A1 * c.A1 + 3 * std::abs(c.A2));
        record(1, std::abs(delta1(c) - sq) / std::max(mag1, 1e-300));

        const DerivativeRoots d = derivative_quadratic(c);
        const double crit = 4.5 * (d.sigma2 - d.sigma1) * (d.sigma2 - d.sigma1);
        record(2, std::abs(delta1(c) - crit) / std::max(mag1, 1e-300));
        const double rs = root_scale(c);
        const double below = std::max({tau[0] - d.sigma1, d.sigma1 - tau[1], tau[1] - d.sigma2, d.sigma2 - tau[2], 0.0});
        record(6, below / (1 + rs));

        const Cubic reg = regularize(c, s);
        const double exact = discriminant(reg);
        const double expansion = regularized_discriminant_expansion(c, s);
        const double dd = derivative_discriminant(c);
        const double mag = discriminant_magnitude(reg) + discriminant_magnitude(c) + 0.5 * s * dd * dd +
                           36 * s * s * std::abs(dd) + 864 * s * s * s;
        record(3, std::abs(exact - expansion) / mag);

        const double shift = derivative_discriminant(reg) - dd;
        const double mag2 = std::max(72 * s, 4 * c.A1 * c.A1 + 12 * std::abs(c.A2));
        record(4, std::abs(shift - 72 * s) / mag2);
    }
    for (auto& st : out) st.passed = st.max_rel < st.tol;
    return out;
}

}  // namespace levi3
