#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "jet.hpp"

namespace levi3 {

/// Monic cubic tau^3 + A1 tau^2 + A2 tau + A3 with t-jets of its coefficients.
struct CubicJet {
    RealJet2 A1, A2, A3;
};

struct Cubic {
    double A1 = 0, A2 = 0, A3 = 0;
};

inline Cubic values(const CubicJet& c) { return {c.A1.v, c.A2.v, c.A3.v}; }

/// Homogeneous size of the roots: max(|A1|, |A2|^(1/2), |A3|^(1/3)).
inline double root_scale(const Cubic& c) {
    return std::max({std::abs(c.A1), std::sqrt(std::abs(c.A2)), std::cbrt(std::abs(c.A3))});
}

inline double discriminant(const Cubic& c) {
    const double a = c.A1, b = c.A2, d = c.A3;
    return a * a * b * b - 4 * b * b * b - 4 * a * a * a * d + 18 * a * b * d - 27 * d * d;
}

/// Sum of the magnitudes of the terms of the discriminant; the natural size
/// against which rounding in `discriminant` should be judged.
inline double discriminant_magnitude(const Cubic& c) {
    const double a = std::abs(c.A1), b = std::abs(c.A2), d = std::abs(c.A3);
    return a * a * b * b + 4 * b * b * b + 4 * a * a * a * d + 18 * a * b * d + 27 * d * d;
}

/// Discriminant of 3 tau^2 + 2 A1 tau + A2 in the b^2 - 4ac convention.
inline double derivative_discriminant(const Cubic& c) { return 4 * c.A1 * c.A1 - 12 * c.A2; }

/// 2 (A1^2 - 3 A2), which equals 9/2 (sigma2 - sigma1)^2.
inline double delta1(const Cubic& c) { return 2 * (c.A1 * c.A1 - 3 * c.A2); }

/// Coefficients of L - s d_tau^2 L.
inline Cubic regularize(const Cubic& c, double s) { return {c.A1, c.A2 - 6 * s, c.A3 - 2 * s * c.A1}; }

inline CubicJet regularize(const CubicJet& c, double s) {
    CubicJet r = c;
    r.A2.v -= 6 * s;
    r.A3.v -= 2 * s * c.A1.v;
    r.A3.d1 -= 2 * s * c.A1.d1;
    r.A3.d2 -= 2 * s * c.A1.d2;
    return r;
}

/// Discriminant of the regularized cubic written through the data of L:
/// Delta_L + s/2 Delta_d^2 + 36 s^2 Delta_d + 864 s^3.
inline double regularized_discriminant_expansion(const Cubic& c, double s) {
    const double dd = derivative_discriminant(c);
    return discriminant(c) + 0.5 * s * dd * dd + 36 * s * s * dd + 864 * s * s * s;
}

inline double cubic_value(const Cubic& c, double r) { return ((r + c.A1) * r + c.A2) * r + c.A3; }
inline double cubic_slope(const Cubic& c, double r) { return (3 * r + 2 * c.A1) * r + c.A2; }

/// Where a hyperbolicity failure happened, for error reporting.
struct SolveContext {
    double t = std::nan("");
    double xi_norm = std::nan("");
};

/// Real roots in ascending order. Rejects cubics whose discriminant is below
/// -tol (1 + rho)^6, rho = root_scale.
inline std::array<double, 3> solve_cubic_real(const Cubic& c, double tol = 1e-9, SolveContext ctx = {}) {
    const double rho = root_scale(c);
    const double disc = discriminant(c);
    const double unit = std::pow(1 + rho, 6);
    if (disc < -tol * std::max(unit, discriminant_magnitude(c) * 1e-7)) {
        throw HyperbolicityViolation(disc, ctx.t, ctx.xi_norm,
                                     "principal symbol has non-real roots (discriminant " + std::to_string(disc) +
                                         ") at t = " + std::to_string(ctx.t));
    }
    const double shift = c.A1 / 3;
    const double Q = (c.A1 * c.A1 - 3 * c.A2) / 9;
    const double R = (2 * c.A1 * c.A1 * c.A1 - 9 * c.A1 * c.A2 + 27 * c.A3) / 54;
    std::array<double, 3> r;
    if (Q <= 0) {
        r.fill(-shift);
    } else {
        const double sq = std::sqrt(Q);
        const double ratio = std::clamp(R / (sq * sq * sq), -1.0, 1.0);
        const double th = std::acos(ratio);
        constexpr double tp = 2 * std::numbers::pi;
        r = {-2 * sq * std::cos(th / 3) - shift, -2 * sq * std::cos((th + tp) / 3) - shift,
             -2 * sq * std::cos((th - tp) / 3) - shift};
    }
    std::sort(r.begin(), r.end());
    // one guarded Newton step per well separated root
    for (int k = 0; k < 3; ++k) {
        const double gap = std::min(k > 0 ? r[k] - r[k - 1] : INFINITY, k < 2 ? r[k + 1] - r[k] : INFINITY);
        if (!(gap > 1e-6 * (1 + rho))) continue;
        const double f = cubic_value(c, r[k]), fp = cubic_slope(c, r[k]);
        if (fp == 0) continue;
        const double nr = r[k] - f / fp;
        const bool ordered = (k == 0 || nr > r[k - 1]) && (k == 2 || nr < r[k + 1]);
        if (ordered && std::abs(cubic_value(c, nr)) < std::abs(f)) r[k] = nr;
    }
    return r;
}

/// Root of a monic cubic with its first two t-derivatives.
using RootJet = RealJet2;

/// Implicit-function derivatives of simple roots. Needs every gap above
/// 1e-6 (1 + rho).
inline std::array<RootJet, 3> root_jets(const CubicJet& cj, const std::array<double, 3>& r) {
    const Cubic c = values(cj);
    const double rho = root_scale(c);
    const double gap = std::min(r[1] - r[0], r[2] - r[1]);
    if (!(gap > 1e-6 * (1 + rho))) throw NearMultipleRoot(gap, "root jets requested at a near-multiple root");
    std::array<RootJet, 3> out;
    for (int k = 0; k < 3; ++k) {
        const double x = r[k];
        const double Lt = (cj.A1.d1 * x + cj.A2.d1) * x + cj.A3.d1;
        const double Ltt = (cj.A1.d2 * x + cj.A2.d2) * x + cj.A3.d2;
        const double Ltau = cubic_slope(c, x);
        const double Ltautau = 6 * x + 2 * c.A1;
        const double Lttau = 2 * cj.A1.d1 * x + cj.A2.d1;
        const double psi = 2 * Lttau * Lt * Ltau - Ltautau * Lt * Lt - Ltt * Ltau * Ltau;
        out[k] = {x, -Lt / Ltau, psi / (Ltau * Ltau * Ltau)};
    }
    return out;
}

/// Roots of d_tau L = 3 tau^2 + 2 A1 tau + A2.
struct DerivativeRoots {
    double sigma1 = 0, sigma2 = 0;
    double disc_b2_4ac = 0;  ///< 4 A1^2 - 12 A2
    double gap_sq = 0;       ///< (sigma2 - sigma1)^2
};

inline DerivativeRoots derivative_quadratic(const Cubic& c, double tol = 1e-9) {
    double disc = derivative_discriminant(c);
    const double rho = root_scale(c);
    if (disc < -tol * (1 + rho) * (1 + rho))
        throw HyperbolicityViolation(disc, NAN, NAN, "derivative of the symbol has non-real roots");
    disc = std::max(disc, 0.0);
    const double h = std::sqrt(disc) / 6;
    return {-c.A1 / 3 - h, -c.A1 / 3 + h, disc, disc / 9};
}

/// First t-derivatives of the roots of d_tau L.
inline std::array<RootJet, 2> derivative_root_jets(const CubicJet& cj, const DerivativeRoots& d) {
    std::array<RootJet, 2> out;
    const double s[2] = {d.sigma1, d.sigma2};
    for (int k = 0; k < 2; ++k) {
        const double den = 6 * s[k] + 2 * cj.A1.v;
        if (den == 0) throw NearMultipleRoot(0, "double root of the derivative");
        const double d1 = -(2 * cj.A1.d1 * s[k] + cj.A2.d1) / den;
        // second derivative of q(t, mu(t)) = 0 with q = 3 mu^2 + 2 A1 mu + A2
        const double qtt = 2 * cj.A1.d2 * s[k] + cj.A2.d2;
        const double d2 = -(qtt + 2 * (2 * cj.A1.d1) * d1 + 6 * d1 * d1) / den;
        out[k] = {s[k], d1, d2};
    }
    return out;
}

/// Discriminant with its first two t-derivatives.
inline RealJet2 discriminant_jet(const CubicJet& cj) {
    using T = Taylor<double, 2>;
    auto lift = [](const RealJet2& j) {
        T r;
        r.c = {j.v, j.d1, j.d2 / 2};
        return r;
    };
    const T a = lift(cj.A1), b = lift(cj.A2), d = lift(cj.A3);
    const T D = a * a * b * b - 4.0 * b * b * b - 4.0 * a * a * a * d + 18.0 * a * b * d - 27.0 * d * d;
    return {D.d(0), D.d(1), D.d(2)};
}

}  // namespace levi3
