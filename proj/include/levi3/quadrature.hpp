#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace levi3 {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration.
template <int K>
const std::pair<std::array<double, K>, std::array<double, K>>& gauss_legendre() {
    static const auto rule = [] {
        std::array<double, K> x{}, w{};
        for (int i = 0; i < K; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (K + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = z;
                for (int n = 2; n <= K; ++n) {
                    const double p2 = ((2 * n - 1) * z * p1 - (n - 1) * p0) / n;
                    p0 = p1;
                    p1 = p2;
                }
                dp = K * (z * p1 - p0) / (z * z - 1);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            double p0 = 1, p1 = z;
            for (int n = 2; n <= K; ++n) {
                const double p2 = ((2 * n - 1) * z * p1 - (n - 1) * p0) / n;
                p0 = p1;
                p1 = p2;
            }
            dp = K * (z * p1 - p0) / (z * z - 1);
            x[i] = z;
            w[i] = 2 / ((1 - z * z) * dp * dp);
        }
        return std::pair{x, w};
    }();
    return rule;
}

struct QuadratureResult {
    std::vector<double> value;
    int panels = 0;
    double achieved_rel = 0;  ///< worst relative change at the last doubling
    bool converged = false;
};

struct QuadratureOptions {
    double rel_tol = 1e-6;
    int min_panels = 8;
    int max_panels = 1 << 16;
    double abs_floor = 1e-12;  ///< per unit length, for integrals that vanish
};

/// Composite 16-point Gauss-Legendre for a vector integrand on [a, b].
/// Each panel is compared with the sum over its two halves; panels whose
/// share of the error is too large are bisected until, for every component,
/// the summed difference falls below rel_tol times the integral.
inline QuadratureResult integrate(const std::function<void(double, std::vector<double>&)>& f, std::size_t dim,
                                  double a, double b, QuadratureOptions opt = {}) {
    const auto& [x, w] = gauss_legendre<16>();
    std::vector<double> buf(dim);
    auto rule = [&](double lo, double hi) {
        std::vector<double> s(dim, 0.0);
        const double h = hi - lo;
        for (int i = 0; i < 16; ++i) {
            std::fill(buf.begin(), buf.end(), 0.0);
            f(lo + 0.5 * h * (x[i] + 1), buf);
            for (std::size_t d = 0; d < dim; ++d) s[d] += 0.5 * h * w[i] * buf[d];
        }
        return s;
    };
    struct Panel {
        double lo, hi;
        std::vector<double> whole, left, right;
    };
    auto make = [&](double lo, double hi, std::vector<double> whole) {
        const double mid = 0.5 * (lo + hi);
        return Panel{lo, hi, std::move(whole), rule(lo, mid), rule(mid, hi)};
    };
    std::vector<Panel> panels;
    for (int p = 0; p < opt.min_panels; ++p) {
        const double lo = a + (b - a) * p / opt.min_panels, hi = a + (b - a) * (p + 1) / opt.min_panels;
        panels.push_back(make(lo, hi, rule(lo, hi)));
    }
    QuadratureResult r;
    std::vector<double> total(dim), err(dim), tol(dim);
    for (;;) {
        std::fill(total.begin(), total.end(), 0.0);
        std::fill(err.begin(), err.end(), 0.0);
        for (auto& p : panels)
            for (std::size_t d = 0; d < dim; ++d) {
                total[d] += p.left[d] + p.right[d];
                err[d] += std::abs(p.left[d] + p.right[d] - p.whole[d]);
            }
        bool done = true;
        r.achieved_rel = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            tol[d] = std::max(opt.rel_tol * std::abs(total[d]), opt.abs_floor * (b - a));
            done &= err[d] <= tol[d];
            const double denom = std::max(std::abs(total[d]), opt.abs_floor * (b - a));
            r.achieved_rel = std::max(r.achieved_rel, err[d] / denom);
        }
        if (done) {
            r.converged = true;
            break;
        }
        if (static_cast<int>(panels.size()) >= opt.max_panels) break;
        const double share = 1.0 / panels.size();
        std::vector<Panel> next;
        next.reserve(panels.size() * 2);
        for (auto& p : panels) {
            bool split = false;
            for (std::size_t d = 0; d < dim && !split; ++d)
                split = std::abs(p.left[d] + p.right[d] - p.whole[d]) > share * tol[d];
            if (split) {
                const double mid = 0.5 * (p.lo + p.hi);
                next.push_back(make(p.lo, mid, p.left));
                next.push_back(make(mid, p.hi, p.right));
            } else {
                next.push_back(std::move(p));
            }
        }
        panels = std::move(next);
    }
    r.value = total;
    r.panels = static_cast<int>(panels.size());
    return r;
}

}  // namespace levi3
