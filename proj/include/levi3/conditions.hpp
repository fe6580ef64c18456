#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cubic.hpp"
#include "operator.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace levi3 {

inline const std::array<std::string, 6>& condition_names() {
    static const std::array<std::string, 6> n{"I1", "I2", "I3", "I4", "IMcl", "INcl"};
    return n;
}

namespace detail {

struct PointSet {
    std::string name;
    std::vector<double> x;
};

inline const std::array<std::string, 6>& denominator_names() {
    static const std::array<std::string, 6> n{"sigma_gap+1",  "mu_gap",       "sqrt_delta1+1",
                                              "sqrt_delta1_reg", "tau_spread+1", "lambda_spread"};
    return n;
}
inline const std::array<std::string, 4>& point_set_names() {
    static const std::array<std::string, 4> n{"sigma", "mu", "tau", "lambda"};
    return n;
}

}  // namespace detail

/// Names of the alternate integral forms, in evaluation order.
inline const std::vector<std::string>& alternate_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v{"Mcheck_at_tau", "dMcheck_at_tau_outer", "dMcheck_at_sigma", "Ncheck_at_sigma"};
        for (auto& p : detail::point_set_names())
            for (auto& d : detail::denominator_names()) v.push_back("Ncheck_sqrt[" + p + "/" + d + "]");
        for (auto& p : detail::point_set_names())
            for (auto& d : detail::denominator_names()) v.push_back("dMcheck[" + p + "/" + d + "]");
        return v;
    }();
    return names;
}

/// The form each alternate is compared against in equivalence bands.
inline std::string primary_of(const std::string& alt) {
    if (alt == "Mcheck_at_tau") return "IMcl";
    if (alt == "dMcheck_at_tau_outer") return "";
    if (alt == "dMcheck_at_sigma" || alt.rfind("dMcheck[", 0) == 0) return "dMcheck_at_tau_outer";
    return "INcl";
}

struct ConditionVector {
    double I1 = 0, I2 = 0, I3 = 0, I4 = 0, IMcl = 0, INcl = 0;
    std::map<std::string, double> alternates;
    int panels = 0;
    double achieved_rel = 0;
    bool converged = true;

    double get(const std::string& name) const {
        if (name == "I1") return I1;
        if (name == "I2") return I2;
        if (name == "I3") return I3;
        if (name == "I4") return I4;
        if (name == "IMcl") return IMcl;
        if (name == "INcl") return INcl;
        return alternates.at(name);
    }
};

inline Symbols symbols(const BoundOperator& b, const BoundOperator::Grouped& g) {
    Symbols s;
    s.L = b.part(g, 3);
    s.M = b.part(g, 2);
    s.N = b.part(g, 1);
    s.p = g.C[0][0].c[0];
    s.Mc = s.M + cplx(-0.5) * s.L.dtau().dt();
    s.Nc = s.N + cplx(-0.5) * s.M.dtau().dt() + cplx(1.0 / 12) * s.L.dtau().dtau().dt().dt();
    return s;
}

/// All condition integrands at time t: six primary values followed by the
/// alternates in `alternate_names()` order.
inline void condition_integrand(const BoundOperator& b, double t, std::vector<double>& out) {
    const auto g = b.grouped(t);
    const CubicJet cj = b.principal_cubic(g);
    const AuxiliaryRoots a = auxiliary_roots(cj, {t, b.xi_norm()});
    const Symbols s = symbols(b, g);
    const auto& lam = a.lam;
    const auto& mu = a.mu;
    static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    static constexpr int others[3][2] = {{1, 2}, {0, 2}, {0, 1}};

    double I1 = 0, I2 = 0, I3 = 0, I4 = 0, IM = 0, IN = 0;
    for (auto& p : pairs) {
        const RootJet &x = lam[p[0]], &y = lam[p[1]];
        I1 += std::abs(x.d1 - y.d1) / std::abs(x.v - y.v);
        I2 += std::abs(x.d2 - y.d2) / (std::abs(x.d1 - y.d1) + 1);
    }
    for (int j = 0; j < 3; ++j) {
        const auto f = along(s.Mc, lam[j]);
        I3 += std::abs(f[1]) / (std::abs(f[0]) + 1);
        const double h = lam[others[j][0]].v, l = lam[others[j][1]].v;
        IM += std::abs(f[0]) / (std::abs(lam[j].v - h) * std::abs(lam[j].v - l));
    }
    const double mugap = std::abs(mu[1].v - mu[0].v);
    for (int j = 0; j < 2; ++j) {
        const auto f = along(s.Nc, mu[j]);
        I4 += std::abs(f[1]) / (std::abs(f[0]) + 1);
        IN += std::sqrt(std::abs(f[0]) / mugap);
    }
    out[0] = I1;
    out[1] = I2;
    out[2] = I3;
    out[3] = I4;
    out[4] = IM;
    out[5] = IN;

    const auto& tau = a.tau;
    const TauPoly dMc = s.Mc.dtau();
    double Mct = 0;
    for (int j = 0; j < 3; ++j) {
        const double h = tau[others[j][0]], l = tau[others[j][1]];
        Mct += std::abs(s.Mc.value(tau[j])) / ((std::abs(tau[j] - h) + 1) * (std::abs(tau[j] - l) + 1));
    }
    const double sg1 = a.sigma.sigma1, sg2 = a.sigma.sigma2;
    out[6] = Mct;
    out[7] = (std::abs(dMc.value(tau[0])) + std::abs(dMc.value(tau[2]))) / (std::abs(tau[0] - tau[2]) + 1);
    out[8] = (std::abs(dMc.value(sg1)) + std::abs(dMc.value(sg2))) / (std::abs(sg1 - sg2) + 1);
    out[9] = std::sqrt(std::abs(s.Nc.value(sg1)) / (std::abs(sg2 - sg1) + 1)) +
             std::sqrt(std::abs(s.Nc.value(sg2)) / (std::abs(sg2 - sg1) + 1));

    const Cubic reg = regularize(a.cubic, 1.0);
    const double den[6] = {std::abs(sg2 - sg1) + 1,
                           mugap,
                           std::sqrt(std::max(delta1(a.cubic), 0.0)) + 1,
                           std::sqrt(std::max(delta1(reg), 0.0)),
                           std::abs(tau[2] - tau[0]) + 1,
                           std::abs(lam[2].v - lam[0].v)};
    const std::vector<double> pts[4] = {{sg1, sg2}, {mu[0].v, mu[1].v}, {tau[0], tau[1], tau[2]},
                                        {lam[0].v, lam[1].v, lam[2].v}};
    std::size_t k = 10;
    for (auto& P : pts)
        for (double d : den) {
            double acc = 0;
            for (double x : P) acc += std::sqrt(std::abs(s.Nc.value(x)) / d);
            out[k++] = acc;
        }
    for (auto& P : pts)
        for (double d : den) {
            double acc = 0;
            for (double x : P) acc += std::abs(dMc.value(x)) / d;
            out[k++] = acc;
        }
}

inline std::size_t condition_dimension() { return 6 + alternate_names().size(); }

/// The six condition integrals and the alternates over [0, T].
inline ConditionVector condition_integrals(const Operator& op, const std::vector<double>& xi,
                                           QuadratureOptions qopt = {}) {
    if (op.order != 3) throw ConfigError("condition integrals need a third-order operator");
    BoundOperator b(op, xi);
    if (b.xi_norm() < 2) throw ConfigError("condition integrals need |xi| >= 2");
    const auto q = integrate([&](double t, std::vector<double>& out) { condition_integrand(b, t, out); },
                             condition_dimension(), 0.0, op.horizon, qopt);
    ConditionVector cv;
    cv.I1 = q.value[0];
    cv.I2 = q.value[1];
    cv.I3 = q.value[2];
    cv.I4 = q.value[3];
    cv.IMcl = q.value[4];
    cv.INcl = q.value[5];
    const auto& names = alternate_names();
    for (std::size_t i = 0; i < names.size(); ++i) cv.alternates[names[i]] = q.value[6 + i];
    cv.panels = q.panels;
    cv.achieved_rel = q.achieved_rel;
    cv.converged = q.converged;
    return cv;
}

/// Integrand traces (t, I1..INcl) on a uniform grid, for plotting.
inline std::vector<std::array<double, 7>> integrand_trace(const Operator& op, const std::vector<double>& xi,
                                                          int points = 512) {
    BoundOperator b(op, xi);
    std::vector<double> buf(condition_dimension());
    std::vector<std::array<double, 7>> rows;
    for (int k = 0; k < points; ++k) {
        const double t = op.horizon * (k + 0.5) / points;
        condition_integrand(b, t, buf);
        rows.push_back({t, buf[0], buf[1], buf[2], buf[3], buf[4], buf[5]});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// logarithmic fits

enum class Verdict { logarithmic, violated, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::logarithmic: return "logarithmic";
        case Verdict::violated: return "violated";
        default: return "inconclusive";
    }
}

struct LogFit {
    double slope = 0;           ///< max over the ladder of I / log(1 + |xi|)
    double excess = 0;          ///< max ratio divided by the first ratio
    std::vector<double> ratios;
    Verdict verdict = Verdict::inconclusive;
};

/// Ratios below this count as zero.
inline constexpr double kZeroRatio = 1e-8;

inline LogFit log_fit(const std::vector<std::pair<double, double>>& rows) {
    if (rows.size() < 5) throw ConfigError("log fit needs at least 5 ladder points");
    double lo = rows.front().first, hi = lo;
    for (auto& r : rows) {
        lo = std::min(lo, r.first);
        hi = std::max(hi, r.first);
    }
    if (hi < 8 * lo * (1 - 1e-12)) throw ConfigError("log fit needs a ladder spanning 3 doublings");
    LogFit f;
    for (auto& [xi, I] : rows) f.ratios.push_back(I / std::log1p(xi));
    const auto& r = f.ratios;
    f.slope = *std::max_element(r.begin(), r.end());
    const double r0 = std::max(r.front(), kZeroRatio);
    f.excess = f.slope <= kZeroRatio ? 0 : f.slope / r0;
    const std::size_t n = r.size();
    const bool increasing = r[n - 3] < r[n - 2] && r[n - 2] < r[n - 1];
    const bool doubled = r[n - 3] >= 2 * r0 && r[n - 2] >= 2 * r0 && r[n - 1] >= 2 * r0;
    if (f.slope <= kZeroRatio || f.slope <= 1.2 * r0) f.verdict = Verdict::logarithmic;
    else if (increasing && doubled) f.verdict = Verdict::violated;
    else f.verdict = Verdict::inconclusive;
    return f;
}

struct Band {
    std::string alternate, primary;
    double lo = 0, hi = 0;
    /// On the upper half of the ladder, per direction, hi <= 1.5 lo
    /// (every ratio within 20% of the band midpoint).
    bool stable = false;
};

struct LadderRow {
    double xi_norm;
    std::vector<double> direction;
    ConditionVector values;
};

struct ConditionReport {
    std::vector<LadderRow> ladder;
    std::map<std::string, LogFit> fits;
    std::vector<Band> bands;
};

/// Ratio of alternate to primary with a logarithmic slack on both sides:
/// (alt + log(1+|xi|)) / (primary + log(1+|xi|)).
inline std::vector<Band> equivalence_bands(const std::vector<LadderRow>& rows) {
    std::vector<double> norms;
    for (auto& r : rows) norms.push_back(r.xi_norm);
    std::sort(norms.begin(), norms.end());
    norms.erase(std::unique(norms.begin(), norms.end()), norms.end());
    const double upper = norms.empty() ? 0 : norms[norms.size() / 2];
    std::vector<Band> out;
    for (auto& name : alternate_names()) {
        const std::string prim = primary_of(name);
        if (prim.empty()) continue;
        Band b{name, prim, INFINITY, -INFINITY, true};
        std::map<std::vector<double>, std::pair<double, double>> tail;
        for (auto& r : rows) {
            const double slack = std::log1p(r.xi_norm);
            const double q = (r.values.get(name) + slack) / (r.values.get(prim) + slack);
            b.lo = std::min(b.lo, q);
            b.hi = std::max(b.hi, q);
            if (r.xi_norm < upper) continue;
            auto [it, fresh] = tail.try_emplace(r.direction, q, q);
            it->second.first = std::min(it->second.first, q);
            it->second.second = std::max(it->second.second, q);
        }
        for (auto& [d, lh] : tail) b.stable &= lh.second <= 1.5 * lh.first;
        out.push_back(b);
    }
    return out;
}

inline ConditionReport analyze_conditions(const Operator& op, const std::vector<double>& norms,
                                          const std::vector<std::vector<double>>& directions,
                                          QuadratureOptions qopt = {}) {
    ConditionReport rep;
    for (auto& d : directions)
        for (double n : norms) rep.ladder.push_back({n, d, {}});
    parallel_for(rep.ladder.size(), [&](std::size_t i) {
        auto& row = rep.ladder[i];
        row.values = condition_integrals(op, scaled(row.direction, row.xi_norm), qopt);
    });
    for (auto& name : condition_names()) {
        // fit per direction; keep the worst verdict
        LogFit worst;
        bool first = true;
        for (auto& d : directions) {
            std::vector<std::pair<double, double>> pts;
            for (auto& r : rep.ladder)
                if (r.direction == d) pts.emplace_back(r.xi_norm, r.values.get(name));
            LogFit f = log_fit(pts);
            auto rank = [](Verdict v) { return v == Verdict::violated ? 2 : v == Verdict::inconclusive ? 1 : 0; };
            if (first || rank(f.verdict) > rank(worst.verdict) ||
                (rank(f.verdict) == rank(worst.verdict) && f.slope > worst.slope))
                worst = f;
            first = false;
        }
        rep.fits[name] = worst;
    }
    rep.bands = equivalence_bands(rep.ladder);
    return rep;
}

// ---------------------------------------------------------------------------
// pointwise conditions

enum class LeviCase { I, II, III, ambiguous };

inline const char* to_string(LeviCase c) {
    switch (c) {
        case LeviCase::I: return "I";
        case LeviCase::II: return "II";
        case LeviCase::III: return "III";
        default: return "ambiguous";
    }
}

struct PointwiseResult {
    std::string name;
    std::string kind;               ///< "bound" (sup of LHS/RHS) or "vanishing" (sup of |value|/scale)
    double sup_coarse = 0;          ///< over the coarse grid and the whole ladder
    double sup_fine = 0;            ///< same on a 4x finer grid
    std::vector<double> sup_by_xi;  ///< coarse grid, per ladder point
    bool holds = false;             ///< bounded, or identically zero
    double max_remainder = 0;       ///< division remainder, quotient bounds only
};

struct CaseReport {
    LeviCase kase = LeviCase::ambiguous;
    double delta_max = 0;   ///< max |Delta_L| / (1+|xi|)^6 on the grid
    double delta1_max = 0;  ///< max Delta_L^(1) / (1+|xi|)^2
    std::vector<PointwiseResult> results;
};

namespace detail {

inline double safe_ratio(double lhs, double rhs, double zero) {
    if (lhs <= zero) return 0;
    if (rhs <= 0) return INFINITY;
    return lhs / rhs;
}

/// Per-point quantities for the pointwise checks.
struct PointData {
    double t, xi;
    Cubic c;
    std::array<double, 3> tau;
    RealJet2 disc;
    Symbols s;
    CubicJet cj;
};

inline PointData point_data(const BoundOperator& b, double t) {
    const auto g = b.grouped(t);
    PointData p{t, b.xi_norm(), {}, {}, {}, symbols(b, g), b.principal_cubic(g)};
    p.c = values(p.cj);
    p.tau = solve_cubic_real(p.c, 1e-9, {t, b.xi_norm()});
    p.disc = discriminant_jet(p.cj);
    return p;
}

}  // namespace detail

/// Pointwise checks: each lambda returns the ratio (or scaled value) at one point.
inline CaseReport pointwise_levi(const Operator& op, const std::vector<double>& norms,
                                 const std::vector<double>& direction, int grid = 256) {
    if (op.order != 3) throw ConfigError("pointwise conditions need a third-order operator");
    using detail::PointData;
    CaseReport rep;
    auto each_point = [&](int N, auto&& fn) {
        for (std::size_t k = 0; k < norms.size(); ++k) {
            BoundOperator b(op, scaled(direction, norms[k]));
            for (int i = 0; i < N; ++i) fn(k, detail::point_data(b, op.horizon * (i + 0.5) / N));
        }
    };
    each_point(grid, [&](std::size_t, const PointData& p) {
        const double sc = 1 + p.xi;
        rep.delta_max = std::max(rep.delta_max, std::abs(discriminant(p.c)) / std::pow(sc, 6));
        rep.delta1_max = std::max(rep.delta1_max, std::abs(delta1(p.c)) / (sc * sc));
    });
    auto zero = [](double v) { return v <= 1e-10; };
    auto dead = [](double v) { return v > 1e-10 && v <= 1e-6; };
    if (dead(rep.delta_max) || dead(rep.delta1_max)) rep.kase = LeviCase::ambiguous;
    else if (!zero(rep.delta_max)) rep.kase = LeviCase::I;
    else if (!zero(rep.delta1_max)) rep.kase = LeviCase::II;
    else rep.kase = LeviCase::III;

    auto evaluate = [&](const std::string& name, const std::string& kind, auto&& value) {
        PointwiseResult r{name, kind, 0, 0, std::vector<double>(norms.size(), 0.0), false, 0};
        each_point(grid, [&](std::size_t k, const PointData& p) {
            const double v = value(p, r.max_remainder);
            r.sup_by_xi[k] = std::max(r.sup_by_xi[k], v);
            r.sup_coarse = std::max(r.sup_coarse, v);
        });
        each_point(4 * grid, [&](std::size_t, const PointData& p) {
            double dummy = 0;
            r.sup_fine = std::max(r.sup_fine, value(p, dummy));
        });
        if (kind == "vanishing") {
            r.holds = r.sup_coarse <= 1e-10 && r.sup_fine <= 1e-10;
        } else {
            const double floor = 1e-9;
            const bool refined_ok = r.sup_fine <= 1.5 * r.sup_coarse + floor;
            const bool ladder_ok = r.sup_by_xi.back() <= 2 * r.sup_by_xi.front() + floor;
            r.holds = std::isfinite(r.sup_coarse) && refined_ok && ladder_ok;
        }
        rep.results.push_back(r);
    };
    static constexpr int others[3][2] = {{1, 2}, {0, 2}, {0, 1}};
    const bool one_d = op.dimension == 1;

    // first-order terms at the critical points of L (cases I and II)
    auto ndd = [&](const std::string& name, bool in_1d) {
        evaluate(name, "bound", [&, in_1d](const PointData& p, double&) {
            const DerivativeRoots d = derivative_quadratic(p.c);
            const double D = d.gap_sq;
            const double Dp = (8 * p.cj.A1.v * p.cj.A1.d1 - 12 * p.cj.A2.d1) / 9;
            const double sc = 1 + p.xi;
            double worst = 0;
            for (double sg : {d.sigma1, d.sigma2}) {
                const double lhs = std::abs(p.s.Nc.value(sg));
                double rhs;
                if (in_1d) {
                    worst = std::max(worst, detail::safe_ratio(p.t * p.t * lhs, std::abs(d.sigma2 - d.sigma1), 1e-12 * sc));
                    continue;
                }
                rhs = D > 0 ? std::sqrt(D) + Dp * Dp / std::pow(D, 1.5) : 0;
                worst = std::max(worst, detail::safe_ratio(lhs, rhs, 1e-12 * sc));
            }
            return worst;
        });
    };

    if (rep.kase == LeviCase::I) {
        evaluate("second_order_discriminant_bound", "bound", [&](const PointData& p, double&) {
            const auto& t = p.tau;
            const double sq = std::abs((t[1] - t[0]) * (t[2] - t[0]) * (t[2] - t[1]));
            const double dsq = sq > 0 ? std::abs(p.disc.d1) / (2 * sq) : INFINITY;
            const double sc = 1 + p.xi;
            double worst = 0;
            for (int j = 0; j < 3; ++j) {
                const double lhs = std::abs(t[others[j][0]] - t[others[j][1]]) * std::abs(p.s.Mc.value(t[j]));
                worst = std::max(worst, detail::safe_ratio(lhs, sq + dsq, 1e-12 * sc * sc * sc));
            }
            return worst;
        });
        if (one_d)
            evaluate("second_order_root_gap_bound_1d", "bound", [&](const PointData& p, double&) {
                const auto& t = p.tau;
                const double sc = 1 + p.xi;
                double worst = 0;
                for (int j = 0; j < 3; ++j) {
                    const double lhs = p.t * std::abs(p.s.Mc.value(t[j]));
                    const double rhs = std::abs(t[j] - t[others[j][0]]) * std::abs(t[j] - t[others[j][1]]);
                    worst = std::max(worst, detail::safe_ratio(lhs, rhs, 1e-12 * sc * sc));
                }
                return worst;
            });
    }
    if (rep.kase == LeviCase::I || rep.kase == LeviCase::II) {
        ndd("first_order_derivative_discriminant_bound", false);
        if (one_d) ndd("first_order_gap_bound_1d", true);
    }
    if (rep.kase == LeviCase::II) {
        // the coincident pair is the closer one at each point
        auto split = [](const std::array<double, 3>& t) {
            return (t[1] - t[0] <= t[2] - t[1]) ? std::pair{0.5 * (t[0] + t[1]), t[2]}
                                                : std::pair{0.5 * (t[1] + t[2]), t[0]};
        };
        evaluate("double_root_vanishing", "vanishing", [&](const PointData& p, double&) {
            const double sc = 1 + p.xi;
            return std::abs(p.s.Mc.value(split(p.tau).first)) / (sc * sc);
        });
        auto quotient = [&](const PointData& p, double& rem, bool in_1d) {
            const auto [rd, rs] = split(p.tau);
            const cplx m2 = p.s.Mc.c.size() > 2 ? p.s.Mc.c[2].c[0] : 0.0;
            const cplx m1 = p.s.Mc.c[1].c[0], m0 = p.s.Mc.c[0].c[0];
            const cplx q1 = m2, q0 = m1 + m2 * rd;
            const double sc = 1 + p.xi;
            rem = std::max(rem, std::abs(m0 + q0 * rd) / (sc * sc));
            const double D = delta1(p.c);
            const double Dp = 2 * (2 * p.cj.A1.v * p.cj.A1.d1 - 3 * p.cj.A2.d1);
            const double sq = std::sqrt(std::max(D, 0.0));
            const double rhs = in_1d ? std::abs(rs - rd) : sq + (sq > 0 ? std::abs(Dp) / (2 * sq) : INFINITY);
            double worst = 0;
            for (double x : {rd, rs}) {
                const double lhs = std::abs(q1 * x + q0) * (in_1d ? p.t : 1.0);
                worst = std::max(worst, detail::safe_ratio(lhs, rhs, 1e-12 * sc));
            }
            return worst;
        };
        evaluate("double_root_quotient_bound", "bound",
                 [&](const PointData& p, double& rem) { return quotient(p, rem, false); });
        if (one_d)
            evaluate("double_root_quotient_bound_1d", "bound",
                     [&](const PointData& p, double& rem) { return quotient(p, rem, true); });
    }
    if (rep.kase == LeviCase::III) {
        auto r1 = [](const PointData& p) { return (p.tau[0] + p.tau[1] + p.tau[2]) / 3; };
        evaluate("triple_root_Mcheck_vanishing", "vanishing", [&](const PointData& p, double&) {
            const double sc = 1 + p.xi;
            return std::abs(p.s.Mc.value(r1(p))) / (sc * sc);
        });
        evaluate("triple_root_dtau_Mcheck_vanishing", "vanishing", [&](const PointData& p, double&) {
            return std::abs(p.s.Mc.dtau().value(r1(p))) / (1 + p.xi);
        });
        evaluate("triple_root_Ncheck_vanishing", "vanishing", [&](const PointData& p, double&) {
            return std::abs(p.s.Nc.value(r1(p))) / (1 + p.xi);
        });
    }
    return rep;
}

inline bool all_hold(const CaseReport& r) {
    for (auto& x : r.results)
        if (!x.holds) return false;
    return r.kase != LeviCase::ambiguous;
}

// ---------------------------------------------------------------------------
// constant coefficients

/// Roots of a monic complex cubic (Aberth iteration).
inline std::array<cplx, 3> complex_cubic_roots(cplx c2, cplx c1, cplx c0) {
    auto f = [&](cplx z) { return ((z + c2) * z + c1) * z + c0; };
    auto fp = [&](cplx z) { return (3.0 * z + 2.0 * c2) * z + c1; };
    const double R = 1 + std::max({std::abs(c2), std::sqrt(std::abs(c1)), std::cbrt(std::abs(c0))});
    std::array<cplx, 3> z;
    for (int k = 0; k < 3; ++k) z[k] = R * std::polar(1.0, 0.4 + 2 * M_PI * k / 3);
    for (int it = 0; it < 500; ++it) {
        double move = 0;
        for (int k = 0; k < 3; ++k) {
            const cplx ratio = f(z[k]) / fp(z[k]);
            cplx s = 0;
            for (int j = 0; j < 3; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            const cplx w = ratio / (1.0 - ratio * s);
            if (std::isfinite(w.real()) && std::isfinite(w.imag())) {
                z[k] -= w;
                move = std::max(move, std::abs(w));
            }
        }
        if (move <= 1e-15 * R) break;
    }
    return z;
}

struct ConstCoeffRow {
    double xi_norm = 0;
    std::array<double, 3> l{};  ///< |l_j|; inf for a zero gap with nonzero numerator
    std::array<double, 2> m{};
    double garding_im = 0;      ///< max |Im tau| over roots of the full symbol
};

struct ConstCoeffReport {
    std::vector<ConstCoeffRow> rows;
    bool decomposition_bounded = true;
    bool garding_bounded = true;
    double garding_slope = 0;  ///< least-squares slope of log sup|Im tau| against log|xi|
    std::vector<std::string> notes;
};

inline ConstCoeffReport constant_coeff_check(const Operator& op, const std::vector<double>& norms,
                                             const std::vector<double>& direction) {
    if (op.order != 3) throw ConfigError("constant-coefficient check needs a third-order operator");
    if (!op.has_constant_coefficients()) throw ConfigError("constant-coefficient check needs constant coefficients");
    ConstCoeffReport rep;
    for (double nrm : norms) {
        BoundOperator b(op, scaled(direction, nrm));
        const auto g = b.grouped(0.0);
        const Symbols s = symbols(b, g);
        const Cubic c = values(b.principal_cubic(g));
        const auto tau = solve_cubic_real(c, 1e-9, {0.0, nrm});
        ConstCoeffRow row{nrm, {}, {}, 0};
        const double sc = 1 + nrm;
        const double gap_tol = 1e-7 * sc;
        auto Mv = [&](double x) { return s.M.value(x); };
        auto dM = [&](double x) { return s.M.dtau().value(x); };
        const bool g01 = tau[1] - tau[0] <= gap_tol, g12 = tau[2] - tau[1] <= gap_tol;
        auto nonzero = [&](cplx v, int deg) { return std::abs(v) > 1e-9 * std::pow(sc, deg); };
        if (g01 && g12) {
            const double r = (tau[0] + tau[1] + tau[2]) / 3;
            if (nonzero(Mv(r), 2) || nonzero(dM(r), 1)) row.l.fill(INFINITY);
            else row.l.fill(std::abs(s.M.dtau().dtau().value(r)) / 2);
        } else if (g01 || g12) {
            const double rd = g01 ? 0.5 * (tau[0] + tau[1]) : 0.5 * (tau[1] + tau[2]);
            const double rs = g01 ? tau[2] : tau[0];
            if (nonzero(Mv(rd), 2)) {
                row.l.fill(INFINITY);
            } else {
                const double ld = std::abs(dM(rd) / (rd - rs));
                const double ls = std::abs(Mv(rs) / ((rs - rd) * (rs - rd)));
                row.l = g01 ? std::array{ld, ld, ls} : std::array{ls, ld, ld};
            }
        } else {
            static constexpr int others[3][2] = {{1, 2}, {0, 2}, {0, 1}};
            for (int j = 0; j < 3; ++j) {
                const double h = tau[others[j][0]], l = tau[others[j][1]];
                row.l[j] = std::abs(Mv(tau[j]) / ((tau[j] - h) * (tau[j] - l)));
            }
        }
        const DerivativeRoots d = derivative_quadratic(c);
        if (d.sigma2 - d.sigma1 <= gap_tol) {
            row.m.fill(nonzero(s.N.value(d.sigma1), 1) ? INFINITY : 0.0);
        } else {
            row.m[0] = std::abs(s.N.value(d.sigma1)) / (d.sigma2 - d.sigma1);
            row.m[1] = std::abs(s.N.value(d.sigma2)) / (d.sigma2 - d.sigma1);
        }
        // full symbol L - i M - N + i p: its roots tau give solutions exp(i tau t)
        const cplx I(0, 1);
        const cplx c2 = c.A1 - I * s.M.c[2].c[0];
        const cplx c1 = c.A2 - I * s.M.c[1].c[0] - s.N.c[1].c[0];
        const cplx c0 = c.A3 - I * s.M.c[0].c[0] - s.N.c[0].c[0] + I * s.p;
        for (auto z : complex_cubic_roots(c2, c1, c0)) row.garding_im = std::max(row.garding_im, std::abs(z.imag()));
        rep.rows.push_back(row);
    }
    double lo_l = INFINITY, hi_l = 0;
    for (auto& r : rep.rows) {
        const double v = std::max({r.l[0], r.l[1], r.l[2], r.m[0], r.m[1]});
        lo_l = std::min(lo_l, v);
        hi_l = std::max(hi_l, v);
        if (!std::isfinite(v)) rep.notes.push_back("zero gap with nonzero numerator at |xi| = " + std::to_string(r.xi_norm));
    }
    rep.decomposition_bounded = std::isfinite(hi_l) && hi_l <= 1.5 * lo_l + 1e-9;
    const double g0 = rep.rows.front().garding_im;
    double gmax = 0;
    for (auto& r : rep.rows) gmax = std::max(gmax, r.garding_im);
    rep.garding_bounded = gmax <= 1.5 * g0 + 1e-6;
    // slope over rows with a nonzero imaginary part
    std::vector<double> X, Y;
    for (auto& r : rep.rows)
        if (r.garding_im > 1e-9) {
            X.push_back(std::log(r.xi_norm));
            Y.push_back(std::log(r.garding_im));
        }
    if (X.size() >= 2) {
        const double mx = std::accumulate(X.begin(), X.end(), 0.0) / X.size();
        const double my = std::accumulate(Y.begin(), Y.end(), 0.0) / Y.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            sxy += (X[i] - mx) * (Y[i] - my);
            sxx += (X[i] - mx) * (X[i] - mx);
        }
        rep.garding_slope = sxy / sxx;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// regularized roots at eps = 1/|xi|

struct RegularizedGapRow {
    double xi_norm = 0;
    double min_gap = 0;    ///< min over t and pairs of |tau_{j,eps} - tau_{h,eps}|
    double max_shift = 0;  ///< max over t and j of |tau_{j,eps} - tau_j|
};

struct RegularizedGapReport {
    std::vector<RegularizedGapRow> rows;
    double gap_lo = 0, gap_hi = 0;  ///< extreme ratios of successive min gaps
    double shift_growth = 0;        ///< max ratio of successive max shifts
    double gap_floor = 0;           ///< min gap over the ladder: the per-operator constant
    bool stable = false;            ///< no doubling shrinks the gap or grows the shift by more than 10%
};

inline RegularizedGapReport regularized_gaps(const Operator& op, const std::vector<double>& norms,
                                             const std::vector<double>& direction, int grid = 256) {
    if (op.order != 3) throw ConfigError("regularized roots need a third-order operator");
    RegularizedGapReport rep;
    for (double nrm : norms) {
        BoundOperator b(op, scaled(direction, nrm));
        RegularizedGapRow row{nrm, INFINITY, 0};
        for (int i = 0; i < grid; ++i) {
            const double t = op.horizon * (i + 0.5) / grid;
            const Regularized r = regularize(b, t, 1 / nrm);
            const auto tau = solve_cubic_real(values(b.principal_cubic(t)), 1e-9, {t, nrm});
            row.min_gap = std::min({row.min_gap, r.roots[1] - r.roots[0], r.roots[2] - r.roots[1]});
            for (int j = 0; j < 3; ++j) row.max_shift = std::max(row.max_shift, std::abs(r.roots[j] - tau[j]));
        }
        rep.rows.push_back(row);
    }
    rep.gap_lo = INFINITY;
    rep.gap_hi = 0;
    rep.shift_growth = 0;
    for (std::size_t k = 1; k < rep.rows.size(); ++k) {
        const double g = rep.rows[k].min_gap / rep.rows[k - 1].min_gap;
        rep.gap_lo = std::min(rep.gap_lo, g);
        rep.gap_hi = std::max(rep.gap_hi, g);
        rep.shift_growth = std::max(rep.shift_growth, rep.rows[k].max_shift / rep.rows[k - 1].max_shift);
    }
    bool positive = true;
    rep.gap_floor = INFINITY;
    for (auto& r : rep.rows) {
        positive &= r.min_gap > 0;
        rep.gap_floor = std::min(rep.gap_floor, r.min_gap);
    }
    rep.stable = positive && rep.gap_lo >= 0.9 && rep.shift_growth <= 1.1;
    return rep;
}

// ---------------------------------------------------------------------------
// second-order operators

struct SecondOrderValues {
    double Ia = 0, Ib = 0;
    bool converged = true;
};

inline SecondOrderValues second_order_check(const Operator& op, const std::vector<double>& xi,
                                            QuadratureOptions qopt = {}) {
    if (op.order != 2) throw ConfigError("second-order check needs an order-2 operator");
    BoundOperator b(op, xi);
    const auto q = integrate(
        [&](double t, std::vector<double>& out) {
            const auto g = b.grouped(t);
            const auto& a = g.C[1][2];
            const auto& bb = g.C[0][2];
            const double av = a.c[0].real(), ad = a.d(1).real();
            const double D = av * av - 4 * bb.c[0].real();
            const double Dd = 2 * av * ad - 4 * bb.d(1).real();
            if (D < -1e-9 * (1 + av * av + std::abs(bb.c[0].real())))
                throw HyperbolicityViolation(D, t, b.xi_norm(), "second-order symbol has non-real roots");
            const double Dp = std::max(D, 0.0);
            const double c0 = g.C[1][1].c[0].real();
            const double cx = g.C[0][1].c[0].real();
            out[0] = std::abs(Dd) / (Dp + 1);
            out[1] = std::abs(-0.5 * c0 * av + cx - 0.5 * ad) / std::sqrt(Dp + 1);
        },
        2, 0.0, op.horizon, qopt);
    return {q.value[0], q.value[1], q.converged};
}

// ---------------------------------------------------------------------------
// oscillation counts

enum class OscTarget { gap, Mcheck_on_lambda, Ncheck_on_mu };

inline const char* to_string(OscTarget t) {
    switch (t) {
        case OscTarget::gap: return "gap";
        case OscTarget::Mcheck_on_lambda: return "Mcheck_on_lambda";
        default: return "Ncheck_on_mu";
    }
}

/// Strict local extrema of a sampled function; plateaus count once.
inline int count_extrema(const std::vector<double>& f) {
    double scale = 1;
    for (double v : f) scale = std::max(scale, std::abs(v));
    int count = 0, last = 0;
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
        const double d = f[k + 1] - f[k];
        const int s = std::abs(d) <= 1e-10 * scale ? 0 : (d > 0 ? 1 : -1);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

inline std::vector<int> oscillation_count(const Operator& op, const std::vector<double>& xi, OscTarget target,
                                          int grid = 4096) {
    BoundOperator b(op, xi);
    const int branches = target == OscTarget::Ncheck_on_mu ? 2 : 3;
    std::vector<std::vector<cplx>> f(branches);
    for (int k = 0; k < grid; ++k) {
        const double t = op.horizon * k / (grid - 1);
        const auto g = b.grouped(t);
        const AuxiliaryRoots a = auxiliary_roots(b.principal_cubic(g), {t, b.xi_norm()});
        const Symbols s = symbols(b, g);
        static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (int j = 0; j < branches; ++j) {
            if (target == OscTarget::gap) f[j].push_back(a.lam[pairs[j][1]].v - a.lam[pairs[j][0]].v);
            else if (target == OscTarget::Mcheck_on_lambda) f[j].push_back(s.Mc.value(a.lam[j].v));
            else f[j].push_back(s.Nc.value(a.mu[j].v));
        }
    }
    std::vector<int> counts;
    for (auto& br : f) {
        bool real = true;
        for (auto& z : br) real &= z.imag() == 0;
        std::vector<double> v;
        for (auto& z : br) v.push_back(real ? z.real() : std::abs(z));
        counts.push_back(count_extrema(v));
    }
    return counts;
}

}  // namespace levi3
