#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "ode.hpp"
#include "operator.hpp"
#include "parallel.hpp"

namespace levi3 {

struct ModeSolution {
    std::vector<double> xi;
    double xi_norm = 0;
    std::vector<double> t;
    std::vector<cplx> v, v1, v2;
    std::vector<double> log_scale;  ///< stored values are divided by exp(log_scale)
    IntegratorStats stats;
};

/// Fourier mode v''' + sum a_{j,alpha}(t) (i xi)^alpha v^(j) = 0 on a uniform grid.
inline ModeSolution solve_mode(const Operator& op, const std::vector<double>& xi, const State3& init,
                               int grid_points, IntegratorOptions opt = {}) {
    if (op.order != 3) throw ConfigError("mode solver needs a third-order operator");
    if (grid_points < 64) throw ConfigError("grid_points must be at least 64");
    BoundOperator b(op, xi);
    if (!(b.xi_norm() > 0)) throw ConfigError("mode solver needs |xi| > 0");
    std::vector<double> ts(grid_points);
    for (int k = 0; k < grid_points; ++k) ts[k] = op.horizon * k / (grid_points - 1);
    const bool frozen = b.constant_coefficients();
    const auto c0 = b.ode_coefficients(0.0);
    auto rhs = [&](double t, const State3& y) {
        const auto c = frozen ? c0 : b.ode_coefficients(t);
        return State3{y[1], y[2], -(c[2] * y[2] + c[1] * y[1] + c[0] * y[0])};
    };
    Trajectory tr = integrate_linear3(rhs, init, ts, opt);
    ModeSolution s;
    s.xi = xi;
    s.xi_norm = b.xi_norm();
    s.t = tr.t;
    s.log_scale = tr.log_scale;
    s.stats = tr.stats;
    for (auto& y : tr.y) {
        s.v.push_back(y[0]);
        s.v1.push_back(y[1]);
        s.v2.push_back(y[2]);
    }
    return s;
}

/// Central five-point derivative on a uniform grid; endpoints (two each side) are left at zero.
inline std::vector<cplx> five_point_derivative(const std::vector<cplx>& w, double h) {
    std::vector<cplx> d(w.size());
    for (std::size_t k = 2; k + 2 < w.size(); ++k)
        d[k] = (-w[k + 2] + 8.0 * w[k + 1] - 8.0 * w[k - 1] + w[k - 2]) / (12 * h);
    return d;
}

/// max |v2' - v3| / max |v2| with v3 from the equation; interior points only.
inline double equation_residual(const Operator& op, const ModeSolution& s) {
    BoundOperator b(op, s.xi);
    const double h = s.t[1] - s.t[0];
    const auto d = five_point_derivative(s.v2, h);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < s.t.size(); ++k) den = std::max(den, std::abs(s.v2[k]));
    for (std::size_t k = 2; k + 2 < s.t.size(); ++k) {
        if (s.log_scale[k - 2] != s.log_scale[k + 2]) continue;
        const auto c = b.ode_coefficients(s.t[k]);
        const cplx v3 = -(c[2] * s.v2[k] + c[1] * s.v1[k] + c[0] * s.v[k]);
        num = std::max(num, std::abs(d[k] - v3));
    }
    return den > 0 ? num / den : 0;
}

// ---------------------------------------------------------------------------
// factorized operators

inline constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

/// Factor outputs at one grid point.
struct FactorPoint {
    std::array<RootJet, 3> roots;  ///< tau_{j,eps} with jets (jets NaN when unavailable)
    std::array<cplx, 3> L;         ///< L_{j,eps} v
    std::array<cplx, 3> Lt;        ///< tilde L_{jh,eps} v for pairs (0,1), (0,2), (1,2)
};

inline std::vector<FactorPoint> factor_apply(const Operator& op, const ModeSolution& s, double eps) {
    BoundOperator b(op, s.xi);
    const double sreg = eps * eps * s.xi_norm * s.xi_norm;
    const cplx I(0, 1);
    std::vector<FactorPoint> out(s.t.size());
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        const CubicJet cj = regularize(b.principal_cubic(s.t[k]), sreg);
        const auto r = solve_cubic_real(values(cj), 1e-9, {s.t[k], s.xi_norm});
        FactorPoint& p = out[k];
        try {
            p.roots = root_jets(cj, r);
        } catch (const NearMultipleRoot&) {
            for (int j = 0; j < 3; ++j) p.roots[j] = {r[j], NAN, NAN};
        }
        const cplx v = s.v[k], v1 = s.v1[k], v2 = s.v2[k];
        for (int j = 0; j < 3; ++j) p.L[j] = v1 - I * p.roots[j].v * v;
        for (int q = 0; q < 3; ++q) {
            const RootJet &a = p.roots[kPairs[q][0]], &c = p.roots[kPairs[q][1]];
            p.Lt[q] = v2 - I * (a.v + c.v) * v1 - a.v * c.v * v - 0.5 * I * (a.d1 + c.d1) * v;
        }
    }
    return out;
}

/// Symbol in the equation convention: real symbol Q of degree k becomes i^k Q(lambda / i),
/// so that applying it to v means sum_j q_j(t) v^(j).
inline TauPoly to_equation_form(const TauPoly& Q, int k) {
    TauPoly r = Q;
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    for (std::size_t j = 0; j < r.c.size(); ++j) r.c[j] *= ipow[((k - int(j)) % 4 + 4) % 4];
    return r;
}

inline cplx apply_symbol(const TauPoly& P, const std::array<cplx, 4>& derivs) {
    cplx s = 0;
    for (std::size_t j = 0; j < P.c.size() && j < 4; ++j) s += P.c[j].c[0] * derivs[j];
    return s;
}

/// sum_j |q_j| |v^(j)|: the size of the terms before cancellation.
inline double apply_symbol_magnitude(const TauPoly& P, const std::array<cplx, 4>& derivs) {
    double s = 0;
    for (std::size_t j = 0; j < P.c.size() && j < 4; ++j) s += std::abs(P.c[j].c[0]) * std::abs(derivs[j]);
    return s;
}

struct IdentityResidual {
    std::string name;
    double rel = 0;       ///< max |residual| / max term magnitude
    double max_abs = 0;
    double scale = 0;
};

/// Checks the factorization identities along a solved trajectory.
/// Compositions of first-order factors use five-point differences of grid
/// values; the right-hand sides use root jets and symbol jets.
inline std::vector<IdentityResidual> trajectory_identities(const Operator& op, const std::vector<double>& xi,
                                                           const State3& init, int grid = 8192) {
    BoundOperator b(op, xi);
    const ModeSolution s = solve_mode(op, xi, init, grid);
    const std::size_t n = s.t.size();
    const double h = s.t[1] - s.t[0];
    const double eps = 1 / s.xi_norm;
    const cplx I(0, 1);
    const auto fe = factor_apply(op, s, eps);
    const auto f0 = factor_apply(op, s, 0.0);

    std::vector<std::array<cplx, 4>> dv(n);
    std::vector<Symbols> sym(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto c = b.ode_coefficients(s.t[k]);
        dv[k] = {s.v[k], s.v1[k], s.v2[k], -(c[2] * s.v2[k] + c[1] * s.v1[k] + c[0] * s.v[k])};
        sym[k] = symbols(b, b.grouped(s.t[k]));
    }
    auto Lfirst = [&](const std::vector<FactorPoint>& F, int j) {
        std::vector<cplx> w(n);
        for (std::size_t k = 0; k < n; ++k) w[k] = F[k].L[j];
        return w;
    };
    auto compose = [&](const std::vector<FactorPoint>& F, int j, const std::vector<cplx>& w) {
        auto d = five_point_derivative(w, h);
        for (std::size_t k = 0; k < n; ++k) d[k] -= I * F[k].roots[j].v * w[k];
        return d;
    };
    auto triple_average = [&](const std::vector<FactorPoint>& F) {
        static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        std::vector<cplx> acc(n);
        std::vector<cplx> t123;
        for (auto& p : perms) {
            auto w = compose(F, p[0], compose(F, p[1], Lfirst(F, p[2])));
            for (std::size_t k = 0; k < n; ++k) acc[k] += w[k] / 6.0;
            if (p[0] == 0 && p[1] == 1) t123 = w;
        }
        return std::pair{acc, t123};
    };

    std::vector<IdentityResidual> out;
    auto tally = [&](const std::string& name, std::size_t margin, auto&& point) {
        IdentityResidual r{name, 0, 0, 0};
        for (std::size_t k = margin; k + margin < n; ++k) {
            const auto [res, mag] = point(k);
            r.max_abs = std::max(r.max_abs, std::abs(res));
            r.scale = std::max(r.scale, mag);
        }
        r.rel = r.scale > 0 ? r.max_abs / r.scale : 0;
        out.push_back(r);
    };

    // two-factor compositions against the symmetrized product
    for (int j = 0; j < 3; ++j)
        for (int hh = 0; hh < 3; ++hh) {
            if (j == hh) continue;
            const auto comp = compose(fe, j, Lfirst(fe, hh));
            const int q = (std::min(j, hh) == 0) ? (std::max(j, hh) == 1 ? 0 : 1) : 2;
            tally("pair_composition[" + std::to_string(j + 1) + std::to_string(hh + 1) + "]", 3, [&](std::size_t k) {
                const auto& r = fe[k].roots;
                const cplx corr = 0.5 * I * (r[j].d1 - r[hh].d1) * s.v[k];
                const cplx res = comp[k] - fe[k].Lt[q] - corr;
                return std::pair{res, std::max({std::abs(comp[k]), std::abs(fe[k].Lt[q]), std::abs(corr)})};
            });
        }

    const auto [avg_e, t123] = triple_average(fe);
    const auto [avg_0, t123_0] = triple_average(f0);
    (void)t123_0;

    // ordered triple product minus its average
    tally("triple_composition", 5, [&](std::size_t k) {
        const auto& r = fe[k].roots;
        const auto& L = fe[k].L;
        const cplx v = s.v[k];
        const cplx rhs = 0.5 * I * (r[0].d1 - r[1].d1) * L[2] + 0.5 * I * (r[1].d1 - r[2].d1) * L[0] -
                         0.5 * I * (r[2].d1 - r[0].d1) * L[1] - (1.0 / 3) * I * (r[2].d2 - r[0].d2) * v -
                         (1.0 / 3) * I * (r[2].d2 - r[1].d2) * v;
        const cplx lhs = t123[k] - avg_e[k];
        return std::pair{lhs - rhs, std::max({std::abs(t123[k]), std::abs(avg_e[k]), std::abs(rhs)})};
    });

    // averaged triple product at eps = 0 against the symbol formula
    std::vector<cplx> closed0(n), Mt(n), Nc(n);
    std::vector<double> termwise(n);
    for (std::size_t k = 0; k < n; ++k) {
        const TauPoly L = to_equation_form(sym[k].L, 3);
        const TauPoly M = to_equation_form(sym[k].M, 2);
        const TauPoly N = to_equation_form(sym[k].N, 1);
        const TauPoly Lt = L + cplx(0.5) * L.dtau().dt() + cplx(1.0 / 6) * L.dtau().dtau().dt().dt();
        const TauPoly Mc = M + cplx(-0.5) * L.dtau().dt();
        const TauPoly Mtl = Mc + cplx(0.5) * Mc.dtau().dt();
        const TauPoly Ncc = N + cplx(-0.5) * M.dtau().dt() + cplx(1.0 / 12) * L.dtau().dtau().dt().dt();
        closed0[k] = apply_symbol(Lt, dv[k]);
        termwise[k] = apply_symbol_magnitude(Lt, dv[k]);
        Mt[k] = apply_symbol(Mtl, dv[k]);
        Nc[k] = apply_symbol(Ncc, dv[k]);
    }
    tally("triple_average_symbol_form", 5, [&](std::size_t k) {
        return std::pair{avg_0[k] - closed0[k], std::max({std::abs(avg_0[k]), std::abs(closed0[k]), termwise[k]})};
    });

    // regularization shift of the averaged triple product
    const double sreg = eps * eps * s.xi_norm * s.xi_norm;
    tally("regularization_shift", 5, [&](std::size_t k) {
        const cplx sumL = fe[k].L[0] + fe[k].L[1] + fe[k].L[2];
        const cplx rhs = 2 * sreg * sumL;
        const cplx lhs = avg_e[k] - closed0[k];
        return std::pair{lhs - rhs, std::max({std::abs(avg_e[k]), std::abs(closed0[k]), std::abs(rhs)})};
    });

    // decomposition: (tilde L_123,0 + tilde M + check N) v = (L + M + N) v = -p v
    tally("decomposition", 5, [&](std::size_t k) {
        const cplx pv = sym[k].p * s.v[k];
        const cplx res = avg_0[k] + Mt[k] + Nc[k] + pv;
        return std::pair{res, std::max({std::abs(avg_0[k]), std::abs(Mt[k]), std::abs(Nc[k]), std::abs(pv), termwise[k]})};
    });
    return out;
}

// ---------------------------------------------------------------------------
// energy

struct EnergyTrace {
    std::vector<double> t;
    std::vector<double> K, H, k;
    std::vector<double> log_E;     ///< log E (E may overflow)
    std::vector<double> log_Ehat;  ///< log (E / k)
    std::vector<double> sum_Lt2, sum_L2, v2;  ///< components, scaled by exp(-2 log_scale)
    double eta = 1;

    double E(std::size_t i) const { return std::exp(log_E[i]); }
};

/// Weights K and H at one time, from the eps = 1/|xi| roots.
struct Weights {
    double K = 0, H = 0;
};

inline Weights energy_weights(const BoundOperator& b, double t) {
    const auto g = b.grouped(t);
    const AuxiliaryRoots a = auxiliary_roots(b.principal_cubic(g), {t, b.xi_norm()});
    const Symbols s = symbols(b, g);
    const auto& lam = a.lam;
    const auto& mu = a.mu;
    static constexpr int others[3][2] = {{1, 2}, {0, 2}, {0, 1}};
    double gap_ratio = 0, second = 0, dM = 0, dN = 0, lagr = 0, sqN = 0, sqN1 = 0;
    for (auto& p : kPairs) {
        const RootJet &x = lam[p[0]], &y = lam[p[1]];
        gap_ratio += std::abs(x.d1 - y.d1) / std::abs(x.v - y.v);
        second += std::abs(x.d2 - y.d2) / (std::abs(x.d1 - y.d1) + 1);
    }
    for (int j = 0; j < 3; ++j) {
        const auto f = along(s.Mc, lam[j]);
        dM += std::abs(f[1]) / (std::abs(f[0]) + 1);
        lagr += std::abs(f[0]) / (std::abs(lam[j].v - lam[others[j][0]].v) * std::abs(lam[j].v - lam[others[j][1]].v));
    }
    const double mugap = std::abs(mu[1].v - mu[0].v);
    for (int j = 0; j < 2; ++j) {
        const auto f = along(s.Nc, mu[j]);
        dN += std::abs(f[1]) / (std::abs(f[0]) + 1);
        sqN += std::sqrt(std::abs(f[0]) / mugap);
        sqN1 += std::sqrt((std::abs(f[0]) + 1) / mugap);
    }
    return {gap_ratio + second + dM + dN + lagr + sqN + std::log(b.xi_norm()), 1 + gap_ratio + lagr + sqN1};
}

inline EnergyTrace energy_trace(const Operator& op, const ModeSolution& s, double eta) {
    BoundOperator b(op, s.xi);
    const auto F = factor_apply(op, s, 1 / s.xi_norm);
    const std::size_t n = s.t.size();
    EnergyTrace e;
    e.eta = eta;
    e.t = s.t;
    e.K.resize(n);
    e.H.resize(n);
    e.k.resize(n);
    e.log_E.resize(n);
    e.log_Ehat.resize(n);
    e.sum_Lt2.resize(n);
    e.sum_L2.resize(n);
    e.v2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Weights w = energy_weights(b, s.t[i]);
        e.K[i] = w.K;
        e.H[i] = w.H;
        double lt = 0, l = 0;
        for (int q = 0; q < 3; ++q) {
            lt += std::norm(F[i].Lt[q]);
            l += std::norm(F[i].L[q]);
        }
        e.sum_Lt2[i] = lt;
        e.sum_L2[i] = l;
        e.v2[i] = std::norm(s.v[i]);
        const double hat = lt + w.H * w.H * (l + e.v2[i]);
        e.log_Ehat[i] = (hat > 0 ? std::log(hat) : -INFINITY) + 2 * s.log_scale[i];
    }
    // k(t) = exp(-eta int_0^t K), trapezoid on the grid
    double integral = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) integral += 0.5 * (e.K[i] + e.K[i - 1]) * (e.t[i] - e.t[i - 1]);
        e.k[i] = std::exp(-eta * integral);
        e.log_E[i] = e.log_Ehat[i] - eta * integral;
    }
    return e;
}

struct EnergyWitness {
    double xi_norm = 0;
    double rate_over_K = 0;   ///< max_t (d/dt log(E/k)) / K
    double max_dlogE = 0;     ///< max_t d/dt log E at the chosen eta
    double eta = 1;
    double K_min = 0;
};

/// d/dt log E / K along one trajectory; eta enters only through max_dlogE.
inline EnergyWitness energy_witness(const Operator& op, const ModeSolution& s, double eta) {
    const EnergyTrace e = energy_trace(op, s, eta);
    const std::size_t n = e.t.size();
    const double h = e.t[1] - e.t[0];
    EnergyWitness w{s.xi_norm, -INFINITY, -INFINITY, eta, INFINITY};
    for (std::size_t i = 0; i < n; ++i) w.K_min = std::min(w.K_min, e.K[i]);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double d = (-e.log_Ehat[i + 2] + 8 * e.log_Ehat[i + 1] - 8 * e.log_Ehat[i - 1] + e.log_Ehat[i - 2]) / (12 * h);
        w.rate_over_K = std::max(w.rate_over_K, d / e.K[i]);
        w.max_dlogE = std::max(w.max_dlogE, d - eta * e.K[i]);
    }
    return w;
}

/// Smallest eta in {1, 2, 4, ..., 2^10} with eta >= the witnessed rate, so that E is nonincreasing.
inline double calibrate_eta(double rate_over_K) {
    double eta = 1;
    while (eta < rate_over_K && eta < 1024) eta *= 2;
    return eta;
}

/// Energy witness over a ladder of |xi|. One eta is calibrated from the largest
/// witnessed rate; the ladder is stable when E is nonincreasing at every |xi|
/// and the rate constant grows by at most 10% per doubling.
struct EnergyLadder {
    std::vector<EnergyWitness> rows;
    double eta = 1;
    double worst_step = 0;  ///< max over doublings of C(2|xi|) / C(|xi|) - 1
    bool stable = false;
};

inline EnergyLadder energy_ladder(const Operator& op, const std::vector<double>& norms,
                                  const std::vector<double>& direction, const State3& init = {1.0, 0.0, 0.0},
                                  int grid = 4096, double eta_override = 0) {
    if (op.order != 3) throw ConfigError("energy witness needs a third-order operator");
    EnergyLadder L;
    std::vector<ModeSolution> sols(norms.size());
    L.rows.resize(norms.size());
    parallel_for(norms.size(), [&](std::size_t i) {
        sols[i] = solve_mode(op, scaled(direction, norms[i]), init, grid);
        L.rows[i] = energy_witness(op, sols[i], 1.0);
    });
    double rate = 0;
    for (auto& r : L.rows) rate = std::max(rate, r.rate_over_K);
    L.eta = eta_override > 0 ? eta_override : calibrate_eta(rate);
    L.stable = true;
    L.worst_step = -INFINITY;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        L.rows[i] = energy_witness(op, sols[i], L.eta);
        L.stable &= L.rows[i].max_dlogE <= 1e-9;
        if (i == 0) continue;
        const double prev = std::max(L.rows[i - 1].rate_over_K, 0.0), cur = std::max(L.rows[i].rate_over_K, 0.0);
        const double step = prev > 1e-6 ? cur / prev - 1 : (cur > 1e-6 ? INFINITY : 0.0);
        L.worst_step = std::max(L.worst_step, step);
        L.stable &= cur <= 1.1 * prev + 1e-6;
    }
    return L;
}

// ---------------------------------------------------------------------------
// growth experiments

struct GrowthRow {
    double xi_norm = 0;
    double log_amp = 0;          ///< log of the amplification, max over the three bases
    bool blew_up = false;
    double reach_t = 0;
    double resid_poly = 0, resid_exp = 0;
};

enum class GrowthModel { polynomial, exp_power };

inline const char* to_string(GrowthModel m) { return m == GrowthModel::polynomial ? "polynomial" : "exp_power"; }

struct GrowthFit {
    std::vector<GrowthRow> rows;
    double kappa = 0;  ///< exponent of the exp model; 0 under the polynomial verdict
    double exp_C = 0, exp_kappa = 0, exp_d = 0, exp_e = 0, rms_exp = 0;
    double poly_d = 0, poly_e = 0, rms_poly = 0;
    int consecutive_wins = 0;
    GrowthModel verdict = GrowthModel::polynomial;
};

/// Overflow sentinel for log amplification when the integrator gives up.
inline constexpr double kOverflowLogAmp = 700;

inline double log_amplification(const Operator& op, const std::vector<double>& xi, int grid, bool& blew_up,
                                double& reach) {
    const double nrm = std::sqrt([&] {
        double s = 0;
        for (double x : xi) s += x * x;
        return s;
    }());
    double best = -INFINITY;
    const State3 bases[3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    for (auto& y0 : bases) {
        const double m0 = std::abs(y0[0]) + std::abs(y0[1]) / nrm + std::abs(y0[2]) / (nrm * nrm);
        try {
            const ModeSolution s = solve_mode(op, xi, y0, grid);
            for (std::size_t k = 0; k < s.t.size(); ++k) {
                const double m = std::abs(s.v[k]) + std::abs(s.v1[k]) / nrm + std::abs(s.v2[k]) / (nrm * nrm);
                best = std::max(best, std::log(m / m0) + s.log_scale[k]);
            }
        } catch (const IntegratorError& e) {
            blew_up = true;
            reach = e.t();
            best = std::max(best, kOverflowLogAmp);
        }
    }
    return best;
}

namespace detail {

/// Least squares y ~ X beta for up to three columns, via normal equations.
template <std::size_t P>
std::array<double, P> least_squares(const std::vector<std::array<double, P>>& X, const std::vector<double>& y) {
    std::array<std::array<double, P + 1>, P> A{};
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t r = 0; r < P; ++r) {
            for (std::size_t c = 0; c < P; ++c) A[r][c] += X[i][r] * X[i][c];
            A[r][P] += X[i][r] * y[i];
        }
    for (std::size_t c = 0; c < P; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < P; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        if (A[c][c] == 0) continue;
        for (std::size_t r = 0; r < P; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k <= P; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::array<double, P> beta{};
    for (std::size_t c = 0; c < P; ++c) beta[c] = A[c][c] != 0 ? A[c][P] / A[c][c] : 0;
    return beta;
}

}  // namespace detail

/// Polynomial model log A = d log|xi| + e against exp model
/// log A = C |xi|^kappa + d log|xi| + e (kappa by grid search).
inline GrowthFit fit_growth(std::vector<GrowthRow> rows) {
    GrowthFit f;
    const std::size_t n = rows.size();
    std::vector<double> y(n), lx(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = rows[i].log_amp;
        lx[i] = std::log(rows[i].xi_norm);
    }
    {
        std::vector<std::array<double, 2>> X(n);
        for (std::size_t i = 0; i < n; ++i) X[i] = {lx[i], 1.0};
        const auto b = detail::least_squares(X, y);
        f.poly_d = b[0];
        f.poly_e = b[1];
    }
    double best = INFINITY;
    for (int g = 20; g <= 1500; ++g) {
        const double kap = g * 1e-3;
        std::vector<std::array<double, 3>> X(n);
        for (std::size_t i = 0; i < n; ++i) X[i] = {std::exp(kap * lx[i]), lx[i], 1.0};
        const auto b = detail::least_squares(X, y);
        double rss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (b[0] * X[i][0] + b[1] * lx[i] + b[2]);
            rss += r * r;
        }
        if (rss < best) {
            best = rss;
            f.exp_kappa = kap;
            f.exp_C = b[0];
            f.exp_d = b[1];
            f.exp_e = b[2];
        }
    }
    double sp = 0, se = 0;
    int run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = rows[i];
        r.resid_poly = y[i] - (f.poly_d * lx[i] + f.poly_e);
        r.resid_exp = y[i] - (f.exp_C * std::exp(f.exp_kappa * lx[i]) + f.exp_d * lx[i] + f.exp_e);
        sp += r.resid_poly * r.resid_poly;
        se += r.resid_exp * r.resid_exp;
        if (std::abs(r.resid_exp) < std::abs(r.resid_poly)) f.consecutive_wins = std::max(f.consecutive_wins, ++run);
        else run = 0;
    }
    f.rms_poly = std::sqrt(sp / n);
    f.rms_exp = std::sqrt(se / n);
    // the polynomial model must miss by a visible amount before the extra parameters count
    const bool exp_wins = f.exp_C > 0 && f.consecutive_wins >= 3 && f.rms_poly > 0.05 && f.rms_exp < 0.5 * f.rms_poly;
    f.verdict = exp_wins ? GrowthModel::exp_power : GrowthModel::polynomial;
    f.kappa = exp_wins ? f.exp_kappa : 0.0;
    f.rows = std::move(rows);
    return f;
}

inline GrowthFit growth_experiment(const Operator& op, const std::vector<double>& norms,
                                   const std::vector<double>& direction, int grid = 2048) {
    if (norms.size() < 6) throw ConfigError("growth experiment needs a ladder of at least 5 doublings");
    std::vector<GrowthRow> rows(norms.size());
    parallel_for(norms.size(), [&](std::size_t i) {
        rows[i].xi_norm = norms[i];
        rows[i].log_amp = log_amplification(op, scaled(direction, norms[i]), grid, rows[i].blew_up, rows[i].reach_t);
    });
    return fit_growth(std::move(rows));
}

}  // namespace levi3
