#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "ladder.hpp"
#include "modes.hpp"
#include "operator_file.hpp"

namespace levi3 {

struct RunOptions {
    std::vector<double> norms = default_ladder();
    std::vector<double> gap_norms = geometric_ladder(16, 65536, 13);
    std::vector<double> direction;  ///< empty: +e1
    int pointwise_grid = 256;
    int growth_grid = 2048;
    int energy_grid = 4096;
    int oscillation_grid = 4096;
    double eta = 0;  ///< 0: calibrate
    QuadratureOptions quadrature;

    std::vector<double> dir(int dimension) const {
        if (!direction.empty()) return direction;
        return unit_axis(dimension, 0);
    }
};

struct OscillationReport {
    std::map<std::string, std::vector<std::vector<int>>> counts;  ///< target -> per ladder point
    bool constant = true;
};

inline OscillationReport oscillation_profile(const Operator& op, const std::vector<double>& norms,
                                             const std::vector<double>& direction, int grid = 4096) {
    OscillationReport rep;
    for (auto target : {OscTarget::gap, OscTarget::Mcheck_on_lambda, OscTarget::Ncheck_on_mu}) {
        auto& rows = rep.counts[to_string(target)];
        for (double n : norms) rows.push_back(oscillation_count(op, scaled(direction, n), target, grid));
        for (auto& r : rows) rep.constant &= r == rows.front();
    }
    return rep;
}

struct SecondOrderRow {
    double xi_norm = 0;
    SecondOrderValues values;
};

struct SecondOrderReport {
    std::vector<SecondOrderRow> rows;
    LogFit Ia, Ib;
    bool Ia_stable = false, Ib_stable = false;  ///< ratio to log(1+|xi|) within 20% of its midpoint
};

inline bool ratio_stable(const LogFit& f) {
    const auto [lo, hi] = std::minmax_element(f.ratios.begin(), f.ratios.end());
    if (*hi <= kZeroRatio) return true;
    return *hi <= 1.5 * *lo;
}

inline SecondOrderReport second_order_ladder(const Operator& op, const std::vector<double>& norms,
                                             const std::vector<double>& direction, QuadratureOptions qopt = {}) {
    SecondOrderReport rep;
    std::vector<std::pair<double, double>> a, b;
    for (double n : norms) {
        const auto v = second_order_check(op, scaled(direction, n), qopt);
        rep.rows.push_back({n, v});
        a.emplace_back(n, v.Ia);
        b.emplace_back(n, v.Ib);
    }
    rep.Ia = log_fit(a);
    rep.Ib = log_fit(b);
    rep.Ia_stable = ratio_stable(rep.Ia);
    rep.Ib_stable = ratio_stable(rep.Ib);
    return rep;
}

/// Everything the harness can compute for one operator; parts not requested stay empty.
struct Analysis {
    std::optional<ConditionReport> conditions;
    std::optional<CaseReport> pointwise;
    std::optional<ConstCoeffReport> const_coeff;
    std::optional<RegularizedGapReport> gaps;
    std::optional<GrowthFit> growth;
    std::optional<EnergyLadder> energy;
    std::optional<OscillationReport> oscillation;
    std::optional<SecondOrderReport> second_order;
};

enum class Part { conditions, pointwise, const_coeff, gaps, growth, energy, oscillation, second_order };

inline Analysis analyze(const Operator& op, const std::set<Part>& parts, const RunOptions& o) {
    Analysis a;
    const auto d = o.dir(op.dimension);
    auto want = [&](Part p) { return parts.count(p) > 0; };
    if (op.order == 2) {
        if (want(Part::second_order) || want(Part::conditions))
            a.second_order = second_order_ladder(op, o.norms, d, o.quadrature);
        return a;
    }
    if (want(Part::conditions)) a.conditions = analyze_conditions(op, o.norms, {d}, o.quadrature);
    if (want(Part::pointwise)) a.pointwise = pointwise_levi(op, o.norms, d, o.pointwise_grid);
    if (want(Part::const_coeff) && op.has_constant_coefficients()) a.const_coeff = constant_coeff_check(op, o.norms, d);
    if (want(Part::gaps)) a.gaps = regularized_gaps(op, o.gap_norms, d);
    if (want(Part::growth)) a.growth = growth_experiment(op, o.norms, d, o.growth_grid);
    if (want(Part::energy)) a.energy = energy_ladder(op, o.norms, d, {1.0, 0.0, 0.0}, o.energy_grid, o.eta);
    if (want(Part::oscillation)) a.oscillation = oscillation_profile(op, o.norms, d, o.oscillation_grid);
    return a;
}

/// Parts needed to check the declared expectations.
inline std::set<Part> parts_for(const std::map<std::string, std::string>& expect) {
    std::set<Part> p;
    for (auto& [k, v] : expect) {
        if (k.rfind("verdict.", 0) == 0) p.insert(Part::conditions);
        else if (k == "case" || k.rfind("pointwise", 0) == 0) p.insert(Part::pointwise);
        else if (k == "const_coeff") p.insert(Part::const_coeff);
        else if (k == "regularized_gaps") p.insert(Part::gaps);
        else if (k == "growth" || k == "kappa") p.insert(Part::growth);
        else if (k == "energy") p.insert(Part::energy);
        else if (k == "oscillation") p.insert(Part::oscillation);
        else if (k.rfind("second_order.", 0) == 0) p.insert(Part::second_order);
    }
    return p;
}

struct Check {
    std::string key, expected, observed;
    bool passed = false;
};

inline constexpr double kKappaTolerance = 0.05;

/// Compares declared expectations with an analysis. Unknown keys fail.
inline std::vector<Check> check_expectations(const std::map<std::string, std::string>& expect, const Analysis& a) {
    std::vector<Check> out;
    for (auto& [key, want] : expect) {
        Check c{key, want, "", false};
        auto missing = [&] { c.observed = "not computed"; };
        if (key.rfind("verdict.", 0) == 0) {
            const std::string name = key.substr(8);
            if (!a.conditions) missing();
            else if (auto it = a.conditions->fits.find(name); it == a.conditions->fits.end()) c.observed = "unknown condition";
            else c.observed = to_string(it->second.verdict);
        } else if (key == "case") {
            if (!a.pointwise) missing();
            else c.observed = to_string(a.pointwise->kase);
        } else if (key == "pointwise") {
            if (!a.pointwise) missing();
            else c.observed = all_hold(*a.pointwise) ? "holds" : "fails";
        } else if (key.rfind("pointwise.", 0) == 0) {
            c.observed = "not computed";
            if (a.pointwise)
                for (auto& r : a.pointwise->results)
                    if (r.name == key.substr(10)) c.observed = r.holds ? "holds" : "fails";
        } else if (key == "const_coeff") {
            if (!a.const_coeff) missing();
            else c.observed = a.const_coeff->decomposition_bounded && a.const_coeff->garding_bounded ? "bounded"
                              : !a.const_coeff->decomposition_bounded && !a.const_coeff->garding_bounded ? "unbounded"
                                                                                                        : "disagree";
        } else if (key == "regularized_gaps") {
            if (!a.gaps) missing();
            else c.observed = a.gaps->stable ? "stable" : "unstable";
        } else if (key == "growth") {
            if (!a.growth) missing();
            else c.observed = to_string(a.growth->verdict);
        } else if (key == "kappa") {
            if (!a.growth) missing();
            else {
                c.observed = std::to_string(a.growth->kappa);
                c.passed = std::abs(a.growth->kappa - std::stod(want)) <= kKappaTolerance;
                out.push_back(c);
                continue;
            }
        } else if (key == "energy") {
            if (!a.energy) missing();
            else c.observed = a.energy->stable ? "stable" : "unstable";
        } else if (key == "oscillation") {
            if (!a.oscillation) missing();
            else c.observed = a.oscillation->constant ? "constant" : "varying";
        } else if (key.rfind("second_order.", 0) == 0) {
            const std::string which = key.substr(13);
            if (!a.second_order) missing();
            else if (which == "Ia" || which == "Ib") {
                const LogFit& f = which == "Ia" ? a.second_order->Ia : a.second_order->Ib;
                const bool stable = which == "Ia" ? a.second_order->Ia_stable : a.second_order->Ib_stable;
                c.observed = to_string(f.verdict);
                // a logarithmic verdict also needs a stable ratio
                if (f.verdict == Verdict::logarithmic && !stable) c.observed = "logarithmic (unstable ratio)";
            } else {
                c.observed = "unknown integral";
            }
        } else {
            c.observed = "unknown key";
        }
        c.passed = c.observed == want;
        out.push_back(c);
    }
    return out;
}

inline bool all_passed(const std::vector<Check>& checks) {
    for (auto& c : checks)
        if (!c.passed) return false;
    return true;
}

}  // namespace levi3
