#include <gtest/gtest.h>

#include <cmath>

#include <levi3/battery.hpp>
#include <levi3/conditions.hpp>
#include <levi3/expectations.hpp>

using namespace levi3;

namespace {

Operator third(std::initializer_list<std::tuple<int, int, const char*>> terms, double T = 1) {
    Operator op("op", 3, 1, T);
    for (auto& [j, a, e] : terms) op.set(j, {a}, e);
    return op;
}

Operator second(std::initializer_list<std::tuple<int, int, const char*>> terms, double T = 1) {
    Operator op("op2", 2, 1, T);
    for (auto& [j, a, e] : terms) op.set(j, {a}, e);
    return op;
}

const PointwiseResult* find(const CaseReport& r, const std::string& name) {
    for (auto& x : r.results)
        if (x.name == name) return &x;
    return nullptr;
}

const std::vector<double> kShort = geometric_ladder(16, 1024, 5);

}  // namespace

TEST(ConditionIntegrals, VanishForConstantStrictlyHyperbolic) {
    const ConditionVector cv = condition_integrals(battery_member("strict_const").op, {100.0});
    EXPECT_TRUE(cv.converged);
    for (auto& n : condition_names()) EXPECT_LT(std::abs(cv.get(n)), 1e-10) << n;
}

TEST(ConditionIntegrals, LowerOrderSpaceDerivativeClosedForm) {
    // tau^3 with N = c xi: the regularized critical points are +-sqrt(2), so
    // INcl = 2 T sqrt(|c| xi / (2 sqrt 2))
    for (double c : {1.0, 3.0})
        for (double xi : {16.0, 400.0}) {
            const Operator op = third({{0, 1, c == 1.0 ? "1" : "3"}}, 2.0);
            const ConditionVector cv = condition_integrals(op, {xi});
            const double want = 2 * 2.0 * std::sqrt(c * xi / (2 * std::sqrt(2.0)));
            EXPECT_NEAR(cv.INcl / want, 1, 1e-9) << "c=" << c << " xi=" << xi;
            EXPECT_LT(cv.I1, 1e-12);
            EXPECT_LT(cv.IMcl, 1e-12);
        }
}

TEST(ConditionIntegrals, RejectBadInput) {
    EXPECT_THROW(condition_integrals(battery_member("strict_const").op, {1.0}), ConfigError);
    EXPECT_THROW(condition_integrals(battery_member("wave").op, {10.0}), ConfigError);
}

TEST(LogFit, Examples) {
    std::vector<std::pair<double, double>> log5, root, zero;
    for (double xi : default_ladder()) {
        log5.emplace_back(xi, 5 * std::log1p(xi));
        root.emplace_back(xi, std::sqrt(xi));
        zero.emplace_back(xi, 0.0);
    }
    const LogFit a = log_fit(log5);
    EXPECT_NEAR(a.slope, 5, 1e-12);
    EXPECT_EQ(a.verdict, Verdict::logarithmic);
    EXPECT_EQ(log_fit(root).verdict, Verdict::violated);
    const LogFit z = log_fit(zero);
    EXPECT_EQ(z.verdict, Verdict::logarithmic);
    EXPECT_EQ(z.slope, 0);
}

TEST(LogFit, NeedsEnoughPoints) {
    EXPECT_THROW(log_fit({{1, 0}, {2, 0}, {4, 0}, {8, 0}}), ConfigError);
    EXPECT_THROW(log_fit({{1, 0}, {1.2, 0}, {1.4, 0}, {1.6, 0}, {2, 0}}), ConfigError);
}

TEST(LogFit, NonMonotoneGrowthIsInconclusive) {
    std::vector<std::pair<double, double>> rows;
    int k = 0;
    for (double xi : kShort) rows.emplace_back(xi, (k++ % 2 ? 4 : 1) * std::log1p(xi));
    EXPECT_EQ(log_fit(rows).verdict, Verdict::inconclusive);
}

TEST(AnalyzeConditions, BatteryVerdicts) {
    const auto dx = analyze_conditions(battery_member("triple_plus_dx").op, default_ladder(), {{1.0}});
    EXPECT_EQ(dx.fits.at("INcl").verdict, Verdict::violated);
    EXPECT_EQ(dx.fits.at("I1").verdict, Verdict::logarithmic);
    const auto sc = analyze_conditions(battery_member("strict_const").op, kShort, {{1.0}, {-1.0}});
    for (auto& n : condition_names()) EXPECT_EQ(sc.fits.at(n).verdict, Verdict::logarithmic) << n;
    EXPECT_EQ(sc.ladder.size(), 2 * kShort.size());
    for (auto& b : sc.bands) EXPECT_TRUE(b.stable) << b.alternate;
}

TEST(Pointwise, CaseClassification) {
    const auto one = pointwise_levi(battery_member("strict_const").op, kShort, {1.0}, 64);
    EXPECT_EQ(one.kase, LeviCase::I);
    EXPECT_TRUE(all_hold(one));

    // tau^2 (tau - xi): a fixed double root
    const auto two = pointwise_levi(third({{2, 1, "-1"}}), kShort, {1.0}, 64);
    EXPECT_EQ(two.kase, LeviCase::II);
    ASSERT_NE(find(two, "double_root_vanishing"), nullptr);
    EXPECT_TRUE(find(two, "double_root_vanishing")->holds);

    const auto three = pointwise_levi(battery_member("triple_plus_dx").op, kShort, {1.0}, 64);
    EXPECT_EQ(three.kase, LeviCase::III);
    ASSERT_NE(find(three, "triple_root_Ncheck_vanishing"), nullptr);
    EXPECT_FALSE(find(three, "triple_root_Ncheck_vanishing")->holds);
    EXPECT_TRUE(find(three, "triple_root_Mcheck_vanishing")->holds);
    EXPECT_FALSE(all_hold(three));
}

TEST(ConstantCoefficients, DecompositionOfStrictlyHyperbolicSymbol) {
    // L = tau (tau^2 - xi^2), M = xi^2: |l| = (1/2, 1, 1/2)
    const auto r = constant_coeff_check(battery_member("const_coeff_wellposed").op, kShort, {1.0});
    for (auto& row : r.rows) {
        EXPECT_NEAR(row.l[0], 0.5, 1e-12);
        EXPECT_NEAR(row.l[1], 1.0, 1e-12);
        EXPECT_NEAR(row.l[2], 0.5, 1e-12);
        EXPECT_EQ(row.m[0], 0);
    }
    EXPECT_TRUE(r.decomposition_bounded);
    EXPECT_TRUE(r.garding_bounded);
}

TEST(ConstantCoefficients, TripleRootWithLowerTermIsUnbounded) {
    // tau^3 - xi: roots xi^(1/3) e^(i k 2pi/3), so sup |Im| grows like |xi|^(1/3)
    const auto r = constant_coeff_check(battery_member("triple_plus_dx").op, kShort, {1.0});
    EXPECT_FALSE(r.decomposition_bounded);
    EXPECT_FALSE(r.garding_bounded);
    EXPECT_NEAR(r.garding_slope, 1.0 / 3, 1e-6);
    for (auto& row : r.rows) EXPECT_NEAR(row.garding_im, std::sqrt(3.0) / 2 * std::cbrt(row.xi_norm), 1e-9 * row.xi_norm);
    EXPECT_FALSE(r.notes.empty());
    EXPECT_THROW(constant_coeff_check(battery_member("triple_pure").op, kShort, {1.0}), ConfigError);
}

TEST(SecondOrder, WaveHasNoContribution) {
    const auto v = second_order_check(battery_member("wave").op, {50.0});
    EXPECT_EQ(v.Ia, 0);
    EXPECT_EQ(v.Ib, 0);
}

TEST(SecondOrder, OleinikClosedForms) {
    // tau^2 - t^2 xi^2 + c xi: Ia = log(1 + 4 T^2 xi^2), Ib = |c|/2 asinh(2 T xi)
    const Operator op = second({{0, 2, "-t^2"}, {0, 1, "3"}}, 1.5);
    for (double xi : {10.0, 1000.0}) {
        const auto v = second_order_check(op, {xi});
        ASSERT_TRUE(v.converged);
        EXPECT_NEAR(v.Ia / std::log1p(4 * 1.5 * 1.5 * xi * xi), 1, 1e-6);
        EXPECT_NEAR(v.Ib / (1.5 * std::asinh(2 * 1.5 * xi)), 1, 1e-6);
    }
}

TEST(SecondOrder, DoubleRootWithLowerTermGrowsLinearly) {
    const auto v = second_order_check(second({{0, 1, "1"}}, 2.0), {40.0});
    EXPECT_NEAR(v.Ib, 80, 1e-9);
    const auto rep = second_order_ladder(second({{0, 1, "1"}}), default_ladder(), {1.0});
    EXPECT_EQ(rep.Ib.verdict, Verdict::violated);
}

TEST(SecondOrder, BatteryLadder) {
    const auto c = second_order_ladder(battery_member("oleinik2_compat").op, kShort, {1.0});
    EXPECT_EQ(c.Ib.verdict, Verdict::logarithmic);
    EXPECT_TRUE(c.Ib_stable);
    const auto v = second_order_ladder(battery_member("oleinik2_violating").op, default_ladder(), {1.0});
    EXPECT_EQ(v.Ib.verdict, Verdict::violated);
}

TEST(Oscillation, CountsOnKnownProfiles) {
    EXPECT_EQ(count_extrema({0, 1, 2, 1, 0, 1}), 2);
    EXPECT_EQ(count_extrema({1, 1, 1}), 0);
    EXPECT_EQ(count_extrema({0, 1, 1, 1, 0}), 1);
    const auto sc = oscillation_count(battery_member("strict_const").op, {64.0}, OscTarget::gap, 512);
    for (int c : sc) EXPECT_EQ(c, 0);
    // sin(t)^2 over [0, 3] peaks once
    const auto sg = oscillation_count(battery_member("sin_gap").op, {64.0}, OscTarget::gap, 512);
    for (int c : sg) EXPECT_EQ(c, 1);
    const auto prof = oscillation_profile(battery_member("sin_gap").op, kShort, {1.0}, 512);
    EXPECT_TRUE(prof.constant);
}

TEST(RegularizedGaps, StrictlyHyperbolicGapsAreBoundedBelow) {
    const auto r = regularized_gaps(battery_member("strict_const").op, kShort, {1.0}, 32);
    EXPECT_TRUE(r.stable);
    // roots of tau^3 - (xi^2 + 6) tau: gap sqrt(xi^2 + 6)
    EXPECT_NEAR(r.gap_floor, std::sqrt(16.0 * 16 + 6), 1e-9);
    // triple root spreads to 0, +-sqrt(6)
    const auto t = regularized_gaps(third({}), kShort, {1.0}, 16);
    EXPECT_NEAR(t.gap_floor, std::sqrt(6.0), 1e-12);
    EXPECT_TRUE(t.stable);
}
