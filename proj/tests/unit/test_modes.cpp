#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <levi3/battery.hpp>
#include <levi3/identities.hpp>
#include <levi3/ladder.hpp>
#include <levi3/modes.hpp>

using namespace levi3;

namespace {

cplx value(const ModeSolution& s, std::size_t k) { return s.v[k] * std::exp(s.log_scale[k]); }

State3 random_init(std::uint64_t seed) {
    std::mt19937_64 g(seed);
    State3 y;
    for (auto& c : y) c = cplx(uniform(g, -1, 1), uniform(g, -1, 1));
    return y;
}

}  // namespace

TEST(SolveMode, PureThirdDerivative) {
    const Operator op("d3", 3, 1, 1);
    const ModeSolution s = solve_mode(op, {5.0}, {0.0, 0.0, 1.0}, 128);
    for (std::size_t k = 0; k < s.t.size(); ++k) EXPECT_NEAR(std::abs(value(s, k) - 0.5 * s.t[k] * s.t[k]), 0, 1e-12);
}

TEST(SolveMode, ConstantModeOfStrictlyHyperbolicOperator) {
    // v''' + xi^2 v' = 0 with v(0) = 1, v'(0) = v''(0) = 0
    const ModeSolution s = solve_mode(battery_member("strict_const").op, {10.0}, {1.0, 0.0, 0.0}, 256);
    for (std::size_t k = 0; k < s.t.size(); ++k) EXPECT_NEAR(std::abs(value(s, k) - 1.0), 0, 1e-12);
}

TEST(SolveMode, PlaneWaveOfStrictlyHyperbolicOperator) {
    // v = exp(i xi t) solves v''' + xi^2 v' = 0
    const double xi = 40;
    const cplx I(0, 1);
    const ModeSolution s = solve_mode(battery_member("strict_const").op, {xi}, {1.0, I * xi, -xi * xi}, 512);
    for (std::size_t k = 0; k < s.t.size(); ++k)
        EXPECT_NEAR(std::abs(value(s, k) - std::exp(I * xi * s.t[k])), 0, 1e-8);
    // five-point truncation is about h^4 xi^5 / 30, 5e-5 on this grid
    const ModeSolution fine = solve_mode(battery_member("strict_const").op, {xi}, {1.0, I * xi, -xi * xi}, 4096);
    EXPECT_LT(equation_residual(battery_member("strict_const").op, fine), 1e-6);
}

TEST(SolveMode, LowerOrderTermGrowsLikeCubeRoot) {
    // v''' + i xi v = 0: the fastest root has real part (sqrt 3 / 2) xi^(1/3)
    const double xi = 8000;
    const ModeSolution s = solve_mode(battery_member("triple_plus_dx").op, {xi}, random_init(1), 1025);
    auto logv = [&](std::size_t k) { return std::log(std::abs(s.v[k])) + s.log_scale[k]; };
    const double rate = (logv(1024) - logv(512)) / (s.t[1024] - s.t[512]);
    EXPECT_NEAR(rate / (std::sqrt(3.0) / 2 * std::cbrt(xi)), 1, 1e-3);
}

TEST(SolveMode, RejectsBadInput) {
    EXPECT_THROW(solve_mode(battery_member("wave").op, {1.0}, {1.0, 0.0, 0.0}, 128), ConfigError);
    EXPECT_THROW(solve_mode(battery_member("strict_const").op, {1.0}, {1.0, 0.0, 0.0}, 16), ConfigError);
}

TEST(EquationForm, PowersOfI) {
    // xi^2 tau of degree 3 becomes i^2 xi^2 = -xi^2 on the first derivative
    TauPoly P;
    P.c.resize(2);
    P.c[1] = TJet::constant(4.0);
    const TauPoly E = to_equation_form(P, 3);
    EXPECT_EQ(E.c[1].c[0], cplx(-4.0));
    EXPECT_DOUBLE_EQ(apply_symbol_magnitude(E, {0.0, cplx(0, 2), 0.0, 0.0}), 8.0);
    EXPECT_EQ(apply_symbol(E, {0.0, cplx(0, 2), 0.0, 0.0}), cplx(0, -8));
}

TEST(TrajectoryIdentities, HoldOnTimeDependentBattery) {
    for (const char* name : {"triple_pure", "oleinik_double_compat", "sin_gap"}) {
        const auto res = trajectory_identities(battery_member(name).op, {8.0}, random_init(7), 4096);
        ASSERT_FALSE(res.empty());
        for (auto& r : res) EXPECT_LT(r.rel, 1e-6) << name << " " << r.name;
    }
}

TEST(TrajectoryIdentities, CancellingTermsStayRelative) {
    const auto res = trajectory_identities(battery_member("strict_const").op, {4.0}, random_init(3), 2048);
    for (auto& r : res) EXPECT_LT(r.rel, 1e-6) << r.name;
}

TEST(Energy, WeightIsLogFrequencyForConstantStrictlyHyperbolic) {
    const Operator& op = battery_member("strict_const").op;
    const BoundOperator b(op, {50.0});
    const Weights w = energy_weights(b, 0.3);
    EXPECT_NEAR(w.K, std::log(50.0), 1e-12);
    // critical points of tau^3 - (xi^2 + 6) tau are 2 sqrt((xi^2 + 6) / 3) apart
    const double mugap = 2 * std::sqrt((50.0 * 50 + 6) / 3);
    EXPECT_NEAR(w.H, 1 + 2 / std::sqrt(mugap), 1e-12);
}

TEST(Energy, ConstantModeHasConstantEnergyOverWeight) {
    const Operator& op = battery_member("strict_const").op;
    const ModeSolution s = solve_mode(op, {32.0}, {1.0, 0.0, 0.0}, 256);
    const EnergyTrace e = energy_trace(op, s, 1.0);
    for (std::size_t i = 0; i < e.t.size(); ++i) {
        EXPECT_NEAR(e.log_Ehat[i], e.log_Ehat[0], 1e-10);
        EXPECT_NEAR(e.log_E[i], e.log_Ehat[0] - std::log(32.0) * e.t[i], 1e-9);
    }
}

TEST(Energy, ZeroSolutionHasZeroEnergy) {
    const Operator& op = battery_member("triple_pure").op;
    const ModeSolution s = solve_mode(op, {16.0}, {0.0, 0.0, 0.0}, 128);
    const EnergyTrace e = energy_trace(op, s, 1.0);
    for (std::size_t i = 0; i < e.t.size(); ++i) EXPECT_EQ(e.E(i), 0.0);
}

TEST(Energy, CalibratedEta) {
    EXPECT_EQ(calibrate_eta(-3), 1);
    EXPECT_EQ(calibrate_eta(1), 1);
    EXPECT_EQ(calibrate_eta(1.5), 2);
    EXPECT_EQ(calibrate_eta(9), 16);
    EXPECT_EQ(calibrate_eta(1e9), 1024);
}

TEST(Energy, LadderDecreasesForStrictlyHyperbolic) {
    const auto L = energy_ladder(battery_member("strict_const").op, geometric_ladder(64, 1024, 5), {1.0},
                                 random_init(5), 1024);
    EXPECT_TRUE(L.stable);
    for (auto& r : L.rows) EXPECT_LE(r.max_dlogE, 1e-9);
}

TEST(Growth, SyntheticPolynomial) {
    std::vector<GrowthRow> rows;
    for (double xi : default_ladder()) rows.push_back({xi, 2 * std::log(xi) + 1});
    const GrowthFit f = fit_growth(rows);
    EXPECT_EQ(f.verdict, GrowthModel::polynomial);
    EXPECT_NEAR(f.poly_d, 2, 1e-9);
    EXPECT_EQ(f.kappa, 0);
}

TEST(Growth, SyntheticExponentialPower) {
    std::vector<GrowthRow> rows;
    for (double xi : default_ladder()) rows.push_back({xi, 0.5 * std::pow(xi, 0.4) + std::log(xi)});
    const GrowthFit f = fit_growth(rows);
    EXPECT_EQ(f.verdict, GrowthModel::exp_power);
    EXPECT_NEAR(f.kappa, 0.4, 2e-3);
    EXPECT_NEAR(f.exp_C, 0.5, 1e-2);
}

TEST(Growth, PlaneWavesArePolynomial) {
    const GrowthFit f = growth_experiment(battery_member("strict_const").op, default_ladder(), {1.0}, 1024);
    EXPECT_EQ(f.verdict, GrowthModel::polynomial);
    EXPECT_LT(f.poly_d, 0.05);
}
