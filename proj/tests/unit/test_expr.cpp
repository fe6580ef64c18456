#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <levi3/expr.hpp>
#include <levi3/identities.hpp>

using namespace levi3;

TEST(Parse, PolynomialTree) {
    const TimeFn f = TimeFn::parse("t^2 - 1");
    const auto& r = f.root();
    ASSERT_EQ(r->op, Op::Sub);
    EXPECT_EQ(r->a->op, Op::Pow);
    EXPECT_EQ(r->a->exponent, 2);
    EXPECT_EQ(r->a->a->op, Op::Var);
    EXPECT_EQ(r->b->op, Op::Num);
    EXPECT_EQ(r->b->value, 1.0);
}

int count_op(const NodePtr& n, Op op) {
    if (!n) return 0;
    return (n->op == op) + count_op(n->a, op) + count_op(n->b, op);
}

TEST(Parse, ImaginaryUnitLeaf) {
    const TimeFn f = TimeFn::parse("3*sin(t) + i*t");
    EXPECT_EQ(count_op(f.root(), Op::Imag), 1);
    EXPECT_TRUE(f.has_imag());
}

TEST(Parse, IncompleteInputReportsOffset) {
    try {
        TimeFn::parse("t +");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 3u);
        EXPECT_FALSE(e.expected().empty());
    }
}

TEST(Parse, Rejections) {
    EXPECT_THROW(TimeFn::parse("x + 1"), UnknownIdentifier);
    EXPECT_THROW(TimeFn::parse("tan(t)"), UnknownIdentifier);
    EXPECT_THROW(TimeFn::parse("t^1.5"), ParseError);
    EXPECT_THROW(TimeFn::parse("(t"), ParseError);
    EXPECT_THROW(TimeFn::parse(""), ParseError);
    EXPECT_THROW(TimeFn::parse("1e999"), ParseError);
    EXPECT_THROW(TimeFn::parse("t t"), ParseError);
}

TEST(Parse, WhitespaceAndPrecedence) {
    EXPECT_EQ(TimeFn::parse(" 1+2 * 3 ").eval(0).real(), 7.0);
    EXPECT_EQ(TimeFn::parse("2*t^2").eval(3).real(), 18.0);
    EXPECT_EQ(TimeFn::parse("1 - 2 - 3").eval(0).real(), -4.0);
    EXPECT_EQ(TimeFn::parse("8 / 4 / 2").eval(0).real(), 1.0);
    EXPECT_EQ(TimeFn::parse("-t^2").eval(3).real(), -9.0);
    EXPECT_EQ(TimeFn::parse("2.5e-1").eval(0).real(), 0.25);
}

TEST(Eval, PolynomialJet) {
    const Jet2 j = TimeFn::parse("t^2 - 1").eval_jet2(2);
    EXPECT_EQ(j.v, cplx(3));
    EXPECT_EQ(j.d1, cplx(4));
    EXPECT_EQ(j.d2, cplx(2));
}

TEST(Eval, SineAtZero) {
    const Jet2 j = TimeFn::parse("sin(t)").eval_jet2(0);
    EXPECT_EQ(j.v, cplx(0));
    EXPECT_EQ(j.d1, cplx(1));
    EXPECT_EQ(j.d2, cplx(0));
}

TEST(Eval, ExponentialChainRuleAgainstFiniteDifferences) {
    const TimeFn f = TimeFn::parse("exp(2*t)");
    const double t = 0.5, h = 1e-5, e = std::exp(1.0);
    const Jet2 j = f.eval_jet2(t);
    EXPECT_NEAR(j.v.real(), e, 1e-14 * e);
    EXPECT_NEAR(j.d1.real(), 2 * e, 1e-14 * e);
    EXPECT_NEAR(j.d2.real(), 4 * e, 1e-14 * e);
    const double fd1 = (f.eval(t + h).real() - f.eval(t - h).real()) / (2 * h);
    EXPECT_LT(std::abs(fd1 - j.d1.real()) / (2 * e), 1e-8);
}

TEST(Eval, DomainErrors) {
    EXPECT_THROW(TimeFn::parse("1/t").eval(0), DomainError);
    EXPECT_THROW(TimeFn::parse("log(t - 1)").eval(0.5), DomainError);
    EXPECT_NO_THROW(TimeFn::parse("log(t)").eval(0.5));
}

TEST(Eval, RealExpressionsHaveZeroImaginaryParts) {
    const Jet2 j = TimeFn::parse("cos(t)^3 / (1 + t^2) - exp(-t) * log(2 + t)").eval_jet2(0.7);
    EXPECT_EQ(j.v.imag(), 0.0);
    EXPECT_EQ(j.d1.imag(), 0.0);
    EXPECT_EQ(j.d2.imag(), 0.0);
}

TEST(Eval, LeibnizRuleOnProducts) {
    const TimeFn f = TimeFn::parse("sin(t)"), g = TimeFn::parse("exp(t) + t^3");
    const TimeFn fg = TimeFn::parse("sin(t) * (exp(t) + t^3)");
    for (double t : {-1.0, 0.0, 0.4, 2.0}) {
        const Jet2 a = f.eval_jet2(t), b = g.eval_jet2(t), p = fg.eval_jet2(t);
        EXPECT_NEAR(std::abs(p.v - a.v * b.v), 0, 1e-14 * (1 + std::abs(p.v)));
        EXPECT_NEAR(std::abs(p.d1 - (a.d1 * b.v + a.v * b.d1)), 0, 1e-13 * (1 + std::abs(p.d1)));
        EXPECT_NEAR(std::abs(p.d2 - (a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2)), 0, 1e-13 * (1 + std::abs(p.d2)));
    }
}

TEST(Eval, Flags) {
    EXPECT_TRUE(TimeFn::parse("1/(1+t)").uses_division());
    EXPECT_TRUE(TimeFn::parse("log(2)").uses_log());
    EXPECT_FALSE(TimeFn::parse("log(2)").depends_on_t());
    EXPECT_TRUE(TimeFn::parse("0").is_zero());
    EXPECT_FALSE(TimeFn::parse("0*t").is_zero());
}

// ---------------------------------------------------------------------------
// random trees

NodePtr random_tree(std::mt19937_64& g, int depth, bool small = false) {
    const int pick = static_cast<int>(uniform01(g) * (depth <= 0 ? 3 : 12));
    switch (pick) {
        case 0:
            if (small) return build::num(std::round(uniform(g, -2, 2) * 100) / 100);
            return build::num(std::round(uniform(g, -50, 50) * 1000) / 1000 * std::pow(10.0, int(uniform(g, -3, 3))));
        case 1: return build::var();
        case 2: return build::imag();
        case 3: return build::bin(Op::Add, random_tree(g, depth - 1, small), random_tree(g, depth - 1, small));
        case 4: return build::bin(Op::Sub, random_tree(g, depth - 1, small), random_tree(g, depth - 1, small));
        case 5: return build::bin(Op::Mul, random_tree(g, depth - 1, small), random_tree(g, depth - 1, small));
        case 6: return build::bin(Op::Div, random_tree(g, depth - 1, small), random_tree(g, depth - 1, small));
        case 7: return build::pow(random_tree(g, depth - 1, small), static_cast<int>(uniform(g, 0, small ? 3 : 6)));
        case 8: return build::un(Op::Neg, random_tree(g, depth - 1, small));
        case 9: return build::un(Op::Sin, random_tree(g, depth - 1, small));
        case 10: return build::un(Op::Cos, random_tree(g, depth - 1, small));
        default: return build::un(uniform01(g) < 0.5 ? Op::Exp : Op::Log, random_tree(g, depth - 1, small));
    }
}

TEST(RoundTrip, ThousandRandomTrees) {
    std::mt19937_64 g(7);
    for (int n = 0; n < 1000; ++n) {
        const TimeFn f(random_tree(g, 5));
        const std::string text = f.print();
        const TimeFn back = TimeFn::parse(text);
        ASSERT_TRUE(back == f) << text << " reparsed as " << back.print();
        ASSERT_EQ(back.print(), text);
    }
}

TEST(RoundTrip, JetsMatchFiniteDifferences) {
    // smooth random trees without division or log, so no domain errors
    std::mt19937_64 g(11);
    int checked = 0;
    for (int n = 0; checked < 200 && n < 5000; ++n) {
        const TimeFn f(random_tree(g, 3, true));
        if (f.uses_division() || f.uses_log()) continue;
        const double t = uniform(g, -1, 1);
        Jet2 j;
        try {
            j = f.eval_jet2(t);
        } catch (const DomainError&) {
            continue;
        }
        if (!(std::isfinite(std::abs(j.v)) && std::isfinite(std::abs(j.d2))) || std::abs(j.v) > 1e6) continue;
        const double h1 = 1e-5, h2 = 1e-4;
        const cplx fd1 = (f.eval(t + h1) - f.eval(t - h1)) / (2 * h1);
        const cplx fd2 = (f.eval(t + h2) - 2.0 * f.eval(t) + f.eval(t - h2)) / (h2 * h2);
        const double s1 = 1 + std::abs(j.v) + std::abs(j.d1) + std::abs(j.d2);
        EXPECT_LT(std::abs(fd1 - j.d1) / s1, 1e-6) << f.print() << " at t=" << t;
        EXPECT_LT(std::abs(fd2 - j.d2) / s1, 1e-4) << f.print() << " at t=" << t;
        ++checked;
    }
    EXPECT_GE(checked, 200);
}

TEST(RoundTrip, EvaluationIsDeterministic) {
    const TimeFn f = TimeFn::parse("exp(sin(t)^2) * cos(3*t) - t^7 / 9");
    const Jet2 a = f.eval_jet2(0.321), b = f.eval_jet2(0.321);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.d1, b.d1);
    EXPECT_EQ(a.d2, b.d2);
}
