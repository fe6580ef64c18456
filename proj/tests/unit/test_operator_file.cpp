#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <levi3/battery.hpp>
#include <levi3/operator_file.hpp>

using namespace levi3;

namespace {

std::string message_of(const std::string& text) {
    try {
        parse_operator_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kHeader = "[operator]\nname = x\norder = 3\ndimension = 1\nT = 1\n";

}  // namespace

TEST(OperatorFile, ParsesHeaderCoefficientsAndExpectations) {
    const OperatorSpec s = parse_operator_text(R"op(# comment
[operator]
version = 1
name = demo
order = 3
dimension = 2
T = 2.5

[coefficients]
a[1, (2, 0)] = "-1 - t^2"
a[0, (0, 1)] = "sin(t)"
[expect]
growth = polynomial
)op");
    EXPECT_EQ(s.op.name, "demo");
    EXPECT_EQ(s.op.order, 3);
    EXPECT_EQ(s.op.dimension, 2);
    EXPECT_EQ(s.op.horizon, 2.5);
    ASSERT_EQ(s.op.coeffs.size(), 2u);
    EXPECT_EQ(s.op.coeffs.at({1, {2, 0}}).eval(1.0).real(), -2.0);
    EXPECT_EQ(s.expect.at("growth"), "polynomial");
}

TEST(OperatorFile, RoundTripsEveryBatteryMember) {
    for (const OperatorSpec& s : battery()) {
        const std::string text = format_operator(s);
        const OperatorSpec back = parse_operator_text(text);
        EXPECT_EQ(back.op.name, s.op.name);
        EXPECT_EQ(back.op.order, s.op.order);
        EXPECT_EQ(back.op.horizon, s.op.horizon);
        EXPECT_EQ(back.expect, s.expect);
        ASSERT_EQ(back.op.coeffs.size(), s.op.coeffs.size());
        for (auto& [k, f] : s.op.coeffs) EXPECT_TRUE(back.op.coeffs.at(k) == f) << s.op.name;
        EXPECT_EQ(format_operator(back), text);
    }
}

TEST(OperatorFile, GrammarErrorsCarryLineAndColumn) {
    const std::string text = std::string(kHeader) + "[coefficients]\na[0, (1)] = \"t +\"\n";
    const std::string msg = message_of(text);
    // the expression starts at column 14; the parser stops 3 characters in
    EXPECT_NE(msg.find("line 7, column 17"), std::string::npos) << msg;
}

TEST(OperatorFile, StructuralErrors) {
    EXPECT_NE(message_of(std::string(kHeader) + "[nope]\n").find("line 6"), std::string::npos);
    EXPECT_NE(message_of(std::string(kHeader) + "[coefficients]\nb[0, (1)] = \"1\"\n").find("line 7"), std::string::npos);
    EXPECT_NE(message_of(std::string(kHeader) + "[coefficients]\na[0, (1)] = 1\n").find("double-quoted"), std::string::npos);
    EXPECT_NE(message_of(std::string(kHeader) + "[coefficients]\na[0, (3)] = \"i\"\n").find("must be real"), std::string::npos);
    EXPECT_NE(message_of(std::string(kHeader) + "[coefficients]\na[0, (1, 1)] = \"1\"\n").find("dimension"), std::string::npos);
    EXPECT_NE(message_of("[operator]\nname = x\norder = 3\nT = 1\n").find("dimension"), std::string::npos);
    EXPECT_NE(message_of(std::string(kHeader) + "colour = red\n").find("unknown header key"), std::string::npos);
    EXPECT_NE(message_of(std::string("[operator]\nversion = 2\n") + (kHeader + 11)).find("version"), std::string::npos);
    EXPECT_NE(message_of("name = x\n").find("outside"), std::string::npos);
    EXPECT_NE(message_of(std::string(kHeader) + "name = y\n").find("duplicate"), std::string::npos);
}

TEST(OperatorFile, LoadsFromDisk) {
    const auto path = std::filesystem::temp_directory_path() / "levi3_operator_file_test.op";
    {
        std::ofstream f(path);
        f << format_operator(battery_member("sin_gap"));
    }
    const OperatorSpec s = load_operator_file(path.string());
    EXPECT_EQ(s.op.name, "sin_gap");
    std::filesystem::remove(path);
    EXPECT_THROW(load_operator_file(path.string()), ConfigError);
}

TEST(Battery, MembersAreUniqueAndHyperbolic) {
    std::set<std::string> names;
    for (const OperatorSpec& s : battery()) {
        EXPECT_TRUE(names.insert(s.op.name).second) << s.op.name;
        EXPECT_FALSE(s.expect.empty()) << s.op.name;
        EXPECT_NO_THROW(validate_hyperbolicity(s.op, {{1.0}, {-1.0}}, {1.0, 64.0, 4096.0}, 64)) << s.op.name;
    }
    EXPECT_THROW(battery_member("missing"), ConfigError);
}
