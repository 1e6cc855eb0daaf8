#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "wsvie/experiment.hpp"
#include "wsvie/problem_file.hpp"

using namespace wsvie;
using expr::bit;
using expr::Var;

namespace {
double eval_x(const std::string& text, double x) {
    return expr::parse(text, bit(Var::x))({0.0, 0.0, x, 0.0});
}
}  // namespace

TEST(Expression, Arithmetic) {
    EXPECT_DOUBLE_EQ(eval_x("x*(1-x^2)", 0.5), 0.375);
    EXPECT_DOUBLE_EQ(eval_x("-x^2", 3.0), -9.0);
    EXPECT_DOUBLE_EQ(eval_x("2^3^2", 0.0), 512.0);
    EXPECT_DOUBLE_EQ(eval_x("1 - 2 - 3", 0.0), -4.0);
    EXPECT_DOUBLE_EQ(eval_x("8 / 4 / 2", 0.0), 1.0);
    EXPECT_DOUBLE_EQ(eval_x("2 + 3 * 4", 0.0), 14.0);
    EXPECT_DOUBLE_EQ(eval_x("(2 + 3) * 4", 0.0), 20.0);
    EXPECT_DOUBLE_EQ(eval_x("2^-1", 0.0), 0.5);
    EXPECT_DOUBLE_EQ(eval_x("1.5e2 + .5", 0.0), 150.5);
    EXPECT_DOUBLE_EQ(eval_x("+x", 4.0), 4.0);
}

TEST(Expression, Functions) {
    const double x = 0.3;
    EXPECT_DOUBLE_EQ(eval_x("sin(x)", x), std::sin(x));
    EXPECT_DOUBLE_EQ(eval_x("cos(x)", x), std::cos(x));
    EXPECT_DOUBLE_EQ(eval_x("exp(x)", x), std::exp(x));
    EXPECT_DOUBLE_EQ(eval_x("tanh(x)", x), std::tanh(x));
    EXPECT_DOUBLE_EQ(eval_x("sech(x)", x), 1.0 / std::cosh(x));
    EXPECT_DOUBLE_EQ(eval_x("sinh(x)", x), std::sinh(x));
    EXPECT_DOUBLE_EQ(eval_x("asinh(x)", x), std::asinh(x));
    EXPECT_DOUBLE_EQ(eval_x("atanh(x)", x), std::atanh(x));
    EXPECT_DOUBLE_EQ(eval_x("sqrt(x)", x), std::sqrt(x));
}

TEST(Expression, ConstantFolding) {
    EXPECT_DOUBLE_EQ(*expr::parse("-(1/30)^2/2", 0u).constant(), -std::pow(1.0 / 30, 2) / 2);
    EXPECT_FALSE(expr::parse("s*t", bit(Var::s) | bit(Var::t)).constant().has_value());
}

TEST(Expression, Errors) {
    try {
        expr::parse("foo(x)", bit(Var::x));
        FAIL();
    } catch (const expr::ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown function 'foo'"), std::string::npos);
        EXPECT_EQ(e.column(), 1u);
    }
    EXPECT_THROW(expr::parse("x + t", bit(Var::x)), expr::ParseError);
    EXPECT_THROW(expr::parse("(x + 1", bit(Var::x)), expr::ParseError);
    EXPECT_THROW(expr::parse("x +", bit(Var::x)), expr::ParseError);
    EXPECT_THROW(expr::parse("", bit(Var::x)), expr::ParseError);
    EXPECT_THROW(expr::parse("2x", bit(Var::x)), expr::ParseError);
    EXPECT_THROW(expr::parse("sin x", bit(Var::x)), expr::ParseError);
    try {
        expr::parse("1 + $", 0u, 7, 4);
        FAIL();
    } catch (const expr::ParseError& e) {
        EXPECT_EQ(e.line(), 7u);
        EXPECT_EQ(e.column(), 9u);
    }
}

TEST(ProblemFile, ParsesAndReportsPositions) {
    const std::string text =
        "# comment line\n"
        "x0 = 0.5\n"
        "k1 = s + t   # trailing comment\n"
        "k2 = 2\n"
        "beta = x^2\n"
        "sigma = 1\n";
    const auto p = parse_problem(text, "demo");
    EXPECT_EQ(p.label, "demo");
    EXPECT_EQ(p.x0, 0.5);
    EXPECT_FALSE(p.k1.constant.has_value());
    EXPECT_DOUBLE_EQ(p.k1(0.25, 0.5), 0.75);
    EXPECT_EQ(*p.k2.constant, 2.0);
    EXPECT_DOUBLE_EQ(p.beta(3.0), 9.0);
    EXPECT_FALSE(p.exact.has_value());

    try {
        parse_problem("x0 = 1\nk1 = 1\nk2 = 1\nbeta = foo(x)\nsigma = 1\n");
        FAIL();
    } catch (const expr::ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_EQ(e.column(), 8u);
    }
    EXPECT_THROW(parse_problem("x0 = 1\nk1 = 1\nk2 = 1\nbeta = x\n"), std::invalid_argument);
    EXPECT_THROW(parse_problem("x0 = 1\nx0 = 2\n"), expr::ParseError);
    EXPECT_THROW(parse_problem("gamma = 1\n"), expr::ParseError);
    EXPECT_THROW(parse_problem("x0 1\n"), expr::ParseError);
    EXPECT_THROW(parse_problem("x0 = x\nk1 = 1\nk2 = 1\nbeta = x\nsigma = 1\n"),
                 expr::ParseError);
}

TEST(ProblemFile, HandWrittenExampleTwoMatchesBuiltin) {
    const std::string text =
        "label = ex2\n"
        "x0 = 1/10\n"
        "k1 = -(1/30)^2\n"
        "k2 = 1/30\n"
        "beta = x*(1-x^2)\n"
        "sigma = 1-x^2\n"
        "exact = tanh(B/30 + atanh(1/10))\n";
    const auto file = parse_problem(text);
    const auto builtin = builtin_example(2);
    EXPECT_DOUBLE_EQ(file.x0, builtin.x0);
    for (int i = 0; i <= 10; ++i) {
        const double s = i / 10.0 * 0.99, x = -1.0 + 0.2 * i, b = -2.0 + 0.4 * i;
        EXPECT_NEAR(file.k1(s, 1 - s), builtin.k1(s, 1 - s), 1e-18);
        EXPECT_NEAR(file.k2(s, 1 - s), builtin.k2(s, 1 - s), 1e-17);
        EXPECT_NEAR(file.beta(x), builtin.beta(x), 1e-15);
        EXPECT_NEAR(file.sigma(x), builtin.sigma(x), 1e-15);
        EXPECT_NEAR((*file.exact)(s, b), (*builtin.exact)(s, b), 1e-15);
    }
}

TEST(ProblemFile, BuiltinRoundTripGivesIdenticalSolves) {
    for (int id : {1, 2}) {
        const auto builtin = builtin_example(id);
        const auto reparsed = parse_problem(encode_builtin(id));
        EXPECT_EQ(reparsed.label, builtin.label);
        EXPECT_EQ(reparsed.x0, builtin.x0);
        const auto cfg = BasisConfig(5);
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            const auto path = sample_path(cfg, seed);
            const auto a = solve(builtin, path, cfg);
            const auto b = solve(reparsed, path, cfg);
            EXPECT_EQ(a.x_colloc, b.x_colloc) << "example " << id << " seed " << seed;
            for (double t : default_report_times())
                EXPECT_EQ(error_at(a, builtin, path, t), error_at(b, reparsed, path, t));
        }
    }
}

TEST(ProblemFile, ReadsFromDisk) {
    const auto dir = std::filesystem::temp_directory_path() / "wsvie_problem_file_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "ex1.txt";
    {
        std::ofstream out(path);
        out << encode_builtin(1);
    }
    const auto p = parse_problem_file(path);
    EXPECT_EQ(p.label, "ex1");
    EXPECT_THROW(parse_problem_file(dir / "missing.txt"), std::runtime_error);
    std::filesystem::remove_all(dir);
}
