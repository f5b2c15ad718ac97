#include <gtest/gtest.h>

#include <cmath>

#include "natlift/errors.hpp"
#include "natlift/family_spec.hpp"

using natlift::FamilySpec;

TEST(FamilySpec, PolynomialEvaluation) {
    const FamilySpec p = FamilySpec::parse("(poly 1 -2 0.5)");
    const auto j = p.eval(2.0);
    EXPECT_DOUBLE_EQ(j.v0, 1.0 - 4.0 + 2.0);
    EXPECT_DOUBLE_EQ(j.v1, -2.0 + 2.0);
    EXPECT_DOUBLE_EQ(j.v2, 1.0);
    EXPECT_DOUBLE_EQ(j.v3, 0.0);
}

TEST(FamilySpec, RoundTripThroughText) {
    const char* specs[] = {"1", "t", "(+ 1 (* 0.3 t))", "(/ 1 (+ 1 (* 2 t)))", "(sqrt (+ 1 (* t t)))",
                           "(pow (+ 2 t) 1.5)", "(poly 1 -2 0.5)", "(- t)", "(- 1 t)"};
    for (const char* text : specs) {
        const FamilySpec a = FamilySpec::parse(text);
        const FamilySpec b = FamilySpec::parse(a.to_string());
        EXPECT_EQ(a, b) << text;
        for (double t : {0.0, 0.3, 1.7}) EXPECT_EQ(a.eval(t).v0, b.eval(t).v0) << text;
    }
}

TEST(FamilySpec, OperatorsBuildExpressions) {
    const FamilySpec t = FamilySpec::variable();
    const FamilySpec s = (FamilySpec::constant(1.0) + t * t) / (FamilySpec::constant(1.0) + t);
    const auto j = s.eval(1.0);
    EXPECT_DOUBLE_EQ(j.v0, 1.0);
    EXPECT_DOUBLE_EQ(j.v1, 0.5);
}

TEST(FamilySpec, ParseErrorsAreConfigErrors) {
    const char* bad[] = {"", "(", "(+ 1)", "(foo 1 2)", "(/ 1)", "(pow t)", "1 2", "(poly)", "abc", "(+ 1 2"};
    for (const char* text : bad) EXPECT_THROW(FamilySpec::parse(text), natlift::ConfigError) << text;
}

TEST(FamilySpec, DivisionByZeroNamesSubexpression) {
    const FamilySpec s = FamilySpec::parse("(+ 1 (/ 1 (- t 0.5)))");
    try {
        s.eval(0.5);
        FAIL() << "expected an evaluation error";
    } catch (const natlift::EvaluationError& e) {
        EXPECT_NE(e.expression().find("(/ 1"), std::string::npos) << e.expression();
    }
}

TEST(FamilySpec, NegativeRadicandNamesSubexpression) {
    const FamilySpec s = FamilySpec::parse("(sqrt (- 1 t))");
    EXPECT_NO_THROW(s.eval(0.5));
    try {
        s.eval(2.0);
        FAIL() << "expected an evaluation error";
    } catch (const natlift::EvaluationError& e) {
        EXPECT_NE(e.expression().find("sqrt"), std::string::npos) << e.expression();
    }
}

TEST(FamilySpec, IsConstantDetectsConstants) {
    EXPECT_TRUE(FamilySpec::parse("2.5").is_constant());
    EXPECT_FALSE(FamilySpec::parse("(+ 1 t)").is_constant());
}
