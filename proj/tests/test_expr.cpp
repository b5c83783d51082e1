#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "hypersurf/errors.hpp"
#include "hypersurf/expr.hpp"
#include "support.hpp"

using namespace hypersurf;

namespace {

const char* const kG31 = "5 + x^3 + y^2 + sin(2*pi*x)*sin(2*pi*y)";

std::size_t parse_error_offset(const std::string& src, int dim) {
    try {
        Expression::parse(src, dim);
    } catch (const ParseError& e) {
        return e.offset();
    }
    FAIL("expected a parse error for '" << src << "'");
    return 0;
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("example seed function") {
    const Expression g = Expression::parse(kG31, 2);
    CHECK(g.evaluate(0, 0) == 5.0);
    // 5 + 1/8 + 1/4 + sin(pi)^2, with sin(pi) ~ 1.2e-16 contributing nothing visible.
    CHECK(std::abs(g.evaluate(0.5, 0.5) - 5.375) <= 1e-15);
    const double x = 0.3, y = 0.6;
    const double direct = 5 + x * x * x + y * y + std::sin(2 * std::numbers::pi * x) * std::sin(2 * std::numbers::pi * y);
    CHECK(std::abs(g.evaluate(x, y) - direct) <= 1e-14);
}

TEST_CASE("precedence and associativity") {
    CHECK(Expression::parse("x^2^3", 1).evaluate(2) == 256.0);
    CHECK(Expression::parse("x*y", 2).evaluate(2, 3) == 6.0);
    CHECK(Expression::parse("-x^2", 1).evaluate(3) == -9.0);
    CHECK(Expression::parse("2^-1", 1).evaluate(0) == 0.5);
    CHECK(Expression::parse("1 - 2 - 3", 1).evaluate(0) == -4.0);
    CHECK(Expression::parse("8 / 4 / 2", 1).evaluate(0) == 1.0);
    CHECK(Expression::parse("1 + 2 * 3", 1).evaluate(0) == 7.0);
    CHECK(Expression::parse("(1 + 2) * 3", 1).evaluate(0) == 9.0);
    CHECK(Expression::parse("  abs( -x )\t", 1).evaluate(4) == 4.0);
    CHECK(Expression::parse("sqrt(x) + exp(0) + cos(0)", 1).evaluate(9) == 5.0);
    CHECK(Expression::parse("1.5e1", 1).evaluate(0) == 15.0);
    CHECK(Expression::parse(".5", 1).evaluate(0) == 0.5);
}

TEST_CASE("syntax errors carry offsets") {
    CHECK(parse_error_offset("sin(", 2) == 4);
    CHECK(parse_error_offset("1 +", 1) == 3);
    CHECK(parse_error_offset("(x", 1) == 2);
    CHECK(parse_error_offset("x $ 1", 1) == 2);
    CHECK(parse_error_offset("2 x", 1) == 2);
}

TEST_CASE("semantic parse errors") {
    CHECK_THROWS_WITH_AS(Expression::parse("foo(x)", 1), doctest::Contains("unknown identifier 'foo'"), ParseError);
    CHECK_THROWS_WITH_AS(Expression::parse("x + y", 1), doctest::Contains("'y'"), ParseError);
    CHECK_THROWS_WITH_AS(Expression::parse("sin(x, y)", 2), doctest::Contains("exactly one argument"), ParseError);
    CHECK_THROWS_AS(Expression::parse("x", 3), InvalidArgument);
    CHECK_NOTHROW(Expression::parse("x + y", 2));
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(Expression::parse("1 / x", 1).evaluate(0), EvaluationError);
    CHECK_THROWS_AS(Expression::parse("sqrt(x)", 1).evaluate(-1), EvaluationError);
    CHECK(std::isinf(Expression::parse("exp(x)", 1).evaluate(1000)));
    CHECK(std::isnan(Expression::parse("x^0.5", 1).evaluate(-1)));
}

TEST_CASE("print round trip over a corpus") {
    const std::vector<std::string> corpus = {
        kG31,
        "5 + x^3 + y^2",
        "x",
        "-x",
        "--x + y",
        "x^2^0.5",
        "(x + y)^2",
        "-x^2",
        "2^-x",
        "1 - (2 - x) - y",
        "x / (1 + y*y)",
        "sin(cos(exp(x - y)))",
        "abs(x - 0.5) * abs(y - 0.25)",
        "sqrt(1 + x*x + y*y)",
        "pi * x * y",
        "0.1 + 0.2 * x",
        "3e-5 * x - 1.25e3 * y",
        "exp(-x) * cos(2*pi*y)",
        "x*x*x - 3*x*y*y",
        "1 / (2 + sin(x)) - y / 3",
    };
    REQUIRE(corpus.size() == 20);
    CounterRng rng(99);
    for (const auto& src : corpus) {
        const Expression e = Expression::parse(src, 2);
        const Expression back = Expression::parse(e.print(), 2);
        CHECK_MESSAGE(back.structurally_equal(e), src);
        for (int t = 0; t < 100; ++t) {
            const double x = testsupport::uniform(rng, -1, 1);
            const double y = testsupport::uniform(rng, -1, 1);
            const double a = e.evaluate(x, y);
            const double b = back.evaluate(x, y);
            if (std::isnan(a)) CHECK(std::isnan(b));
            else CHECK(std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("structural equality") {
    CHECK(Expression::parse("x + 1", 1).structurally_equal(Expression::parse("x+1", 1)));
    CHECK_FALSE(Expression::parse("x + 1", 1).structurally_equal(Expression::parse("1 + x", 1)));
    CHECK_FALSE(Expression::parse("x", 1).structurally_equal(Expression::parse("x", 2)));
}

}  // TEST_SUITE
