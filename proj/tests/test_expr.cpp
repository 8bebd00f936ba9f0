#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include <nnreach/exceptions.hpp>
#include <nnreach/expr.hpp>

#include "test_util.hpp"

using namespace nnreach;
using nnreach::test::Rng;

namespace
{

const std::vector<std::string> unicycle{"x", "y", "theta", "v", "u1", "u2", "w"};

ExprPtr random_tree(Rng &rng, int depth)
{
    const int pick = depth <= 0 ? rng.integer(0, 1) : rng.integer(0, 10);
    switch (pick) {
    case 0: {
        const double choices[] = {0., 1., 2., 0.5, 1e-7, 3.25e20, 123456.789, 0.1};
        return rng.coin() ? expr_constant(choices[rng.integer(0, 7)]) : expr_constant(rng.uniform(0, 100));
    }
    case 1:
        return expr_variable(static_cast<std::size_t>(rng.integer(0, 6)));
    case 2:
        return expr_unary(ExprOp::neg, random_tree(rng, depth - 1));
    case 3:
        return expr_binary(ExprOp::add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4:
        return expr_binary(ExprOp::sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5:
        return expr_binary(ExprOp::mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 6:
        return expr_binary(ExprOp::div, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 7:
        return expr_pow(random_tree(rng, depth - 1), rng.integer(-3, 5));
    case 8:
        return expr_unary(ExprOp::sin, random_tree(rng, depth - 1));
    case 9:
        return expr_unary(ExprOp::cos, random_tree(rng, depth - 1));
    default:
        return expr_unary(ExprOp::exp, random_tree(rng, depth - 1));
    }
}

std::size_t parse_error_column(const std::string &src)
{
    try {
        (void)parse_expr(src, unicycle);
    } catch (const parse_error &e) {
        return e.column();
    }
    return 0;
}

} // namespace

TEST_CASE("parse_expr trees")
{
    const auto a = parse_expr("v*cos(theta)", unicycle);
    REQUIRE(a->op == ExprOp::mul);
    CHECK(a->lhs->op == ExprOp::variable);
    CHECK(a->lhs->var == 3);
    REQUIRE(a->rhs->op == ExprOp::cos);
    CHECK(a->rhs->lhs->var == 2);

    const auto z = parse_expr("0", unicycle);
    CHECK(z->op == ExprOp::constant);
    CHECK(is_zero_constant(*z));

    const auto s = parse_expr("u1 + w", unicycle);
    CHECK(s->op == ExprOp::add);
    CHECK(s->lhs->var == 4);
    CHECK(s->rhs->var == 6);
}

TEST_CASE("parse_expr precedence and associativity")
{
    const auto names = std::vector<std::string>{"a", "b", "c"};
    const auto same = [&](const char *x, const char *y) {
        return structurally_equal(*parse_expr(x, names), *parse_expr(y, names));
    };
    CHECK(same("a - b - c", "(a - b) - c"));
    CHECK_FALSE(same("a - b - c", "a - (b - c)"));
    CHECK(same("a / b * c", "(a / b) * c"));
    CHECK(same("a + b * c", "a + (b * c)"));
    CHECK(same("a * b ^ 2", "a * (b ^ 2)"));
    // Unary minus binds tighter than '^'.
    CHECK(same("-a^2", "(-a)^2"));
    CHECK(same("- - a", "-(-a)"));

    const auto p = parse_expr("a^-2", names);
    CHECK(p->op == ExprOp::pow);
    CHECK(p->exponent == -2);
    CHECK(parse_expr("2.5e-3", names)->value == 2.5e-3);
    CHECK(parse_expr(".5", names)->value == 0.5);
    CHECK(parse_expr("  sin ( a )  ", names)->op == ExprOp::sin);
}

TEST_CASE("parse_expr diagnostics")
{
    CHECK(parse_error_column("foo + 1") == 1);
    CHECK(parse_error_column("x + bar") == 5);
    CHECK(parse_error_column("x^2.5") == 3);
    CHECK(parse_error_column("x^y") == 3);
    CHECK(parse_error_column("tan(x)") == 1);
    CHECK(parse_error_column("(x") == 3);
    CHECK(parse_error_column("") == 1);
    CHECK(parse_error_column("x y") == 3);
    CHECK(parse_error_column("1e999") == 1);
    CHECK(parse_error_column("1e") == 3);
    CHECK(parse_error_column("x^2^2") == 4);
    CHECK(parse_error_column("sin x") == 1);
    CHECK_THROWS_WITH_AS(parse_expr("x + q", unicycle), doctest::Contains("unknown identifier 'q'"), parse_error);
    CHECK_THROWS_WITH_AS(parse_expr("x^0.5", unicycle), doctest::Contains("integer"), parse_error);

    std::string deep(100000, '(');
    CHECK_THROWS_AS(parse_expr(deep, unicycle), parse_error);
    std::string minus(100000, '-');
    CHECK_THROWS_AS(parse_expr(minus + "x", unicycle), parse_error);
}

TEST_CASE("parser totality on random text")
{
    Rng rng(61);
    const std::string alphabet = "xyvthea0123456789.+-*/^() \tsincoepw_Eq,;#";
    for (int n = 0; n < 20000; ++n) {
        std::string s;
        const int len = rng.integer(0, 30);
        for (int i = 0; i < len; ++i) {
            s += alphabet[static_cast<std::size_t>(rng.integer(0, static_cast<int>(alphabet.size()) - 1))];
        }
        try {
            (void)parse_expr(s, unicycle);
        } catch (const parse_error &) {
        }
    }
}

TEST_CASE("print / parse round trip")
{
    Rng rng(62);
    for (int n = 0; n < 1000; ++n) {
        const auto t = random_tree(rng, rng.integer(0, 6));
        const auto text = to_string(*t, unicycle);
        const auto back = parse_expr(text, unicycle);
        REQUIRE_MESSAGE(structurally_equal(*t, *back), text);
        CHECK(to_string(*back, unicycle) == text);
    }
    CHECK(to_string(*parse_expr("v*cos(theta)", unicycle), unicycle) == "v*cos(theta)");
    CHECK(to_string(*expr_unary(ExprOp::neg, expr_pow(expr_variable(0), 2)), unicycle) == "-(x^2)");
    CHECK(to_string(*expr_constant(-1.5), unicycle) == "(-1.5)");
}

TEST_CASE("expr_eval")
{
    const std::vector<std::string> names{"x", "y"};
    const auto e = parse_expr("x^2*sin(y) - exp(x)/(y + 3) + x^-1", names);
    const std::vector<double> v{0.7, -0.4};
    const double want = 0.49 * std::sin(-0.4) - std::exp(0.7) / 2.6 + 1 / 0.7;
    CHECK(expr_eval(*e, v) == doctest::Approx(want).epsilon(1e-14));
    CHECK(expr_arity(*e) == 2);
    CHECK(expr_arity(*parse_expr("3", names)) == 0);

    Rng rng(63);
    const std::vector<Interval> box{Interval(0.5, 0.9), Interval(-0.6, 0.2)};
    const auto hull = expr_eval(*e, box);
    for (int s = 0; s < 1000; ++s) {
        const std::vector<double> x{rng.member(box[0]), rng.member(box[1])};
        CHECK(hull.contains(expr_eval(*e, x)));
    }
}
