#ifndef NNREACH_EXPR_HPP
#define NNREACH_EXPR_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include <nnreach/interval.hpp>

namespace nnreach
{

enum class ExprOp { constant, variable, neg, add, sub, mul, div, pow, sin, cos, exp };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree node. Unused fields are zero / null.
struct Expr {
    ExprOp op = ExprOp::constant;
    double value = 0;      // constant
    std::size_t var = 0;   // variable index
    int exponent = 0;      // pow
    ExprPtr lhs;           // operand of unary nodes and pow
    ExprPtr rhs;
};

ExprPtr expr_constant(double v);
ExprPtr expr_variable(std::size_t k);
ExprPtr expr_unary(ExprOp op, ExprPtr a);
ExprPtr expr_binary(ExprOp op, ExprPtr a, ExprPtr b);
ExprPtr expr_pow(ExprPtr a, int exponent);

// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := base ('^' integer)?
//   base   := number | ident | fn '(' expr ')' | '(' expr ')' | '-' base
// with fn one of sin, cos, exp. Unary minus applies to a base, so "-x^2"
// is (-x)^2. Identifiers are resolved against `names`. Errors are
// parse_error with the 1-based column of the offending character.
ExprPtr parse_expr(std::string_view src, std::span<const std::string> names);

// Minimal-parenthesis text form that parse_expr reads back into an equal
// tree. Negative constants print as "(-c)" and therefore come back as a
// negation node.
std::string to_string(const Expr &e, std::span<const std::string> names);

bool structurally_equal(const Expr &a, const Expr &b);

// Largest variable index + 1 referenced by e (0 if none).
std::size_t expr_arity(const Expr &e);

[[nodiscard]] inline bool is_zero_constant(const Expr &e) noexcept
{
    return e.op == ExprOp::constant && e.value == 0;
}

double expr_eval(const Expr &e, std::span<const double> x);
// Enclosure of the range of e over the box x.
Interval expr_eval(const Expr &e, std::span<const Interval> x);

} // namespace nnreach

#endif
