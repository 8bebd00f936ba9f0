#ifndef NNREACH_EXPR_EVAL_HPP
#define NNREACH_EXPR_EVAL_HPP

#include <cmath>
#include <cstdlib>
#include <span>
#include <type_traits>

#include <fmt/format.h>

#include <nnreach/exceptions.hpp>
#include <nnreach/expr.hpp>

namespace nnreach::detail
{

template <typename T>
T eval_expr(const Expr &e, std::span<const T> x)
{
    switch (e.op) {
    case ExprOp::constant:
        return T(e.value);
    case ExprOp::variable:
        if (e.var >= x.size()) {
            throw dimension_error(fmt::format("variable index {} out of range for {} values", e.var, x.size()));
        }
        return x[e.var];
    case ExprOp::neg:
        return -eval_expr(*e.lhs, x);
    case ExprOp::add:
        return eval_expr(*e.lhs, x) + eval_expr(*e.rhs, x);
    case ExprOp::sub:
        return eval_expr(*e.lhs, x) - eval_expr(*e.rhs, x);
    case ExprOp::mul:
        return eval_expr(*e.lhs, x) * eval_expr(*e.rhs, x);
    case ExprOp::div:
        return eval_expr(*e.lhs, x) / eval_expr(*e.rhs, x);
    case ExprOp::pow: {
        const T b = eval_expr(*e.lhs, x);
        const auto k = static_cast<unsigned>(std::abs(e.exponent));
        T p;
        if constexpr (std::is_same_v<T, double>) {
            p = std::pow(b, static_cast<double>(k));
        } else {
            p = pow(b, k);
        }
        return e.exponent < 0 ? T(1.) / p : p;
    }
    case ExprOp::sin: {
        using std::sin;
        return sin(eval_expr(*e.lhs, x));
    }
    case ExprOp::cos: {
        using std::cos;
        return cos(eval_expr(*e.lhs, x));
    }
    case ExprOp::exp: {
        using std::exp;
        return exp(eval_expr(*e.lhs, x));
    }
    }
    return T(0.);
}

} // namespace nnreach::detail

#endif
