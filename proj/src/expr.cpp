#include <nnreach/expr.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include <nnreach/exceptions.hpp>

#include "expr_eval.hpp"

namespace nnreach
{

ExprPtr expr_constant(double v)
{
    if (!std::isfinite(v)) {
        throw parse_error("expression constants must be finite");
    }
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::constant;
    e->value = v;
    return e;
}

ExprPtr expr_variable(std::size_t k)
{
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::variable;
    e->var = k;
    return e;
}

ExprPtr expr_unary(ExprOp op, ExprPtr a)
{
    if (op != ExprOp::neg && op != ExprOp::sin && op != ExprOp::cos && op != ExprOp::exp) {
        throw parse_error("not a unary operator");
    }
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(a);
    return e;
}

ExprPtr expr_binary(ExprOp op, ExprPtr a, ExprPtr b)
{
    if (op != ExprOp::add && op != ExprOp::sub && op != ExprOp::mul && op != ExprOp::div) {
        throw parse_error("not a binary operator");
    }
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

ExprPtr expr_pow(ExprPtr a, int exponent)
{
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::pow;
    e->lhs = std::move(a);
    e->exponent = exponent;
    return e;
}

namespace
{

constexpr int max_depth = 256;

class Parser
{
public:
    Parser(std::string_view src, std::span<const std::string> names) : m_src(src), m_names(names) {}

    ExprPtr parse()
    {
        auto e = expr(0);
        skip_ws();
        if (m_pos != m_src.size()) {
            fail(fmt::format("unexpected '{}'", m_src[m_pos]));
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string &msg) const
    {
        throw parse_error(fmt::format("column {}: {}", m_pos + 1, msg), 1, m_pos + 1);
    }

    void skip_ws()
    {
        while (m_pos < m_src.size() && std::isspace(static_cast<unsigned char>(m_src[m_pos])) != 0) {
            ++m_pos;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (m_pos < m_src.size() && m_src[m_pos] == c) {
            ++m_pos;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(m_pos < m_src.size() ? fmt::format("expected '{}', found '{}'", c, m_src[m_pos])
                                      : fmt::format("expected '{}' at end of input", c));
        }
    }

    void enter(int depth) const
    {
        if (depth > max_depth) {
            fail("expression nested too deeply");
        }
    }

    ExprPtr expr(int depth)
    {
        enter(depth);
        auto e = term(depth + 1);
        while (true) {
            if (accept('+')) {
                e = expr_binary(ExprOp::add, std::move(e), term(depth + 1));
            } else if (accept('-')) {
                e = expr_binary(ExprOp::sub, std::move(e), term(depth + 1));
            } else {
                return e;
            }
        }
    }

    ExprPtr term(int depth)
    {
        auto e = factor(depth);
        while (true) {
            if (accept('*')) {
                e = expr_binary(ExprOp::mul, std::move(e), factor(depth));
            } else if (accept('/')) {
                e = expr_binary(ExprOp::div, std::move(e), factor(depth));
            } else {
                return e;
            }
        }
    }

    ExprPtr factor(int depth)
    {
        auto e = base(depth);
        if (accept('^')) {
            return expr_pow(std::move(e), integer());
        }
        return e;
    }

    int integer()
    {
        skip_ws();
        const std::size_t start = m_pos;
        if (m_pos < m_src.size() && (m_src[m_pos] == '-' || m_src[m_pos] == '+')) {
            ++m_pos;
        }
        const std::size_t digits = m_pos;
        while (m_pos < m_src.size() && std::isdigit(static_cast<unsigned char>(m_src[m_pos])) != 0) {
            ++m_pos;
        }
        if (m_pos == digits || (m_pos < m_src.size() && (m_src[m_pos] == '.' || m_src[m_pos] == 'e'
                                                           || m_src[m_pos] == 'E'))) {
            m_pos = start;
            fail("exponent must be an integer");
        }
        const char *first = m_src.data() + digits;
        int k = 0;
        const auto [ptr, ec] = std::from_chars(first, m_src.data() + m_pos, k);
        if (ec != std::errc{}) {
            m_pos = start;
            fail("exponent out of range");
        }
        return m_src[start] == '-' ? -k : k;
    }

    ExprPtr base(int depth)
    {
        enter(depth);
        skip_ws();
        if (m_pos == m_src.size()) {
            fail("unexpected end of input");
        }
        const char c = m_src[m_pos];
        if (c == '-') {
            ++m_pos;
            return expr_unary(ExprOp::neg, base(depth + 1));
        }
        if (c == '(') {
            ++m_pos;
            auto e = expr(depth + 1);
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            return identifier(depth);
        }
        fail(fmt::format("unexpected '{}'", c));
    }

    ExprPtr number()
    {
        const std::size_t start = m_pos;
        const auto digit = [&] {
            return m_pos < m_src.size() && std::isdigit(static_cast<unsigned char>(m_src[m_pos])) != 0;
        };
        while (digit()) {
            ++m_pos;
        }
        if (m_pos < m_src.size() && m_src[m_pos] == '.') {
            ++m_pos;
            while (digit()) {
                ++m_pos;
            }
        }
        if (m_pos < m_src.size() && (m_src[m_pos] == 'e' || m_src[m_pos] == 'E')) {
            ++m_pos;
            if (m_pos < m_src.size() && (m_src[m_pos] == '+' || m_src[m_pos] == '-')) {
                ++m_pos;
            }
            if (!digit()) {
                fail("malformed number");
            }
            while (digit()) {
                ++m_pos;
            }
        }
        double v = 0;
        const auto [ptr, ec] = std::from_chars(m_src.data() + start, m_src.data() + m_pos, v);
        if (ec != std::errc{} || ptr != m_src.data() + m_pos || !std::isfinite(v)) {
            m_pos = start;
            fail("malformed or out-of-range number");
        }
        return expr_constant(v);
    }

    ExprPtr identifier(int depth)
    {
        const std::size_t start = m_pos;
        while (m_pos < m_src.size()
               && (std::isalnum(static_cast<unsigned char>(m_src[m_pos])) != 0 || m_src[m_pos] == '_')) {
            ++m_pos;
        }
        const auto name = m_src.substr(start, m_pos - start);
        const std::size_t after = m_pos;
        if (accept('(')) {
            ExprOp op{};
            if (name == "sin") {
                op = ExprOp::sin;
            } else if (name == "cos") {
                op = ExprOp::cos;
            } else if (name == "exp") {
                op = ExprOp::exp;
            } else {
                m_pos = start;
                fail(fmt::format("unknown function '{}'", name));
            }
            auto e = expr(depth + 1);
            expect(')');
            return expr_unary(op, std::move(e));
        }
        m_pos = after;
        const auto it = std::find(m_names.begin(), m_names.end(), name);
        if (it == m_names.end()) {
            m_pos = start;
            fail(fmt::format("unknown identifier '{}'", name));
        }
        return expr_variable(static_cast<std::size_t>(it - m_names.begin()));
    }

    std::string_view m_src;
    std::span<const std::string> m_names;
    std::size_t m_pos = 0;
};

int precedence(const Expr &e) noexcept
{
    switch (e.op) {
    case ExprOp::add:
    case ExprOp::sub:
        return 1;
    case ExprOp::mul:
    case ExprOp::div:
        return 2;
    case ExprOp::pow:
        return 3;
    default:
        return 4;
    }
}

void print(const Expr &e, std::span<const std::string> names, int min_prec, std::string &out)
{
    const bool paren = precedence(e) < min_prec;
    if (paren) {
        out += '(';
    }
    switch (e.op) {
    case ExprOp::constant:
        out += e.value < 0 ? fmt::format("(-{})", -e.value) : fmt::format("{}", e.value);
        break;
    case ExprOp::variable:
        if (e.var >= names.size()) {
            throw dimension_error(fmt::format("variable index {} has no name", e.var));
        }
        out += names[e.var];
        break;
    case ExprOp::neg:
        out += '-';
        print(*e.lhs, names, 4, out);
        break;
    case ExprOp::add:
    case ExprOp::sub:
        print(*e.lhs, names, 1, out);
        out += e.op == ExprOp::add ? " + " : " - ";
        print(*e.rhs, names, 2, out);
        break;
    case ExprOp::mul:
    case ExprOp::div:
        print(*e.lhs, names, 2, out);
        out += e.op == ExprOp::mul ? '*' : '/';
        print(*e.rhs, names, 3, out);
        break;
    case ExprOp::pow:
        print(*e.lhs, names, 4, out);
        out += fmt::format("^{}", e.exponent);
        break;
    case ExprOp::sin:
    case ExprOp::cos:
    case ExprOp::exp:
        out += e.op == ExprOp::sin ? "sin(" : e.op == ExprOp::cos ? "cos(" : "exp(";
        print(*e.lhs, names, 1, out);
        out += ')';
        break;
    }
    if (paren) {
        out += ')';
    }
}

} // namespace

ExprPtr parse_expr(std::string_view src, std::span<const std::string> names)
{
    return Parser(src, names).parse();
}

std::string to_string(const Expr &e, std::span<const std::string> names)
{
    std::string out;
    print(e, names, 1, out);
    return out;
}

bool structurally_equal(const Expr &a, const Expr &b)
{
    if (a.op != b.op) {
        return false;
    }
    switch (a.op) {
    case ExprOp::constant:
        return a.value == b.value;
    case ExprOp::variable:
        return a.var == b.var;
    case ExprOp::pow:
        return a.exponent == b.exponent && structurally_equal(*a.lhs, *b.lhs);
    case ExprOp::add:
    case ExprOp::sub:
    case ExprOp::mul:
    case ExprOp::div:
        return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    default:
        return structurally_equal(*a.lhs, *b.lhs);
    }
}

std::size_t expr_arity(const Expr &e)
{
    switch (e.op) {
    case ExprOp::constant:
        return 0;
    case ExprOp::variable:
        return e.var + 1;
    case ExprOp::add:
    case ExprOp::sub:
    case ExprOp::mul:
    case ExprOp::div:
        return std::max(expr_arity(*e.lhs), expr_arity(*e.rhs));
    default:
        return expr_arity(*e.lhs);
    }
}

double expr_eval(const Expr &e, std::span<const double> x)
{
    return detail::eval_expr<double>(e, x);
}

Interval expr_eval(const Expr &e, std::span<const Interval> x)
{
    return detail::eval_expr<Interval>(e, x);
}

} // namespace nnreach
