#ifndef NNREACH_POLYNOMIAL_HPP
#define NNREACH_POLYNOMIAL_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nnreach/interval.hpp>

namespace nnreach
{

// Limits of the packed monomial encoding.
inline constexpr std::size_t max_vars = 14;
inline constexpr unsigned max_order = 15;

// Exponent vector packed into 64 bits: total degree in the top byte, then
// 4 bits per variable with x1 most significant. Integer comparison of the
// key is graded lexicographic order and multiplication is key addition.
class Monomial
{
public:
    Monomial() = default;

    static Monomial from_exponents(std::span<const unsigned> exps);
    // Unchecked: the key must come from another Monomial.
    static Monomial from_key(std::uint64_t key) noexcept;
    static Monomial variable(std::size_t k, unsigned power = 1);

    [[nodiscard]] unsigned degree() const noexcept
    {
        return static_cast<unsigned>(m_key >> degree_shift);
    }
    [[nodiscard]] unsigned exponent(std::size_t k) const noexcept
    {
        return static_cast<unsigned>((m_key >> field_shift(k)) & 0xFU);
    }
    // Every exponent even: the monomial is nonnegative on [-1, 1]^n.
    [[nodiscard]] bool all_even() const noexcept
    {
        return (m_key & odd_mask) == 0;
    }
    // Index of the single variable of a degree-1 monomial.
    [[nodiscard]] std::size_t linear_index() const noexcept;
    [[nodiscard]] std::uint64_t key() const noexcept
    {
        return m_key;
    }

    // Caller guarantees degree() + o.degree() <= max_order.
    [[nodiscard]] Monomial operator*(const Monomial &o) const noexcept
    {
        Monomial m;
        m.m_key = m_key + o.m_key;
        return m;
    }

    friend auto operator<=>(const Monomial &, const Monomial &) = default;

    static constexpr unsigned field_shift(std::size_t k) noexcept
    {
        return static_cast<unsigned>(52 - 4 * k);
    }

private:
    static constexpr unsigned degree_shift = 56;
    static constexpr std::uint64_t odd_mask = 0x0011111111111111ULL;

    std::uint64_t m_key = 0;
};

struct Term {
    Monomial mono;
    double coeff;
};

// Sparse polynomial over a fixed number of variables with a degree cap.
// Terms are stored in ascending graded-lex order with no zero coefficients.
class Polynomial
{
public:
    Polynomial() = default;
    Polynomial(std::size_t nvars, unsigned max_order);

    static Polynomial constant(std::size_t nvars, unsigned max_order, double c);
    static Polynomial variable(std::size_t nvars, unsigned max_order, std::size_t k, double coeff = 1.);
    // Collects duplicate monomials (summing in input order) and drops zeros.
    // Monomials exceeding max_order or nvars are rejected.
    static Polynomial from_terms(std::size_t nvars, unsigned max_order, std::vector<Term> terms);

    [[nodiscard]] std::size_t nvars() const noexcept
    {
        return m_nvars;
    }
    [[nodiscard]] unsigned max_order() const noexcept
    {
        return m_max_order;
    }
    [[nodiscard]] std::span<const Term> terms() const noexcept
    {
        return m_terms;
    }
    [[nodiscard]] bool is_zero() const noexcept
    {
        return m_terms.empty();
    }
    [[nodiscard]] std::size_t size() const noexcept
    {
        return m_terms.size();
    }
    // Degree of the highest stored monomial; 0 for the zero polynomial.
    [[nodiscard]] unsigned degree() const noexcept;
    [[nodiscard]] double coeff(const Monomial &m) const noexcept;
    [[nodiscard]] double constant_term() const noexcept;
    // Sum of absolute coefficients (rounded up): bounds |p| on [-1, 1]^n.
    [[nodiscard]] double magnitude() const noexcept;

    // Floating-point evaluation at a point; not an enclosure.
    [[nodiscard]] double eval(std::span<const double> x) const;

    // Same polynomial with a different degree cap. Lowering the cap below
    // degree() is an error; use poly_truncate for that.
    [[nodiscard]] Polynomial with_max_order(unsigned order) const;

    friend bool operator==(const Polynomial &, const Polynomial &);

private:
    friend class PolyBuilder;

    std::size_t m_nvars = 0;
    unsigned m_max_order = 0;
    std::vector<Term> m_terms;
};

// A polynomial plus an interval bound on what was dropped (truncated tail
// and floating-point rounding of the coefficient arithmetic), valid for
// variables ranging over [-1, 1]^nvars.
struct BoundedPoly {
    Polynomial poly;
    Interval spill;
};

Polynomial poly_add(const Polynomial &a, const Polynomial &b);
BoundedPoly poly_add_bounded(const Polynomial &a, const Polynomial &b);
BoundedPoly poly_sub_bounded(const Polynomial &a, const Polynomial &b);
BoundedPoly poly_scale_bounded(const Polynomial &a, double s);
Polynomial operator-(const Polynomial &a);

// Product keeping every monomial of degree <= order. The spill is the
// symmetric interval of summed |coefficient| of the discarded terms,
// widened by a bound on the rounding error of the kept coefficients.
BoundedPoly poly_mul_trunc(const Polynomial &a, const Polynomial &b, unsigned order);

// Keep degree <= order; the rest goes to the spill.
BoundedPoly poly_truncate(const Polynomial &a, unsigned order);

// Moves every term with |coefficient| < threshold into the spill.
BoundedPoly poly_sweep(const Polynomial &a, double threshold);

// Enclosure of the range of p over dom, evaluated monomial by monomial.
Interval poly_eval_box(const Polynomial &p, const Box &dom);
// Fast path of poly_eval_box for dom = [-1, 1]^nvars.
Interval poly_range_unit(const Polynomial &p);

struct LinearSplit {
    std::vector<double> linear; // coefficient of x_k, length nvars
    double constant = 0;
    Polynomial nonlinear; // monomials of degree >= 2
};

// p == constant + sum_k linear[k] * x_k + nonlinear, exactly.
LinearSplit poly_linear_split(const Polynomial &p);

// Substitute x_k <- shift[k] + scale[k] * x_k. The spill bounds rounding
// error over the new [-1, 1]^nvars domain.
BoundedPoly poly_affine_substitute(const Polynomial &p, std::span<const double> shift, std::span<const double> scale);

// Text form, highest graded-lex monomial first, e.g.
// "0.6*x1^2 - 0.5*x1 + 0.4*x2 + 1.7". Coefficients use the shortest
// representation that round-trips. Variable names default to x1, x2, ...
std::string to_string(const Polynomial &p, std::span<const std::string> names = {});
// Inverse of to_string with default variable names.
Polynomial parse_polynomial(std::string_view text, std::size_t nvars, unsigned max_order);

} // namespace nnreach

#endif
