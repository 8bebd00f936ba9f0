#ifndef NNREACH_SRC_ROUNDING_HPP
#define NNREACH_SRC_ROUNDING_HPP

#include <cmath>
#include <cstddef>
#include <limits>

#include <nnreach/interval.hpp>

namespace nnreach::detail
{

// Results below this magnitude may have lost the exactness of the fma
// residual; they are widened unconditionally.
inline constexpr double tiny = 4 * std::numeric_limits<double>::min();
inline constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2;

inline double add_down(double a, double b) noexcept
{
    const double s = a + b;
    return two_sum_error(a, b, s) < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b) noexcept
{
    const double s = a + b;
    return two_sum_error(a, b, s) > 0 ? next_up(s) : s;
}

inline double mul_down(double a, double b) noexcept
{
    const double p = a * b;
    if (std::abs(p) < tiny) {
        return (a == 0 || b == 0) ? 0. : next_down(p);
    }
    return std::fma(a, b, -p) < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) noexcept
{
    const double p = a * b;
    if (std::abs(p) < tiny) {
        return (a == 0 || b == 0) ? 0. : next_up(p);
    }
    return std::fma(a, b, -p) > 0 ? next_up(p) : p;
}

// The residual a - q*b is exact via fma; its sign relative to b gives the
// rounding direction of q = a / b.
inline double div_down(double a, double b) noexcept
{
    const double q = a / b;
    if (std::abs(q) < tiny) {
        return (a == 0) ? 0. : next_down(q);
    }
    const double r = std::fma(-q, b, a);
    return (r != 0 && ((r < 0) != (b < 0))) ? next_down(q) : q;
}

inline double div_up(double a, double b) noexcept
{
    const double q = a / b;
    if (std::abs(q) < tiny) {
        return (a == 0) ? 0. : next_up(q);
    }
    const double r = std::fma(-q, b, a);
    return (r != 0 && ((r < 0) == (b < 0))) ? next_up(q) : q;
}

// Upper bound of a sum of nonnegative terms accumulated in floating point.
// A term that is itself the result of `roundings` rounded operations on
// exact data contributes a relative error allowance; exact sums of exact
// terms are returned unchanged.
class UpperSum
{
public:
    void add(double v, std::size_t roundings = 0) noexcept
    {
        const double s = m_sum + v;
        m_err += std::abs(two_sum_error(m_sum, v, s));
        m_sum = s;
        if (roundings > 0 && v != 0) {
            m_rel += static_cast<double>(roundings) * v;
            m_inexact_terms += roundings;
        }
        ++m_ops;
    }
    [[nodiscard]] double bound() const noexcept
    {
        if (m_err == 0 && m_rel == 0) {
            return m_sum;
        }
        const double slack = 1 + 2 * static_cast<double>(m_ops + m_inexact_terms + 2) * unit_roundoff;
        // Per-operation absolute allowance covers underflow of the terms.
        const double denorm = static_cast<double>(m_ops + m_inexact_terms) * std::numeric_limits<double>::denorm_min();
        const double extra = (m_err + m_rel * unit_roundoff) * slack + denorm;
        return next_up(next_up(m_sum + extra));
    }

private:
    double m_sum = 0;
    double m_err = 0;
    double m_rel = 0;
    std::size_t m_ops = 0;
    std::size_t m_inexact_terms = 0;
};

// Performs floating-point operations while accumulating an upper bound of
// the absolute rounding error actually committed.
class RoundingBound
{
public:
    double add(double a, double b) noexcept
    {
        const double s = a + b;
        if (const double e = two_sum_error(a, b, s); e != 0) {
            m_err.add(std::abs(e));
        }
        return s;
    }
    double mul(double a, double b) noexcept
    {
        const double p = a * b;
        if (std::abs(p) < tiny) {
            if (p != 0 || (a != 0 && b != 0)) {
                m_err.add(tiny);
            }
            return p;
        }
        if (const double e = std::fma(a, b, -p); e != 0) {
            m_err.add(std::abs(e));
        }
        return p;
    }
    // Folds an externally computed error magnitude.
    void absorb(double e) noexcept
    {
        if (e != 0) {
            m_err.add(std::abs(e));
        }
    }
    [[nodiscard]] double bound() const noexcept
    {
        return m_err.bound();
    }

private:
    UpperSum m_err;
};

} // namespace nnreach::detail

#endif
