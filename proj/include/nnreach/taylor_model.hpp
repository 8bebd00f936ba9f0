#ifndef NNREACH_TAYLOR_MODEL_HPP
#define NNREACH_TAYLOR_MODEL_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <nnreach/interval.hpp>
#include <nnreach/polynomial.hpp>

namespace nnreach
{

// The set {p(x) + d : x in domain, d in remainder}.
class TaylorModel
{
public:
    // Zero rows over zero variables.
    TaylorModel() = default;
    // Validates shapes: one polynomial per remainder component, every
    // polynomial over domain.size() variables with degree <= order, and
    // every remainder component containing 0.
    TaylorModel(std::vector<Polynomial> polys, Box remainder, Box domain, unsigned order);

    [[nodiscard]] std::size_t dim() const noexcept
    {
        return m_polys.size();
    }
    [[nodiscard]] std::size_t nvars() const noexcept
    {
        return m_domain.size();
    }
    [[nodiscard]] unsigned order() const noexcept
    {
        return m_order;
    }
    [[nodiscard]] const std::vector<Polynomial> &polys() const noexcept
    {
        return m_polys;
    }
    [[nodiscard]] const Polynomial &poly(std::size_t i) const
    {
        return m_polys.at(i);
    }
    [[nodiscard]] const Box &remainder() const noexcept
    {
        return m_remainder;
    }
    [[nodiscard]] const Box &domain() const noexcept
    {
        return m_domain;
    }
    [[nodiscard]] bool is_normalized() const noexcept
    {
        return m_domain.is_unit();
    }

    // Rows [first, first + count) over the same variables.
    [[nodiscard]] TaylorModel rows(std::size_t first, std::size_t count) const;

private:
    std::vector<Polynomial> m_polys;
    Box m_remainder;
    Box m_domain;
    unsigned m_order = 0;
};

// Constant polynomials at the box center; the box itself, recentered,
// becomes the remainder. Domain is [-1, 1]^dim.
TaylorModel tm_from_box(const Box &b, unsigned order = 1);
// Component i is mid_i + rad_i * x_i, one symbolic variable per component;
// the remainder only absorbs rounding of mid and rad. Domain is
// [-1, 1]^dim.
TaylorModel tm_symbolic_box(const Box &b, unsigned order = 1);

// Affine change of variables mapping the domain onto [-1, 1]^nvars.
// Zero-width domain components turn their variable into a constant.
TaylorModel tm_normalize(const TaylorModel &t);

// Enclosure of the TM image restricted to sub, a subset of the domain.
Box tm_eval_box(const TaylorModel &t, const Box &sub);
// Enclosure of the whole image.
Box tm_hull(const TaylorModel &t);

// Floating-point value of the polynomial part at x (no remainder).
std::vector<double> tm_eval_point(const TaylorModel &t, std::span<const double> x);

// Componentwise arithmetic. Operands must be normalized over the same
// number of variables. The result order is the larger operand order.
TaylorModel tm_add(const TaylorModel &a, const TaylorModel &b);
TaylorModel tm_sub(const TaylorModel &a, const TaylorModel &b);
TaylorModel tm_scale(const TaylorModel &a, double s);
// Truncated product; the remainder encloses
// p_a * D_b + p_b * D_a + D_a * D_b + truncation and rounding spill.
TaylorModel tm_mul(const TaylorModel &a, const TaylorModel &b, unsigned order);

} // namespace nnreach

#endif
