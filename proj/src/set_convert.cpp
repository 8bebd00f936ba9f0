#include <nnreach/set_convert.hpp>

#include <algorithm>
#include <utility>

#include <fmt/format.h>

#include <nnreach/exceptions.hpp>

#include "rounding.hpp"

namespace nnreach
{

namespace
{

// Upper bound of the exact a + b + c.
double sum3_up(double a, double b, double c) noexcept
{
    const double s = a + b;
    const double e = detail::two_sum_error(a, b, s);
    const double t = s + c;
    const double f = detail::two_sum_error(s, c, t);
    return detail::add_up(t, detail::add_up(e, f));
}

} // namespace

StructuredZonotope tm_to_zonotope(const TaylorModel &t)
{
    if (!t.is_normalized()) {
        throw dimension_error("conversion to a zonotope requires a normalized Taylor model");
    }
    const auto n = static_cast<Eigen::Index>(t.dim());
    const auto q = static_cast<Eigen::Index>(t.nvars());
    Eigen::VectorXd c(n);
    Eigen::MatrixXd M(n, q);
    Eigen::VectorXd D(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto split = poly_linear_split(t.poly(ui));
        for (Eigen::Index k = 0; k < q; ++k) {
            M(i, k) = split.linear[static_cast<std::size_t>(k)];
        }
        const Interval h = poly_range_unit(split.nonlinear) + t.remainder()[ui];
        const double b = split.constant;
        c(i) = b + h.mid();
        // Distances from the rounded center to both ends of b + h.
        D(i) = std::max(sum3_up(b, -c(i), h.hi()), sum3_up(c(i), -b, -h.lo()));
    }
    return {std::move(c), std::move(M), std::move(D)};
}

TaylorModel zonotope_to_tm(const StructuredZonotope &z, unsigned order)
{
    const auto n = z.dim();
    const auto q = z.num_symbolic();
    std::vector<Polynomial> polys;
    std::vector<Interval> rem;
    polys.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        std::vector<Term> terms;
        terms.push_back(Term{Monomial{}, z.center(jj)});
        for (std::size_t k = 0; k < q; ++k) {
            terms.push_back(Term{Monomial::variable(k), z.M(jj, static_cast<Eigen::Index>(k))});
        }
        polys.push_back(Polynomial::from_terms(q, order, std::move(terms)));
        rem.push_back(Interval::symmetric(z.D(jj)));
    }
    return {std::move(polys), Box(std::move(rem)), Box::unit(q), order};
}

TaylorModel tm_merge(const TaylorModel &a, const TaylorModel &b)
{
    if (a.nvars() != b.nvars()) {
        throw dimension_error(
            fmt::format("cannot merge Taylor models over {} and {} variables", a.nvars(), b.nvars()));
    }
    if (!(a.domain() == b.domain())) {
        throw dimension_error("cannot merge Taylor models with different domains");
    }
    const unsigned order = std::max(a.order(), b.order());
    std::vector<Polynomial> polys;
    std::vector<Interval> rem;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        polys.push_back(a.poly(i));
        rem.push_back(a.remainder()[i]);
    }
    for (std::size_t i = 0; i < b.dim(); ++i) {
        polys.push_back(b.poly(i));
        rem.push_back(b.remainder()[i]);
    }
    return {std::move(polys), Box(std::move(rem)), a.domain(), order};
}

std::vector<Box> tm_multibox_cover(const TaylorModel &t, std::span<const std::size_t> counts)
{
    const auto cells = box_split(t.domain(), counts);
    std::vector<Box> out;
    out.reserve(cells.size());
    for (const auto &cell : cells) {
        out.push_back(tm_eval_box(t, cell));
    }
    return out;
}

} // namespace nnreach
