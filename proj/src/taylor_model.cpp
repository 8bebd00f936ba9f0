#include <nnreach/taylor_model.hpp>

#include <algorithm>
#include <utility>

#include <fmt/format.h>

#include <nnreach/exceptions.hpp>

#include "rounding.hpp"

namespace nnreach
{

TaylorModel::TaylorModel(std::vector<Polynomial> polys, Box remainder, Box domain, unsigned order)
    : m_polys(std::move(polys)), m_remainder(std::move(remainder)), m_domain(std::move(domain)), m_order(order)
{
    if (m_polys.size() != m_remainder.size()) {
        throw dimension_error(fmt::format("Taylor model has {} polynomials but {} remainder components",
                                          m_polys.size(), m_remainder.size()));
    }
    if (order > max_order) {
        throw dimension_error(fmt::format("Taylor model order is limited to {}, got {}", max_order, order));
    }
    for (std::size_t i = 0; i < m_polys.size(); ++i) {
        const auto &p = m_polys[i];
        if (p.nvars() != m_domain.size()) {
            throw dimension_error(fmt::format("polynomial {} has {} variables, domain has dimension {}", i, p.nvars(),
                                              m_domain.size()));
        }
        if (p.degree() > order) {
            throw dimension_error(fmt::format("polynomial {} has degree {} above order {}", i, p.degree(), order));
        }
        if (p.max_order() != order) {
            m_polys[i] = p.with_max_order(order);
        }
        if (!m_remainder[i].contains(0.)) {
            throw interval_error(fmt::format("remainder component {} does not contain 0", i));
        }
    }
}

TaylorModel TaylorModel::rows(std::size_t first, std::size_t count) const
{
    if (first + count > dim()) {
        throw dimension_error(fmt::format("rows [{}, {}) out of range for dimension {}", first, first + count, dim()));
    }
    std::vector<Polynomial> p(m_polys.begin() + static_cast<std::ptrdiff_t>(first),
                              m_polys.begin() + static_cast<std::ptrdiff_t>(first + count));
    std::vector<Interval> r(m_remainder.begin() + static_cast<std::ptrdiff_t>(first),
                            m_remainder.begin() + static_cast<std::ptrdiff_t>(first + count));
    return {std::move(p), Box(std::move(r)), m_domain, m_order};
}

TaylorModel tm_from_box(const Box &b, unsigned order)
{
    if (b.empty()) {
        throw dimension_error("cannot build a Taylor model from an empty box");
    }
    const auto n = b.size();
    std::vector<Polynomial> polys;
    std::vector<Interval> rem;
    for (const auto &iv : b) {
        const double c = iv.mid();
        polys.push_back(Polynomial::constant(n, order, c));
        rem.emplace_back(detail::add_down(iv.lo(), -c), detail::add_up(iv.hi(), -c));
    }
    return {std::move(polys), Box(std::move(rem)), Box::unit(n), order};
}

TaylorModel tm_symbolic_box(const Box &b, unsigned order)
{
    if (b.empty()) {
        throw dimension_error("cannot build a Taylor model from an empty box");
    }
    const auto n = b.size();
    std::vector<Polynomial> polys;
    std::vector<Interval> rem;
    for (std::size_t i = 0; i < n; ++i) {
        const Interval &iv = b[i];
        const double c = iv.mid();
        const double r = iv.rad();
        std::vector<Term> terms{Term{Monomial{}, c}, Term{Monomial::variable(i), r}};
        polys.push_back(Polynomial::from_terms(n, order, std::move(terms)));
        const Interval below = Interval(iv.lo()) - Interval(c) + Interval(r);
        const Interval above = Interval(iv.hi()) - Interval(c) - Interval(r);
        rem.emplace_back(std::min(0., below.lo()), std::max(0., above.hi()));
    }
    return {std::move(polys), Box(std::move(rem)), Box::unit(n), order};
}

TaylorModel tm_normalize(const TaylorModel &t)
{
    if (t.is_normalized()) {
        return t;
    }
    std::vector<double> shift;
    std::vector<double> scale;
    for (const auto &d : t.domain()) {
        shift.push_back(d.mid());
        scale.push_back(d.rad());
    }
    std::vector<Polynomial> polys;
    std::vector<Interval> rem;
    for (std::size_t i = 0; i < t.dim(); ++i) {
        auto sub = poly_affine_substitute(t.poly(i), shift, scale);
        polys.push_back(std::move(sub.poly));
        rem.push_back(t.remainder()[i] + sub.spill);
    }
    return {std::move(polys), Box(std::move(rem)), Box::unit(t.nvars()), t.order()};
}

Box tm_eval_box(const TaylorModel &t, const Box &sub)
{
    if (!t.domain().contains(sub)) {
        throw dimension_error("evaluation box is not contained in the Taylor model domain");
    }
    std::vector<Interval> out;
    out.reserve(t.dim());
    for (std::size_t i = 0; i < t.dim(); ++i) {
        out.push_back(poly_eval_box(t.poly(i), sub) + t.remainder()[i]);
    }
    return Box(std::move(out));
}

Box tm_hull(const TaylorModel &t)
{
    return tm_eval_box(t, t.domain());
}

std::vector<double> tm_eval_point(const TaylorModel &t, std::span<const double> x)
{
    std::vector<double> out;
    out.reserve(t.dim());
    for (const auto &p : t.polys()) {
        out.push_back(p.eval(x));
    }
    return out;
}

namespace
{

void check_compatible(const TaylorModel &a, const TaylorModel &b)
{
    if (!a.is_normalized() || !b.is_normalized()) {
        throw dimension_error("Taylor model arithmetic requires normalized domains");
    }
    if (a.nvars() != b.nvars() || a.dim() != b.dim()) {
        throw dimension_error(fmt::format("Taylor model shape mismatch: {}x{} vs {}x{}", a.dim(), a.nvars(), b.dim(),
                                          b.nvars()));
    }
}

template <typename F>
TaylorModel combine(const TaylorModel &a, const TaylorModel &b, unsigned order, F &&f)
{
    check_compatible(a, b);
    std::vector<Polynomial> polys;
    std::vector<Interval> rem;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        auto [p, r] = f(a.poly(i), a.remainder()[i], b.poly(i), b.remainder()[i]);
        polys.push_back(std::move(p));
        rem.push_back(r);
    }
    return {std::move(polys), Box(std::move(rem)), a.domain(), order};
}

} // namespace

TaylorModel tm_add(const TaylorModel &a, const TaylorModel &b)
{
    return combine(a, b, std::max(a.order(), b.order()),
                   [](const Polynomial &pa, const Interval &ra, const Polynomial &pb, const Interval &rb) {
                       auto s = poly_add_bounded(pa, pb);
                       return std::pair{std::move(s.poly), ra + rb + s.spill};
                   });
}

TaylorModel tm_sub(const TaylorModel &a, const TaylorModel &b)
{
    return combine(a, b, std::max(a.order(), b.order()),
                   [](const Polynomial &pa, const Interval &ra, const Polynomial &pb, const Interval &rb) {
                       auto s = poly_sub_bounded(pa, pb);
                       return std::pair{std::move(s.poly), ra - rb + s.spill};
                   });
}

TaylorModel tm_scale(const TaylorModel &a, double s)
{
    std::vector<Polynomial> polys;
    std::vector<Interval> rem;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        auto r = poly_scale_bounded(a.poly(i), s);
        polys.push_back(std::move(r.poly));
        rem.push_back(a.remainder()[i] * Interval(s) + r.spill);
    }
    return {std::move(polys), Box(std::move(rem)), a.domain(), a.order()};
}

TaylorModel tm_mul(const TaylorModel &a, const TaylorModel &b, unsigned order)
{
    return combine(a, b, order,
                   [order](const Polynomial &pa, const Interval &ra, const Polynomial &pb, const Interval &rb) {
                       auto m = poly_mul_trunc(pa, pb, order);
                       const Interval r
                           = poly_range_unit(pa) * rb + poly_range_unit(pb) * ra + ra * rb + m.spill;
                       return std::pair{std::move(m.poly), r};
                   });
}

} // namespace nnreach
