#include <nnreach/interval.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include <nnreach/exceptions.hpp>

#include "rounding.hpp"

namespace nnreach
{

namespace detail
{

double two_sum_error(double a, double b, double s) noexcept
{
    const double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

double next_up(double x) noexcept
{
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

double next_down(double x) noexcept
{
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

} // namespace detail

namespace
{

using detail::add_down;
using detail::add_up;
using detail::div_down;
using detail::div_up;
using detail::mul_down;
using detail::mul_up;
using detail::next_down;
using detail::next_up;

constexpr double pi = std::numbers::pi;

// libm results are within one ulp; two ulps of slack on each side.
double libm_down(double x) noexcept
{
    return next_down(next_down(x));
}

double libm_up(double x) noexcept
{
    return next_up(next_up(x));
}

// Whether some integer k satisfies lo <= offset + k * period <= hi, with a
// relative slack so that rounding in the reduction can only produce false
// positives.
bool hits_critical_point(double lo, double hi, double offset, double period)
{
    const double fa = (lo - offset) / period;
    const double fb = (hi - offset) / period;
    const double slack = 1e-12 * (1 + std::max(std::abs(fa), std::abs(fb)));
    return std::floor(fb + slack) >= std::ceil(fa - slack);
}

// Point power enclosure by repeated outward multiplication.
Interval point_pow(double x, unsigned k)
{
    Interval acc(1.);
    Interval base(x);
    while (k > 0) {
        if (k & 1U) {
            acc = acc * base;
        }
        k >>= 1U;
        if (k > 0) {
            base = base * base;
        }
    }
    return acc;
}

} // namespace

Interval::Interval(double v) : Interval(v, v) {}

Interval::Interval(double lo, double hi) : m_lo(lo), m_hi(hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw interval_error(fmt::format("interval endpoints must be finite, got [{}, {}]", lo, hi));
    }
    if (!(lo <= hi)) {
        throw interval_error(fmt::format("invalid interval [{}, {}]: lower bound exceeds upper bound", lo, hi));
    }
}

Interval Interval::checked_result(double lo, double hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw interval_error("interval blowup");
    }
    assert(lo <= hi);
    return {lo, hi, unchecked_t{}};
}

double Interval::mid() const noexcept
{
    if (m_lo == -m_hi) {
        return 0.;
    }
    // Halve first so that the sum cannot overflow.
    return m_lo * 0.5 + m_hi * 0.5;
}

double Interval::rad() const noexcept
{
    const double m = mid();
    return std::max(add_up(m_hi, -m), add_up(m, -m_lo));
}

double Interval::width() const noexcept
{
    return add_up(m_hi, -m_lo);
}

double Interval::mag() const noexcept
{
    return std::max(std::abs(m_lo), std::abs(m_hi));
}

Interval Interval::symmetric(double r)
{
    return {-r, r};
}

Interval Interval::hull(const Interval &a, const Interval &b) noexcept
{
    return {std::min(a.m_lo, b.m_lo), std::max(a.m_hi, b.m_hi), unchecked_t{}};
}

Interval operator+(const Interval &a, const Interval &b)
{
    return Interval::checked_result(add_down(a.m_lo, b.m_lo), add_up(a.m_hi, b.m_hi));
}

Interval operator-(const Interval &a) noexcept
{
    return {-a.m_hi, -a.m_lo, Interval::unchecked_t{}};
}

Interval operator-(const Interval &a, const Interval &b)
{
    return a + (-b);
}

Interval operator*(const Interval &a, const Interval &b)
{
    // Point operands are the hot path in polynomial bounding.
    if (a.is_point() && b.is_point()) {
        return Interval::checked_result(mul_down(a.m_lo, b.m_lo), mul_up(a.m_lo, b.m_lo));
    }
    const double lo = std::min({mul_down(a.m_lo, b.m_lo), mul_down(a.m_lo, b.m_hi), mul_down(a.m_hi, b.m_lo),
                                mul_down(a.m_hi, b.m_hi)});
    const double hi
        = std::max({mul_up(a.m_lo, b.m_lo), mul_up(a.m_lo, b.m_hi), mul_up(a.m_hi, b.m_lo), mul_up(a.m_hi, b.m_hi)});
    return Interval::checked_result(lo, hi);
}

Interval operator/(const Interval &a, const Interval &b)
{
    if (b.contains(0.)) {
        throw interval_error(fmt::format("division by an interval containing zero [{}, {}]", b.m_lo, b.m_hi));
    }
    const double lo = std::min({div_down(a.m_lo, b.m_lo), div_down(a.m_lo, b.m_hi), div_down(a.m_hi, b.m_lo),
                                div_down(a.m_hi, b.m_hi)});
    const double hi
        = std::max({div_up(a.m_lo, b.m_lo), div_up(a.m_lo, b.m_hi), div_up(a.m_hi, b.m_lo), div_up(a.m_hi, b.m_hi)});
    return Interval::checked_result(lo, hi);
}

Interval pow(const Interval &a, unsigned k)
{
    if (k == 0) {
        return Interval(1.);
    }
    if (k == 1) {
        return a;
    }
    const Interval pl = point_pow(a.m_lo, k);
    const Interval ph = point_pow(a.m_hi, k);
    if (k % 2 == 1 || a.m_lo >= 0) {
        return Interval::checked_result(pl.m_lo, ph.m_hi);
    }
    if (a.m_hi <= 0) {
        return Interval::checked_result(ph.m_lo, pl.m_hi);
    }
    return Interval::checked_result(0., std::max(pl.m_hi, ph.m_hi));
}

Interval sin(const Interval &a)
{
    if (a.is_point() && a.m_lo == 0) {
        return Interval(0.);
    }
    if (a.width() >= 2 * pi || a.mag() > 1e6) {
        return {-1., 1.};
    }
    const double sl = std::sin(a.m_lo);
    const double sh = std::sin(a.m_hi);
    double lo = libm_down(std::min(sl, sh));
    double hi = libm_up(std::max(sl, sh));
    if (hits_critical_point(a.m_lo, a.m_hi, pi / 2, 2 * pi)) {
        hi = 1.;
    }
    if (hits_critical_point(a.m_lo, a.m_hi, -pi / 2, 2 * pi)) {
        lo = -1.;
    }
    return Interval::checked_result(std::max(lo, -1.), std::min(hi, 1.));
}

Interval cos(const Interval &a)
{
    if (a.is_point() && a.m_lo == 0) {
        return Interval(1.);
    }
    if (a.width() >= 2 * pi || a.mag() > 1e6) {
        return {-1., 1.};
    }
    const double cl = std::cos(a.m_lo);
    const double ch = std::cos(a.m_hi);
    double lo = libm_down(std::min(cl, ch));
    double hi = libm_up(std::max(cl, ch));
    if (hits_critical_point(a.m_lo, a.m_hi, 0., 2 * pi)) {
        hi = 1.;
    }
    if (hits_critical_point(a.m_lo, a.m_hi, pi, 2 * pi)) {
        lo = -1.;
    }
    return Interval::checked_result(std::max(lo, -1.), std::min(hi, 1.));
}

Interval exp(const Interval &a)
{
    if (a.is_point() && a.m_lo == 0) {
        return Interval(1.);
    }
    const double lo = std::max(0., libm_down(std::exp(a.m_lo)));
    return Interval::checked_result(lo, libm_up(std::exp(a.m_hi)));
}

std::ostream &operator<<(std::ostream &os, const Interval &a)
{
    return os << fmt::format("[{}, {}]", a.lo(), a.hi());
}

Box Box::unit(std::size_t n)
{
    return Box(std::vector<Interval>(n, Interval(-1., 1.)));
}

Box Box::point(std::span<const double> x)
{
    std::vector<Interval> dims;
    dims.reserve(x.size());
    for (double v : x) {
        dims.emplace_back(v);
    }
    return Box(std::move(dims));
}

bool Box::contains(const Box &o) const
{
    if (o.size() != size()) {
        return false;
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (!m_dims[i].contains(o.m_dims[i])) {
            return false;
        }
    }
    return true;
}

bool Box::contains(std::span<const double> x) const
{
    if (x.size() != size()) {
        return false;
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (!m_dims[i].contains(x[i])) {
            return false;
        }
    }
    return true;
}

bool Box::is_unit() const noexcept
{
    return std::all_of(m_dims.begin(), m_dims.end(), [](const Interval &d) { return d.lo() == -1 && d.hi() == 1; });
}

std::vector<double> Box::center() const
{
    std::vector<double> c;
    c.reserve(size());
    for (const auto &d : m_dims) {
        c.push_back(d.mid());
    }
    return c;
}

Box hull(const Box &a, const Box &b)
{
    if (a.size() != b.size()) {
        throw dimension_error(fmt::format("box hull of dimensions {} and {}", a.size(), b.size()));
    }
    std::vector<Interval> d;
    d.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d.push_back(Interval::hull(a[i], b[i]));
    }
    return Box(std::move(d));
}

Box operator+(const Box &a, const Box &b)
{
    if (a.size() != b.size()) {
        throw dimension_error(fmt::format("box sum of dimensions {} and {}", a.size(), b.size()));
    }
    std::vector<Interval> d;
    d.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d.push_back(a[i] + b[i]);
    }
    return Box(std::move(d));
}

std::vector<Box> box_split(const Box &b, std::span<const std::size_t> counts)
{
    if (b.empty()) {
        throw dimension_error("cannot split an empty box");
    }
    if (counts.size() != b.size()) {
        throw dimension_error(fmt::format("split counts have length {}, box has dimension {}", counts.size(), b.size()));
    }

    // Shared grid endpoints per dimension; the outer ones are the original
    // endpoints so that the union reconstitutes b exactly.
    std::vector<std::vector<Interval>> pieces(b.size());
    std::size_t total = 1;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto k = counts[i];
        if (k == 0) {
            throw dimension_error(fmt::format("split count for dimension {} is zero", i));
        }
        const double lo = b[i].lo();
        const double hi = b[i].hi();
        std::vector<double> ends(k + 1);
        ends[0] = lo;
        ends[k] = hi;
        for (std::size_t j = 1; j < k; ++j) {
            ends[j] = std::clamp(lo + (hi - lo) * (static_cast<double>(j) / static_cast<double>(k)), lo, hi);
        }
        for (std::size_t j = 0; j < k; ++j) {
            pieces[i].emplace_back(ends[j], std::max(ends[j], ends[j + 1]));
        }
        total *= k;
    }

    std::vector<Box> out;
    out.reserve(total);
    std::vector<std::size_t> idx(b.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<Interval> d(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            d[i] = pieces[i][idx[i]];
        }
        out.emplace_back(std::move(d));
        for (std::size_t i = b.size(); i-- > 0;) {
            if (++idx[i] < counts[i]) {
                break;
            }
            idx[i] = 0;
        }
    }
    return out;
}

std::ostream &operator<<(std::ostream &os, const Box &b)
{
    os << '(';
    for (std::size_t i = 0; i < b.size(); ++i) {
        os << (i ? ", " : "") << b[i];
    }
    return os << ')';
}

} // namespace nnreach
