#ifndef NNREACH_INTERVAL_HPP
#define NNREACH_INTERVAL_HPP

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace nnreach
{

// Closed interval [lo, hi] with finite endpoints.
//
// Every arithmetic operation returns an enclosure of the exact real result.
// Outward rounding is realized without switching the FPU rounding mode:
// the rounding error of each native operation is recovered exactly
// (TwoSum / fma residuals) and the affected endpoint is moved by one ulp
// with nextafter only when the native result was inexact. Exact operations
// therefore produce exact endpoints.
class Interval
{
public:
    Interval() = default;
    // NOLINTNEXTLINE(google-explicit-constructor)
    Interval(double v);
    Interval(double lo, double hi);

    [[nodiscard]] double lo() const noexcept
    {
        return m_lo;
    }
    [[nodiscard]] double hi() const noexcept
    {
        return m_hi;
    }

    // Midpoint rounded to nearest; not an enclosure.
    [[nodiscard]] double mid() const noexcept;
    // Upper bound on max(hi - mid(), mid() - lo).
    [[nodiscard]] double rad() const noexcept;
    // Upper bound on hi - lo.
    [[nodiscard]] double width() const noexcept;
    // max(|lo|, |hi|).
    [[nodiscard]] double mag() const noexcept;

    [[nodiscard]] bool is_point() const noexcept
    {
        return m_lo == m_hi;
    }
    [[nodiscard]] bool contains(double x) const noexcept
    {
        return m_lo <= x && x <= m_hi;
    }
    [[nodiscard]] bool contains(const Interval &o) const noexcept
    {
        return m_lo <= o.m_lo && o.m_hi <= m_hi;
    }
    [[nodiscard]] bool interior_contains(const Interval &o) const noexcept
    {
        return m_lo < o.m_lo && o.m_hi < m_hi;
    }

    // [-r, r], r >= 0.
    static Interval symmetric(double r);
    static Interval hull(const Interval &a, const Interval &b) noexcept;

    friend bool operator==(const Interval &, const Interval &) = default;

private:
    struct unchecked_t {
    };
    Interval(double lo, double hi, unchecked_t) noexcept : m_lo(lo), m_hi(hi) {}

    // Validates finiteness of endpoints produced by arithmetic.
    static Interval checked_result(double lo, double hi);

    friend Interval operator+(const Interval &, const Interval &);
    friend Interval operator-(const Interval &, const Interval &);
    friend Interval operator-(const Interval &) noexcept;
    friend Interval operator*(const Interval &, const Interval &);
    friend Interval operator/(const Interval &, const Interval &);
    friend Interval pow(const Interval &, unsigned);
    friend Interval sin(const Interval &);
    friend Interval cos(const Interval &);
    friend Interval exp(const Interval &);

    double m_lo = 0;
    double m_hi = 0;
};

Interval operator+(const Interval &a, const Interval &b);
Interval operator-(const Interval &a, const Interval &b);
Interval operator-(const Interval &a) noexcept;
Interval operator*(const Interval &a, const Interval &b);
// Throws interval_error when the divisor contains zero.
Interval operator/(const Interval &a, const Interval &b);

inline Interval &operator+=(Interval &a, const Interval &b)
{
    return a = a + b;
}
inline Interval &operator*=(Interval &a, const Interval &b)
{
    return a = a * b;
}

// Even powers of intervals straddling zero have lower bound 0.
Interval pow(const Interval &a, unsigned k);
Interval sin(const Interval &a);
Interval cos(const Interval &a);
Interval exp(const Interval &a);

[[nodiscard]] inline bool disjoint(const Interval &a, const Interval &b) noexcept
{
    return a.hi() < b.lo() || b.hi() < a.lo();
}

std::ostream &operator<<(std::ostream &, const Interval &);

// Rounding helpers shared with the polynomial layer.
namespace detail
{

// Exact error of fl(a + b): a + b == s + err.
double two_sum_error(double a, double b, double s) noexcept;
// Smallest double >= x, x assumed finite.
double next_up(double x) noexcept;
double next_down(double x) noexcept;

} // namespace detail

// Axis-aligned product of intervals.
class Box
{
public:
    Box() = default;
    explicit Box(std::vector<Interval> dims) : m_dims(std::move(dims)) {}
    Box(std::initializer_list<Interval> dims) : m_dims(dims) {}

    // [-1, 1]^n.
    static Box unit(std::size_t n);
    // Degenerate box at a point.
    static Box point(std::span<const double> x);

    [[nodiscard]] std::size_t size() const noexcept
    {
        return m_dims.size();
    }
    [[nodiscard]] bool empty() const noexcept
    {
        return m_dims.empty();
    }
    const Interval &operator[](std::size_t i) const
    {
        return m_dims[i];
    }
    Interval &operator[](std::size_t i)
    {
        return m_dims[i];
    }
    [[nodiscard]] auto begin() const noexcept
    {
        return m_dims.begin();
    }
    [[nodiscard]] auto end() const noexcept
    {
        return m_dims.end();
    }
    [[nodiscard]] const std::vector<Interval> &dims() const noexcept
    {
        return m_dims;
    }

    [[nodiscard]] bool contains(const Box &o) const;
    [[nodiscard]] bool contains(std::span<const double> x) const;
    [[nodiscard]] bool is_unit() const noexcept;

    [[nodiscard]] std::vector<double> center() const;

    friend bool operator==(const Box &, const Box &) = default;

private:
    std::vector<Interval> m_dims;
};

// Componentwise hull.
Box hull(const Box &a, const Box &b);
// Componentwise sum.
Box operator+(const Box &a, const Box &b);

// Uniform grid partition of b with counts[i] pieces along dimension i.
// Pieces are ordered row-major (last dimension varies fastest) and adjacent
// pieces share endpoints exactly.
std::vector<Box> box_split(const Box &b, std::span<const std::size_t> counts);

std::ostream &operator<<(std::ostream &, const Box &);

} // namespace nnreach

#endif
