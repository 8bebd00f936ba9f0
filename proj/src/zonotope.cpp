#include <nnreach/zonotope.hpp>

#include <algorithm>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include <nnreach/exceptions.hpp>

#include "rounding.hpp"

namespace nnreach
{

namespace
{

void check_finite(const Eigen::MatrixXd &m, const char *what)
{
    if (!m.allFinite()) {
        throw interval_error(fmt::format("{} has non-finite entries", what));
    }
}

Box hull_from_radii(const Eigen::VectorXd &c, const std::vector<double> &r)
{
    std::vector<Interval> d;
    d.reserve(r.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        d.emplace_back(detail::add_down(c(i), -r[ui]), detail::add_up(c(i), r[ui]));
    }
    return Box(std::move(d));
}

} // namespace

Zonotope::Zonotope(Eigen::VectorXd c, Eigen::MatrixXd g) : center(std::move(c)), generators(std::move(g))
{
    if (generators.rows() != center.size()) {
        throw dimension_error(
            fmt::format("zonotope center has length {}, generators have {} rows", center.size(), generators.rows()));
    }
    check_finite(center, "zonotope center");
    check_finite(generators, "zonotope generator matrix");
}

Zonotope Zonotope::from_box(const Box &b)
{
    const auto n = static_cast<Eigen::Index>(b.size());
    Eigen::VectorXd c(n);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto &iv = b[static_cast<std::size_t>(i)];
        c(i) = iv.mid();
        g(i, i) = iv.rad();
    }
    return {std::move(c), std::move(g)};
}

Eigen::VectorXd Zonotope::point(const Eigen::VectorXd &z) const
{
    if (z.size() != generators.cols()) {
        throw dimension_error(fmt::format("zonotope factor vector has length {}, expected {}", z.size(),
                                          generators.cols()));
    }
    return center + generators * z;
}

StructuredZonotope::StructuredZonotope(Eigen::VectorXd c, Eigen::MatrixXd m, Eigen::VectorXd d)
    : center(std::move(c)), M(std::move(m)), D(std::move(d))
{
    if (M.rows() != center.size() || D.size() != center.size()) {
        throw dimension_error(fmt::format("structured zonotope shape mismatch: center {}, M {}x{}, D {}",
                                          center.size(), M.rows(), M.cols(), D.size()));
    }
    check_finite(center, "structured zonotope center");
    check_finite(M, "structured zonotope M");
    check_finite(D, "structured zonotope D");
    if ((D.array() < 0).any()) {
        throw dimension_error("structured zonotope D must be nonnegative");
    }
}

Zonotope StructuredZonotope::to_zonotope() const
{
    const auto n = center.size();
    const auto nd = static_cast<Eigen::Index>((D.array() != 0).count());
    Eigen::MatrixXd g(n, M.cols() + nd);
    g.leftCols(M.cols()) = M;
    g.rightCols(nd).setZero();
    Eigen::Index col = M.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (D(i) != 0) {
            g(i, col++) = D(i);
        }
    }
    return {center, std::move(g)};
}

Zonotope zono_affine(const Eigen::MatrixXd &A, const Eigen::VectorXd &b, const Zonotope &z, Rounding rounding)
{
    if (A.cols() != z.center.size() || A.rows() != b.size()) {
        throw dimension_error(fmt::format("affine map {}x{} with offset {} applied to zonotope of dimension {}",
                                          A.rows(), A.cols(), b.size(), z.center.size()));
    }
    const auto m = A.rows();
    const auto n = A.cols();
    const auto p = z.generators.cols();
    Eigen::VectorXd c(m);
    Eigen::MatrixXd g(m, p);
    std::vector<double> err(static_cast<std::size_t>(m), 0.);
    for (Eigen::Index i = 0; i < m; ++i) {
        detail::RoundingBound rb;
        double s = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            s = rb.add(s, rb.mul(A(i, j), z.center(j)));
        }
        c(i) = rb.add(s, b(i));
        for (Eigen::Index k = 0; k < p; ++k) {
            double t = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                t = rb.add(t, rb.mul(A(i, j), z.generators(j, k)));
            }
            g(i, k) = t;
        }
        err[static_cast<std::size_t>(i)] = rb.bound();
    }
    if (rounding == Rounding::ignore) {
        return {std::move(c), std::move(g)};
    }
    const auto extra = static_cast<Eigen::Index>(std::count_if(err.begin(), err.end(), [](double e) { return e > 0; }));
    Eigen::MatrixXd gx = Eigen::MatrixXd::Zero(m, p + extra);
    gx.leftCols(p) = g;
    Eigen::Index col = p;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (const double e = err[static_cast<std::size_t>(i)]; e > 0) {
            gx(i, col++) = e;
        }
    }
    return {std::move(c), std::move(gx)};
}

Zonotope zono_minkowski(const Zonotope &a, const Zonotope &b)
{
    if (a.dim() != b.dim()) {
        throw dimension_error(fmt::format("Minkowski sum of dimensions {} and {}", a.dim(), b.dim()));
    }
    Eigen::MatrixXd g(a.center.size(), a.generators.cols() + b.generators.cols());
    g << a.generators, b.generators;
    return {a.center + b.center, std::move(g)};
}

Box zono_interval_hull(const Zonotope &z)
{
    std::vector<double> r;
    for (Eigen::Index i = 0; i < z.center.size(); ++i) {
        detail::UpperSum s;
        for (Eigen::Index j = 0; j < z.generators.cols(); ++j) {
            s.add(std::abs(z.generators(i, j)));
        }
        r.push_back(s.bound());
    }
    return hull_from_radii(z.center, r);
}

Box zono_interval_hull(const StructuredZonotope &z)
{
    std::vector<double> r;
    for (Eigen::Index i = 0; i < z.center.size(); ++i) {
        detail::UpperSum s;
        for (Eigen::Index j = 0; j < z.M.cols(); ++j) {
            s.add(std::abs(z.M(i, j)));
        }
        s.add(z.D(i));
        r.push_back(s.bound());
    }
    return hull_from_radii(z.center, r);
}

StructuredZonotope zono_reduce_structured(const Zonotope &z, std::span<const std::size_t> keep)
{
    const auto p = z.num_generators();
    std::vector<bool> kept(p, false);
    for (auto k : keep) {
        if (k >= p) {
            throw dimension_error(fmt::format("keep index {} out of range for {} generators", k, p));
        }
        if (kept[k]) {
            throw dimension_error(fmt::format("keep index {} listed twice", k));
        }
        kept[k] = true;
    }
    const auto n = z.center.size();
    Eigen::MatrixXd M(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        M.col(static_cast<Eigen::Index>(j)) = z.generators.col(static_cast<Eigen::Index>(keep[j]));
    }
    Eigen::VectorXd D(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        detail::UpperSum s;
        for (std::size_t j = 0; j < p; ++j) {
            if (!kept[j]) {
                s.add(std::abs(z.generators(i, static_cast<Eigen::Index>(j))));
            }
        }
        D(i) = s.bound();
    }
    return {z.center, std::move(M), std::move(D)};
}

std::vector<std::size_t> girard_keep_set(const Zonotope &z, std::size_t count)
{
    const auto p = z.num_generators();
    count = std::min(count, p);
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<double> score(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = z.generators.col(static_cast<Eigen::Index>(j));
        score[j] = col.lpNorm<1>() - col.lpNorm<Eigen::Infinity>();
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace
{

// Visits every k-subset of {0, ..., p-1} in lexicographic order.
template <typename F>
void for_each_subset(std::size_t p, std::size_t k, F &&f)
{
    if (k > p) {
        return;
    }
    std::vector<std::size_t> s(k);
    std::iota(s.begin(), s.end(), std::size_t{0});
    while (true) {
        f(s);
        std::size_t i = k;
        while (i > 0 && s[i - 1] == p - k + i - 1) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++s[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            s[j] = s[j - 1] + 1;
        }
    }
}

} // namespace

bool zono_contains(const Zonotope &z, const Eigen::VectorXd &x, double tol)
{
    const auto n = z.center.size();
    if (x.size() != n) {
        throw dimension_error(fmt::format("point of dimension {} tested against zonotope of dimension {}", x.size(), n));
    }
    if (n > 6) {
        throw dimension_error("exact zonotope membership is limited to dimension 6");
    }
    const Eigen::VectorXd d = x - z.center;
    const auto &G = z.generators;
    if (n == 1) {
        return std::abs(d(0)) <= G.cwiseAbs().sum() + tol;
    }
    if (Eigen::FullPivLU<Eigen::MatrixXd>(G).rank() < n) {
        throw dimension_error("exact zonotope membership requires full-dimensional generators");
    }
    const double scale = G.cwiseAbs().maxCoeff();
    bool inside = true;
    for_each_subset(static_cast<std::size_t>(G.cols()), static_cast<std::size_t>(n - 1), [&](const auto &s) {
        if (!inside) {
            return;
        }
        Eigen::MatrixXd sub(n, n - 1);
        for (std::size_t j = 0; j < s.size(); ++j) {
            sub.col(static_cast<Eigen::Index>(j)) = G.col(static_cast<Eigen::Index>(s[j]));
        }
        // Generalized cross product of the n-1 columns.
        Eigen::VectorXd nu(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::MatrixXd minor(n - 1, n - 1);
            for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
                if (r != i) {
                    minor.row(rr++) = sub.row(r);
                }
            }
            nu(i) = ((i % 2 == 0) ? 1. : -1.) * minor.determinant();
        }
        const double norm = nu.norm();
        if (norm <= 1e-12 * std::pow(scale, static_cast<double>(n - 1))) {
            return;
        }
        nu /= norm;
        const double support = (nu.transpose() * G).cwiseAbs().sum();
        if (std::abs(nu.dot(d)) > support + tol) {
            inside = false;
        }
    });
    return inside;
}

} // namespace nnreach
