#ifndef NNREACH_ZONOTOPE_HPP
#define NNREACH_ZONOTOPE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include <nnreach/interval.hpp>

namespace nnreach
{

// {c + G z : z in [-1, 1]^p}.
struct Zonotope {
    Eigen::VectorXd center;
    Eigen::MatrixXd generators; // n x p

    Zonotope() = default;
    // Throws on shape mismatch or non-finite entries.
    Zonotope(Eigen::VectorXd c, Eigen::MatrixXd g);

    static Zonotope from_box(const Box &b);

    [[nodiscard]] std::size_t dim() const noexcept
    {
        return static_cast<std::size_t>(center.size());
    }
    [[nodiscard]] std::size_t num_generators() const noexcept
    {
        return static_cast<std::size_t>(generators.cols());
    }
    [[nodiscard]] double order() const noexcept
    {
        return dim() == 0 ? 0. : static_cast<double>(num_generators()) / static_cast<double>(dim());
    }
    // Floating-point c + G z.
    [[nodiscard]] Eigen::VectorXd point(const Eigen::VectorXd &z) const;
};

// Generator block [M D] with D diagonal and nonnegative.
struct StructuredZonotope {
    Eigen::VectorXd center;
    Eigen::MatrixXd M; // n x q
    Eigen::VectorXd D; // diagonal of D, length n

    StructuredZonotope() = default;
    StructuredZonotope(Eigen::VectorXd c, Eigen::MatrixXd m, Eigen::VectorXd d);

    [[nodiscard]] std::size_t dim() const noexcept
    {
        return static_cast<std::size_t>(center.size());
    }
    [[nodiscard]] std::size_t num_symbolic() const noexcept
    {
        return static_cast<std::size_t>(M.cols());
    }
    // Generators [M diag(D)], with the all-zero columns of diag(D) omitted.
    [[nodiscard]] Zonotope to_zonotope() const;
};

enum class Rounding {
    ignore, // plain floating-point image
    track   // append a diagonal block of columns bounding the rounding error
};

// A z + b. Column j of the result is A g_j. With Rounding::track the
// result contains the exact image and any rounding-error columns come
// after the original ones.
Zonotope zono_affine(const Eigen::MatrixXd &A, const Eigen::VectorXd &b, const Zonotope &z,
                     Rounding rounding = Rounding::ignore);

Zonotope zono_minkowski(const Zonotope &a, const Zonotope &b);

// Per dimension [c_i - sum_j |G_ij|, c_i + sum_j |G_ij|], rounded outward.
Box zono_interval_hull(const Zonotope &z);
Box zono_interval_hull(const StructuredZonotope &z);

// Keeps the listed columns (in the listed order) as M and boxes every other
// column into D. The result contains z.
StructuredZonotope zono_reduce_structured(const Zonotope &z, std::span<const std::size_t> keep);

// Girard-style selection: indices of the `count` columns with the largest
// ||g||_1 - ||g||_inf, returned in ascending index order.
std::vector<std::size_t> girard_keep_set(const Zonotope &z, std::size_t count);

// Exact point membership for full-dimensional zonotopes of dimension <= 6,
// by checking every facet normal. `tol` is an absolute slack per facet.
bool zono_contains(const Zonotope &z, const Eigen::VectorXd &x, double tol = 0.);

} // namespace nnreach

#endif
