#ifndef NNREACH_SET_CONVERT_HPP
#define NNREACH_SET_CONVERT_HPP

#include <span>
#include <vector>

#include <nnreach/interval.hpp>
#include <nnreach/taylor_model.hpp>
#include <nnreach/zonotope.hpp>

namespace nnreach
{

// Linear part of each polynomial becomes M (one column per variable) and
// the constant term the center; the range of the nonlinear part plus the
// remainder is boxed into D, with its midpoint moving the center. The
// result contains the image of t. Requires a normalized TM.
StructuredZonotope tm_to_zonotope(const TaylorModel &t);

// p_j = c_j + sum_k M_jk x_k over [-1, 1]^q with remainder [-D_j, D_j].
// Represents exactly the same set.
TaylorModel zonotope_to_tm(const StructuredZonotope &z, unsigned order = 1);

// Stacks the rows of a and b over their shared variables.
TaylorModel tm_merge(const TaylorModel &a, const TaylorModel &b);

// Interval evaluation of t over each cell of a uniform grid of its domain.
std::vector<Box> tm_multibox_cover(const TaylorModel &t, std::span<const std::size_t> counts);

} // namespace nnreach

#endif
