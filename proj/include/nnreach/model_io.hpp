#ifndef NNREACH_MODEL_IO_HPP
#define NNREACH_MODEL_IO_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nnreach/engine.hpp>
#include <nnreach/network.hpp>

namespace nnreach
{

struct SolverConfig {
    unsigned order = 10;
    double abstol = 1e-15;
    std::vector<std::size_t> split; // empty: no splitting
};

struct LoadedModel {
    NNCSModel model;
    SolverConfig solver;
};

// Model files are line based. '#' starts a comment. Sections:
//
//   [vars]          state names
//   [inputs]        control input names
//   [disturbances]  name = [lo, hi]
//   [dynamics]      name' = expression, one per state
//   [control]       period, horizon_cycles or horizon, p2c, p2c_offset,
//                   c2p, c2p_offset
//   [init]          name = [lo, hi] or a number, one per state
//   [goal]          mode = must_reach_at_T | must_not_reach | none, and
//                   name = [lo, hi] for constrained states
//   [solver]        order, abstol, split = a,b,...
//
// Matrices are "identity" or JSON arrays of rows, offsets JSON arrays.
// Interval bounds accept inf and -inf. Syntax errors throw parse_error
// with the line; semantic errors throw model_error. Both name the field.
LoadedModel parse_model(std::string_view text, const NeuralNetwork &net);
LoadedModel load_model(const std::string &model_path, const std::string &network_path);

} // namespace nnreach

#endif
