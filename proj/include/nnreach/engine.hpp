#ifndef NNREACH_ENGINE_HPP
#define NNREACH_ENGINE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <nnreach/flowpipe.hpp>
#include <nnreach/interval.hpp>
#include <nnreach/network.hpp>
#include <nnreach/taylor_model.hpp>
#include <nnreach/zonotope.hpp>

namespace nnreach
{

// x -> A x + b.
struct AffineMap {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;

    static AffineMap identity(std::size_t n);
    [[nodiscard]] std::size_t in_dim() const noexcept
    {
        return static_cast<std::size_t>(A.cols());
    }
    [[nodiscard]] std::size_t out_dim() const noexcept
    {
        return static_cast<std::size_t>(A.rows());
    }
    [[nodiscard]] Eigen::VectorXd operator()(const Eigen::VectorXd &x) const;
};

enum class GoalMode { none, must_reach_at_T, must_not_reach };
enum class Verdict { verified, not_verified, error };

const char *to_string(GoalMode m) noexcept;
const char *to_string(Verdict v) noexcept;

// Neural-network control system. The dynamics act on the lifted vector
// [states, disturbances, inputs]; disturbances and inputs have zero
// right-hand sides. Disturbances are unknown constants drawn from init.
struct NNCSModel {
    Dynamics dynamics;
    std::size_t n_states = 0;
    std::size_t n_disturbances = 0;
    std::size_t n_inputs = 0;
    NeuralNetwork network;
    AffineMap p2c; // states -> network input
    AffineMap c2p; // network output -> inputs
    double period = 0;
    std::size_t cycles = 0;
    // Length of one extra, shortened cycle after the last full one (0 when
    // the horizon is a multiple of the period).
    double tail = 0;
    Box init; // states then disturbances
    GoalMode goal_mode = GoalMode::none;
    // Over the states; unconstrained components are (-inf, inf).
    std::vector<std::pair<double, double>> goal;

    // Throws model_error naming the first inconsistent field.
    void validate() const;
    [[nodiscard]] std::size_t lifted_dim() const noexcept
    {
        return n_states + n_disturbances + n_inputs;
    }
    [[nodiscard]] double horizon() const noexcept
    {
        return static_cast<double>(cycles) * period + tail;
    }
};

struct ReachParams {
    FlowParams flow;
};

struct CycleResult {
    std::size_t k = 0;
    Interval start;    // absolute start time
    double length = 0; // period, or the tail for a final shortened cycle
    // Control inputs of the cycle over the shared symbolic variables.
    StructuredZonotope inputs;
    std::vector<FlowpipeSegment> segments;

    [[nodiscard]] Box input_hull() const;
};

struct ReachResult {
    std::vector<CycleResult> cycles;
    // State and disturbance rows at the horizon.
    TaylorModel final_tm;
    Verdict verdict = Verdict::error;
    std::string diagnostics;
};

// Closed-loop reachability from model.init. Integrator and numerical
// failures give verdict error with the cycle index in diagnostics; the
// completed cycles are kept.
ReachResult reach(const NNCSModel &model, const ReachParams &params);

struct SplitResult {
    std::vector<Box> pieces;
    std::vector<ReachResult> runs; // one per piece, in box_split order
    Verdict verdict = Verdict::error;
    std::string diagnostics;
};

// Runs reach on each cell of box_split(init, counts). counts covers the
// states, or the states and disturbances; missing entries are 1.
SplitResult reach_split(const NNCSModel &model, std::span<const std::size_t> counts, const ReachParams &params);

// must_not_reach: verified iff every segment hull misses the goal.
// must_reach_at_T: verified iff the final hull lies inside the goal.
// none: verified. Results carrying verdict error stay error.
Verdict check_spec(const ReachResult &r, const NNCSModel &model);

// Interval hull, over the lifted rows, of every segment that may cover an
// absolute time in t. Throws dimension_error if none does.
Box reach_hull_at(const ReachResult &r, const Interval &t);
// Hull of all segments over the lifted rows.
Box reach_hull(const ReachResult &r);

// Sampled closed-loop trajectory: lifted states at absolute times. Each
// time is an enclosure of k * period + local time.
struct ClosedLoopTrace {
    std::vector<Interval> times;
    std::vector<std::vector<double>> states; // lifted dimension
    std::vector<Eigen::VectorXd> inputs;     // u_k per cycle
};

// x0 holds states then disturbances. Each cycle is sampled at
// samples_per_cycle + 1 equally spaced local times, both ends included.
ClosedLoopTrace simulate_closed_loop(const NNCSModel &model, std::span<const double> x0,
                                     std::size_t samples_per_cycle = 10);

} // namespace nnreach

#endif
