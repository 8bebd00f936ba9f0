#ifndef NNREACH_FLOWPIPE_HPP
#define NNREACH_FLOWPIPE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nnreach/expr.hpp>
#include <nnreach/interval.hpp>
#include <nnreach/polynomial.hpp>
#include <nnreach/taylor_model.hpp>

namespace nnreach
{

// x' = f(x) with one right-hand side per variable.
class Dynamics
{
public:
    Dynamics() = default;
    // Every rhs may only reference variables 0 .. names.size() - 1.
    Dynamics(std::vector<std::string> names, std::vector<ExprPtr> rhs);

    [[nodiscard]] std::size_t nvars() const noexcept
    {
        return m_names.size();
    }
    [[nodiscard]] const std::vector<std::string> &names() const noexcept
    {
        return m_names;
    }
    [[nodiscard]] const std::vector<ExprPtr> &rhs() const noexcept
    {
        return m_rhs;
    }

    void eval(std::span<const double> x, std::span<double> dx) const;

private:
    std::vector<std::string> m_names;
    std::vector<ExprPtr> m_rhs;
};

// Validated enclosure of the flow over one time step.
//
// polys[i] is a polynomial in q + 1 variables: the q symbolic variables of
// the initial Taylor model followed by the normalized local time
// s = (t - t_start) / h in [0, 1]. For every t in the step, the exact flow
// from each initial point lies in polys(xi, s) + remainder.
struct FlowpipeSegment {
    Interval start;   // enclosure of the absolute start time
    double h = 0;     // step length
    std::vector<Polynomial> polys;
    Box remainder;
    // Optional time-dependent form: at local time s the remainder also lies
    // in start_remainder + s * growth (growth is symmetric). Empty when not
    // known.
    Box start_remainder;
    Box growth;
    unsigned order = 0;

    [[nodiscard]] std::size_t dim() const noexcept
    {
        return polys.size();
    }
    [[nodiscard]] std::size_t nvars() const noexcept
    {
        return polys.empty() ? 0 : polys.front().nvars() - 1;
    }
    // Enclosure of all absolute times covered by the step.
    [[nodiscard]] Interval time_span() const;
    // Coefficient of s^j in component i, as a polynomial in the symbolic
    // variables.
    [[nodiscard]] Polynomial time_coefficient(std::size_t i, unsigned j) const;
    // Remainder valid over the local time interval.
    [[nodiscard]] Box remainder_at(const Interval &local) const;
};

struct FlowParams {
    unsigned order = 10;
    // Steps are halved until the coefficient of s^order, which estimates
    // the local truncation error, is at most abstol * max(1, initial hull
    // width).
    double abstol = 1e-15;
    // Polynomial terms with smaller |coefficient| are swept into the
    // remainder.
    double cutoff = 1e-20;
    // Steps never exceed this (and never exceed 1).
    double h_max = 1.;
};

struct StepResult {
    FlowpipeSegment segment;
    double h_used = 0;
    double h_next = 0; // suggested length of the following step
};

// One validated step from t0 (a normalized TM) of length at most h_try.
// Throws integration_error when no step of length >= 1e-8 * h_try can be
// certified.
StepResult flow_step(const Dynamics &f, const TaylorModel &t0, double h_try, const FlowParams &params,
                     Interval start = Interval(0.));

// Re-checks the certificate of a segment computed from t0: the Taylor-model
// Picard operator maps polys + remainder into itself.
bool verify_step(const Dynamics &f, const TaylorModel &t0, const FlowpipeSegment &s, const FlowParams &params);

struct PeriodResult {
    std::vector<FlowpipeSegment> segments;
    // Enclosure of the flow at exactly local time tau.
    TaylorModel final_tm;
};

// Chains steps until local time tau is covered exactly. The smallest
// admissible step is 1e-8 * tau.
PeriodResult flow_period(const Dynamics &f, const TaylorModel &t0, double tau, const FlowParams &params,
                         Interval start = Interval(0.));

// Taylor model of the segment at the absolute time (or time interval) at,
// which must lie in time_span(). Interval times fold into the remainder.
TaylorModel segment_eval(const FlowpipeSegment &s, const Interval &at);
// Same with the normalized local time s in [0, 1].
TaylorModel segment_eval_local(const FlowpipeSegment &s, const Interval &local);
// Box enclosure of the segment over the normalized local time interval.
Box segment_hull(const FlowpipeSegment &s, const Interval &local = Interval(0., 1.));

// Non-validated reference integration (Runge-Kutta-Fehlberg 7(8), local
// tolerance 1e-12). Returns the state at each of the requested times,
// which must be nondecreasing and start at or after 0.
std::vector<std::vector<double>> simulate_at(const Dynamics &f, std::vector<double> x0,
                                             std::span<const double> times);
// Trajectory at the integrator's accepted steps, from 0 to t_end.
std::vector<std::pair<double, std::vector<double>>> simulate(const Dynamics &f, std::vector<double> x0,
                                                             double t_end);

} // namespace nnreach

#endif
