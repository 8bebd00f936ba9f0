#include <nnreach/engine.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include <nnreach/exceptions.hpp>
#include <nnreach/set_convert.hpp>

#include "sim_detail.hpp"

namespace nnreach
{

AffineMap AffineMap::identity(std::size_t n)
{
    const auto k = static_cast<Eigen::Index>(n);
    return {Eigen::MatrixXd::Identity(k, k), Eigen::VectorXd::Zero(k)};
}

Eigen::VectorXd AffineMap::operator()(const Eigen::VectorXd &x) const
{
    if (x.size() != A.cols()) {
        throw dimension_error(fmt::format("affine map expects {} inputs, got {}", A.cols(), x.size()));
    }
    return A * x + b;
}

const char *to_string(GoalMode m) noexcept
{
    switch (m) {
    case GoalMode::must_reach_at_T:
        return "must_reach_at_T";
    case GoalMode::must_not_reach:
        return "must_not_reach";
    default:
        return "none";
    }
}

const char *to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::verified:
        return "verified";
    case Verdict::not_verified:
        return "not_verified";
    default:
        return "error";
    }
}

namespace
{

void check_affine(const AffineMap &m, std::size_t in, std::size_t out, const char *field)
{
    if (m.in_dim() != in || m.out_dim() != out || static_cast<std::size_t>(m.b.size()) != out) {
        throw model_error(fmt::format("{}: expected a {}x{} matrix and length-{} offset, got {}x{} and {}", field,
                                      out, in, out, m.A.rows(), m.A.cols(), m.b.size()));
    }
    if (!m.A.allFinite() || !m.b.allFinite()) {
        throw model_error(fmt::format("{}: entries must be finite", field));
    }
}

} // namespace

void NNCSModel::validate() const
{
    if (n_states == 0) {
        throw model_error("vars: at least one state variable is required");
    }
    if (dynamics.nvars() != lifted_dim()) {
        throw model_error(fmt::format("dynamics: {} variables, expected {} states + {} disturbances + {} inputs",
                                      dynamics.nvars(), n_states, n_disturbances, n_inputs));
    }
    for (std::size_t i = n_states; i < lifted_dim(); ++i) {
        if (!is_zero_constant(*dynamics.rhs()[i])) {
            throw model_error(
                fmt::format("dynamics: '{}' is an input or disturbance and must have zero rhs", dynamics.names()[i]));
        }
    }
    if (network.layers().empty()) {
        throw model_error("network: no layers");
    }
    check_affine(p2c, n_states, network.input_dim(), "p2c");
    check_affine(c2p, network.output_dim(), n_inputs, "c2p");
    if (!(period > 0) || !std::isfinite(period)) {
        throw model_error(fmt::format("period: must be positive, got {}", period));
    }
    if (!(tail >= 0) || !(tail < period)) {
        throw model_error(fmt::format("horizon: final partial cycle {} must lie in [0, period)", tail));
    }
    if (init.size() != n_states + n_disturbances) {
        throw model_error(fmt::format("init: {} intervals, expected {}", init.size(), n_states + n_disturbances));
    }
    if (goal_mode != GoalMode::none && goal.size() != n_states) {
        throw model_error(fmt::format("goal: {} intervals, expected {}", goal.size(), n_states));
    }
    for (const auto &[lo, hi] : goal) {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
            throw model_error("goal: malformed interval");
        }
    }
}

Box CycleResult::input_hull() const
{
    return zono_interval_hull(inputs);
}

namespace
{

bool disjoint(const Box &h, const std::vector<std::pair<double, double>> &goal)
{
    for (std::size_t i = 0; i < goal.size(); ++i) {
        if (h[i].hi() < goal[i].first || h[i].lo() > goal[i].second) {
            return true;
        }
    }
    return false;
}

bool inside(const Box &h, const std::vector<std::pair<double, double>> &goal)
{
    for (std::size_t i = 0; i < goal.size(); ++i) {
        if (h[i].lo() < goal[i].first || h[i].hi() > goal[i].second) {
            return false;
        }
    }
    return true;
}

Verdict spec_verdict(const ReachResult &r, const NNCSModel &model)
{
    switch (model.goal_mode) {
    case GoalMode::none:
        return Verdict::verified;
    case GoalMode::must_reach_at_T:
        return inside(tm_hull(r.final_tm), model.goal) ? Verdict::verified : Verdict::not_verified;
    case GoalMode::must_not_reach:
        break;
    }
    if (r.cycles.empty()) {
        return disjoint(tm_hull(r.final_tm), model.goal) ? Verdict::verified : Verdict::not_verified;
    }
    for (const auto &c : r.cycles) {
        for (const auto &s : c.segments) {
            if (!disjoint(segment_hull(s), model.goal)) {
                return Verdict::not_verified;
            }
        }
    }
    return Verdict::verified;
}

Interval cycle_start(std::size_t k, double period)
{
    return Interval(static_cast<double>(k)) * Interval(period);
}

} // namespace

Verdict check_spec(const ReachResult &r, const NNCSModel &model)
{
    if (r.verdict == Verdict::error) {
        return Verdict::error;
    }
    return spec_verdict(r, model);
}

ReachResult reach(const NNCSModel &model, const ReachParams &params)
{
    model.validate();
    const unsigned order = params.flow.order;
    const std::size_t nx = model.n_states + model.n_disturbances;
    const auto q = static_cast<Eigen::Index>(nx);

    // p2c sees only the states; disturbance columns are zero.
    Eigen::MatrixXd pA = Eigen::MatrixXd::Zero(model.p2c.A.rows(), q);
    pA.leftCols(static_cast<Eigen::Index>(model.n_states)) = model.p2c.A;

    ReachResult out;
    TaylorModel cur = tm_symbolic_box(model.init, order);
    out.final_tm = cur;
    std::vector<std::size_t> keep(nx);
    std::iota(keep.begin(), keep.end(), std::size_t{0});
    const std::size_t total = model.cycles + (model.tail > 0 ? 1 : 0);
    ZonoForwardOptions opts;
    opts.track_rounding = true;

    for (std::size_t k = 0; k < total; ++k) {
        try {
            CycleResult c;
            c.k = k;
            c.start = cycle_start(k, model.period);
            c.length = k < model.cycles ? model.period : model.tail;

            const Zonotope zx = tm_to_zonotope(cur).to_zonotope();
            const Zonotope zin = zono_affine(pA, model.p2c.b, zx, Rounding::track);
            const Zonotope zout = nn_zono_forward(model.network, zin, opts);
            const Zonotope zu = zono_affine(model.c2p.A, model.c2p.b, zout, Rounding::track);
            c.inputs = zono_reduce_structured(zu, keep);
            if (!c.inputs.center.allFinite() || !c.inputs.M.allFinite() || !c.inputs.D.allFinite()) {
                throw integration_error("control input bounds are not finite");
            }

            const TaylorModel merged = tm_merge(cur, zonotope_to_tm(c.inputs, order));
            auto period = flow_period(model.dynamics, merged, c.length, params.flow, c.start);
            c.segments = std::move(period.segments);
            cur = period.final_tm.rows(0, nx);
            out.cycles.push_back(std::move(c));
        } catch (const error &e) {
            out.final_tm = cur;
            out.verdict = Verdict::error;
            out.diagnostics = fmt::format("cycle {}: {}", k, e.what());
            return out;
        }
    }
    out.final_tm = cur;
    out.verdict = spec_verdict(out, model);
    return out;
}

SplitResult reach_split(const NNCSModel &model, std::span<const std::size_t> counts, const ReachParams &params)
{
    model.validate();
    const std::size_t nx = model.init.size();
    if (counts.size() != model.n_states && counts.size() != nx) {
        throw dimension_error(fmt::format("split: {} counts, expected {} or {}", counts.size(), model.n_states, nx));
    }
    std::vector<std::size_t> full(counts.begin(), counts.end());
    full.resize(nx, 1);

    SplitResult out;
    out.pieces = box_split(model.init, full);
    out.verdict = Verdict::verified;
    for (std::size_t i = 0; i < out.pieces.size(); ++i) {
        NNCSModel piece = model;
        piece.init = out.pieces[i];
        out.runs.push_back(reach(piece, params));
        const auto &r = out.runs.back();
        if (r.verdict == Verdict::error) {
            if (out.verdict != Verdict::error) {
                out.diagnostics = fmt::format("piece {}: {}", i, r.diagnostics);
            }
            out.verdict = Verdict::error;
        } else if (r.verdict == Verdict::not_verified && out.verdict == Verdict::verified) {
            out.verdict = Verdict::not_verified;
        }
    }
    return out;
}

namespace
{

void hull_into(std::vector<Interval> &acc, const Box &b)
{
    if (acc.empty()) {
        acc.assign(b.begin(), b.end());
        return;
    }
    for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] = Interval::hull(acc[i], b[i]);
    }
}

} // namespace

Box reach_hull_at(const ReachResult &r, const Interval &t)
{
    std::vector<Interval> acc;
    for (const auto &c : r.cycles) {
        for (const auto &s : c.segments) {
            const Interval span = s.time_span();
            if (t.hi() < span.lo() || t.lo() > span.hi()) {
                continue;
            }
            const Interval local = (t - s.start) / Interval(s.h);
            const double lo = std::max(0., local.lo());
            const double hi = std::min(1., local.hi());
            if (lo > hi) {
                continue;
            }
            hull_into(acc, segment_hull(s, Interval(lo, hi)));
        }
    }
    if (acc.empty()) {
        if (r.cycles.empty() && t.contains(0.)) {
            return tm_hull(r.final_tm);
        }
        throw dimension_error(fmt::format("no segment covers time [{}, {}]", t.lo(), t.hi()));
    }
    return Box(std::move(acc));
}

Box reach_hull(const ReachResult &r)
{
    std::vector<Interval> acc;
    for (const auto &c : r.cycles) {
        for (const auto &s : c.segments) {
            hull_into(acc, segment_hull(s));
        }
    }
    if (acc.empty()) {
        return tm_hull(r.final_tm);
    }
    return Box(std::move(acc));
}

namespace
{

using detail::real;
using detail::state_type;

std::vector<real> affine(const Eigen::MatrixXd &A, const Eigen::VectorXd &b, const std::vector<real> &x)
{
    std::vector<real> y(static_cast<std::size_t>(A.rows()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        real acc = b(i);
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            acc += real(A(i, j)) * x[static_cast<std::size_t>(j)];
        }
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

// u = c2p(N(p2c(x))) in 50-digit arithmetic.
std::vector<real> control(const NNCSModel &model, const state_type &lifted)
{
    const std::vector<real> x(lifted.begin(), lifted.begin() + static_cast<std::ptrdiff_t>(model.n_states));
    auto y = affine(model.p2c.A, model.p2c.b, x);
    for (const auto &layer : model.network.layers()) {
        y = affine(layer.W, layer.b, y);
        if (layer.activation == Activation::relu) {
            for (auto &v : y) {
                v = v < 0 ? real(0) : v;
            }
        }
    }
    return affine(model.c2p.A, model.c2p.b, y);
}

} // namespace

ClosedLoopTrace simulate_closed_loop(const NNCSModel &model, std::span<const double> x0,
                                     std::size_t samples_per_cycle)
{
    namespace ode = boost::numeric::odeint;
    model.validate();
    const std::size_t nx = model.n_states + model.n_disturbances;
    if (x0.size() != nx) {
        throw dimension_error(fmt::format("initial state has length {}, expected {}", x0.size(), nx));
    }
    if (samples_per_cycle == 0) {
        throw dimension_error("at least one sample per cycle is required");
    }
    state_type x(model.lifted_dim(), real(0));
    for (std::size_t i = 0; i < nx; ++i) {
        if (!std::isfinite(x0[i])) {
            throw integration_error("simulation initial state is not finite");
        }
        x[i] = x0[i];
    }

    ClosedLoopTrace out;
    const std::size_t total = model.cycles + (model.tail > 0 ? 1 : 0);
    const auto sys = detail::system_of(model.dynamics);
    for (std::size_t k = 0; k < total; ++k) {
        const double length = k < model.cycles ? model.period : model.tail;
        const auto u = control(model, x);
        Eigen::VectorXd ud(static_cast<Eigen::Index>(u.size()));
        for (std::size_t i = 0; i < u.size(); ++i) {
            x[nx + i] = u[i];
            ud(static_cast<Eigen::Index>(i)) = u[i].convert_to<double>();
        }
        out.inputs.push_back(ud);

        std::vector<real> ts;
        for (std::size_t j = 0; j <= samples_per_cycle; ++j) {
            ts.emplace_back(length * static_cast<double>(j) / static_cast<double>(samples_per_cycle));
        }
        const Interval start = cycle_start(k, model.period);
        ode::integrate_times(detail::make_stepper(), sys, x, ts.begin(), ts.end(), real(length * 1e-3),
                             [&](const state_type &s, real t) {
                                 out.times.push_back(start + Interval(t.convert_to<double>()));
                                 out.states.push_back(detail::narrow(s));
                             });
    }
    return out;
}

} // namespace nnreach
