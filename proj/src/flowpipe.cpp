#include <nnreach/flowpipe.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <nnreach/exceptions.hpp>

#include "expr_eval.hpp"
#include "rounding.hpp"
#include "sim_detail.hpp"

namespace nnreach
{

Dynamics::Dynamics(std::vector<std::string> names, std::vector<ExprPtr> rhs)
    : m_names(std::move(names)), m_rhs(std::move(rhs))
{
    if (m_rhs.size() != m_names.size()) {
        throw dimension_error(
            fmt::format("dynamics has {} variables but {} right-hand sides", m_names.size(), m_rhs.size()));
    }
    for (std::size_t i = 0; i < m_rhs.size(); ++i) {
        if (!m_rhs[i]) {
            throw dimension_error(fmt::format("right-hand side of '{}' is missing", m_names[i]));
        }
        if (expr_arity(*m_rhs[i]) > m_names.size()) {
            throw dimension_error(fmt::format("right-hand side of '{}' references an undeclared variable", m_names[i]));
        }
    }
}

void Dynamics::eval(std::span<const double> x, std::span<double> dx) const
{
    for (std::size_t i = 0; i < m_rhs.size(); ++i) {
        dx[i] = expr_eval(*m_rhs[i], x);
    }
}

Interval FlowpipeSegment::time_span() const
{
    return {start.lo(), detail::add_up(start.hi(), h)};
}

Polynomial FlowpipeSegment::time_coefficient(std::size_t i, unsigned j) const
{
    const auto &p = polys.at(i);
    const std::size_t q = p.nvars() - 1;
    std::vector<Term> terms;
    std::vector<unsigned> e(q);
    for (const auto &t : p.terms()) {
        if (t.mono.exponent(q) != j) {
            continue;
        }
        for (std::size_t k = 0; k < q; ++k) {
            e[k] = t.mono.exponent(k);
        }
        terms.push_back(Term{Monomial::from_exponents(e), t.coeff});
    }
    return Polynomial::from_terms(q, order, std::move(terms));
}

Box FlowpipeSegment::remainder_at(const Interval &local) const
{
    if (local.lo() < 0 || local.hi() > 1) {
        throw dimension_error(fmt::format("local time [{}, {}] outside [0, 1]", local.lo(), local.hi()));
    }
    if (start_remainder.size() != remainder.size() || growth.size() != remainder.size()) {
        return remainder;
    }
    std::vector<Interval> out;
    out.reserve(remainder.size());
    for (std::size_t i = 0; i < remainder.size(); ++i) {
        const Interval t = start_remainder[i] + Interval(local.hi()) * growth[i];
        const double lo = std::max(t.lo(), remainder[i].lo());
        const double hi = std::min(t.hi(), remainder[i].hi());
        out.push_back(lo <= hi ? Interval(lo, hi) : remainder[i]);
    }
    return Box(std::move(out));
}

namespace
{

// Polynomial in q symbolic variables plus time s, with an interval
// remainder valid over [-1, 1]^q x [0, 1].
struct Series {
    Polynomial p;
    Interval r;
};

// Truncated arithmetic on Series. Without tracking, only the polynomial
// parts are computed.
class Arith
{
public:
    Arith(std::size_t nv, unsigned order, double cutoff, bool track)
        : m_nv(nv), m_order(order), m_cutoff(cutoff), m_track(track)
    {
        std::vector<Interval> d(nv, Interval(-1., 1.));
        d.back() = Interval(0., 1.);
        m_dom = Box(std::move(d));
    }

    [[nodiscard]] unsigned order() const noexcept
    {
        return m_order;
    }

    [[nodiscard]] Interval range(const Polynomial &p) const
    {
        return poly_eval_box(p, m_dom);
    }

    [[nodiscard]] Series constant(const Interval &c) const
    {
        const double m = c.mid();
        return {Polynomial::constant(m_nv, m_order, m), m_track ? c - Interval(m) : Interval(0.)};
    }

    [[nodiscard]] Series add(const Series &a, const Series &b) const
    {
        auto s = poly_add_bounded(a.p, b.p);
        return finish(std::move(s), m_track ? a.r + b.r : Interval(0.));
    }

    [[nodiscard]] Series sub(const Series &a, const Series &b) const
    {
        auto s = poly_sub_bounded(a.p, b.p);
        return finish(std::move(s), m_track ? a.r - b.r : Interval(0.));
    }

    [[nodiscard]] Series neg(const Series &a) const
    {
        return {-a.p, -a.r};
    }

    [[nodiscard]] Series mul(const Series &a, const Series &b) const
    {
        auto m = poly_mul_trunc(a.p, b.p, m_order);
        Interval r(0.);
        if (m_track) {
            r = range(a.p) * b.r + range(b.p) * a.r + a.r * b.r;
        }
        return finish(std::move(m), r);
    }

    [[nodiscard]] Series add_constant(const Series &a, const Interval &c) const
    {
        const double m = c.mid();
        auto s = poly_add_bounded(a.p, Polynomial::constant(m_nv, m_order, m));
        return finish(std::move(s), m_track ? a.r + (c - Interval(m)) : Interval(0.));
    }

    [[nodiscard]] Series pow(const Series &a, unsigned k) const
    {
        Series result = constant(Interval(1.));
        Series base = a;
        bool first = true;
        while (k > 0) {
            if ((k & 1U) != 0) {
                result = first ? base : mul(result, base);
                first = false;
            }
            k >>= 1U;
            if (k > 0) {
                base = mul(base, base);
            }
        }
        return result;
    }

    // sin, cos, exp or reciprocal, expanded around the constant term c of
    // a.p to the arithmetic order. The Lagrange remainder is bounded over
    // the range H of a.
    [[nodiscard]] Series elementary(ExprOp op, const Series &a) const
    {
        const double c = a.p.constant_term();
        const Interval ic(c);
        const unsigned k = m_order;
        const auto u = sub(a, constant(ic));
        std::vector<Interval> coef(k + 1);
        Interval fact(1.);
        for (unsigned j = 0; j <= k; ++j) {
            if (j > 0) {
                fact = fact * Interval(static_cast<double>(j));
            }
            coef[j] = derivative(op, ic, j) / fact;
        }
        Series res = constant(coef[k]);
        for (unsigned j = k; j-- > 0;) {
            res = add_constant(mul(res, u), coef[j]);
        }
        if (m_track) {
            const Interval H = range(a.p) + a.r;
            if (op == ExprOp::div && H.contains(0.)) {
                throw integration_error("division by a Taylor model whose range contains zero");
            }
            const Interval next_fact = fact * Interval(static_cast<double>(k + 1));
            res.r = res.r + derivative(op, H, k + 1) / next_fact * nnreach::pow(H - ic, k + 1);
        }
        return res;
    }

private:
    // j-th derivative of the function at x. ExprOp::div stands for 1/x.
    static Interval derivative(ExprOp op, const Interval &x, unsigned j)
    {
        switch (op) {
        case ExprOp::sin:
            switch (j % 4) {
            case 0:
                return sin(x);
            case 1:
                return cos(x);
            case 2:
                return -sin(x);
            default:
                return -cos(x);
            }
        case ExprOp::cos:
            switch (j % 4) {
            case 0:
                return cos(x);
            case 1:
                return -sin(x);
            case 2:
                return -cos(x);
            default:
                return sin(x);
            }
        case ExprOp::exp:
            return exp(x);
        default: {
            // d^j/dx^j 1/x = (-1)^j j! / x^(j+1)
            if (x.contains(0.)) {
                throw integration_error("division by a Taylor model whose range contains zero");
            }
            Interval fact(1.);
            for (unsigned i = 2; i <= j; ++i) {
                fact = fact * Interval(static_cast<double>(i));
            }
            const Interval v = fact / nnreach::pow(x, j + 1);
            return (j % 2 == 0) ? v : -v;
        }
        }
    }

    [[nodiscard]] Series finish(BoundedPoly bp, Interval r) const
    {
        auto sw = poly_sweep(bp.poly, m_cutoff);
        if (m_track) {
            r = r + bp.spill + sw.spill;
        }
        return {std::move(sw.poly), r};
    }

    std::size_t m_nv;
    unsigned m_order;
    double m_cutoff;
    bool m_track;
    Box m_dom;
};

Series eval_series(const Expr &e, const std::vector<Series> &x, const Arith &ar)
{
    switch (e.op) {
    case ExprOp::constant:
        return ar.constant(Interval(e.value));
    case ExprOp::variable:
        return x[e.var];
    case ExprOp::neg:
        return ar.neg(eval_series(*e.lhs, x, ar));
    case ExprOp::add:
        return ar.add(eval_series(*e.lhs, x, ar), eval_series(*e.rhs, x, ar));
    case ExprOp::sub:
        return ar.sub(eval_series(*e.lhs, x, ar), eval_series(*e.rhs, x, ar));
    case ExprOp::mul:
        return ar.mul(eval_series(*e.lhs, x, ar), eval_series(*e.rhs, x, ar));
    case ExprOp::div:
        return ar.mul(eval_series(*e.lhs, x, ar), ar.elementary(ExprOp::div, eval_series(*e.rhs, x, ar)));
    case ExprOp::pow: {
        const auto b = eval_series(*e.lhs, x, ar);
        const auto p = ar.pow(b, static_cast<unsigned>(std::abs(e.exponent)));
        return e.exponent < 0 ? ar.elementary(ExprOp::div, p) : p;
    }
    case ExprOp::sin:
    case ExprOp::cos:
    case ExprOp::exp:
        return ar.elementary(e.op, eval_series(*e.lhs, x, ar));
    }
    return ar.constant(Interval(0.));
}

// Integral over the time variable from 0 to s, truncated to `order`.
BoundedPoly integrate_time(const Polynomial &p, unsigned order)
{
    const std::size_t tv = p.nvars() - 1;
    const Monomial s = Monomial::variable(tv);
    std::vector<Term> kept;
    kept.reserve(p.size());
    detail::UpperSum err;
    for (const auto &t : p.terms()) {
        const double d = static_cast<double>(t.mono.exponent(tv) + 1);
        if (t.mono.degree() + 1 > order) {
            err.add(detail::div_up(std::abs(t.coeff), d));
            continue;
        }
        const double q = t.coeff / d;
        const double r = std::fma(-q, d, t.coeff);
        if (r != 0 || (q != 0 && std::abs(q) < detail::tiny)) {
            err.add(detail::div_up(std::abs(r), d) + std::numeric_limits<double>::denorm_min());
        }
        kept.push_back(Term{t.mono * s, q});
    }
    return {Polynomial::from_terms(p.nvars(), order, std::move(kept)), Interval::symmetric(err.bound())};
}

std::vector<Series> eval_rhs(const Dynamics &f, const std::vector<Series> &x, const Arith &ar)
{
    std::vector<Series> out;
    out.reserve(x.size());
    for (const auto &r : f.rhs()) {
        out.push_back(eval_series(*r, x, ar));
    }
    return out;
}

class Stepper
{
public:
    Stepper(const Dynamics &f, const TaylorModel &t0, const FlowParams &params)
        : m_f(f), m_params(params), m_q(t0.nvars()), m_nv(t0.nvars() + 1), m_delta0(t0.remainder())
    {
        if (!t0.is_normalized()) {
            throw dimension_error("flowpipe construction requires a normalized initial Taylor model");
        }
        if (t0.dim() != f.nvars()) {
            throw dimension_error(
                fmt::format("initial Taylor model has {} rows, dynamics has {} variables", t0.dim(), f.nvars()));
        }
        if (m_nv > max_vars) {
            throw dimension_error(
                fmt::format("flowpipes support at most {} symbolic variables, got {}", max_vars - 1, m_q));
        }
        if (params.order < 1 || params.order > max_order || t0.order() > params.order) {
            throw dimension_error(fmt::format("invalid flowpipe order {} for an order-{} initial Taylor model",
                                              params.order, t0.order()));
        }
        for (const auto &p : t0.polys()) {
            m_x0.push_back(
                Polynomial::from_terms(m_nv, params.order, std::vector<Term>(p.terms().begin(), p.terms().end())));
        }
        double w = 0;
        for (const auto &iv : tm_hull(t0)) {
            w = std::max(w, iv.width());
        }
        m_tol = params.abstol * std::max(1., w);
    }

    StepResult step(double h_try, double h_min, Interval start) const
    {
        double h = std::min({h_try, m_params.h_max, 1.});
        while (true) {
            if (!(h >= h_min) || h <= 0) {
                throw integration_error(
                    fmt::format("integrator cannot validate step: t = [{}, {}], step {} below minimum {}",
                                start.lo(), start.hi(), h, h_min));
            }
            auto P = picard_poly(h);
            const double est = estimate(P);
            if (est > m_tol) {
                h /= 2;
                continue;
            }
            auto rem = validate(P, h);
            if (!rem) {
                h /= 2;
                continue;
            }
            StepResult res;
            res.segment.start = start;
            res.segment.h = h;
            for (auto &p : P) {
                res.segment.polys.push_back(p.with_max_order(m_params.order));
            }
            res.segment.remainder = std::move(rem->uniform);
            res.segment.start_remainder = std::move(rem->start);
            res.segment.growth = std::move(rem->growth);
            res.segment.order = m_params.order;
            res.h_used = h;
            const double k = m_params.order;
            const double grow = est == 0 ? 2. : std::clamp(0.9 * std::pow(m_tol / est, 1. / k), 0.5, 2.);
            res.h_next = h * grow;
            return res;
        }
    }

    bool verify(const FlowpipeSegment &s) const
    {
        if (s.dim() != m_x0.size() || s.nvars() != m_q) {
            throw dimension_error("segment does not match the initial Taylor model");
        }
        return s.remainder.contains(picard_remainder(s.polys, s.remainder, s.h).uniform);
    }

private:
    // Polynomial part of the Picard iterates: the k-th iterate agrees with
    // the flow's expansion up to total degree k.
    std::vector<Polynomial> picard_poly(double h) const
    {
        std::vector<Polynomial> P = m_x0;
        for (unsigned m = 1; m <= m_params.order; ++m) {
            const Arith ar(m_nv, m - 1, m_params.cutoff, false);
            std::vector<Series> x;
            x.reserve(P.size());
            for (const auto &p : P) {
                x.push_back(Series{p, Interval(0.)});
            }
            const auto F = eval_rhs(m_f, x, ar);
            for (std::size_t i = 0; i < P.size(); ++i) {
                auto g = integrate_time(F[i].p, m);
                auto gs = poly_scale_bounded(g.poly, h);
                P[i] = poly_add(m_x0[i], gs.poly).with_max_order(m_params.order);
            }
        }
        return P;
    }

    // Largest |coefficient| of s^k, the last term of the time expansion.
    double estimate(const std::vector<Polynomial> &P) const
    {
        const auto top = Monomial::variable(m_q, m_params.order);
        double worst = 0;
        for (const auto &p : P) {
            worst = std::max(worst, std::abs(p.coeff(top)));
        }
        return worst;
    }

    struct PicardBound {
        Box uniform;
        Box start;  // part present at s = 0
        Box growth; // part bounded by s * growth
    };

    // Remainder of the Picard operator applied to P + I. Apart from the
    // initial remainder, every contribution carries a factor of s.
    PicardBound picard_remainder(const std::vector<Polynomial> &P, const Box &I, double h) const
    {
        const Arith ar(m_nv, m_params.order, m_params.cutoff, true);
        std::vector<Series> x;
        x.reserve(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) {
            x.push_back(Series{P[i], I[i]});
        }
        const auto F = eval_rhs(m_f, x, ar);
        const Interval ih(h);
        std::vector<Interval> J;
        std::vector<Interval> start;
        std::vector<Interval> growth;
        J.reserve(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) {
            auto g = integrate_time(F[i].p, m_params.order);
            auto gs = poly_scale_bounded(g.poly, h);
            auto q = poly_add_bounded(m_x0[i], gs.poly);
            auto d = poly_sub_bounded(q.poly, P[i]);
            const Interval flow = ih * (Interval(0., 1.) * F[i].r + g.spill) + gs.spill;
            J.push_back(m_delta0[i] + flow + q.spill + ar.range(d.poly) + d.spill);

            detail::UpperSum lin;
            lin.add(flow.mag());
            Interval fixed = m_delta0[i] + q.spill;
            bool timed = true;
            for (const auto &t : d.poly.terms()) {
                if (t.mono.exponent(m_q) == 0) {
                    fixed = fixed + Interval(t.coeff);
                    timed = false;
                } else {
                    lin.add(std::abs(t.coeff));
                }
            }
            if (timed) {
                lin.add(d.spill.mag());
            } else {
                fixed = fixed + d.spill;
            }
            start.push_back(fixed);
            growth.push_back(Interval::symmetric(lin.bound()));
        }
        return {Box(std::move(J)), Box(std::move(start)), Box(std::move(growth))};
    }

    std::optional<PicardBound> validate(const std::vector<Polynomial> &P, double h) const
    {
        Box I = m_delta0;
        constexpr int attempts = 30;
        for (int a = 0; a < attempts; ++a) {
            auto J = picard_remainder(P, I, h);
            if (I.contains(J.uniform)) {
                // Every refinement is again an enclosure.
                for (int r = 0; r < 2; ++r) {
                    J = picard_remainder(P, J.uniform, h);
                }
                return J;
            }
            std::vector<Interval> grown;
            for (std::size_t i = 0; i < I.size(); ++i) {
                const Interval u = Interval::hull(I[i], J.uniform[i]);
                const double lo = std::min(2 * u.lo(), -std::numeric_limits<double>::min());
                const double hi = std::max(2 * u.hi(), std::numeric_limits<double>::min());
                grown.emplace_back(lo, hi);
            }
            I = Box(std::move(grown));
        }
        return std::nullopt;
    }

    const Dynamics &m_f;
    FlowParams m_params;
    std::size_t m_q;
    std::size_t m_nv;
    Box m_delta0;
    std::vector<Polynomial> m_x0;
    double m_tol = 0;
};

} // namespace

StepResult flow_step(const Dynamics &f, const TaylorModel &t0, double h_try, const FlowParams &params, Interval start)
{
    const Stepper st(f, t0, params);
    return st.step(h_try, h_try * 1e-8, start);
}

bool verify_step(const Dynamics &f, const TaylorModel &t0, const FlowpipeSegment &s, const FlowParams &params)
{
    auto p = params;
    p.order = s.order;
    return Stepper(f, t0, p).verify(s);
}

PeriodResult flow_period(const Dynamics &f, const TaylorModel &t0, double tau, const FlowParams &params,
                         Interval start)
{
    if (!(tau > 0) || !std::isfinite(tau)) {
        throw dimension_error(fmt::format("flow period must be positive, got {}", tau));
    }
    const double h_min = 1e-8 * tau;
    PeriodResult out{{}, t0};
    // Exact elapsed local time lies in `elapsed`.
    Interval elapsed(0.);
    double h_try = tau;
    TaylorModel cur = t0;
    while (true) {
        const Interval remaining = Interval(tau) - elapsed;
        const Stepper st(f, cur, params);
        auto res = st.step(std::min(h_try, remaining.hi()), std::min(h_min, remaining.hi()), start + elapsed);
        if (res.h_used >= remaining.hi()) {
            const Interval s_end = remaining / Interval(res.h_used);
            const Interval local(std::max(0., s_end.lo()), std::min(1., s_end.hi()));
            out.final_tm = segment_eval_local(res.segment, local);
            out.segments.push_back(std::move(res.segment));
            return out;
        }
        cur = segment_eval_local(res.segment, Interval(1.));
        elapsed = elapsed + Interval(res.h_used);
        h_try = res.h_next;
        out.segments.push_back(std::move(res.segment));
    }
}

TaylorModel segment_eval_local(const FlowpipeSegment &s, const Interval &local)
{
    if (local.lo() < 0 || local.hi() > 1) {
        throw dimension_error(fmt::format("local time [{}, {}] outside [0, 1]", local.lo(), local.hi()));
    }
    const std::size_t q = s.nvars();
    std::vector<Interval> pw(s.order + 1);
    pw[0] = Interval(1.);
    for (unsigned j = 1; j <= s.order; ++j) {
        pw[j] = pw[j - 1] * local;
    }
    const Box base = s.remainder_at(local);
    std::vector<Polynomial> polys;
    std::vector<Interval> rem;
    std::vector<unsigned> e(q);
    for (std::size_t i = 0; i < s.dim(); ++i) {
        std::vector<std::vector<Term>> groups(s.order + 1);
        Interval r = base[i];
        for (const auto &t : s.polys[i].terms()) {
            const unsigned j = t.mono.exponent(q);
            const Interval v = Interval(t.coeff) * pw[j];
            const double m = v.mid();
            const Interval dv = v - Interval(m);
            for (std::size_t k = 0; k < q; ++k) {
                e[k] = t.mono.exponent(k);
            }
            const auto mono = Monomial::from_exponents(e);
            r = r + (mono.degree() == 0 ? dv : Interval::symmetric(dv.mag()));
            if (m != 0) {
                groups[j].push_back(Term{mono, m});
            }
        }
        Polynomial acc(q, s.order);
        for (auto &g : groups) {
            if (g.empty()) {
                continue;
            }
            auto sum = poly_add_bounded(acc, Polynomial::from_terms(q, s.order, std::move(g)));
            acc = std::move(sum.poly);
            r = r + sum.spill;
        }
        polys.push_back(std::move(acc));
        rem.push_back(r);
    }
    return {std::move(polys), Box(std::move(rem)), Box::unit(q), s.order};
}

TaylorModel segment_eval(const FlowpipeSegment &s, const Interval &at)
{
    const Interval span = s.time_span();
    if (!span.contains(at)) {
        throw dimension_error(fmt::format("time [{}, {}] outside segment span [{}, {}]", at.lo(), at.hi(),
                                          span.lo(), span.hi()));
    }
    const Interval local = (at - s.start) / Interval(s.h);
    // The span is rounded outward, so its end points can map just past 0 or 1.
    const double lo = std::clamp(local.lo(), 0., 1.);
    const double hi = std::clamp(local.hi(), 0., 1.);
    return segment_eval_local(s, Interval(lo, hi));
}

Box segment_hull(const FlowpipeSegment &s, const Interval &local)
{
    const std::size_t q = s.nvars();
    std::vector<Interval> d(q + 1, Interval(-1., 1.));
    d[q] = local;
    const Box dom(std::move(d));
    const Box base = s.remainder_at(local);
    std::vector<Interval> out;
    out.reserve(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) {
        out.push_back(poly_eval_box(s.polys[i], dom) + base[i]);
    }
    return Box(std::move(out));
}

namespace
{

using detail::real;
using detail::state_type;
using detail::make_stepper;
using detail::system_of;
using detail::widen;
using detail::narrow;

void check_state(const Dynamics &f, const std::vector<double> &x0)
{
    if (x0.size() != f.nvars()) {
        throw dimension_error(
            fmt::format("initial state has length {}, dynamics has {} variables", x0.size(), f.nvars()));
    }
    for (double v : x0) {
        if (!std::isfinite(v)) {
            throw integration_error("simulation initial state is not finite");
        }
    }
}

} // namespace

std::vector<std::vector<double>> simulate_at(const Dynamics &f, std::vector<double> x0, std::span<const double> times)
{
    namespace ode = boost::numeric::odeint;
    check_state(f, x0);
    std::vector<std::vector<double>> out;
    if (times.empty()) {
        return out;
    }
    if (times.front() < 0 || !std::is_sorted(times.begin(), times.end())) {
        throw dimension_error("simulation times must be nondecreasing and nonnegative");
    }
    std::vector<real> ts;
    ts.reserve(times.size() + 1);
    ts.emplace_back(0.);
    ts.insert(ts.end(), times.begin(), times.end());
    const real dt = real(std::max(times.back(), 1e-3) * 1e-3);
    auto x = widen(x0);
    bool first = true;
    ode::integrate_times(make_stepper(), system_of(f), x, ts.begin(), ts.end(), dt,
                         [&](const state_type &s, real) {
                             if (!first) {
                                 out.push_back(narrow(s));
                             }
                             first = false;
                         });
    return out;
}

std::vector<std::pair<double, std::vector<double>>> simulate(const Dynamics &f, std::vector<double> x0, double t_end)
{
    namespace ode = boost::numeric::odeint;
    check_state(f, x0);
    std::vector<std::pair<double, std::vector<double>>> out;
    if (!(t_end > 0)) {
        out.emplace_back(0., x0);
        return out;
    }
    auto x = widen(x0);
    ode::integrate_adaptive(make_stepper(), system_of(f), x, real(0.), real(t_end), real(t_end * 1e-3),
                            [&](const state_type &s, real t) { out.emplace_back(t.convert_to<double>(), narrow(s)); });
    return out;
}

} // namespace nnreach
