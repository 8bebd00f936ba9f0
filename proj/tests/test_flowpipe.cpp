#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include <nnreach/exceptions.hpp>
#include <nnreach/flowpipe.hpp>

#include "test_util.hpp"

using namespace nnreach;
using nnreach::test::bigfloat;
using nnreach::test::encloses;
using nnreach::test::rational;
using nnreach::test::Rng;
using nnreach::test::to_rational;

namespace
{

Dynamics scalar(const char *rhs)
{
    std::vector<std::string> names{"x"};
    return {names, {parse_expr(rhs, names)}};
}

// x0 = c + r * xi over one symbolic variable.
TaylorModel scalar_tm(double c, double r, unsigned order = 1)
{
    std::vector<Term> terms{Term{Monomial{}, c}, Term{Monomial::variable(0), r}};
    return {{Polynomial::from_terms(1, order, std::move(terms))}, Box{Interval(0.)}, Box::unit(1), order};
}

Dynamics unicycle()
{
    std::vector<std::string> names{"x", "y", "theta", "v", "w", "u1", "u2"};
    const char *rhs[] = {"v*cos(theta)", "v*sin(theta)", "u2", "u1 + w", "0", "0", "0"};
    std::vector<ExprPtr> e;
    for (const char *r : rhs) {
        e.push_back(parse_expr(r, names));
    }
    return {names, e};
}

// Initial segment TMs: t0 for the first, the predecessor's end for the rest.
std::vector<TaylorModel> segment_starts(const TaylorModel &t0, const std::vector<FlowpipeSegment> &segs)
{
    std::vector<TaylorModel> out{t0};
    for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
        out.push_back(segment_eval_local(segs[k], Interval(1.)));
    }
    return out;
}

// Absolute sample times strictly inside each segment.
std::vector<double> interior_times(const FlowpipeSegment &s, int n)
{
    const auto span = s.time_span();
    std::vector<double> t;
    for (int i = 1; i < n; ++i) {
        t.push_back(span.lo() + (span.hi() - span.lo()) * i / n);
    }
    return t;
}

} // namespace

TEST_CASE("flow_step trivial flows")
{
    FlowParams params;
    params.order = 4;

    std::vector<Term> terms{Term{Monomial{}, 2.}, Term{Monomial::variable(0), 1.}};
    const TaylorModel box({Polynomial::from_terms(1, 1, terms)}, Box{Interval(-0.01, 0.01)}, Box::unit(1), 1);
    const auto c = flow_step(scalar("0"), box, 0.5, params);
    CHECK(c.h_used == 0.5);
    CHECK(c.segment.polys[0] == Polynomial::from_terms(2, 4, terms));
    CHECK(c.segment.remainder[0].lo() >= -0.01 - 1e-17);
    CHECK(c.segment.remainder[0].hi() <= 0.01 + 1e-17);
    CHECK(c.segment.remainder[0].contains(Interval(-0.01, 0.01)));

    const auto lin = flow_step(scalar("1"), scalar_tm(0., 1.), 0.5, params);
    CHECK(lin.h_used == 0.5);
    CHECK(to_string(lin.segment.time_coefficient(0, 0)) == "x1");
    CHECK(lin.segment.time_coefficient(0, 1).constant_term() == 0.5);
    CHECK(lin.segment.time_coefficient(0, 2).is_zero());
    CHECK(lin.segment.remainder[0].width() <= 1e-12);
}

TEST_CASE("flow_step exponential")
{
    FlowParams params;
    params.order = 10;
    params.abstol = 1e-15;
    const auto r = flow_step(scalar("x"), scalar_tm(1., 0., 10), 0.1, params);
    REQUIRE(r.h_used == 0.1);
    double fact = 1;
    for (unsigned j = 0; j <= 10; ++j) {
        if (j > 0) {
            fact *= j;
        }
        const double cj = r.segment.time_coefficient(0, j).constant_term() / std::pow(0.1, j);
        CHECK(std::abs(cj - 1 / fact) <= 1e-12);
    }
    const auto at = tm_hull(segment_eval(r.segment, Interval(0.1)))[0];
    CHECK(encloses(at, exp(bigfloat(0.1))));
    CHECK(at.width() <= 1e-9);
    CHECK(r.segment.remainder[0].width() <= 1e-9);
    CHECK(verify_step(scalar("x"), scalar_tm(1., 0., 10), r.segment, params));
}

TEST_CASE("flow_period chaining and closed forms")
{
    FlowParams params;
    params.order = 6;
    params.abstol = 1e-12;

    SUBCASE("x' = -x^2")
    {
        const auto f = scalar("-(x^2)");
        const auto t0 = scalar_tm(1., 0.1);
        const auto period = flow_period(f, t0, 0.5, params);
        REQUIRE(!period.segments.empty());
        const rational r01 = to_rational(0.1);
        const auto exact = [](const rational &x0, const rational &t) { return x0 / (1 + x0 * t); };
        const auto hull = tm_hull(period.final_tm)[0];
        CHECK(encloses(hull, exact(1 - r01, rational(1, 2))));
        CHECK(encloses(hull, exact(1 + r01, rational(1, 2))));
        CHECK(hull.width() <= 1.05 * static_cast<double>(exact(1 + r01, rational(1, 2)) - exact(1 - r01, rational(1, 2))));

        const auto starts = segment_starts(t0, period.segments);
        for (std::size_t k = 0; k < period.segments.size(); ++k) {
            const auto &s = period.segments[k];
            CHECK(verify_step(f, starts[k], s, params));
            for (double t : interior_times(s, 5)) {
                const auto h = tm_hull(segment_eval(s, Interval(t)))[0];
                for (int i = 0; i <= 8; ++i) {
                    const rational x0 = 1 + r01 * rational(i - 4, 4);
                    REQUIRE(encloses(h, exact(x0, to_rational(t))));
                }
            }
            if (k > 0) {
                const auto a = tm_hull(segment_eval_local(period.segments[k - 1], Interval(1.)))[0];
                const auto b = tm_hull(segment_eval_local(s, Interval(0.)))[0];
                CHECK(std::abs(a.lo() - b.lo()) <= 1e-10);
                CHECK(std::abs(a.hi() - b.hi()) <= 1e-10);
            }
        }
        // Segments tile [0, 0.5].
        CHECK(period.segments.front().start == Interval(0.));
        CHECK(period.segments.back().time_span().contains(0.5));
    }

    SUBCASE("x' = exp(-x)")
    {
        const auto f = scalar("exp(-x)");
        const auto t0 = scalar_tm(0.5, 0.05);
        const auto period = flow_period(f, t0, 1., params);
        for (const auto &s : period.segments) {
            for (double t : interior_times(s, 4)) {
                const auto h = tm_hull(segment_eval(s, Interval(t)))[0];
                for (int i = 0; i <= 4; ++i) {
                    const bigfloat x0 = bigfloat(0.5) + bigfloat(0.05) * (i - 2) / 2;
                    REQUIRE(encloses(h, log(exp(x0) + bigfloat(t))));
                }
            }
        }
    }

    SUBCASE("x' = 1/x")
    {
        const auto f = scalar("1/x");
        const auto t0 = scalar_tm(2., 0.1);
        const auto period = flow_period(f, t0, 1., params);
        const auto h = tm_hull(period.final_tm)[0];
        for (int i = 0; i <= 4; ++i) {
            const bigfloat x0 = bigfloat(2.) + bigfloat(0.1) * (i - 2) / 2;
            CHECK(encloses(h, sqrt(x0 * x0 + 2)));
        }
    }

    SUBCASE("step too large is split")
    {
        const auto f = scalar("x");
        const auto period = flow_period(f, scalar_tm(1., 0.), 1., params);
        CHECK(period.segments.size() > 1);
        CHECK(encloses(tm_hull(period.final_tm)[0], exp(bigfloat(1))));
    }
}

TEST_CASE("flow_period with validation failure")
{
    FlowParams params;
    params.order = 4;
    // Finite escape at t = 1.
    CHECK_THROWS_AS(flow_period(scalar("x^2"), scalar_tm(1., 0.), 2., params), integration_error);
    CHECK_THROWS_AS(flow_period(scalar("1/x"), scalar_tm(0., 1.), 1., params), integration_error);
}

TEST_CASE("unicycle flowpipe contains simulations")
{
    const auto f = unicycle();
    const double c[] = {9.525, -4.475, 2.105, 1.505, 0.};
    const double r[] = {0.025, 0.025, 0.005, 0.005, 1e-4};
    std::vector<Polynomial> polys;
    for (std::size_t i = 0; i < 5; ++i) {
        std::vector<Term> t{Term{Monomial{}, c[i]}, Term{Monomial::variable(i), r[i]}};
        polys.push_back(Polynomial::from_terms(5, 1, std::move(t)));
    }
    polys.push_back(Polynomial::constant(5, 1, 0.3));
    polys.push_back(Polynomial::constant(5, 1, -0.2));
    const TaylorModel t0(polys, Box(std::vector<Interval>(7, Interval(0.))), Box::unit(5), 1);

    FlowParams params;
    params.order = 6;
    params.abstol = 1e-10;
    const auto period = flow_period(f, t0, 0.2, params);

    Rng rng(71);
    for (int n = 0; n < 10; ++n) {
        std::vector<double> x0(7);
        for (std::size_t i = 0; i < 5; ++i) {
            x0[i] = rng.member(Interval(c[i] - r[i], c[i] + r[i]));
        }
        x0[5] = 0.3;
        x0[6] = -0.2;
        for (const auto &s : period.segments) {
            const auto times = interior_times(s, 4);
            const auto states = simulate_at(f, x0, times);
            const auto whole = segment_hull(s);
            for (std::size_t k = 0; k < times.size(); ++k) {
                const auto h = tm_hull(segment_eval(s, Interval(times[k])));
                for (std::size_t i = 0; i < 7; ++i) {
                    REQUIRE(h[i].contains(states[k][i]));
                    REQUIRE(whole[i].contains(states[k][i]));
                }
            }
        }
    }
}

TEST_CASE("segment_eval")
{
    FlowpipeSegment s;
    s.start = Interval(0.);
    s.h = 1.;
    s.order = 3;
    s.polys = {parse_polynomial("-0.5*x1^2*x2 + 2*x1*x2 + x1", 2, 3)};
    s.remainder = Box{Interval(-0.1, 0.1)};

    const auto at1 = segment_eval(s, Interval(1.));
    CHECK(to_string(at1.poly(0)) == "-0.5*x1^2 + 3*x1");
    CHECK(at1.remainder()[0] == Interval(-0.1, 0.1));
    CHECK(at1.is_normalized());

    const auto at0 = segment_eval(s, Interval(0.));
    CHECK(to_string(at0.poly(0)) == "x1");
    CHECK(at0.remainder()[0] == Interval(-0.1, 0.1));

    CHECK_THROWS_AS(segment_eval(s, Interval(0.5, 1.5)), dimension_error);

    // The outward-rounded span end points are accepted.
    FlowpipeSegment late = s;
    late.start = Interval(0.1);
    late.h = 0.7;
    CHECK_NOTHROW(segment_eval(late, Interval(late.time_span().hi())));
    CHECK_NOTHROW(segment_eval(late, Interval(late.time_span().lo())));
    CHECK_NOTHROW(segment_eval(late, late.time_span()));

    // Every point of the time interval is represented.
    const auto mid = segment_eval(s, Interval(0.4, 0.6));
    Rng rng(72);
    for (int n = 0; n < 2000; ++n) {
        const double x = rng.member(Interval(-1., 1.));
        const double t = rng.member(Interval(0.4, 0.6));
        const rational rx = to_rational(x);
        const rational rt = to_rational(t);
        const rational exact = (rational(-1, 2) * rx * rx + 2 * rx) * rt + rx;
        const std::vector<double> pt{x};
        const rational p = to_rational(mid.poly(0).eval(pt));
        // mid.poly is evaluated in floating point; allow its rounding.
        const Interval widened = mid.remainder()[0] + Interval(-1e-15, 1e-15);
        CHECK(encloses(widened, exact - p));
    }
}

TEST_CASE("simulate")
{
    const auto e = simulate_at(scalar("x"), {1.}, std::vector<double>{1.});
    CHECK(std::abs(e[0][0] - std::exp(1.)) <= 1e-9);

    const auto z = simulate(scalar("0"), {3.}, 2.);
    CHECK(z.front().first == 0.);
    CHECK(z.back().first == doctest::Approx(2.));
    for (const auto &[t, x] : z) {
        CHECK(x[0] == 3.);
    }

    const auto f = unicycle();
    const std::vector<double> times{0.5, 1., 2.};
    const auto u = simulate_at(f, {9.5, -4.5, 2.1, 1.5, 0., 0.3, -0.2}, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK(std::abs(u[k][2] - (2.1 - 0.2 * times[k])) <= 1e-9);
        CHECK(std::abs(u[k][3] - (1.5 + 0.3 * times[k])) <= 1e-9);
    }
    CHECK_THROWS_AS(simulate_at(f, {1.}, times), dimension_error);
}
