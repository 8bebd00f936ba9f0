#include <map>
#include <string>
#include <vector>

#include <doctest.h>

#include <nnreach/exceptions.hpp>
#include <nnreach/polynomial.hpp>

#include "test_util.hpp"

using namespace nnreach;
using nnreach::test::encloses;
using nnreach::test::rational;
using nnreach::test::to_rational;

namespace
{

// Dense oracle: exponent vector -> exact rational coefficient.
using Dense = std::map<std::vector<unsigned>, rational>;

Dense to_dense(const Polynomial &p)
{
    Dense d;
    for (const auto &t : p.terms()) {
        std::vector<unsigned> e(p.nvars());
        for (std::size_t k = 0; k < p.nvars(); ++k) {
            e[k] = t.mono.exponent(k);
        }
        d[e] += to_rational(t.coeff);
    }
    return d;
}

unsigned degree_of(const std::vector<unsigned> &e)
{
    unsigned s = 0;
    for (auto v : e) {
        s += v;
    }
    return s;
}

Dense dense_mul(const Dense &a, const Dense &b)
{
    Dense out;
    for (const auto &[ea, ca] : a) {
        for (const auto &[eb, cb] : b) {
            auto e = ea;
            for (std::size_t k = 0; k < e.size(); ++k) {
                e[k] += eb[k];
            }
            out[e] += ca * cb;
        }
    }
    return out;
}

rational dense_eval(const Dense &d, const std::vector<double> &x)
{
    rational acc(0);
    for (const auto &[e, c] : d) {
        rational m = c;
        for (std::size_t k = 0; k < e.size(); ++k) {
            for (unsigned j = 0; j < e[k]; ++j) {
                m *= to_rational(x[k]);
            }
        }
        acc += m;
    }
    return acc;
}

Polynomial random_poly(nnreach::test::Rng &rng, std::size_t nvars, unsigned deg, std::size_t nterms, unsigned cap)
{
    std::vector<Term> terms;
    for (std::size_t i = 0; i < nterms; ++i) {
        std::vector<unsigned> e(nvars, 0);
        const auto d = static_cast<unsigned>(rng.integer(0, static_cast<int>(deg)));
        for (unsigned j = 0; j < d; ++j) {
            ++e[static_cast<std::size_t>(rng.integer(0, static_cast<int>(nvars) - 1))];
        }
        terms.push_back(Term{Monomial::from_exponents(e), rng.uniform(-2., 2.)});
    }
    return Polynomial::from_terms(nvars, cap, std::move(terms));
}

Polynomial x(std::size_t k, std::size_t nvars = 2, unsigned order = 4)
{
    return Polynomial::variable(nvars, order, k);
}

} // namespace

TEST_CASE("monomial encoding")
{
    const std::vector<unsigned> e{2, 0, 1};
    const auto m = Monomial::from_exponents(e);
    CHECK(m.degree() == 3);
    CHECK(m.exponent(0) == 2);
    CHECK(m.exponent(1) == 0);
    CHECK(m.exponent(2) == 1);
    CHECK(!m.all_even());
    CHECK((m * Monomial::variable(2)).all_even());
    // Graded order: every degree-1 monomial precedes every degree-2 one.
    CHECK(Monomial::variable(0) < Monomial::variable(1, 2));
    CHECK(Monomial::variable(1) < Monomial::variable(0));
    CHECK(Monomial::variable(3).linear_index() == 3);
    const std::vector<unsigned> too_big{16};
    CHECK_THROWS_AS(Monomial::from_exponents(too_big), dimension_error);
}

TEST_CASE("poly_add")
{
    CHECK(poly_add(x(0), -x(0)).is_zero());

    const auto a = parse_polynomial("0.6*x1^2 + 1.7", 2, 4);
    const auto b = parse_polynomial("0.4*x2", 2, 4);
    CHECK(to_string(poly_add(a, b)) == "0.6*x1^2 + 0.4*x2 + 1.7");

    CHECK_THROWS_AS(poly_add(x(0, 2), x(0, 3)), dimension_error);
    CHECK(poly_add(Polynomial::constant(2, 1, 1.), Polynomial::constant(2, 3, 1.)).max_order() == 3);
}

TEST_CASE("poly_add matches dense oracle")
{
    nnreach::test::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(1, 4));
        const auto a = random_poly(rng, n, 4, 12, 4);
        const auto b = random_poly(rng, n, 4, 12, 4);
        const auto s = poly_add_bounded(a, b);
        auto oracle = to_dense(a);
        for (const auto &[e, c] : to_dense(b)) {
            oracle[e] += c;
        }
        const auto got = to_dense(s.poly);
        // Coefficients agree up to the reported rounding spill; terms are
        // canonical and nonzero.
        rational err(0);
        for (const auto &[e, c] : oracle) {
            const auto it = got.find(e);
            const rational g = it == got.end() ? rational(0) : it->second;
            err += abs(g - c);
        }
        for (const auto &[e, c] : got) {
            CHECK(c != 0);
            CHECK(oracle.count(e) == 1);
        }
        CHECK(encloses(s.spill, err));
        for (std::size_t i = 1; i < s.poly.size(); ++i) {
            CHECK(s.poly.terms()[i - 1].mono < s.poly.terms()[i].mono);
        }
    }
}

TEST_CASE("poly_mul_trunc")
{
    const auto sq2 = poly_mul_trunc(x(0), x(0), 2);
    CHECK(to_string(sq2.poly) == "x1^2");
    CHECK(sq2.spill == Interval(0.));

    const auto sq1 = poly_mul_trunc(x(0), x(0), 1);
    CHECK(sq1.poly.is_zero());
    CHECK(sq1.spill.contains(Interval(-1., 1.)));
    CHECK(sq1.spill.width() <= 2 + 1e-12);

    CHECK_THROWS_AS(poly_mul_trunc(x(0, 2), x(0, 3), 2), dimension_error);
}

TEST_CASE("poly_mul_trunc against dense oracle and sampling")
{
    nnreach::test::Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3;
        const auto a = random_poly(rng, n, 3, 10, 6);
        const auto b = random_poly(rng, n, 3, 10, 6);
        const auto r = poly_mul_trunc(a, b, 3);
        const auto full = dense_mul(to_dense(a), to_dense(b));
        Dense kept;
        Dense tail;
        for (const auto &[e, c] : full) {
            (degree_of(e) <= 3 ? kept : tail)[e] = c;
        }
        for (const auto &t : r.poly.terms()) {
            CHECK(t.mono.degree() <= 3);
        }
        // Kept coefficients within the spill; tail bound from |coeff| sum.
        const auto got = to_dense(r.poly);
        rational coeff_err(0);
        for (const auto &[e, c] : kept) {
            const auto it = got.find(e);
            coeff_err += abs((it == got.end() ? rational(0) : it->second) - c);
        }
        rational tail_mag(0);
        for (const auto &[e, c] : tail) {
            tail_mag += abs(c);
        }
        CHECK(encloses(r.spill, coeff_err + tail_mag));

        for (int s = 0; s < 500; ++s) {
            const auto pt = rng.unit_point(n);
            const rational exact = dense_eval(full, pt);
            const rational approx = dense_eval(got, pt);
            REQUIRE(encloses(r.spill, exact - approx));
        }
    }
}

TEST_CASE("truncation soundness on 10^4 samples")
{
    nnreach::test::Rng rng(13);
    const std::size_t n = 2;
    const auto a = random_poly(rng, n, 3, 8, 6);
    const auto b = random_poly(rng, n, 3, 8, 6);
    const auto r = poly_mul_trunc(a, b, 2);
    const auto da = to_dense(a);
    const auto db = to_dense(b);
    const auto dr = to_dense(r.poly);
    for (int s = 0; s < 10000; ++s) {
        const auto pt = rng.unit_point(n);
        REQUIRE(encloses(r.spill, dense_eval(da, pt) * dense_eval(db, pt) - dense_eval(dr, pt)));
    }
}

TEST_CASE("poly_eval_box")
{
    const auto p = parse_polynomial("0.6*x1^2", 2, 2);
    const auto r = poly_eval_box(p, Box::unit(2));
    CHECK(r.contains(Interval(0., 0.6)));
    CHECK(r.lo() == 0.);
    CHECK(r.hi() <= 0.6 + 1e-15);

    const Box other{Interval(2., 3.), Interval(-7., 11.)};
    const auto c = poly_eval_box(Polynomial::constant(2, 2, 1.7), other);
    CHECK(c.contains(1.7));
    CHECK(c.width() <= nnreach::test::ulp(1.7) * 2);

    // Exact range of -0.5x^2 + 3x over [-1, 1] is [-3.5, 2.5].
    const auto q = parse_polynomial("-0.5*x1^2 + 3*x1", 1, 2);
    const auto rq = poly_eval_box(q, Box{Interval(-1., 1.)});
    CHECK(rq.contains(Interval(-3.5, 2.5)));
    CHECK(rq.lo() >= -3.5 - 1e-12);
    CHECK(rq.hi() <= 3.5 + 1e-12);

    // Non-unit box path.
    const auto rq2 = poly_eval_box(q, Box{Interval(0., 2.)});
    CHECK(rq2.contains(Interval(0., 4.)));

    CHECK_THROWS_AS(poly_eval_box(q, Box::unit(2)), dimension_error);
}

TEST_CASE("poly_eval_box soundness")
{
    nnreach::test::Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3;
        const auto p = random_poly(rng, n, 4, 10, 4);
        std::vector<Interval> d;
        for (std::size_t k = 0; k < n; ++k) {
            d.push_back(rng.interval(-2., 2.));
        }
        const Box box(d);
        const auto range = poly_eval_box(p, box);
        const auto dp = to_dense(p);
        for (int s = 0; s < 200; ++s) {
            std::vector<double> pt(n);
            for (std::size_t k = 0; k < n; ++k) {
                pt[k] = rng.member(d[k]);
            }
            REQUIRE(encloses(range, dense_eval(dp, pt)));
        }
    }
}

TEST_CASE("poly_linear_split")
{
    const auto p = parse_polynomial("0.6*x1^2 - 0.5*x1 + 0.4*x2 + 1.7", 2, 2);
    const auto s = poly_linear_split(p);
    CHECK(s.linear == std::vector<double>{-0.5, 0.4});
    CHECK(s.constant == 1.7);
    CHECK(to_string(s.nonlinear) == "0.6*x1^2");

    const auto c = poly_linear_split(Polynomial::constant(3, 2, 5.));
    CHECK(c.linear == std::vector<double>(3, 0.));
    CHECK(c.constant == 5.);
    CHECK(c.nonlinear.is_zero());

    nnreach::test::Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        const auto q = random_poly(rng, 4, 5, 15, 5);
        const auto sp = poly_linear_split(q);
        std::vector<Term> terms(sp.nonlinear.terms().begin(), sp.nonlinear.terms().end());
        terms.push_back(Term{Monomial{}, sp.constant});
        for (std::size_t k = 0; k < 4; ++k) {
            terms.push_back(Term{Monomial::variable(k), sp.linear[k]});
        }
        CHECK(Polynomial::from_terms(4, 5, terms) == q);
        for (const auto &t : sp.nonlinear.terms()) {
            CHECK(t.mono.degree() >= 2);
        }
    }
}

TEST_CASE("poly_affine_substitute")
{
    // p(x) = x1^2 with x1 <- 1 + 2 x1 gives 4x1^2 + 4x1 + 1.
    const auto p = parse_polynomial("x1^2", 1, 2);
    const std::vector<double> shift{1.};
    const std::vector<double> scale{2.};
    const auto r = poly_affine_substitute(p, shift, scale);
    CHECK(to_string(r.poly) == "4*x1^2 + 4*x1 + 1");
    CHECK(r.spill == Interval(0.));

    nnreach::test::Rng rng(16);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2;
        const auto q = random_poly(rng, n, 4, 10, 4);
        std::vector<double> sh(n);
        std::vector<double> sc(n);
        for (std::size_t k = 0; k < n; ++k) {
            sh[k] = rng.uniform(-1., 1.);
            sc[k] = rng.uniform(0., 1.);
        }
        const auto sub = poly_affine_substitute(q, sh, sc);
        const auto dq = to_dense(q);
        const auto ds = to_dense(sub.poly);
        for (int s = 0; s < 200; ++s) {
            const auto pt = rng.unit_point(n);
            std::vector<rational> mapped(n);
            rational exact(0);
            for (const auto &[e, c] : dq) {
                rational m = c;
                for (std::size_t k = 0; k < n; ++k) {
                    const rational v = to_rational(sh[k]) + to_rational(sc[k]) * to_rational(pt[k]);
                    for (unsigned j = 0; j < e[k]; ++j) {
                        m *= v;
                    }
                }
                exact += m;
            }
            REQUIRE(encloses(sub.spill, exact - dense_eval(ds, pt)));
        }
    }
}

TEST_CASE("text form round-trips")
{
    CHECK(to_string(Polynomial(2, 2)) == "0");
    CHECK(to_string(parse_polynomial("-x1*x2 + 0.1", 2, 2)) == "-x1*x2 + 0.1");
    const std::vector<std::string> names{"x", "y"};
    CHECK(to_string(parse_polynomial("2*x1*x2^3 - x2", 2, 4), names) == "2*x*y^3 - y");

    nnreach::test::Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto q = random_poly(rng, 5, 6, 12, 6);
        const auto text = to_string(q);
        const auto back = parse_polynomial(text, 5, 6);
        CHECK(back == q);
        CHECK(to_string(back) == text);
    }

    CHECK_THROWS_AS(parse_polynomial("x1 +", 1, 2), parse_error);
    CHECK_THROWS_AS(parse_polynomial("x3", 2, 2), parse_error);
    CHECK_THROWS_AS(parse_polynomial("x1^3", 1, 2), dimension_error);
}
