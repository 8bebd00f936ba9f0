#include <nnreach/polynomial.hpp>

#include <algorithm>
#include <bit>
#include <cassert>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include <nnreach/exceptions.hpp>

#include "rounding.hpp"

namespace nnreach
{

// Internal constructor access for already-canonical term lists.
class PolyBuilder
{
public:
    static Polynomial make(std::size_t nvars, unsigned max_order, std::vector<Term> sorted_terms)
    {
        Polynomial p(nvars, max_order);
        p.m_terms = std::move(sorted_terms);
        return p;
    }
};

namespace
{

void check_nvars(std::size_t nvars)
{
    if (nvars > max_vars) {
        throw dimension_error(fmt::format("polynomials support at most {} variables, got {}", max_vars, nvars));
    }
}

void check_order(unsigned order)
{
    if (order > max_order) {
        throw dimension_error(fmt::format("polynomial order is limited to {}, got {}", max_order, order));
    }
}

void check_same_vars(const Polynomial &a, const Polynomial &b)
{
    if (a.nvars() != b.nvars()) {
        throw dimension_error(fmt::format("polynomial variable count mismatch: {} vs {}", a.nvars(), b.nvars()));
    }
}

// Open-addressing accumulator keyed by monomial. Summation order for a
// given key is insertion order, so results are deterministic.
class AccumTable
{
public:
    explicit AccumTable(std::size_t expected)
    {
        std::size_t cap = 16;
        while (cap < 2 * expected) {
            cap <<= 1U;
        }
        m_keys.assign(cap, empty);
        m_vals.assign(cap, 0.);
        m_mask = cap - 1;
    }

    void add(std::uint64_t key, double v, detail::RoundingBound &rb)
    {
        if (2 * (m_size + 1) > m_keys.size()) {
            grow();
        }
        std::size_t i = slot(key);
        while (true) {
            if (m_keys[i] == key) {
                m_vals[i] = rb.add(m_vals[i], v);
                return;
            }
            if (m_keys[i] == empty) {
                m_keys[i] = key;
                m_vals[i] = v;
                ++m_size;
                return;
            }
            i = (i + 1) & m_mask;
        }
    }

    std::vector<Term> sorted_terms() const
    {
        std::vector<std::pair<std::uint64_t, double>> kv;
        kv.reserve(m_size);
        for (std::size_t i = 0; i < m_keys.size(); ++i) {
            if (m_keys[i] != empty && m_vals[i] != 0) {
                kv.emplace_back(m_keys[i], m_vals[i]);
            }
        }
        std::sort(kv.begin(), kv.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
        std::vector<Term> out;
        out.reserve(kv.size());
        for (const auto &[k, v] : kv) {
            out.push_back(Term{Monomial::from_key(k), v});
        }
        return out;
    }

private:
    static constexpr std::uint64_t empty = std::numeric_limits<std::uint64_t>::max();

    [[nodiscard]] std::size_t slot(std::uint64_t key) const noexcept
    {
        return static_cast<std::size_t>((key * 0x9E3779B97F4A7C15ULL) >> 20U) & m_mask;
    }

    void grow()
    {
        auto keys = std::move(m_keys);
        auto vals = std::move(m_vals);
        m_keys.assign(keys.size() * 2, empty);
        m_vals.assign(keys.size() * 2, 0.);
        m_mask = m_keys.size() - 1;
        for (std::size_t j = 0; j < keys.size(); ++j) {
            if (keys[j] == empty) {
                continue;
            }
            std::size_t i = slot(keys[j]);
            while (m_keys[i] != empty) {
                i = (i + 1) & m_mask;
            }
            m_keys[i] = keys[j];
            m_vals[i] = vals[j];
        }
    }

    std::vector<std::uint64_t> m_keys;
    std::vector<double> m_vals;
    std::size_t m_mask = 0;
    std::size_t m_size = 0;
};

} // namespace

Monomial Monomial::from_key(std::uint64_t key) noexcept
{
    Monomial m;
    m.m_key = key;
    return m;
}

Monomial Monomial::from_exponents(std::span<const unsigned> exps)
{
    check_nvars(exps.size());
    std::uint64_t key = 0;
    unsigned deg = 0;
    for (std::size_t k = 0; k < exps.size(); ++k) {
        if (exps[k] > max_order) {
            throw dimension_error(fmt::format("exponent {} exceeds the order limit {}", exps[k], max_order));
        }
        deg += exps[k];
        key |= static_cast<std::uint64_t>(exps[k]) << field_shift(k);
    }
    check_order(deg);
    key |= static_cast<std::uint64_t>(deg) << degree_shift;
    return from_key(key);
}

Monomial Monomial::variable(std::size_t k, unsigned power)
{
    if (k >= max_vars) {
        throw dimension_error(fmt::format("variable index {} exceeds the limit {}", k, max_vars));
    }
    check_order(power);
    return from_key((static_cast<std::uint64_t>(power) << degree_shift)
                    | (static_cast<std::uint64_t>(power) << field_shift(k)));
}

std::size_t Monomial::linear_index() const noexcept
{
    assert(degree() == 1);
    const auto low = m_key & ((std::uint64_t{1} << degree_shift) - 1);
    return static_cast<std::size_t>((52 - std::countr_zero(low)) / 4);
}

Polynomial::Polynomial(std::size_t nvars, unsigned max_order) : m_nvars(nvars), m_max_order(max_order)
{
    check_nvars(nvars);
    check_order(max_order);
}

Polynomial Polynomial::constant(std::size_t nvars, unsigned max_order, double c)
{
    Polynomial p(nvars, max_order);
    if (c != 0) {
        p.m_terms.push_back(Term{Monomial{}, c});
    }
    return p;
}

Polynomial Polynomial::variable(std::size_t nvars, unsigned max_order, std::size_t k, double coeff)
{
    Polynomial p(nvars, max_order);
    if (k >= nvars) {
        throw dimension_error(fmt::format("variable index {} out of range for {} variables", k, nvars));
    }
    if (max_order < 1) {
        throw dimension_error("a polynomial of order 0 cannot hold a variable");
    }
    if (coeff != 0) {
        p.m_terms.push_back(Term{Monomial::variable(k), coeff});
    }
    return p;
}

Polynomial Polynomial::from_terms(std::size_t nvars, unsigned max_order, std::vector<Term> terms)
{
    Polynomial p(nvars, max_order);
    for (const auto &t : terms) {
        if (t.mono.degree() > max_order) {
            throw dimension_error(
                fmt::format("monomial of degree {} exceeds max order {}", t.mono.degree(), max_order));
        }
        for (std::size_t k = nvars; k < max_vars; ++k) {
            if (t.mono.exponent(k) != 0) {
                throw dimension_error(fmt::format("monomial uses variable {} beyond nvars = {}", k + 1, nvars));
            }
        }
        if (!std::isfinite(t.coeff)) {
            throw dimension_error("non-finite polynomial coefficient");
        }
    }
    std::stable_sort(terms.begin(), terms.end(), [](const Term &x, const Term &y) { return x.mono < y.mono; });
    std::vector<Term> out;
    out.reserve(terms.size());
    for (const auto &t : terms) {
        if (!out.empty() && out.back().mono == t.mono) {
            out.back().coeff += t.coeff;
        } else {
            out.push_back(t);
        }
    }
    std::erase_if(out, [](const Term &t) { return t.coeff == 0; });
    p.m_terms = std::move(out);
    return p;
}

unsigned Polynomial::degree() const noexcept
{
    return m_terms.empty() ? 0U : m_terms.back().mono.degree();
}

double Polynomial::coeff(const Monomial &m) const noexcept
{
    const auto it = std::lower_bound(m_terms.begin(), m_terms.end(), m,
                                     [](const Term &t, const Monomial &mm) { return t.mono < mm; });
    return (it != m_terms.end() && it->mono == m) ? it->coeff : 0.;
}

double Polynomial::constant_term() const noexcept
{
    return (!m_terms.empty() && m_terms.front().mono.degree() == 0) ? m_terms.front().coeff : 0.;
}

double Polynomial::magnitude() const noexcept
{
    detail::UpperSum s;
    for (const auto &t : m_terms) {
        s.add(std::abs(t.coeff));
    }
    return s.bound();
}

double Polynomial::eval(std::span<const double> x) const
{
    if (x.size() != m_nvars) {
        throw dimension_error(fmt::format("evaluation point has dimension {}, polynomial has {} variables", x.size(),
                                          m_nvars));
    }
    double acc = 0;
    for (const auto &t : m_terms) {
        double v = t.coeff;
        for (std::size_t k = 0; k < m_nvars; ++k) {
            for (unsigned e = t.mono.exponent(k); e > 0; --e) {
                v *= x[k];
            }
        }
        acc += v;
    }
    return acc;
}

Polynomial Polynomial::with_max_order(unsigned order) const
{
    check_order(order);
    if (degree() > order) {
        throw dimension_error(fmt::format("cannot lower max order to {} below degree {}", order, degree()));
    }
    return PolyBuilder::make(m_nvars, order, m_terms);
}

bool operator==(const Polynomial &a, const Polynomial &b)
{
    if (a.m_nvars != b.m_nvars || a.m_terms.size() != b.m_terms.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.m_terms.size(); ++i) {
        if (a.m_terms[i].mono != b.m_terms[i].mono || a.m_terms[i].coeff != b.m_terms[i].coeff) {
            return false;
        }
    }
    return true;
}

namespace
{

// Sorted merge of a + sign * b.
BoundedPoly merge_add(const Polynomial &a, const Polynomial &b, double sign)
{
    check_same_vars(a, b);
    detail::RoundingBound rb;
    const auto ta = a.terms();
    const auto tb = b.terms();
    std::vector<Term> out;
    out.reserve(ta.size() + tb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ta.size() || j < tb.size()) {
        if (j == tb.size() || (i < ta.size() && ta[i].mono < tb[j].mono)) {
            out.push_back(ta[i++]);
        } else if (i == ta.size() || tb[j].mono < ta[i].mono) {
            out.push_back(Term{tb[j].mono, sign * tb[j].coeff});
            ++j;
        } else {
            const double s = rb.add(ta[i].coeff, sign * tb[j].coeff);
            if (s != 0) {
                out.push_back(Term{ta[i].mono, s});
            }
            ++i;
            ++j;
        }
    }
    return {PolyBuilder::make(a.nvars(), std::max(a.max_order(), b.max_order()), std::move(out)),
            Interval::symmetric(rb.bound())};
}

} // namespace

Polynomial poly_add(const Polynomial &a, const Polynomial &b)
{
    return merge_add(a, b, 1.).poly;
}

BoundedPoly poly_add_bounded(const Polynomial &a, const Polynomial &b)
{
    return merge_add(a, b, 1.);
}

BoundedPoly poly_sub_bounded(const Polynomial &a, const Polynomial &b)
{
    return merge_add(a, b, -1.);
}

BoundedPoly poly_scale_bounded(const Polynomial &a, double s)
{
    if (!std::isfinite(s)) {
        throw dimension_error("non-finite polynomial scale factor");
    }
    detail::RoundingBound rb;
    std::vector<Term> out;
    out.reserve(a.size());
    for (const auto &t : a.terms()) {
        const double c = rb.mul(t.coeff, s);
        if (c != 0) {
            out.push_back(Term{t.mono, c});
        }
    }
    return {PolyBuilder::make(a.nvars(), a.max_order(), std::move(out)), Interval::symmetric(rb.bound())};
}

Polynomial operator-(const Polynomial &a)
{
    std::vector<Term> out(a.terms().begin(), a.terms().end());
    for (auto &t : out) {
        t.coeff = -t.coeff;
    }
    return PolyBuilder::make(a.nvars(), a.max_order(), std::move(out));
}

BoundedPoly poly_mul_trunc(const Polynomial &a, const Polynomial &b, unsigned order)
{
    check_same_vars(a, b);
    check_order(order);

    const auto ta = a.terms();
    const auto tb = b.terms();

    // suffix[j] = sum_{l >= j} |b_l|; b is sorted by degree, so once a
    // degree overflows every later term of b overflows too.
    std::vector<double> suffix(tb.size() + 1, 0.);
    for (std::size_t j = tb.size(); j-- > 0;) {
        suffix[j] = suffix[j + 1] + std::abs(tb[j].coeff);
    }

    detail::RoundingBound rb;
    detail::UpperSum tail;
    AccumTable acc(std::min<std::size_t>(ta.size() * tb.size(), 1U << 16U));
    for (const auto &x : ta) {
        const unsigned room = order >= x.mono.degree() ? order - x.mono.degree() : 0;
        std::size_t j = 0;
        if (order >= x.mono.degree()) {
            for (; j < tb.size() && tb[j].mono.degree() <= room; ++j) {
                acc.add((x.mono * tb[j].mono).key(), rb.mul(x.coeff, tb[j].coeff), rb);
            }
        }
        if (j < tb.size()) {
            tail.add(std::abs(x.coeff) * suffix[j], tb.size() - j + 1);
        }
    }

    const double spill = detail::add_up(tail.bound(), rb.bound());
    return {PolyBuilder::make(a.nvars(), order, acc.sorted_terms()), Interval::symmetric(spill)};
}

BoundedPoly poly_truncate(const Polynomial &a, unsigned order)
{
    check_order(order);
    std::vector<Term> kept;
    detail::UpperSum tail;
    for (const auto &t : a.terms()) {
        if (t.mono.degree() <= order) {
            kept.push_back(t);
        } else {
            tail.add(std::abs(t.coeff));
        }
    }
    return {PolyBuilder::make(a.nvars(), std::min(order, a.max_order()), std::move(kept)),
            Interval::symmetric(tail.bound())};
}

BoundedPoly poly_sweep(const Polynomial &a, double threshold)
{
    std::vector<Term> kept;
    detail::UpperSum tail;
    for (const auto &t : a.terms()) {
        if (std::abs(t.coeff) >= threshold) {
            kept.push_back(t);
        } else {
            tail.add(std::abs(t.coeff));
        }
    }
    return {PolyBuilder::make(a.nvars(), a.max_order(), std::move(kept)), Interval::symmetric(tail.bound())};
}

Interval poly_range_unit(const Polynomial &p)
{
    Interval acc(0.);
    for (const auto &t : p.terms()) {
        if (t.mono.degree() == 0) {
            acc += Interval(t.coeff);
        } else if (t.mono.all_even()) {
            acc += Interval(std::min(0., t.coeff), std::max(0., t.coeff));
        } else {
            acc += Interval::symmetric(std::abs(t.coeff));
        }
    }
    return acc;
}

Interval poly_eval_box(const Polynomial &p, const Box &dom)
{
    if (dom.size() != p.nvars()) {
        throw dimension_error(
            fmt::format("evaluation box has dimension {}, polynomial has {} variables", dom.size(), p.nvars()));
    }
    if (dom.is_unit()) {
        return poly_range_unit(p);
    }
    const unsigned deg = p.degree();
    // powers[k][e] encloses dom[k]^e.
    std::vector<std::vector<Interval>> powers(p.nvars());
    for (std::size_t k = 0; k < p.nvars(); ++k) {
        powers[k].reserve(deg + 1);
        for (unsigned e = 0; e <= deg; ++e) {
            powers[k].push_back(pow(dom[k], e));
        }
    }
    Interval acc(0.);
    for (const auto &t : p.terms()) {
        Interval v(t.coeff);
        for (std::size_t k = 0; k < p.nvars(); ++k) {
            if (const auto e = t.mono.exponent(k); e > 0) {
                v = v * powers[k][e];
            }
        }
        acc += v;
    }
    return acc;
}

LinearSplit poly_linear_split(const Polynomial &p)
{
    LinearSplit out;
    out.linear.assign(p.nvars(), 0.);
    std::vector<Term> nl;
    for (const auto &t : p.terms()) {
        switch (t.mono.degree()) {
            case 0:
                out.constant = t.coeff;
                break;
            case 1:
                out.linear[t.mono.linear_index()] = t.coeff;
                break;
            default:
                nl.push_back(t);
        }
    }
    out.nonlinear = PolyBuilder::make(p.nvars(), p.max_order(), std::move(nl));
    return out;
}

BoundedPoly poly_affine_substitute(const Polynomial &p, std::span<const double> shift, std::span<const double> scale)
{
    const auto n = p.nvars();
    if (shift.size() != n || scale.size() != n) {
        throw dimension_error("affine substitution needs one shift and one scale per variable");
    }
    const unsigned ord = p.max_order();

    // Cache of (shift_k + scale_k * x_k)^e.
    std::vector<std::vector<BoundedPoly>> factor(n);
    for (std::size_t k = 0; k < n; ++k) {
        Polynomial lin = Polynomial::constant(n, ord, shift[k]);
        if (ord >= 1) {
            lin = poly_add(lin, Polynomial::variable(n, ord, k, scale[k]));
        }
        factor[k].push_back({Polynomial::constant(n, ord, 1.), Interval(0.)});
        factor[k].push_back({lin, Interval(0.)});
    }

    Polynomial acc(n, ord);
    Interval err(0.);
    for (const auto &t : p.terms()) {
        BoundedPoly mono{Polynomial::constant(n, ord, t.coeff), Interval(0.)};
        for (std::size_t k = 0; k < n; ++k) {
            const auto e = t.mono.exponent(k);
            if (e == 0) {
                continue;
            }
            while (factor[k].size() <= e) {
                const auto &prev = factor[k].back();
                auto next = poly_mul_trunc(prev.poly, factor[k][1].poly, ord);
                // prev carries its own error; |lin| <= mag over the unit box.
                const Interval lin_rng = poly_range_unit(factor[k][1].poly);
                next.spill = next.spill + prev.spill * lin_rng;
                factor[k].push_back(std::move(next));
            }
            const auto &f = factor[k][e];
            auto prod = poly_mul_trunc(mono.poly, f.poly, ord);
            prod.spill = prod.spill + mono.spill * poly_range_unit(f.poly) + poly_range_unit(mono.poly) * f.spill
                         + mono.spill * f.spill;
            mono = std::move(prod);
        }
        auto sum = poly_add_bounded(acc, mono.poly);
        acc = std::move(sum.poly);
        err = err + sum.spill + mono.spill;
    }
    return {std::move(acc), err};
}

std::string to_string(const Polynomial &p, std::span<const std::string> names)
{
    if (!names.empty() && names.size() != p.nvars()) {
        throw dimension_error("variable name list does not match the polynomial's variable count");
    }
    if (p.is_zero()) {
        return "0";
    }
    std::string out;
    const auto terms = p.terms();
    for (std::size_t i = terms.size(); i-- > 0;) {
        const auto &t = terms[i];
        const bool first = (i + 1 == terms.size());
        const double c = t.coeff;
        const double ac = std::abs(c);
        if (first) {
            out += c < 0 ? "-" : "";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        std::string mono;
        for (std::size_t k = 0; k < p.nvars(); ++k) {
            const auto e = t.mono.exponent(k);
            if (e == 0) {
                continue;
            }
            if (!mono.empty()) {
                mono += '*';
            }
            mono += names.empty() ? fmt::format("x{}", k + 1) : names[k];
            if (e > 1) {
                mono += fmt::format("^{}", e);
            }
        }
        if (mono.empty()) {
            out += fmt::format("{}", ac);
        } else if (ac == 1) {
            out += mono;
        } else {
            out += fmt::format("{}*{}", ac, mono);
        }
    }
    return out;
}

namespace
{

class PolyScanner
{
public:
    explicit PolyScanner(std::string_view s) : m_s(s) {}

    void skip_ws()
    {
        while (m_pos < m_s.size() && m_s[m_pos] == ' ') {
            ++m_pos;
        }
    }
    [[nodiscard]] bool done()
    {
        skip_ws();
        return m_pos == m_s.size();
    }
    [[nodiscard]] char peek()
    {
        skip_ws();
        return m_pos < m_s.size() ? m_s[m_pos] : '\0';
    }
    bool accept(char c)
    {
        if (peek() == c) {
            ++m_pos;
            return true;
        }
        return false;
    }
    double number()
    {
        skip_ws();
        double v = 0;
        const auto *first = m_s.data() + m_pos;
        const auto [ptr, ec] = std::from_chars(first, m_s.data() + m_s.size(), v);
        if (ec != std::errc{}) {
            fail("expected a number");
        }
        m_pos += static_cast<std::size_t>(ptr - first);
        return v;
    }
    std::size_t variable(std::size_t nvars)
    {
        if (peek() != 'x') {
            fail("expected a variable x<k>");
        }
        ++m_pos;
        std::size_t k = 0;
        const auto *first = m_s.data() + m_pos;
        const auto [ptr, ec] = std::from_chars(first, m_s.data() + m_s.size(), k);
        if (ec != std::errc{} || k == 0 || k > nvars) {
            fail("invalid variable index");
        }
        m_pos += static_cast<std::size_t>(ptr - first);
        return k - 1;
    }
    unsigned exponent()
    {
        skip_ws();
        unsigned e = 0;
        const auto *first = m_s.data() + m_pos;
        const auto [ptr, ec] = std::from_chars(first, m_s.data() + m_s.size(), e);
        if (ec != std::errc{}) {
            fail("expected an integer exponent");
        }
        m_pos += static_cast<std::size_t>(ptr - first);
        return e;
    }
    [[noreturn]] void fail(const std::string &what) const
    {
        throw parse_error(fmt::format("polynomial parse error at column {}: {}", m_pos + 1, what), 1, m_pos + 1);
    }

private:
    std::string_view m_s;
    std::size_t m_pos = 0;
};

} // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t nvars, unsigned max_order)
{
    PolyScanner sc(text);
    std::vector<Term> terms;
    bool first = true;
    while (!sc.done()) {
        double sign = 1;
        if (sc.accept('-')) {
            sign = -1;
        } else if (!sc.accept('+') && !first) {
            sc.fail("expected '+' or '-'");
        }
        first = false;
        double coeff = 1;
        std::vector<unsigned> exps(nvars, 0);
        bool need_var = true;
        if (sc.peek() != 'x') {
            coeff = sc.number();
            need_var = sc.accept('*');
        }
        while (need_var) {
            const auto k = sc.variable(nvars);
            exps[k] += sc.accept('^') ? sc.exponent() : 1U;
            need_var = sc.accept('*');
        }
        terms.push_back(Term{Monomial::from_exponents(exps), sign * coeff});
    }
    return Polynomial::from_terms(nvars, max_order, std::move(terms));
}

} // namespace nnreach
