#ifndef NNREACH_SIM_DETAIL_HPP
#define NNREACH_SIM_DETAIL_HPP

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/numeric/odeint.hpp>

#include <nnreach/exceptions.hpp>
#include <nnreach/flowpipe.hpp>

#include "expr_eval.hpp"

namespace nnreach::detail
{
using real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                           boost::multiprecision::et_off>;
} // namespace nnreach::detail

template <>
struct boost::numeric::odeint::detail::extract_value_type<nnreach::detail::real, void> {
    using type = nnreach::detail::real;
};

namespace nnreach::detail
{

using state_type = std::vector<real>;

// Reference integration: RKF 7(8) at local tolerance 1e-12 with a 50-digit
// state, so arithmetic roundoff stays far below the tolerance.
inline auto make_stepper()
{
    namespace ode = boost::numeric::odeint;
    return ode::make_controlled(real(1e-12), real(1e-12),
                                ode::runge_kutta_fehlberg78<state_type, real, state_type, real>());
}

inline auto system_of(const Dynamics &f)
{
    return [&f](const state_type &x, state_type &dx, real) {
        for (std::size_t i = 0; i < dx.size(); ++i) {
            dx[i] = eval_expr<real>(*f.rhs()[i], x);
        }
    };
}

// Rounds to nearest, so a value inside an interval with double endpoints
// stays inside.
inline state_type widen(const std::vector<double> &x0)
{
    return state_type(x0.begin(), x0.end());
}

inline std::vector<double> narrow(const state_type &x)
{
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto &v : x) {
        const double d = v.convert_to<double>();
        if (!std::isfinite(d)) {
            throw integration_error("simulation diverged");
        }
        out.push_back(d);
    }
    return out;
}

} // namespace nnreach::detail

#endif
