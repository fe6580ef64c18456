#pragma once

#include <string>
#include <vector>

#include "operator_file.hpp"

namespace levi3 {

/// Built-in operators with their declared verdicts.
inline const std::vector<std::string>& battery_sources() {
    static const std::vector<std::string> src = {
        R"op(# d_t^3 - d_t d_x^2
[operator]
name = strict_const
order = 3
dimension = 1
T = 1
[coefficients]
a[1, (2)] = "-1"
[expect]
verdict.I1 = logarithmic
verdict.I2 = logarithmic
verdict.I3 = logarithmic
verdict.I4 = logarithmic
verdict.IMcl = logarithmic
verdict.INcl = logarithmic
case = I
pointwise = holds
const_coeff = bounded
growth = polynomial
regularized_gaps = stable
oscillation = constant
energy = stable
)op",
        R"op(# d_t^3 + cos(t) d_t^2
[operator]
name = triple_pure
order = 3
dimension = 1
T = 1
[coefficients]
a[2, (0)] = "cos(t)"
[expect]
verdict.I1 = logarithmic
verdict.I2 = logarithmic
verdict.I3 = logarithmic
verdict.I4 = logarithmic
verdict.IMcl = logarithmic
verdict.INcl = logarithmic
case = III
pointwise = holds
growth = polynomial
regularized_gaps = stable
oscillation = constant
energy = stable
)op",
        R"op(# d_t^3 + d_x
[operator]
name = triple_plus_dx
order = 3
dimension = 1
T = 1
[coefficients]
a[0, (1)] = "1"
[expect]
verdict.INcl = violated
case = III
pointwise = fails
const_coeff = unbounded
growth = exp_power
kappa = 0.333333
regularized_gaps = stable
oscillation = constant
pointwise.triple_root_Ncheck_vanishing = fails
)op",
        R"op(# d_t^3 - d_x^2
[operator]
name = triple_plus_dxx
order = 3
dimension = 1
T = 1
[coefficients]
a[0, (2)] = "-1"
[expect]
verdict.IMcl = violated
case = III
pointwise = fails
const_coeff = unbounded
growth = exp_power
kappa = 0.666667
regularized_gaps = stable
oscillation = constant
pointwise.triple_root_Mcheck_vanishing = fails
)op",
        R"op(# d_t^3 - t^2 d_t d_x^2 + t d_x^2
[operator]
name = oleinik_double_compat
order = 3
dimension = 1
T = 1
[coefficients]
a[1, (2)] = "-t^2"
a[0, (2)] = "t"
[expect]
verdict.I1 = logarithmic
verdict.I2 = logarithmic
verdict.I3 = logarithmic
verdict.I4 = logarithmic
verdict.IMcl = logarithmic
verdict.INcl = logarithmic
case = I
pointwise = holds
regularized_gaps = stable
oscillation = constant
pointwise.second_order_root_gap_bound_1d = holds
growth = polynomial
energy = stable
)op",
        R"op(# d_t^3 - t^2 d_t d_x^2 + (1 - t) d_x^2
[operator]
name = oleinik_double_violating
order = 3
dimension = 1
T = 1
[coefficients]
a[1, (2)] = "-t^2"
a[0, (2)] = "1 - t"
[expect]
verdict.IMcl = violated
case = I
pointwise = fails
pointwise.second_order_root_gap_bound_1d = fails
regularized_gaps = stable
oscillation = constant
pointwise.second_order_discriminant_bound = fails
growth = exp_power
)op",
        R"op(# d_t^3 - sin(t)^2 d_t d_x^2
[operator]
name = sin_gap
order = 3
dimension = 1
T = 3
[coefficients]
a[1, (2)] = "-sin(t)^2"
[expect]
case = I
verdict.I1 = logarithmic
verdict.I2 = logarithmic
verdict.I3 = logarithmic
verdict.I4 = logarithmic
verdict.IMcl = logarithmic
verdict.INcl = logarithmic
regularized_gaps = stable
oscillation = constant
pointwise = holds
growth = polynomial
energy = stable
)op",
        R"op(# d_t^3 - d_t d_x^2 + d_x^2
[operator]
name = const_coeff_wellposed
order = 3
dimension = 1
T = 1
[coefficients]
a[1, (2)] = "-1"
a[0, (2)] = "1"
[expect]
case = I
const_coeff = bounded
growth = polynomial
verdict.I1 = logarithmic
verdict.I2 = logarithmic
verdict.I3 = logarithmic
verdict.I4 = logarithmic
verdict.IMcl = logarithmic
verdict.INcl = logarithmic
regularized_gaps = stable
oscillation = constant
pointwise = holds
energy = stable
)op",
        R"op(# d_t^2 - t^2 d_x^2 + d_x
[operator]
name = oleinik2_compat
order = 2
dimension = 1
T = 1
[coefficients]
a[0, (2)] = "-t^2"
a[0, (1)] = "1"
[expect]
second_order.Ia = logarithmic
second_order.Ib = logarithmic
)op",
        R"op(# d_t^2 - t^4 d_x^2 + d_x
[operator]
name = oleinik2_violating
order = 2
dimension = 1
T = 1
[coefficients]
a[0, (2)] = "-t^4"
a[0, (1)] = "1"
[expect]
second_order.Ia = logarithmic
second_order.Ib = violated
)op",
        R"op(# d_t^2 - d_x^2
[operator]
name = wave
order = 2
dimension = 1
T = 1
[coefficients]
a[0, (2)] = "-1"
[expect]
second_order.Ia = logarithmic
second_order.Ib = logarithmic
)op",
    };
    return src;
}

inline std::vector<OperatorSpec> battery() {
    std::vector<OperatorSpec> out;
    for (auto& s : battery_sources()) out.push_back(parse_operator_text(s));
    return out;
}

inline OperatorSpec battery_member(const std::string& name) {
    for (auto& s : battery())
        if (s.op.name == name) return s;
    throw ConfigError("no battery operator named '" + name + "'");
}

}  // namespace levi3
