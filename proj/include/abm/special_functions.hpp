#pragma once

#include <cstdint>

namespace abm {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and
/// x in [0, 1], evaluated by Lentz's continued fraction. Absolute accuracy
/// better than 1e-10 over the parameter ranges used by the t-test.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a Student-t statistic with `dof` degrees of freedom:
/// P(|T| >= |t|) = I_x(dof/2, 1/2) with x = dof / (dof + t^2).
double student_t_two_sided_p(double t, std::int64_t dof);

}  // namespace abm
