#pragma once

#include "cqcd/models.hpp"

namespace cqcd {

/// Delta1(x) = E[Z - x | Z >= x] for Z ~ N(0, 1). Positive and non-increasing.
double delta1(double x);

/// Delta2(x) = Delta1(-x), the magnitude of E[Z - x | Z <= x].
double delta2(double x);

/// J(x, theta) = E[W^2 - x^2 | |W| >= x] for W ~ N(theta, 1), x >= 0.
/// Even in theta; J(0, theta) = 1 + theta^2 and J -> 2 as x -> inf.
double j_mapping(double x, double theta);

/// E[W^2 - x^2 | |W| <= x] for W ~ N(theta, 1). Nonpositive, even in theta,
/// ~ -2x^2/3 near x = 0. Throws DomainError for x < 0.
double g2_mapping(double x, double theta);

/// How a report entry was obtained.
enum class ExtremumMethod { ClosedForm, Monotone, Grid };

const char* to_string(ExtremumMethod method);

/// sup_{y >= 0} E[Y - y | Y >= y] and inf_{y <= 0} E[Y - y | Y <= y] for the
/// LLR Y under hyp.
struct OvershootReport {
  double sup_upper;
  double inf_lower;
  Hypothesis hyp;
  ExtremumMethod method_upper;
  ExtremumMethod method_lower;
};

/// Exact conditional excesses E[Y - y | Y >= y] and E[Y - y | Y <= y].
/// Throw DomainError where the conditioning event has probability zero.
double upper_conditional_excess(const ChangeModel& model, Hypothesis hyp, double y);
double lower_conditional_excess(const ChangeModel& model, Hypothesis hyp, double y);

OvershootReport gaussian_overshoot_report(const GaussianModel& model, Hypothesis hyp);

/// Upper entry for lambda_g > lambda is the bound 2(lambda_g - lambda)/mu_r
/// (or the exact supremum if that is larger).
OvershootReport exponential_overshoot_report(const ExponentialModel& model, Hypothesis hyp);

OvershootReport overshoot_report(const ChangeModel& model, Hypothesis hyp);

}  // namespace cqcd
