#include "cqcd/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cqcd/errors.hpp"
#include "cqcd/special_functions.hpp"

namespace cqcd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string describe(const char* what, double a, double b) {
  std::ostringstream msg;
  msg.precision(17);
  msg << what << " (" << a << ", " << b << ")";
  return msg.str();
}

}  // namespace

GaussianModel::GaussianModel(double mu, double sigma2) : mu_(mu), sigma2_(sigma2) {
  if (!std::isfinite(mu) || !std::isfinite(sigma2) || sigma2 < 0.0) {
    throw ParameterError(describe("GaussianModel requires finite mu and sigma2 >= 0, got", mu, sigma2));
  }
  if (mu == 0.0 && sigma2 == 0.0) {
    throw ParameterError("GaussianModel: (mu, sigma2) = (0, 0) makes pre- and post-change laws identical");
  }
}

ExponentialModel::ExponentialModel(double lambda_pre, double lambda_post)
    : lambda_pre_(lambda_pre), lambda_post_(lambda_post) {
  if (!(lambda_pre > 0.0) || !(lambda_post > 0.0) || !std::isfinite(lambda_pre) ||
      !std::isfinite(lambda_post)) {
    throw ParameterError(describe("ExponentialModel requires positive finite rates, got", lambda_pre, lambda_post));
  }
  if (lambda_pre == lambda_post) {
    throw ParameterError(describe("ExponentialModel requires distinct rates, got", lambda_pre, lambda_post));
  }
}

const char* to_string(Hypothesis hyp) { return hyp == Hypothesis::Pre ? "pre" : "post"; }

double sample_observation(const ChangeModel& model, Hypothesis hyp, RandomStream& rng) {
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    if (hyp == Hypothesis::Pre) return rng.normal();
    return g->mu() + std::sqrt(1.0 + g->sigma2()) * rng.normal();
  }
  const auto& e = std::get<ExponentialModel>(model);
  return rng.exponential(hyp == Hypothesis::Pre ? e.lambda_pre() : e.lambda_post());
}

double llr(const ChangeModel& model, double x) {
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    const double s2 = 1.0 + g->sigma2();
    const double d = x - g->mu();
    return -0.5 * std::log1p(g->sigma2()) - d * d / (2.0 * s2) + 0.5 * x * x;
  }
  const auto& e = std::get<ExponentialModel>(model);
  if (x < 0.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "llr: exponential observation must be >= 0, got " << x;
    throw DomainError(msg.str());
  }
  return std::log(e.lambda_post() / e.lambda_pre()) + (e.lambda_pre() - e.lambda_post()) * x;
}

KlDivergences kl_divergences(const ChangeModel& model) {
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    const double mu2 = g->mu() * g->mu();
    const double s2 = 1.0 + g->sigma2();
    const double t = g->sigma2() / s2;
    return {0.5 * mu2 + 0.5 * x_minus_log1p(g->sigma2()), 0.5 * mu2 / s2 + 0.5 * x_minus_log1p(-t)};
  }
  const auto& e = std::get<ExponentialModel>(model);
  const double lp = e.lambda_pre();
  const double lg = e.lambda_post();
  // log(lambda/lambda_g) + (lambda_g - lambda)/lambda = r - log1p(r), r = (lambda_g - lambda)/lambda
  return {x_minus_log1p((lp - lg) / lg), x_minus_log1p((lg - lp) / lp)};
}

GaussianLlrConstants gaussian_llr_constants(const GaussianModel& model) {
  if (!(model.sigma2() > 0.0)) throw DomainError("gaussian_llr_constants: requires sigma2 > 0");
  const double s = model.sigma2();
  return {2.0 * (1.0 + s) / s, model.mu() / s, -0.5 * model.mu() * model.mu() / s - 0.5 * std::log1p(s)};
}

double gaussian_chi(const GaussianModel& model, Hypothesis hyp) {
  return hyp == Hypothesis::Post ? 1.0 + model.sigma2() : 1.0;
}

double llr_density(const ChangeModel& model, Hypothesis hyp, double y) {
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    if (g->sigma2() == 0.0) {
      const double mu = g->mu();
      const double xi = hyp == Hypothesis::Post ? 1.0 : -1.0;
      const double z = y / mu - 0.5 * mu * xi;
      return std::exp(-0.5 * z * z) / (std::abs(mu) * std::sqrt(kTwoPi));
    }
    const auto k = gaussian_llr_constants(*g);
    if (!(y > k.support_edge)) return 0.0;
    const double chi = gaussian_chi(*g, hyp);
    const double r = std::sqrt(k.nu * (y - k.support_edge));
    const double a = k.tau * chi + r;
    const double b = k.tau * chi - r;
    const double rho = std::exp(-a * a / (2.0 * chi)) + std::exp(-b * b / (2.0 * chi));
    return k.nu * rho / (2.0 * r * std::sqrt(kTwoPi * chi));
  }
  const auto& e = std::get<ExponentialModel>(model);
  const double lp = e.lambda_pre();
  const double lg = e.lambda_post();
  const double rate = hyp == Hypothesis::Pre ? lp : lg;
  const double a = std::log(lg / lp);
  if (lg > lp) {
    if (!(y < a)) return 0.0;
    const double d = rate / (lg - lp);
    return d * std::exp(-d * (a - y));
  }
  if (!(y > a)) return 0.0;
  const double d = rate / (lp - lg);
  return d * std::exp(-d * (y - a));
}

void AdversarySchedule::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("schedule: c must be positive and finite");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("schedule: delta must be positive and finite");
  if (family == Family::ExponentialRate) {
    if (sign != 1 && sign != -1) throw ParameterError("schedule: sign must be +1 or -1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("schedule: lambda must be positive and finite");
  }
}

const char* to_string(AdversarySchedule::Family family) {
  switch (family) {
    case AdversarySchedule::Family::GaussianMean:
      return "gaussian_mean";
    case AdversarySchedule::Family::GaussianVariance:
      return "gaussian_variance";
    case AdversarySchedule::Family::ExponentialRate:
      return "exponential_rate";
  }
  return "unknown";
}

ChangeModel instantiate(const AdversarySchedule& schedule, double gamma) {
  schedule.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError(describe("instantiate: gamma must be positive and finite, got", gamma, 0.0));
  }
  const double shift = schedule.c * std::pow(gamma, -schedule.delta);
  switch (schedule.family) {
    case AdversarySchedule::Family::GaussianMean:
      return GaussianModel(shift, 0.0);
    case AdversarySchedule::Family::GaussianVariance:
      return GaussianModel(0.0, shift);
    case AdversarySchedule::Family::ExponentialRate: {
      const double factor = 1.0 + schedule.sign * shift;
      if (!(factor > 0.0)) {
        throw ParameterError(describe("instantiate: exponential schedule gives non-positive rate at (gamma, c*gamma^-delta)",
                                      gamma, shift));
      }
      return ExponentialModel(schedule.lambda, schedule.lambda * factor);
    }
  }
  throw ParameterError("instantiate: unknown schedule family");
}

}  // namespace cqcd
