#pragma once

#include <variant>

#include "cqcd/random.hpp"

namespace cqcd {

/// Pre-change law q = N(0, 1); post-change law q_gamma = N(mu, 1 + sigma2).
class GaussianModel {
 public:
  /// Throws ParameterError unless sigma2 >= 0 and (mu, sigma2) != (0, 0).
  GaussianModel(double mu, double sigma2);

  double mu() const { return mu_; }
  double sigma2() const { return sigma2_; }

  friend bool operator==(const GaussianModel&, const GaussianModel&) = default;

 private:
  double mu_;
  double sigma2_;
};

/// Pre-change law Exp(lambda_pre); post-change law Exp(lambda_post).
class ExponentialModel {
 public:
  /// Throws ParameterError unless both rates are positive and distinct.
  ExponentialModel(double lambda_pre, double lambda_post);

  double lambda_pre() const { return lambda_pre_; }
  double lambda_post() const { return lambda_post_; }

  friend bool operator==(const ExponentialModel&, const ExponentialModel&) = default;

 private:
  double lambda_pre_;
  double lambda_post_;
};

using ChangeModel = std::variant<GaussianModel, ExponentialModel>;

enum class Hypothesis { Pre, Post };

const char* to_string(Hypothesis hyp);

struct KlDivergences {
  double d_post_pre;  // D(q_gamma || q) = E_post[Y]
  double d_pre_post;  // D(q || q_gamma) = -E_pre[Y]
};

/// One draw from q (Pre) or q_gamma (Post).
double sample_observation(const ChangeModel& model, Hypothesis hyp, RandomStream& rng);

/// Log-likelihood ratio log(q_gamma(x) / q(x)).
/// Throws DomainError for a negative exponential observation.
double llr(const ChangeModel& model, double x);

KlDivergences kl_divergences(const ChangeModel& model);

/// Shape constants of the Gaussian LLR law when sigma2 > 0:
/// Y = support_edge + (X + tau)^2 / nu.
struct GaussianLlrConstants {
  double nu;            // 2 (1 + sigma2) / sigma2
  double tau;           // mu / sigma2
  double support_edge;  // -mu^2 / (2 sigma2) - log(1 + sigma2) / 2, lower end of supp(Y)
};

/// Requires sigma2 > 0 (throws DomainError otherwise).
GaussianLlrConstants gaussian_llr_constants(const GaussianModel& model);

/// chi_p: 1 under Pre, 1 + sigma2 under Post.
double gaussian_chi(const GaussianModel& model, Hypothesis hyp);

/// Density of Y = llr(X) with X drawn under hyp. Zero off the support.
double llr_density(const ChangeModel& model, Hypothesis hyp, double y);

/// A gamma-indexed family of post-change parameters that collapses onto the
/// pre-change law as gamma grows:
///   GaussianMean:     mu(gamma)       = c * gamma^-delta,  sigma2 = 0
///   GaussianVariance: sigma2(gamma)   = c * gamma^-delta,  mu = 0
///   ExponentialRate:  lambda_gamma    = lambda (1 + sign * c * gamma^-delta)
struct AdversarySchedule {
  enum class Family { GaussianMean, GaussianVariance, ExponentialRate };

  Family family = Family::GaussianMean;
  double c = 1.0;
  double delta = 0.5;
  int sign = 1;         // ExponentialRate only
  double lambda = 1.0;  // ExponentialRate only: pre-change rate

  /// Throws ParameterError on c <= 0, delta <= 0, |sign| != 1 or lambda <= 0.
  void validate() const;

  friend bool operator==(const AdversarySchedule&, const AdversarySchedule&) = default;
};

const char* to_string(AdversarySchedule::Family family);

/// The model at a given gamma > 0. Throws ParameterError if the schedule
/// would produce a non-positive post-change rate.
ChangeModel instantiate(const AdversarySchedule& schedule, double gamma);

}  // namespace cqcd
