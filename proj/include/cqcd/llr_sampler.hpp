#pragma once

#include <cmath>

#include "cqcd/models.hpp"
#include "cqcd/random.hpp"

namespace cqcd {

/// Draws Y = llr(X) with X ~ q or q_gamma, with all model constants hoisted
/// out of the per-observation path. Used by the detector inner loops.
class LlrSampler {
 public:
  LlrSampler(const ChangeModel& model, Hypothesis hyp) {
    if (const auto* g = std::get_if<GaussianModel>(&model)) {
      gaussian_ = true;
      const double s2 = 1.0 + g->sigma2();
      quad_ = 0.5 * g->sigma2() / s2;
      lin_ = g->mu() / s2;
      offset_ = -0.5 * std::log1p(g->sigma2()) - 0.5 * g->mu() * g->mu() / s2;
      loc_ = hyp == Hypothesis::Post ? g->mu() : 0.0;
      scale_ = hyp == Hypothesis::Post ? std::sqrt(s2) : 1.0;
    } else {
      const auto& e = std::get<ExponentialModel>(model);
      offset_ = std::log(e.lambda_post() / e.lambda_pre());
      lin_ = e.lambda_pre() - e.lambda_post();
      rate_ = hyp == Hypothesis::Post ? e.lambda_post() : e.lambda_pre();
    }
  }

  double operator()(RandomStream& rng) const {
    if (gaussian_) {
      const double x = loc_ + scale_ * rng.normal();
      return offset_ + x * (lin_ + quad_ * x);
    }
    return offset_ + lin_ * rng.exponential(rate_);
  }

 private:
  bool gaussian_ = false;
  double quad_ = 0.0;
  double lin_ = 0.0;
  double offset_ = 0.0;
  double loc_ = 0.0;
  double scale_ = 1.0;
  double rate_ = 1.0;
};

}  // namespace cqcd
