#pragma once

#include <optional>

#include "cqcd/models.hpp"

namespace cqcd {

struct SprtExpectedSamples {
  double e_post;
  double e_pre;
};

/// Wald approximations of E[T_{a,b}] under each hypothesis. Requires a < 0 < b.
SprtExpectedSamples sprt_expected_samples(double d_post_pre, double d_pre_post, double a, double b);

struct SprtErrors {
  double alpha;  // P_pre(S_T >= b)
  double beta;   // P_post(S_T <= a)
};

/// alpha = (1 - A)/(B - A), beta = A(B - 1)/(B - A) with A = e^a, B = e^b.
SprtErrors sprt_error_asymptotes(double a, double b);

struct RunLengths {
  double add;
  double at2fa;
};

/// Khan's approximations: add = (e^-h + h - 1)/D(q_g||q), at2fa = (e^h - h - 1)/D(q||q_g).
RunLengths khan_expected_run_lengths(double d_post_pre, double d_pre_post, double h);

/// Root h > 0 of e^h - h - 1 = gamma * d_pre_post.
double h_star_asymptotic(double gamma, double d_pre_post);

struct Regime {
  enum class Kind { Detectable, Critical, DeepCovert };
  Kind kind;
  double y = 0.0;  // Critical only

  static Regime detectable() { return {Kind::Detectable, 0.0}; }
  static Regime critical(double y);
  static Regime deep_covert() { return {Kind::DeepCovert, 0.0}; }

  friend bool operator==(const Regime&, const Regime&) = default;
};

const char* to_string(Regime::Kind kind);

/// Limiting detection delay n(gamma) in the given regime.
double n_gamma_asymptotic(double gamma, double d_pre_post, double d_post_pre, const Regime& regime);

/// Exact classification from the schedule exponent.
Regime classify_regime(const AdversarySchedule& schedule);

/// Bare (model, gamma): always Critical{gamma * D(q||q_g)}.
Regime classify_regime(const ChangeModel& model, double gamma);

/// log(gamma) / D(q_g||q). Requires gamma > 1.
double lorden_baseline(double gamma, double d_post_pre);

/// n * D^rho with rho in (0, 1).
double total_damage(double n_gamma, double d_pre_post, double rho);

struct AsymptoticPrediction {
  double gamma;
  double d_pre_post;
  double d_post_pre;
  Regime regime;
  double h_star;
  double n_gamma;
  double lorden_baseline;
  std::optional<double> damage;
};

AsymptoticPrediction predict(const AdversarySchedule& schedule, double gamma,
                             std::optional<double> rho = std::nullopt);

}  // namespace cqcd
