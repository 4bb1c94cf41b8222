#include "cqcd/asymptotics.hpp"

#include <cmath>
#include <sstream>

#include "cqcd/errors.hpp"
#include "cqcd/special_functions.hpp"

namespace cqcd {
namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

void require_boundaries(const char* who, double a, double b) {
  if (!(a < 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError(std::string(who) + ": requires a < 0 < b, got a=" + fmt(a) + ", b=" + fmt(b));
  }
}

void require_positive(const char* who, const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(who) + ": " + name + " must be positive and finite, got " + fmt(v));
  }
}

}  // namespace

SprtExpectedSamples sprt_expected_samples(double d_post_pre, double d_pre_post, double a, double b) {
  require_boundaries("sprt_expected_samples", a, b);
  require_positive("sprt_expected_samples", "d_post_pre", d_post_pre);
  require_positive("sprt_expected_samples", "d_pre_post", d_pre_post);
  // Divide through by B to stay finite for large b.
  const double A = std::exp(a);
  const double inv_b = std::exp(-b);
  const double bm1 = -std::expm1(-b);  // (B - 1)/B
  const double one_minus_a = -std::expm1(a);
  const double denom = 1.0 - A * inv_b;  // (B - A)/B
  const double e_post = (A * bm1 * a + one_minus_a * b) / (d_post_pre * denom);
  const double e_pre = -(bm1 * a + one_minus_a * inv_b * b) / (d_pre_post * denom);
  return {e_post, e_pre};
}

SprtErrors sprt_error_asymptotes(double a, double b) {
  require_boundaries("sprt_error_asymptotes", a, b);
  const double A = std::exp(a);
  const double inv_b = std::exp(-b);
  const double denom = 1.0 - A * inv_b;
  return {-std::expm1(a) * inv_b / denom, A * -std::expm1(-b) / denom};
}

RunLengths khan_expected_run_lengths(double d_post_pre, double d_pre_post, double h) {
  require_positive("khan_expected_run_lengths", "h", h);
  require_positive("khan_expected_run_lengths", "d_post_pre", d_post_pre);
  require_positive("khan_expected_run_lengths", "d_pre_post", d_pre_post);
  // expm1(-h) + h and expm1(h) - h keep full precision for small h.
  return {(std::expm1(-h) + h) / d_post_pre, (std::expm1(h) - h) / d_pre_post};
}

double h_star_asymptotic(double gamma, double d_pre_post) {
  const double y = gamma * d_pre_post;
  if (!(y >= 0.0) || !std::isfinite(y)) {
    throw DomainError("h_star_asymptotic: gamma * d_pre_post must be finite and >= 0, got " + fmt(y));
  }
  return std::log1p(lambert_wm1_neg_exp_shifted(y));
}

Regime Regime::critical(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("Regime::critical: y must be positive and finite, got " + fmt(y));
  return {Kind::Critical, y};
}

const char* to_string(Regime::Kind kind) {
  switch (kind) {
    case Regime::Kind::Detectable:
      return "detectable";
    case Regime::Kind::Critical:
      return "critical";
    case Regime::Kind::DeepCovert:
      return "deep_covert";
  }
  return "unknown";
}

double n_gamma_asymptotic(double gamma, double d_pre_post, double d_post_pre, const Regime& regime) {
  require_positive("n_gamma_asymptotic", "gamma", gamma);
  require_positive("n_gamma_asymptotic", "d_pre_post", d_pre_post);
  require_positive("n_gamma_asymptotic", "d_post_pre", d_post_pre);
  const double y = gamma * d_pre_post;
  switch (regime.kind) {
    case Regime::Kind::Detectable:
      if (!(y > 1.0)) {
        throw DomainError("n_gamma_asymptotic: detectable regime needs gamma * D(q||q_g) > 1, got " + fmt(y));
      }
      return std::log(y) / d_post_pre;
    case Regime::Kind::Critical:
      return (y / d_post_pre) * g_mapping(regime.y) / regime.y;
    case Regime::Kind::DeepCovert:
      return y / d_post_pre;
  }
  throw DomainError("n_gamma_asymptotic: unknown regime");
}

Regime classify_regime(const AdversarySchedule& schedule) {
  schedule.validate();
  if (schedule.delta < 0.5) return Regime::detectable();
  if (schedule.delta > 0.5) return Regime::deep_covert();
  const double c2 = schedule.c * schedule.c;
  return Regime::critical(schedule.family == AdversarySchedule::Family::GaussianVariance ? c2 / 4.0 : c2 / 2.0);
}

Regime classify_regime(const ChangeModel& model, double gamma) {
  require_positive("classify_regime", "gamma", gamma);
  return Regime::critical(gamma * kl_divergences(model).d_pre_post);
}

double lorden_baseline(double gamma, double d_post_pre) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw DomainError("lorden_baseline: gamma must exceed 1, got " + fmt(gamma));
  require_positive("lorden_baseline", "d_post_pre", d_post_pre);
  return std::log(gamma) / d_post_pre;
}

double total_damage(double n_gamma, double d_pre_post, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("total_damage: rho must lie in (0, 1), got " + fmt(rho));
  if (!(n_gamma >= 0.0) || !(d_pre_post >= 0.0)) {
    throw DomainError("total_damage: n_gamma and d_pre_post must be >= 0");
  }
  return n_gamma * std::pow(d_pre_post, rho);
}

AsymptoticPrediction predict(const AdversarySchedule& schedule, double gamma, std::optional<double> rho) {
  const ChangeModel model = instantiate(schedule, gamma);
  const KlDivergences kl = kl_divergences(model);
  AsymptoticPrediction p{};
  p.gamma = gamma;
  p.d_pre_post = kl.d_pre_post;
  p.d_post_pre = kl.d_post_pre;
  p.regime = classify_regime(schedule);
  p.h_star = h_star_asymptotic(gamma, kl.d_pre_post);
  p.n_gamma = n_gamma_asymptotic(gamma, kl.d_pre_post, kl.d_post_pre, p.regime);
  p.lorden_baseline = lorden_baseline(gamma, kl.d_post_pre);
  if (rho) p.damage = total_damage(p.n_gamma, kl.d_pre_post, *rho);
  return p;
}

}  // namespace cqcd
