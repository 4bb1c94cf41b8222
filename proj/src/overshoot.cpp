#include "cqcd/overshoot.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "cqcd/errors.hpp"
#include "cqcd/special_functions.hpp"

namespace cqcd {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
constexpr int kGridPoints = 512;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// Maximizes f on [lo, hi] (0 < lo < hi): geometric grid, then golden-section
// search between the neighbours of the best grid point.
double grid_maximum(const std::function<double(double)>& f, double lo, double hi) {
  const double ratio = std::log(hi / lo);
  std::vector<double> xs(kGridPoints);
  double best = -INFINITY;
  int best_i = 0;
  for (int i = 0; i < kGridPoints; ++i) {
    xs[i] = i + 1 == kGridPoints ? hi : lo * std::exp(ratio * i / (kGridPoints - 1));
    const double v = f(xs[i]);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double a = xs[std::max(best_i - 1, 0)];
  double b = xs[std::min(best_i + 1, kGridPoints - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 100 && b - a > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max({best, fc, fd});
}

double q_tail(double t) { return 0.5 * std::erfc(t / kSqrt2); }

// M / (1 - e^{-dM}) - 1/d, the mean of M - L given L <= M for L ~ Exp(d).
double truncated_exp_gap(double d, double m) {
  if (m == 0.0) return 0.0;
  return m / -std::expm1(-d * m) - 1.0 / d;
}

struct GaussianShape {
  double factor;  // sigma2 chi / (2 (1 + sigma2))
  double theta;   // |tau| sqrt(chi)
  double edge;    // support_edge
  double scale;   // nu / chi
  double x_at(double y) const { return y > edge ? std::sqrt(scale * (y - edge)) : 0.0; }
};

GaussianShape gaussian_shape(const GaussianModel& model, Hypothesis hyp) {
  const auto k = gaussian_llr_constants(model);
  const double chi = gaussian_chi(model, hyp);
  const double s = model.sigma2();
  return {s * chi / (2.0 * (1.0 + s)), std::abs(k.tau) * std::sqrt(chi), k.support_edge, k.nu / chi};
}

}  // namespace

double delta1(double x) {
  if (std::isnan(x)) throw DomainError("delta1: argument is NaN");
  if (x > 100.0) {
    const double r = 1.0 / (x * x);
    return (1.0 + r * (-2.0 + r * (10.0 + r * -74.0))) / x;
  }
  return kSqrt2OverPi / erfcx(x / kSqrt2) - x;
}

double delta2(double x) { return delta1(-x); }

double j_mapping(double x, double theta) {
  if (!(x >= 0.0) || std::isnan(theta)) throw DomainError("j_mapping: requires x >= 0, got x=" + fmt(x));
  theta = std::abs(theta);
  if (x == 0.0) return 1.0 + theta * theta;
  const double u = x - theta;
  const double v = x + theta;
  double p_upper;
  double p_lower;
  if (u >= 0.0) {
    const double r = erfcx(v / kSqrt2) / erfcx(u / kSqrt2) * std::exp(-2.0 * x * theta);
    p_upper = 1.0 / (1.0 + r);
    p_lower = r / (1.0 + r);
  } else {
    const double qu = q_tail(u);
    const double qv = q_tail(v);
    p_upper = qu / (qu + qv);
    p_lower = qv / (qu + qv);
  }
  // Each tail contributes E[(W - x)^2 + 2x (W - x)] = 1 + (2x - t) Delta1(t).
  return 1.0 + p_upper * v * delta1(u) + (p_lower > 0.0 ? p_lower * u * delta1(v) : 0.0);
}

double g2_mapping(double x, double theta) {
  if (!(x >= 0.0) || std::isnan(theta)) throw DomainError("g2_mapping: requires x >= 0, got x=" + fmt(x));
  theta = std::abs(theta);
  if (x * std::max(1.0, theta) < 1e-3) {
    const double x2 = x * x;
    return x2 * (-2.0 / 3.0 + (2.0 / 45.0) * (theta * theta - 1.0) * x2);
  }
  const double a = theta - x;
  const double b = theta + x;
  double ratio;
  if (a >= 0.0) {
    const double e = std::exp(-2.0 * x * theta);
    ratio = kSqrt2OverPi * (a * e - b) / (erfcx(a / kSqrt2) - erfcx(b / kSqrt2) * e);
  } else {
    const double num = a * std::exp(-0.5 * b * b) - b * std::exp(-0.5 * a * a);
    ratio = kSqrt2OverPi * num / (std::erf(b / kSqrt2) - std::erf(a / kSqrt2));
  }
  return ratio + (theta - x) * (theta + x) + 1.0;
}

const char* to_string(ExtremumMethod method) {
  switch (method) {
    case ExtremumMethod::ClosedForm:
      return "closed_form";
    case ExtremumMethod::Monotone:
      return "monotone";
    case ExtremumMethod::Grid:
      return "grid";
  }
  return "unknown";
}

double upper_conditional_excess(const ChangeModel& model, Hypothesis hyp, double y) {
  if (std::isnan(y)) throw DomainError("upper_conditional_excess: y is NaN");
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    if (g->sigma2() == 0.0) {
      const double m = std::abs(g->mu());
      const double xi = hyp == Hypothesis::Post ? 1.0 : -1.0;
      return m * delta1(y / m - xi * m / 2.0);
    }
    const auto s = gaussian_shape(*g, hyp);
    if (y < s.edge) return s.factor * (1.0 + s.theta * s.theta) + (s.edge - y);
    return s.factor * j_mapping(s.x_at(y), s.theta);
  }
  const auto& e = std::get<ExponentialModel>(model);
  const double lp = e.lambda_pre();
  const double lg = e.lambda_post();
  const double rate = hyp == Hypothesis::Pre ? lp : lg;
  const double a = std::log(lg / lp);
  if (lg > lp) {
    if (!(y < a)) throw DomainError("upper_conditional_excess: y at or beyond the top of the LLR support, y=" + fmt(y));
    return truncated_exp_gap(rate / (lg - lp), a - y);
  }
  const double d = rate / (lp - lg);
  return y <= a ? a + 1.0 / d - y : 1.0 / d;
}

double lower_conditional_excess(const ChangeModel& model, Hypothesis hyp, double y) {
  if (std::isnan(y)) throw DomainError("lower_conditional_excess: y is NaN");
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    if (g->sigma2() == 0.0) {
      const double m = std::abs(g->mu());
      const double xi = hyp == Hypothesis::Post ? 1.0 : -1.0;
      return -m * delta2(y / m - xi * m / 2.0);
    }
    const auto s = gaussian_shape(*g, hyp);
    if (!(y > s.edge)) throw DomainError("lower_conditional_excess: y at or below the LLR support edge, y=" + fmt(y));
    return s.factor * g2_mapping(s.x_at(y), s.theta);
  }
  const auto& e = std::get<ExponentialModel>(model);
  const double lp = e.lambda_pre();
  const double lg = e.lambda_post();
  const double rate = hyp == Hypothesis::Pre ? lp : lg;
  const double a = std::log(lg / lp);
  if (lg > lp) {
    const double d = rate / (lg - lp);
    return y >= a ? a - 1.0 / d - y : -1.0 / d;
  }
  if (!(y > a)) throw DomainError("lower_conditional_excess: y at or below the LLR support edge, y=" + fmt(y));
  return -truncated_exp_gap(rate / (lp - lg), y - a);
}

OvershootReport gaussian_overshoot_report(const GaussianModel& model, Hypothesis hyp) {
  if (model.sigma2() == 0.0) {
    const double m = std::abs(model.mu());
    const double xi = hyp == Hypothesis::Post ? 1.0 : -1.0;
    return {m * delta1(-xi * m / 2.0), -m * delta2(-xi * m / 2.0), hyp, ExtremumMethod::ClosedForm,
            ExtremumMethod::ClosedForm};
  }
  const auto s = gaussian_shape(model, hyp);
  const double x_min = s.x_at(0.0);
  OvershootReport report{0.0, 0.0, hyp, ExtremumMethod::Monotone, ExtremumMethod::Monotone};

  if (s.theta >= 3.0 / kSqrt2 && x_min >= 1.0 / kSqrt2) {
    report.sup_upper = s.factor * j_mapping(x_min, s.theta);
  } else {
    const double x_hi = x_min + 64.0 + 2.0 * s.theta;
    const double best = grid_maximum([&](double x) { return j_mapping(x, s.theta); }, x_min, x_hi);
    report.sup_upper = s.factor * std::max(best, 2.0);
    report.method_upper = ExtremumMethod::Grid;
  }

  const double at_edge = g2_mapping(x_min, s.theta);
  const double grid_min =
      -grid_maximum([&](double x) { return -g2_mapping(x, s.theta); }, x_min * 1e-6, x_min);
  if (grid_min < at_edge - 1e-12 * std::abs(at_edge)) {
    report.inf_lower = s.factor * grid_min;
    report.method_lower = ExtremumMethod::Grid;
  } else {
    report.inf_lower = s.factor * at_edge;
  }
  return report;
}

OvershootReport exponential_overshoot_report(const ExponentialModel& model, Hypothesis hyp) {
  const double lp = model.lambda_pre();
  const double lg = model.lambda_post();
  const double rate = hyp == Hypothesis::Pre ? lp : lg;
  const ChangeModel m = model;
  if (lg < lp) {
    return {(lp - lg) / rate, lower_conditional_excess(m, hyp, 0.0), hyp, ExtremumMethod::ClosedForm,
            ExtremumMethod::ClosedForm};
  }
  const double bound = 2.0 * (lg - lp) / rate;
  return {std::max(bound, upper_conditional_excess(m, hyp, 0.0)), (lp - lg) / rate, hyp, ExtremumMethod::ClosedForm,
          ExtremumMethod::ClosedForm};
}

OvershootReport overshoot_report(const ChangeModel& model, Hypothesis hyp) {
  if (const auto* g = std::get_if<GaussianModel>(&model)) return gaussian_overshoot_report(*g, hyp);
  return exponential_overshoot_report(std::get<ExponentialModel>(model), hyp);
}

}  // namespace cqcd
