#include "cqcd/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "cqcd/errors.hpp"

namespace cqcd {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kE = std::numbers::e;
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

// 1/e split into the nearest double and the remainder, so that z + 1/e can
// be formed without losing the low bits that matter near the branch point.
constexpr double kInvEHi = 0.36787944117144233;
constexpr double kInvELo = -1.2428753672788363e-17;

// Below this distance from -1/e the square-root series is used directly.
constexpr double kBranchSeriesRadius = 1e-10;

[[noreturn]] void throw_domain(LambertBranch branch, double z) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "lambert_w(" << to_string(branch) << ", " << z << "): argument outside branch domain";
  throw DomainError(msg.str());
}

// exp(x*x) with the rounding error of x*x carried into a first-order factor.
double exp_square(double x) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(hi) * (1.0 + lo);
}

double erfcx_continued_fraction(double x) {
  // erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
  constexpr double kTiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int n = 1; n < 500; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = x + a / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 0.5 * kEps) break;
  }
  return kInvSqrtPi / f;
}

// Branch-point expansion of W in the signed variable p = +-sqrt(2(e z + 1)).
double branch_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

std::optional<double> halley_direct(double z, double w) {
  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) return w;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    if (!std::isfinite(step)) return std::nullopt;
    w -= step;
    if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(w))) return w;
  }
  return std::nullopt;
}

// Halley on g(w) = w + log(|w|) - log(|z|), valid away from w = -1 where
// w*exp(w) = z and w, z share a sign.
std::optional<double> halley_log(double log_abs_z, double w) {
  for (int i = 0; i < 64; ++i) {
    const double g = w + std::log(std::abs(w)) - log_abs_z;
    const double g1 = 1.0 + 1.0 / w;
    const double g2 = -1.0 / (w * w);
    const double step = g / (g1 - 0.5 * g * g2 / g1);
    if (!std::isfinite(step)) return std::nullopt;
    w -= step;
    if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(w))) return w;
  }
  return std::nullopt;
}

double bisect_principal(double z) {
  double lo = -1.0;
  double hi = z > kE ? std::log(z) : 1.0;
  for (int i = 0; i < 2000 && hi - lo > 2.0 * kEps * (1.0 + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid) < z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_negative(double z) {
  const double log_abs_z = std::log(-z);
  double lo = 2.0 * (log_abs_z - 1.0);
  double hi = -1.0;
  for (int i = 0; i < 2000 && hi - lo > 2.0 * kEps * std::abs(lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    // g is increasing on (-inf, -1)
    if (mid + std::log(-mid) - log_abs_z < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double principal(double z, double dist) {
  if (z == 0.0) return 0.0;
  if (dist < kBranchSeriesRadius) return branch_series(std::sqrt(2.0 * kE * dist));

  std::optional<double> w;
  if (z < -0.3) {
    w = halley_direct(z, branch_series(std::sqrt(2.0 * kE * dist)));
  } else if (z <= 3.0) {
    const double l = std::log1p(z);
    w = halley_direct(z, l * (1.0 - std::log1p(l) / (2.0 + l)));
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = halley_log(l1, l1 - l2 + l2 / l1);
  }
  if (!w || *w < -1.0) return bisect_principal(z);
  return *w;
}

double negative(double z, double dist) {
  if (dist < kBranchSeriesRadius) return branch_series(-std::sqrt(2.0 * kE * dist));

  std::optional<double> w;
  if (z < -0.3) {
    w = halley_direct(z, branch_series(-std::sqrt(2.0 * kE * dist)));
  } else {
    const double l1 = std::log(-z);
    const double l2 = std::log(-l1);
    w = halley_log(l1, l1 - l2 + l2 / l1);
  }
  if (!w || *w > -1.0) return bisect_negative(z);
  return *w;
}

}  // namespace

const char* to_string(LambertBranch branch) {
  switch (branch) {
    case LambertBranch::Principal:
      return "principal";
    case LambertBranch::NegativeBranch:
      return "negative";
  }
  return "unknown";
}

double erf(double x) { return std::erf(x); }

double erfc(double x) { return std::erfc(x); }

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x >= 4.0) return erfcx_continued_fraction(x);
  if (x >= 0.0) return exp_square(x) * std::erfc(x);
  if (x < -26.6) return std::numeric_limits<double>::infinity();
  return 2.0 * exp_square(x) - erfcx(-x);
}

double lambert_w(LambertBranch branch, double z) {
  if (!std::isfinite(z)) throw_domain(branch, z);
  double dist = (z + kInvEHi) + kInvELo;
  // a couple of ulps of slack below -1/e absorbs the rounding of -exp(-1)
  if (dist < -4.0 * kEps * kInvEHi) throw_domain(branch, z);
  if (dist < 0.0) dist = 0.0;

  if (branch == LambertBranch::Principal) return principal(z, dist);
  if (z >= 0.0) throw_domain(branch, z);
  return negative(z, dist);
}

double lambert_wm1_small_asymptote(double x) {
  if (!(x < 0.0) || (x + kInvEHi) + kInvELo <= 0.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "lambert_wm1_small_asymptote(" << x << "): requires -1/e < x < 0";
    throw DomainError(msg.str());
  }
  const double l1 = std::log(-x);
  return l1 - std::log(-l1);
}

double x_minus_log1p(double x) {
  if (!(x > -1.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "x_minus_log1p(" << x << "): requires x > -1";
    throw DomainError(msg.str());
  }
  if (std::abs(x) < 0.1) {
    // sum_{k>=2} (-1)^k x^k / k, Horner from the highest retained order
    constexpr int kOrder = 22;
    double acc = 0.0;
    for (int k = kOrder; k >= 2; --k) {
      const double coeff = (k % 2 == 0 ? 1.0 : -1.0) / k;
      acc = acc * x + coeff;
    }
    return acc * x * x;
  }
  return x - std::log1p(x);
}

double lambert_wm1_neg_exp_shifted(double y) {
  if (!(y >= 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "lambert_wm1_neg_exp_shifted(" << y << "): requires y >= 0";
    throw DomainError(msg.str());
  }
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return y;

  double u;
  if (y < 2.0) {
    const double p = std::sqrt(-2.0 * std::expm1(-y));
    u = p * (1.0 + p * (1.0 / 3.0 + p * (11.0 / 72.0 + p * (43.0 / 540.0 + p * (769.0 / 17280.0)))));
  } else {
    const double x0 = 1.0 + y + std::log1p(y);
    u = y + std::log(x0);
  }

  bool converged = false;
  for (int i = 0; i < 64; ++i) {
    const double f = x_minus_log1p(u) - y;
    const double f1 = u / (1.0 + u);
    const double f2 = 1.0 / ((1.0 + u) * (1.0 + u));
    const double step = f / (f1 - 0.5 * f * f2 / f1);
    if (!std::isfinite(step) || u - step <= 0.0) break;
    u -= step;
    if (std::abs(step) <= 2.0 * kEps * u) {
      converged = true;
      break;
    }
  }
  if (converged) return u;

  double lo = 0.0;
  double hi = y + 2.0 * std::log(2.0 + y) + 2.0;
  for (int i = 0; i < 2000 && hi - lo > 2.0 * kEps * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (x_minus_log1p(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double g_mapping(double y) {
  if (!(y >= 0.0) || std::isinf(y)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "g_mapping(" << y << "): requires finite y >= 0";
    throw DomainError(msg.str());
  }
  if (y == 0.0) return 0.0;
  const double u = lambert_wm1_neg_exp_shifted(y);
  // G = log(x) - 1 + 1/x with x = 1 + u; for small u the equivalent
  // u^2/(1+u) - y keeps the leading u^2/2 term free of cancellation.
  if (u < 1.0) return u * u / (1.0 + u) - y;
  return std::log1p(u) - u / (1.0 + u);
}

}  // namespace cqcd
