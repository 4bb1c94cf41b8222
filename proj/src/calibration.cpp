#include "cqcd/calibration.hpp"

#include <cmath>
#include <sstream>

#include "cqcd/asymptotics.hpp"
#include "cqcd/errors.hpp"

namespace cqcd {
namespace {

constexpr int kMaxExpansions = 60;
constexpr int kMaxBisections = 60;
constexpr double kRelWidth = 1e-4;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

Calibration calibrate_threshold(const ChangeModel& model, double gamma, const McConfig& cfg, double tol_rel) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw DomainError("calibrate_threshold: gamma must exceed 1, got " + fmt(gamma));
  if (!(tol_rel > 0.0 && tol_rel < 0.5)) throw DomainError("calibrate_threshold: tol_rel must lie in (0, 0.5), got " + fmt(tol_rel));
  cfg.validate();

  const double h0 = h_star_asymptotic(gamma, kl_divergences(model).d_pre_post);
  const double tol = tol_rel * gamma;
  int evaluations = 0;

  auto evaluate = [&](double h) {
    ++evaluations;
    return estimate_at2fa(model, h, cfg);
  };
  auto finish = [&](double h, const McEstimate& e) {
    return Calibration{h, e, h0, evaluations, 3.0 * e.std_error > tol};
  };

  double lo = 0.5 * h0;
  double hi = 2.0 * h0;
  McEstimate e_lo = evaluate(lo);
  for (int i = 0; e_lo.mean > gamma; ++i) {
    if (i == kMaxExpansions) throw CalibrationError("calibrate_threshold: no lower bracket below h=" + fmt(lo));
    hi = lo;
    lo *= 0.5;
    e_lo = evaluate(lo);
  }
  McEstimate e_hi = evaluate(hi);
  for (int i = 0; e_hi.mean < gamma; ++i) {
    if (i == kMaxExpansions) throw CalibrationError("calibrate_threshold: no upper bracket above h=" + fmt(hi));
    lo = hi;
    e_lo = e_hi;
    hi *= 2.0;
    e_hi = evaluate(hi);
  }

  // AT2FA(h) is a nondecreasing step function under common random numbers:
  // shrink the bracket around the crossing, then take the closer end.
  for (int i = 0; i < kMaxBisections && hi - lo > kRelWidth * hi && e_lo.mean != gamma; ++i) {
    const double mid = 0.5 * (lo + hi);
    const McEstimate e = evaluate(mid);
    if (e.mean < gamma) {
      lo = mid;
      e_lo = e;
    } else {
      hi = mid;
      e_hi = e;
    }
  }
  const bool take_lo = std::abs(e_lo.mean - gamma) <= std::abs(e_hi.mean - gamma);
  const double best_h = take_lo ? lo : hi;
  const McEstimate& best = take_lo ? e_lo : e_hi;
  if (std::abs(best.mean - gamma) <= std::max(tol, 3.0 * best.std_error)) return finish(best_h, best);
  throw CalibrationError("calibrate_threshold: AT2FA jumps over [" + fmt(gamma - tol) + ", " + fmt(gamma + tol) +
                         "] near h=" + fmt(best_h) + " (closest mean " + fmt(best.mean) + ")");
}

std::vector<GapRow> calibration_gap_report(const AdversarySchedule& schedule, const std::vector<double>& gammas,
                                           const McConfig& cfg, double tol_rel) {
  if (gammas.empty()) throw DomainError("calibration_gap_report: gammas must be nonempty");
  std::vector<GapRow> rows;
  rows.reserve(gammas.size());
  for (double gamma : gammas) {
    const auto cal = calibrate_threshold(instantiate(schedule, gamma), gamma, cfg, tol_rel);
    rows.push_back({gamma, cal.h_asymptotic, cal.h, std::abs(cal.h / cal.h_asymptotic - 1.0), cal.at2fa.mean,
                    cal.at2fa.std_error});
  }
  return rows;
}

}  // namespace cqcd
