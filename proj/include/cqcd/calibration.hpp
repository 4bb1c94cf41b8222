#pragma once

#include <vector>

#include "cqcd/montecarlo.hpp"

namespace cqcd {

struct Calibration {
  double h;
  McEstimate at2fa;
  double h_asymptotic;
  int iterations;
  bool noise_limited;  // 3 SE of the AT2FA estimate exceeds tol_rel * gamma
};

/// Threshold h with estimated AT2FA within tol_rel * gamma of gamma.
///
/// Every evaluation reuses the same replication streams, so the estimated
/// AT2FA is a nondecreasing step function of h and plain bisection applies.
/// The search starts from [h/2, 2h] around the asymptotic threshold and
/// bisects down to a relative bracket width of 1e-4.
/// Throws DomainError on gamma <= 1 or tol_rel outside (0, 0.5) and
/// CalibrationError when no bracket or no acceptable root is found.
Calibration calibrate_threshold(const ChangeModel& model, double gamma, const McConfig& cfg, double tol_rel = 0.05);

struct GapRow {
  double gamma;
  double h_asymptotic;
  double h_calibrated;
  double gap_rel;  // |h_calibrated / h_asymptotic - 1|
  double at2fa_mean;
  double at2fa_se;
};

std::vector<GapRow> calibration_gap_report(const AdversarySchedule& schedule, const std::vector<double>& gammas,
                                           const McConfig& cfg, double tol_rel = 0.05);

}  // namespace cqcd
