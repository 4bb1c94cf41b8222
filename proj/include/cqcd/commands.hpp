#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqcd/experiment.hpp"

namespace cqcd {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Header row, then one line per row. Fields are never quoted: every
  /// field produced here is a number or an identifier.
  void write(std::ostream& out) const;
};

struct CommandResult {
  CsvTable table;
  bool passed = true;
};

/// Closed-form predictions per gamma; no simulation.
/// Columns: gamma, family, c, delta, d_pre_post, d_post_pre, divergence_ratio,
/// regime, regime_y, h_star, n_gamma, n_gamma_over_gamma, lorden_baseline, damage.
CommandResult cmd_predict(const ExperimentSpec& spec);

/// Per gamma: calibrated threshold, AT2FA at the asymptotic threshold, ADD at
/// the calibrated threshold against n(gamma), closed-form overshoot bounds.
/// Tolerances are checked at the largest gamma; calibration at every gamma.
/// Columns: gamma, h_asymptotic, h_calibrated, h_gap_rel, at2fa_cal_mean,
/// at2fa_cal_se, at2fa_asym_mean, at2fa_asym_se, at2fa_gap_rel, add_mean,
/// add_se, n_gamma, add_gap_rel, sup_upper_pre, inf_lower_pre, sup_upper_post,
/// inf_lower_post, truncated, pass, wall_clock_s.
CommandResult cmd_validate(const ExperimentSpec& spec);

/// Per gamma and hypothesis: closed-form overshoot extrema and SPRT
/// conditional overshoots with boundaries -h, h at the asymptotic threshold.
/// Columns: gamma, hyp, sup_upper, inf_lower, method_upper, method_lower, b,
/// mc_upper_mean, mc_upper_se, mc_upper_hits, mc_lower_mean, mc_lower_se,
/// mc_lower_hits, pass.
CommandResult cmd_overshoot(const ExperimentSpec& spec);

/// One pre-change CuSum trajectory at the first gamma and asymptotic
/// threshold, replication 0.
void write_trace(const ExperimentSpec& spec, std::ostream& out);

/// 17 significant digits, enough to read back the same double.
std::string format_real(double v);

}  // namespace cqcd
