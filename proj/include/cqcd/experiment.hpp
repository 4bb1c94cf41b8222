#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqcd/models.hpp"
#include "cqcd/montecarlo.hpp"

namespace cqcd {

/// Pass/fail tolerances for `validate`, checked at the largest gamma.
struct ValidationTolerances {
  double calibration_tol = 0.05;  // relative AT2FA tolerance of the calibrated threshold
  double at2fa_tol = 0.10;        // |AT2FA(h_asymptotic)/gamma - 1|
  double add_tol = 0.10;          // |ADD(h_calibrated)/n(gamma) - 1|

  friend bool operator==(const ValidationTolerances&, const ValidationTolerances&) = default;
};

/// One experiment, read from a JSON document:
///
///   {
///     "name": "critical_mean",
///     "schedule": {"family": "gaussian_mean", "c": 1, "delta": 0.5},
///     "gammas": [100, 1000, 10000],
///     "mc": {"replications": 2000, "seed": 7, "cap": 0, "workers": 1},
///     "outputs": "out",
///     "rho": 0.5,
///     "validation": {"calibration_tol": 0.05, "at2fa_tol": 0.1, "add_tol": 0.1}
///   }
///
/// `sign` and `lambda` apply to exponential_rate only. A cap of 0 means
/// 100 * gamma. `rho` and `validation` are optional.
struct ExperimentSpec {
  std::string name;
  AdversarySchedule schedule;
  std::vector<double> gammas;
  McConfig mc;
  std::string outputs = "out";
  std::optional<double> rho;
  ValidationTolerances validation;

  /// Monte Carlo settings for one gamma, resolving the automatic cap.
  McConfig mc_at(double gamma) const;

  friend bool operator==(const ExperimentSpec& a, const ExperimentSpec& b);
};

/// Throws ConfigError with a line number for syntax errors and with the
/// offending key (and its line) for schema violations.
ExperimentSpec parse_experiment(std::string_view json_text);

ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Pretty-printed JSON that parses back to an equal spec.
std::string emit_experiment(const ExperimentSpec& spec);

}  // namespace cqcd
