#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cqcd/models.hpp"
#include "cqcd/random.hpp"

namespace cqcd {

/// Page's CuSum statistic W_k = max(0, W_{k-1} + Y_k), i.e. the largest
/// suffix sum of the LLRs seen so far (the empty suffix counts as 0).
struct CusumState {
  double statistic = 0.0;
  std::uint64_t steps = 0;
  double threshold = 1.0;
};

struct CusumStep {
  CusumState state;
  bool alarmed;
};

CusumStep cusum_step(const CusumState& state, double y);

/// First alarm of a CuSum run. `stopping_time` counts observations consumed.
struct CusumAlarm {
  std::uint64_t stopping_time;
  double overshoot;  // statistic - h at the alarm, >= 0
};

/// One record per observation, for trajectory logging.
struct TrajectoryPoint {
  std::uint64_t step;
  double y;
  double statistic;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Writes "step,y,statistic" rows with a header.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// Runs CuSum on fresh observations drawn under hyp until the statistic
/// reaches h or `cap` observations have been used. nullopt means truncated.
/// Throws DomainError unless h > 0 and cap > 0.
std::optional<CusumAlarm> run_cusum(const ChangeModel& model, Hypothesis hyp, double h,
                                    RandomStream& rng, std::uint64_t cap,
                                    Trajectory* trajectory = nullptr);

/// CuSum over a fixed LLR sequence; nullopt if it never alarms.
std::optional<CusumAlarm> run_cusum(std::span<const double> llrs, double h,
                                    Trajectory* trajectory = nullptr);

/// Two-boundary SPRT on S_k = Y_1 + ... + Y_k, stopping at the first k with
/// S_k outside the open interval (a, b). Touching a boundary exactly counts
/// as an exit.
class SprtConfig {
 public:
  /// Throws DomainError unless -inf < a <= 0 < b < inf.
  SprtConfig(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }

 private:
  double a_;
  double b_;
};

enum class SprtBoundary { Upper, Lower };

struct SprtOutcome {
  std::uint64_t stopping_time;
  double terminal_sum;
  SprtBoundary hit;
  double overshoot;  // S_T - b (Upper, >= 0) or S_T - a (Lower, <= 0)
};

std::optional<SprtOutcome> run_sprt(const ChangeModel& model, Hypothesis hyp, const SprtConfig& cfg,
                                    RandomStream& rng, std::uint64_t cap,
                                    Trajectory* trajectory = nullptr);

std::optional<SprtOutcome> run_sprt(std::span<const double> llrs, const SprtConfig& cfg,
                                    Trajectory* trajectory = nullptr);

}  // namespace cqcd
