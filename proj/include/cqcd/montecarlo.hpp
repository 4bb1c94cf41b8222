#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "cqcd/detectors.hpp"
#include "cqcd/models.hpp"

namespace cqcd {

struct McConfig {
  std::uint64_t replications = 2000;
  std::uint64_t seed = 0;
  std::uint64_t cap = 1'000'000;
  unsigned workers = 1;
  bool progress = false;  // replication counter on stderr

  /// Throws ConfigError on replications < 2, cap == 0 or workers == 0.
  void validate() const;
};

/// Sample mean over completed runs. For conditional estimates n_effective
/// counts the runs inside the conditioning event.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n_effective)
  std::uint64_t n_effective = 0;
  std::uint64_t n_truncated = 0;
  bool insufficient = false;  // fewer than 30 conditioning hits
};

/// Mean and standard error with compensated summation in index order.
McEstimate summarize(std::span<const double> values, std::uint64_t n_truncated = 0);

/// Runs body(i) for i in [0, n) on `workers` threads. Exceptions are rethrown
/// on the calling thread.
void parallel_for(std::uint64_t n, unsigned workers, const std::function<void(std::uint64_t)>& body,
                  const char* progress_label = nullptr);

/// Substream tags keeping the estimators' random streams disjoint.
enum class McStream : std::uint32_t { At2fa = 1, Add = 2, SprtPre = 3, SprtPost = 4 };

/// CuSum stopping times under the pre-change law. Truncated runs are counted
/// and excluded, so a small cap biases the mean downwards.
/// Throws ConfigError when every run truncates.
McEstimate estimate_at2fa(const ChangeModel& model, double h, const McConfig& cfg);

/// CuSum stopping times with the change at time 1.
McEstimate estimate_add(const ChangeModel& model, double h, const McConfig& cfg);

struct SprtEstimates {
  McEstimate stopping_time;
  McEstimate terminal_sum;
  McEstimate upper_hit;        // indicator of S_T >= b
  McEstimate wald_residual;    // S_T - T E[Y_1], mean zero by Wald's identity
  McEstimate upper_overshoot;  // S_T - b given an upper exit
  McEstimate lower_overshoot;  // S_T - a given a lower exit
};

SprtEstimates estimate_sprt(const ChangeModel& model, Hypothesis hyp, const SprtConfig& sprt,
                            const McConfig& cfg);

struct SprtErrorEstimates {
  McEstimate alpha;  // P_pre(S_T >= b)
  McEstimate beta;   // P_post(S_T <= a)
};

SprtErrorEstimates estimate_sprt_errors(const ChangeModel& model, const SprtConfig& sprt, const McConfig& cfg);

struct ConditionalOvershoots {
  McEstimate upper;
  McEstimate lower;
};

ConditionalOvershoots estimate_conditional_overshoots(const ChangeModel& model, Hypothesis hyp,
                                                      const SprtConfig& sprt, const McConfig& cfg);

}  // namespace cqcd
