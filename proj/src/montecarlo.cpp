#include "cqcd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "cqcd/errors.hpp"

namespace cqcd {
namespace {

constexpr std::uint64_t kMinHits = 30;

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

McEstimate stopping_time_estimate(const ChangeModel& model, Hypothesis hyp, double h, const McConfig& cfg,
                                  McStream tag, const char* label) {
  cfg.validate();
  std::vector<std::optional<double>> taus(cfg.replications);
  parallel_for(
      cfg.replications, cfg.workers,
      [&](std::uint64_t i) {
        RandomStream rng(cfg.seed, i, static_cast<std::uint32_t>(tag));
        const auto alarm = run_cusum(model, hyp, h, rng, cfg.cap);
        if (alarm) taus[i] = static_cast<double>(alarm->stopping_time);
      },
      cfg.progress ? label : nullptr);
  std::vector<double> done;
  done.reserve(taus.size());
  for (const auto& t : taus)
    if (t) done.push_back(*t);
  if (done.empty()) throw ConfigError(std::string(label) + ": every replication hit the cap");
  return summarize(done, cfg.replications - done.size());
}

McEstimate conditional(std::span<const double> values, std::uint64_t truncated) {
  McEstimate e;
  if (values.size() >= 2) {
    e = summarize(values, truncated);
  } else {
    e.mean = values.empty() ? NAN : values[0];
    e.std_error = NAN;
    e.n_effective = values.size();
    e.n_truncated = truncated;
  }
  e.insufficient = values.size() < kMinHits;
  return e;
}

}  // namespace

void McConfig::validate() const {
  if (replications < 2) throw ConfigError("mc: replications must be >= 2");
  if (cap == 0) throw ConfigError("mc: cap must be >= 1");
  if (workers == 0) throw ConfigError("mc: workers must be >= 1");
}

McEstimate summarize(std::span<const double> values, std::uint64_t n_truncated) {
  McEstimate e;
  e.n_effective = values.size();
  e.n_truncated = n_truncated;
  if (values.empty()) {
    e.mean = NAN;
    e.std_error = NAN;
    return e;
  }
  KahanSum sum;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  e.mean = sum.sum / n;
  if (values.size() < 2) {
    e.std_error = NAN;
    return e;
  }
  KahanSum sq;
  for (double v : values) sq.add((v - e.mean) * (v - e.mean));
  e.std_error = std::sqrt(sq.sum / (n - 1.0) / n);
  return e;
}

void parallel_for(std::uint64_t n, unsigned workers, const std::function<void(std::uint64_t)>& body,
                  const char* progress_label) {
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> completed{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;
  const std::uint64_t report_every = std::max<std::uint64_t>(1, n / 20);

  auto work = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::uint64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
      const std::uint64_t k = completed.fetch_add(1) + 1;
      if (progress_label && (k % report_every == 0 || k == n)) {
        std::lock_guard lock(mutex);
        std::cerr << '\r' << progress_label << ": " << k << '/' << n << (k == n ? "\n" : "") << std::flush;
      }
    }
  };

  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(workers == 0 ? 1 : workers, n));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

McEstimate estimate_at2fa(const ChangeModel& model, double h, const McConfig& cfg) {
  return stopping_time_estimate(model, Hypothesis::Pre, h, cfg, McStream::At2fa, "at2fa");
}

McEstimate estimate_add(const ChangeModel& model, double h, const McConfig& cfg) {
  return stopping_time_estimate(model, Hypothesis::Post, h, cfg, McStream::Add, "add");
}

SprtEstimates estimate_sprt(const ChangeModel& model, Hypothesis hyp, const SprtConfig& sprt, const McConfig& cfg) {
  cfg.validate();
  const auto tag = hyp == Hypothesis::Pre ? McStream::SprtPre : McStream::SprtPost;
  const KlDivergences kl = kl_divergences(model);
  const double mean_llr = hyp == Hypothesis::Post ? kl.d_post_pre : -kl.d_pre_post;

  std::vector<std::optional<SprtOutcome>> outcomes(cfg.replications);
  parallel_for(
      cfg.replications, cfg.workers,
      [&](std::uint64_t i) {
        RandomStream rng(cfg.seed, i, static_cast<std::uint32_t>(tag));
        outcomes[i] = run_sprt(model, hyp, sprt, rng, cfg.cap);
      },
      cfg.progress ? (hyp == Hypothesis::Pre ? "sprt_pre" : "sprt_post") : nullptr);

  std::vector<double> times, sums, hits, residuals, upper, lower;
  for (const auto& o : outcomes) {
    if (!o) continue;
    const double t = static_cast<double>(o->stopping_time);
    times.push_back(t);
    sums.push_back(o->terminal_sum);
    residuals.push_back(o->terminal_sum - t * mean_llr);
    const bool up = o->hit == SprtBoundary::Upper;
    hits.push_back(up ? 1.0 : 0.0);
    (up ? upper : lower).push_back(o->overshoot);
  }
  if (times.empty()) throw ConfigError("sprt: every replication hit the cap");
  const std::uint64_t truncated = cfg.replications - times.size();
  return {summarize(times, truncated),        summarize(sums, truncated),    summarize(hits, truncated),
          summarize(residuals, truncated),    conditional(upper, truncated), conditional(lower, truncated)};
}

SprtErrorEstimates estimate_sprt_errors(const ChangeModel& model, const SprtConfig& sprt, const McConfig& cfg) {
  const McEstimate alpha = estimate_sprt(model, Hypothesis::Pre, sprt, cfg).upper_hit;
  McEstimate beta = estimate_sprt(model, Hypothesis::Post, sprt, cfg).upper_hit;
  beta.mean = 1.0 - beta.mean;
  return {alpha, beta};
}

ConditionalOvershoots estimate_conditional_overshoots(const ChangeModel& model, Hypothesis hyp,
                                                      const SprtConfig& sprt, const McConfig& cfg) {
  const auto e = estimate_sprt(model, hyp, sprt, cfg);
  if (e.upper_overshoot.insufficient || e.lower_overshoot.insufficient) {
    std::cerr << "warning: fewer than " << kMinHits << " boundary hits for a conditional overshoot\n";
  }
  return {e.upper_overshoot, e.lower_overshoot};
}

}  // namespace cqcd
