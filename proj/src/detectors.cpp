#include "cqcd/detectors.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "cqcd/errors.hpp"
#include "cqcd/llr_sampler.hpp"

namespace cqcd {
namespace {

void require_threshold(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "cusum: threshold must be positive and finite, got " << h;
    throw DomainError(msg.str());
  }
}

void require_cap(std::uint64_t cap) {
  if (cap == 0) throw DomainError("detector run: cap must be positive");
}

// Shared CuSum loop over any LLR source; `next` returns false when exhausted.
template <typename Next>
std::optional<CusumAlarm> cusum_loop(double h, std::uint64_t cap, Next&& next, Trajectory* trajectory) {
  double w = 0.0;
  double y = 0.0;
  for (std::uint64_t k = 1; k <= cap; ++k) {
    if (!next(y)) return std::nullopt;
    w = std::max(0.0, w + y);
    if (trajectory) trajectory->push_back({k, y, w});
    if (w >= h) return CusumAlarm{k, w - h};
  }
  return std::nullopt;
}

template <typename Next>
std::optional<SprtOutcome> sprt_loop(const SprtConfig& cfg, std::uint64_t cap, Next&& next,
                                     Trajectory* trajectory) {
  const double a = cfg.a();
  const double b = cfg.b();
  double s = 0.0;
  double y = 0.0;
  for (std::uint64_t k = 1; k <= cap; ++k) {
    if (!next(y)) return std::nullopt;
    s += y;
    if (trajectory) trajectory->push_back({k, y, s});
    if (s >= b) return SprtOutcome{k, s, SprtBoundary::Upper, s - b};
    if (s <= a) return SprtOutcome{k, s, SprtBoundary::Lower, s - a};
  }
  return std::nullopt;
}

}  // namespace

CusumStep cusum_step(const CusumState& state, double y) {
  CusumState next = state;
  next.statistic = std::max(0.0, state.statistic + y);
  ++next.steps;
  return {next, next.statistic >= state.threshold};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const auto old_precision = out.precision(17);
  out << "step,y,statistic\n";
  for (const auto& p : trajectory) out << p.step << ',' << p.y << ',' << p.statistic << '\n';
  out.precision(old_precision);
}

std::optional<CusumAlarm> run_cusum(const ChangeModel& model, Hypothesis hyp, double h,
                                    RandomStream& rng, std::uint64_t cap, Trajectory* trajectory) {
  require_threshold(h);
  require_cap(cap);
  const LlrSampler sample(model, hyp);
  return cusum_loop(
      h, cap,
      [&](double& y) {
        y = sample(rng);
        return true;
      },
      trajectory);
}

std::optional<CusumAlarm> run_cusum(std::span<const double> llrs, double h, Trajectory* trajectory) {
  require_threshold(h);
  std::size_t i = 0;
  return cusum_loop(
      h, llrs.size(),
      [&](double& y) {
        if (i == llrs.size()) return false;
        y = llrs[i++];
        return true;
      },
      trajectory);
}

SprtConfig::SprtConfig(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a > 0.0 || !(b > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "SprtConfig requires -inf < a <= 0 < b < inf, got a=" << a << ", b=" << b;
    throw DomainError(msg.str());
  }
}

std::optional<SprtOutcome> run_sprt(const ChangeModel& model, Hypothesis hyp, const SprtConfig& cfg,
                                    RandomStream& rng, std::uint64_t cap, Trajectory* trajectory) {
  require_cap(cap);
  const LlrSampler sample(model, hyp);
  return sprt_loop(
      cfg, cap,
      [&](double& y) {
        y = sample(rng);
        return true;
      },
      trajectory);
}

std::optional<SprtOutcome> run_sprt(std::span<const double> llrs, const SprtConfig& cfg,
                                    Trajectory* trajectory) {
  std::size_t i = 0;
  return sprt_loop(
      cfg, llrs.size(),
      [&](double& y) {
        if (i == llrs.size()) return false;
        y = llrs[i++];
        return true;
      },
      trajectory);
}

}  // namespace cqcd
