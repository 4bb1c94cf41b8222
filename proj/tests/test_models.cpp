#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cqcd/errors.hpp"
#include "cqcd/llr_sampler.hpp"
#include "cqcd/models.hpp"
#include "oracles.hpp"

using namespace cqcd;

namespace {

double pre_density(const ChangeModel& m, double x) {
  if (std::holds_alternative<GaussianModel>(m)) return oracle::normal_pdf(x, 0.0, 1.0);
  const double l = std::get<ExponentialModel>(m).lambda_pre();
  return l * std::exp(-l * x);
}

double post_density(const ChangeModel& m, double x) {
  if (const auto* g = std::get_if<GaussianModel>(&m)) return oracle::normal_pdf(x, g->mu(), 1.0 + g->sigma2());
  const double l = std::get<ExponentialModel>(m).lambda_post();
  return l * std::exp(-l * x);
}

}  // namespace

TEST_CASE("model invariants") {
  CHECK_THROWS_AS(GaussianModel(0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(GaussianModel(0.1, -0.1), ParameterError);
  CHECK_THROWS_AS(GaussianModel(NAN, 0.1), ParameterError);
  CHECK_THROWS_AS(ExponentialModel(1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(ExponentialModel(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(ExponentialModel(1.0, -2.0), ParameterError);
  CHECK_NOTHROW(GaussianModel(0.0, 0.1));
}

TEST_CASE("llr closed forms") {
  CHECK(llr(GaussianModel(0.6, 0.0), 0.3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(llr(ExponentialModel(1.0, 2.0), 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(llr(ExponentialModel(1.0, 2.0), -0.1), DomainError);
  const ChangeModel g = GaussianModel(0.3, 0.1);
  const double expected = std::log(post_density(g, 1.0) / pre_density(g, 1.0));
  CHECK(std::abs(llr(g, 1.0) - expected) < 1e-12);
}

TEST_CASE("exp(llr) equals the density ratio on sampled observations") {
  for (const ChangeModel& m : {ChangeModel(GaussianModel(0.4, 0.3)), ChangeModel(ExponentialModel(1.0, 1.7))}) {
    RandomStream rng(11, 0);
    for (int i = 0; i < 100000; ++i) {
      const double x = sample_observation(m, i % 2 ? Hypothesis::Pre : Hypothesis::Post, rng);
      const double ratio = post_density(m, x) / pre_density(m, x);
      REQUIRE(std::abs(std::exp(llr(m, x)) / ratio - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("kl divergences") {
  const auto g = kl_divergences(GaussianModel(0.2, 0.0));
  CHECK(g.d_post_pre == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(g.d_pre_post == doctest::Approx(0.02).epsilon(1e-14));
  const auto e = kl_divergences(ExponentialModel(1.0, 1.5));
  CHECK(e.d_pre_post == doctest::Approx(0.0945348918918356).epsilon(1e-14));

  // quadrature of the defining integrals
  for (const ChangeModel& m : {ChangeModel(GaussianModel(0.3, 0.4)), ChangeModel(ExponentialModel(1.0, 1.5)),
                               ChangeModel(ExponentialModel(2.0, 0.7))}) {
    const bool gauss = std::holds_alternative<GaussianModel>(m);
    const double lo = gauss ? -30.0 : 0.0;
    const double hi = gauss ? 30.0 : 80.0;
    const double d_pre_post = oracle::integrate([&](double x) { return pre_density(m, x) * -llr(m, x); }, lo, hi);
    const double d_post_pre = oracle::integrate([&](double x) { return post_density(m, x) * llr(m, x); }, lo, hi);
    const auto kl = kl_divergences(m);
    CHECK(std::abs(kl.d_pre_post - d_pre_post) < 1e-8);
    CHECK(std::abs(kl.d_post_pre - d_post_pre) < 1e-8);
  }
}

TEST_CASE("kl divergences stay accurate for nearly equal laws") {
  const auto g = kl_divergences(GaussianModel(0.0, 1e-6));
  CHECK(g.d_post_pre == doctest::Approx(0.25e-12).epsilon(1e-5));
  CHECK(g.d_pre_post == doctest::Approx(0.25e-12).epsilon(1e-5));
  const auto e = kl_divergences(ExponentialModel(1.0, 1.0 + 1e-6));
  CHECK(e.d_pre_post == doctest::Approx(0.5e-12).epsilon(1e-5));
}

TEST_CASE("sample means") {
  const int n = 1000000;
  RandomStream rng(5, 0);
  double s = 0;
  const ChangeModel g = GaussianModel(0.5, 0.0);
  for (int i = 0; i < n; ++i) s += sample_observation(g, Hypothesis::Pre, rng);
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  s = 0;
  for (int i = 0; i < n; ++i) s += sample_observation(g, Hypothesis::Post, rng);
  CHECK(std::abs(s / n - 0.5) < 4.0 / std::sqrt(n));
  s = 0;
  const ChangeModel e = ExponentialModel(1.0, 3.0);
  for (int i = 0; i < n; ++i) s += sample_observation(e, Hypothesis::Pre, rng);
  CHECK(std::abs(s / n - 1.0) < 4.0 / std::sqrt(n));
}

TEST_CASE("llr means equal the signed divergences") {
  const int n = 1000000;
  for (const ChangeModel& m : {ChangeModel(GaussianModel(0.3, 0.2)), ChangeModel(ExponentialModel(1.0, 0.6))}) {
    const auto kl = kl_divergences(m);
    for (Hypothesis hyp : {Hypothesis::Pre, Hypothesis::Post}) {
      RandomStream rng(9, hyp == Hypothesis::Pre ? 0 : 1);
      const LlrSampler sample(m, hyp);
      double s = 0, s2 = 0;
      for (int i = 0; i < n; ++i) {
        const double y = sample(rng);
        s += y;
        s2 += y * y;
      }
      const double mean = s / n;
      const double se = std::sqrt((s2 / n - mean * mean) / n);
      const double target = hyp == Hypothesis::Post ? kl.d_post_pre : -kl.d_pre_post;
      CHECK(std::abs(mean - target) < 4.0 * se);
    }
  }
}

TEST_CASE("llr sampler agrees with llr of sampled observations") {
  for (const ChangeModel& m : {ChangeModel(GaussianModel(-0.4, 0.5)), ChangeModel(ExponentialModel(2.0, 1.2))}) {
    for (Hypothesis hyp : {Hypothesis::Pre, Hypothesis::Post}) {
      RandomStream a(3, 1), b(3, 1);
      const LlrSampler sample(m, hyp);
      for (int i = 0; i < 1000; ++i) {
        const double y = sample(a);
        const double ref = llr(m, sample_observation(m, hyp, b));
        REQUIRE(std::abs(y - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("llr density: normalization, support, mean") {
  const GaussianModel g(0.5, 0.2);
  const auto k = gaussian_llr_constants(g);
  for (Hypothesis hyp : {Hypothesis::Pre, Hypothesis::Post}) {
    CHECK(llr_density(g, hyp, k.support_edge - 0.1) == 0.0);
    // substitute y = edge + s^2 to remove the inverse square-root singularity
    const double mass = oracle::integrate(
        [&](double s) { return 2.0 * s * llr_density(g, hyp, k.support_edge + s * s); }, 0.0, 12.0);
    CHECK(std::abs(mass - 1.0) < 1e-8);
  }
  const ExponentialModel e(1.0, 0.5);
  const double a = std::log(0.5);
  const double mean = oracle::integrate([&](double y) { return y * llr_density(e, Hypothesis::Pre, y); }, a, a + 60.0);
  CHECK(std::abs(mean + kl_divergences(e).d_pre_post) < 1e-8);
  for (Hypothesis hyp : {Hypothesis::Pre, Hypothesis::Post}) {
    const GaussianModel m(0.7, 0.0);
    const double mass = oracle::integrate([&](double y) { return llr_density(m, hyp, y); }, -15.0, 15.0);
    CHECK(std::abs(mass - 1.0) < 1e-8);
  }
}

TEST_CASE("llr density matches the sampled distribution") {
  const int n = 100000;
  const std::vector<ChangeModel> models = {GaussianModel(0.5, 0.2), GaussianModel(0.0, 0.3),
                                           ExponentialModel(1.0, 1.6), ExponentialModel(1.0, 0.5)};
  for (const auto& m : models) {
    for (Hypothesis hyp : {Hypothesis::Pre, Hypothesis::Post}) {
      RandomStream rng(17, 0);
      const LlrSampler sample(m, hyp);
      std::vector<double> ys(n);
      for (auto& y : ys) y = sample(rng);
      std::sort(ys.begin(), ys.end());
      double lo = ys.front() - 1.0;
      if (const auto* g = std::get_if<GaussianModel>(&m)) {
        const double edge = gaussian_llr_constants(*g).support_edge;
        CHECK(ys.front() >= edge - 1e-12);
        lo = edge;
      }
      // KS distance evaluated at 200 order statistics, CDF by piecewise quadrature
      double ks = 0.0, cdf = 0.0, prev = lo;
      for (int j = 1; j <= 200; ++j) {
        const std::size_t idx = static_cast<std::size_t>(j) * n / 201;
        const double y = ys[idx];
        if (y > prev) {
          if (prev == lo && std::holds_alternative<GaussianModel>(m)) {
            const double span = std::sqrt(y - lo);
            cdf += oracle::integrate([&](double s) { return 2.0 * s * llr_density(m, hyp, lo + s * s); }, 0.0, span,
                                     1e-10);
          } else {
            cdf += oracle::integrate([&](double t) { return llr_density(m, hyp, t); }, prev, y, 1e-10);
          }
          prev = y;
        }
        ks = std::max(ks, std::abs(cdf - (idx + 1.0) / n));
      }
      CHECK(ks < 0.01);
    }
  }
}

TEST_CASE("schedules") {
  AdversarySchedule s;
  s.family = AdversarySchedule::Family::GaussianMean;
  s.c = 1.0;
  s.delta = 0.5;
  CHECK(std::get<GaussianModel>(instantiate(s, 1e4)) == GaussianModel(0.01, 0.0));
  s.family = AdversarySchedule::Family::ExponentialRate;
  s.c = 1.0;
  s.lambda = 2.0;
  const auto e = std::get<ExponentialModel>(instantiate(s, 100.0));
  CHECK(e.lambda_pre() == 2.0);
  CHECK(e.lambda_post() == doctest::Approx(2.2).epsilon(1e-15));
  s.family = AdversarySchedule::Family::GaussianVariance;
  s.c = 2.0;
  s.delta = 1.0;
  const auto v = std::get<GaussianModel>(instantiate(s, 10.0));
  CHECK(v.mu() == 0.0);
  CHECK(v.sigma2() == doctest::Approx(0.2).epsilon(1e-15));

  AdversarySchedule neg;
  neg.family = AdversarySchedule::Family::ExponentialRate;
  neg.sign = -1;
  neg.c = 2.0;
  CHECK_THROWS_AS(instantiate(neg, 4.0), ParameterError);
  CHECK_NOTHROW(instantiate(neg, 16.0));
  neg.delta = 0.0;
  CHECK_THROWS_AS(neg.validate(), ParameterError);
}
