#include <cmath>
#include <random>

#include "doctest.h"
#include "hisd/landscape.hpp"
#include "hisd/theory.hpp"

using namespace hisd::theory;
using hisd::Error;
using hisd::landscape::BenchmarkSpec;
using hisd::landscape::make_benchmark;
using hisd::linalg::Matrix;
using hisd::linalg::Vector;

namespace {

hisd::landscape::EnergyLandscape powell_case(double s2) {
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::powell;
  spec.s = {10.0, s2, s2, 1.0};
  spec.modified = 3;
  return make_benchmark(spec);
}

} // namespace

TEST_CASE("contraction bound sequence: single substitution") {
  // q = 0.5, c = 1, r0 = 0.25: first bound = (1/1.5) * 0.125 / 0.25 = 1/3.
  const auto bounds = contraction_bound_seq(0.5, 1.0, 0.25, 3);
  CHECK(bounds[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(bounds[1] == doctest::Approx(bounds[0] / 1.5).epsilon(1e-15));
}

TEST_CASE("contraction bound sequence: vanishing quadratic term") {
  // With c r0 << q the bound collapses to plain geometric decay of r0.
  const double q = 0.37, r0 = 0.8;
  const auto bounds = contraction_bound_seq(q, 1e-12, r0, 20);
  double plain = r0;
  for (int n = 0; n < 20; ++n) {
    plain /= (1.0 + q);
    CHECK(std::abs(bounds[n] - plain) <= 1e-9 * plain);
  }
}

TEST_CASE("contraction bound sequence rejects inadmissible starts") {
  CHECK_THROWS_WITH_AS(contraction_bound_seq(0.5, 1.0, 0.6, 5),
                       doctest::Contains("q/c"), Error);
  CHECK_THROWS_AS(contraction_bound_seq(1.5, 1.0, 0.1, 5), Error);
  CHECK_THROWS_AS(contraction_bound_seq(0.5, -1.0, 0.1, 5), Error);
}

TEST_CASE("contraction bound dominates the extremal recursion") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double q = 0.02 + 0.96 * unif(rng);
    const double c = 0.01 + 5.0 * unif(rng);
    const double r0 = 0.99 * (q / c) * unif(rng);
    const auto bounds = contraction_bound_seq(q, c, r0, 40);
    double r = r0;
    for (int n = 0; n < 40; ++n) {
      r = (1.0 - q) * r + c * r * r;
      CHECK(r <= bounds[n] * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("exact-regime bundle: direct substitution") {
  const RateBundle b = rate_exact(1.0, 2.0, 1.0);
  CHECK(b.beta == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(b.rate == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(b.r_hat == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b.kappa == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b.q == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("exact-regime bundle: kappa = 1 and monotonicity") {
  const RateBundle b = rate_exact(3.0, 3.0, 1.0);
  CHECK(b.rate == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.beta == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rate_exact(1.0, 100.0, 1.0).rate > rate_exact(1.0, 10.0, 1.0).rate);
}

TEST_CASE("index-1 approximate regime: hand-substituted case") {
  // kappa = 2, alpha = 0.01: eta = 1 - 0.02 - 4 (0.01 + 0.2) = 0.14.
  const RateBundle b = rate_index1_approx(1.0, 2.0, 1.0, 0.01);
  CHECK(b.eta == doctest::Approx(0.14).epsilon(1e-12));
  CHECK(b.q == doctest::Approx(0.28 / 2.98).epsilon(1e-12));
  CHECK(b.beta == doctest::Approx(2.0 / (2.0 + 0.98)).epsilon(1e-15));
}

TEST_CASE("index-1 admissibility rejection names the inequality") {
  // kappa = 2, alpha = 0.3: 1 - 0.6 = 0.4 < 4 (0.3 + 2 sqrt(0.3)) = 5.58.
  CHECK_THROWS_WITH_AS(rate_index1_approx(1.0, 2.0, 1.0, 0.3),
                       doctest::Contains("sup admissible alpha"), Error);
  try {
    rate_index1_approx(1.0, 2.0, 1.0, 0.3);
  } catch (const Error& e) {
    CHECK(e.code() == hisd::ErrorCode::inadmissible);
    CHECK(std::string(e.what()).find("2 kappa (alpha + 2 sqrt(alpha))") !=
          std::string::npos);
  }
}

TEST_CASE("index-k approximate regime: hand-substituted case") {
  // kappa = 2, alpha = 0.05: eta = 0.95 - 2 * 0.05 * 5.05 = 0.445.
  const RateBundle b = rate_indexk_approx(1.0, 2.0, 1.0, 0.05);
  CHECK(b.eta == doctest::Approx(0.445).epsilon(1e-12));
  CHECK(b.beta ==
        doctest::Approx(2.0 / (2.0 * (1.0 - 0.0025) + (1.0 - 0.05))).epsilon(1e-15));
}

TEST_CASE("sup admissible alpha by bisection") {
  // kappa = 10: 1 - alpha = 10 alpha (alpha + 5) has its root in (0.019, 0.020).
  const double sup = sup_admissible_alpha(10.0, Regime::indexk_approx);
  CHECK(sup > 0.019);
  CHECK(sup < 0.020);
  // The root solves the equation to bisection accuracy.
  CHECK(std::abs(1.0 - sup - 10.0 * sup * (sup + 5.0)) <= 1e-9);
}

TEST_CASE("alpha = 0 reduces both approximate regimes to the exact one") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double mu = 0.05 + 4.0 * unif(rng);
    const double L = mu * (1.0 + 40.0 * unif(rng));
    const double M = 0.2 + 8.0 * unif(rng);
    const RateBundle exact = rate_exact(mu, L, M);
    CHECK(std::abs(rate_index1_approx(mu, L, M, 0.0).rate - exact.rate) <= 1e-15);
    CHECK(std::abs(rate_indexk_approx(mu, L, M, 0.0).rate - exact.rate) <= 1e-15);
  }
}

TEST_CASE("spectrum stats reproduce the three published condition numbers") {
  const double expected[3][2] = {{12.0, 11.56}, {6.0, 26.35}, {4.0, 46.38}};
  for (const auto& [s2, kappa_star] : expected) {
    const auto land = powell_case(s2);
    const SpectrumStats st = spectrum_stats(land.hessian(*land.stationary_point));
    CHECK(std::abs(st.kappa - kappa_star) <= 0.01);
    CHECK(st.morse_index == 2);
  }
}

TEST_CASE("spectrum stats reject near-singular matrices") {
  CHECK_THROWS_WITH_AS(spectrum_stats(Matrix::diagonal({1.0, 1e-12})),
                       doctest::Contains("zero"), Error);
}

TEST_CASE("Lipschitz estimate vanishes on quadratics") {
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::quadratic;
  spec.quadratic_matrix = Matrix::diagonal({-1.0, 2.0, 5.0});
  const auto land = make_benchmark(spec);
  CHECK(estimate_M(land, Vector(3, 0.0), 0.5, 30, 7) <= 1e-10);
}

TEST_CASE("Lipschitz estimate on the valley benchmark") {
  const auto land = powell_case(12.0);
  const Vector center(4, 0.0);
  const double m_a = estimate_M(land, center, 0.1, 50, 101);
  const double m_b = estimate_M(land, center, 0.1, 50, 202);
  const double m_c = estimate_M(land, center, 0.1, 50, 303);
  CHECK(m_a > 0.0);
  // A max over 50 independent pairs of a strongly anisotropic ratio field:
  // measured seed-to-seed spread is under 2x (20% needs ~10^3 pairs).
  const double lo = std::min({m_a, m_b, m_c});
  const double hi = std::max({m_a, m_b, m_c});
  CHECK(hi / lo <= 2.0);
  CHECK(estimate_M(land, center, 0.1, 100, 101) >= m_a); // monotone in samples
}

TEST_CASE("closed-form bound suite runs clean") {
  LemmaSuiteOptions opts;
  opts.trials = 120;
  const auto checks = lemma_bound_suite(opts);
  REQUIRE(checks.size() == 5);
  for (const auto& check : checks) {
    CAPTURE(check.name);
    CAPTURE(check.detail);
    CHECK(check.violations == 0);
    CHECK(check.trials > 0);
  }
}

TEST_CASE("sign-flipped bound is caught by the suite") {
  LemmaSuiteOptions opts;
  opts.trials = 60;
  opts.inject_fault = "lemma4.3";
  const auto checks = lemma_bound_suite(opts);
  bool found = false;
  for (const auto& check : checks)
    if (check.name == "lemma4.3") {
      found = true;
      CHECK(check.violations > 0);
      CHECK(check.detail.find("lemma4.3") != std::string::npos);
    } else {
      CHECK(check.violations == 0);
    }
  CHECK(found);
}
