#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hisd/landscape.hpp"
#include "hisd/linalg.hpp"

namespace hisd::theory {

using linalg::Matrix;
using linalg::Vector;

enum class Regime { exact, index1_approx, indexk_approx };

/// Closed-form constants attached to one convergence regime.
struct RateBundle {
  double mu = 0.0;
  double L = 0.0;
  double kappa = 0.0;
  double M = 0.0;
  double alpha = 0.0;
  Regime regime = Regime::exact;
  double beta = 0.0;   // prescribed step size
  double q = 0.0;      // linear contraction margin
  double c = 0.0;      // quadratic coefficient
  double eta = 0.0;    // admissibility margin (1 in the exact regime)
  double r_hat = 0.0;  // guaranteed attraction radius 2*mu*eta/M (optimistic:
                       // M is a sampled lower bound wherever it is estimated)
  double rate = 0.0;   // per-step factor of the closed-form bound
};

const char* regime_name(Regime r);

/// Bound sequence of the contraction recursion r_{n+1} <= (1-q) r_n + c r_n^2:
/// entry n bounds r_{n+1} by (1/(1+q))^{n+1} * q r0 / (q - c r0).
/// Requires q in (0,1), c > 0 and the admissibility r0 < q/c.
std::vector<double> contraction_bound_seq(double q, double c, double r0, int n_terms);

RateBundle rate_exact(double mu, double L, double M);

/// Approximate-eigenvector regime for index 1. Admissible when
/// alpha < 1/2 and 1 - 2 alpha > 2 kappa (alpha + 2 sqrt(alpha));
/// a violation raises inadmissible naming the failed inequality and the
/// supremum admissible alpha.
RateBundle rate_index1_approx(double mu, double L, double M, double alpha);

/// Approximate-subspace regime for index k. Admissible when
/// 1 - alpha > kappa alpha (alpha + 5).
RateBundle rate_indexk_approx(double mu, double L, double M, double alpha);

/// Largest alpha satisfying the regime's admissibility condition at this
/// kappa, bisected to 1e-12. Regime::exact returns 0.
double sup_admissible_alpha(double kappa, Regime regime);

struct SpectrumStats {
  double mu = 0.0;     // min |eigenvalue|
  double L = 0.0;      // max |eigenvalue|
  double kappa = 0.0;  // L / mu
  int morse_index = 0; // negative eigenvalues
  double gap_to_zero = 0.0;
};

/// Eigenvalue-magnitude bounds of a symmetric matrix. An eigenvalue within
/// 1e-10 of zero raises degenerate.
SpectrumStats spectrum_stats(const Matrix& h);

/// Sampled lower bound on the Hessian Lipschitz constant over a ball:
/// max over `samples` random pairs of ||H(x) - H(y)||_2 / ||x - y||_2.
/// The estimate is monotone in `samples` for a fixed seed.
double estimate_M(const landscape::EnergyLandscape& land, const Vector& center,
                  double radius, int samples, std::uint64_t seed);

struct PropertyCheck {
  std::string name;
  long trials = 0;
  long violations = 0;
  double worst_margin = 0.0;   // min over trials of (bound - value); >= 0 is clean
  std::string detail;          // first counterexample, serialized
  std::vector<double> margins; // per-trial margins, for the CSV report
};

struct LemmaSuiteOptions {
  std::uint64_t seed = 20240101;
  long trials = 500;
  std::string inject_fault; // name of a check whose bound gets sign-flipped
};

/// Randomized construction of every matrix object behind the closed-form
/// norm bounds, asserting each bound with slack 1e-10:
///   lemma3.1  contraction bound vs the extremal recursion
///   lemma3.3  ||Q||_2 <= max{|1-beta L|, |1-beta mu|}
///   lemma4.3  rank-one-coupling bound for the index-1 cross terms
///   lemma5.3  block bounds of the subspace-overlap factors
///   eq5.12    assembled reflected-iteration norm bound under admissibility
std::vector<PropertyCheck> lemma_bound_suite(const LemmaSuiteOptions& opts);

} // namespace hisd::theory
