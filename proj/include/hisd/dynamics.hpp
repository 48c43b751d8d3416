#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hisd/eigensolve.hpp"
#include "hisd/landscape.hpp"
#include "hisd/linalg.hpp"

namespace hisd::dynamics {

using eigensolve::EigenSolverConfig;
using landscape::EnergyLandscape;
using linalg::Matrix;
using linalg::OrthoFrame;
using linalg::Vector;

struct SaddleRunConfig {
  enum class BetaPolicy { constant, theory_exact, theory_alpha_index1, theory_alpha_indexk };

  int index_k = 1;
  BetaPolicy beta_policy = BetaPolicy::constant;
  double beta = 0.0;  // constant policy
  double alpha = 0.0; // the alpha entering the theory-alpha policies
  EigenSolverConfig eigen;
  long max_iterations = 10000;
  double grad_tol = 1e-10; // 0 disables
  double r_tol = 0.0;      // 0 disables; needs a reference point
  bool diagnostics = false;
  std::uint64_t seed = 0;   // drives the default warm-start perturbation
  double v0_noise = 0.1;    // 0 starts from the exact eigenframe at x0
};

struct IterationRecord {
  long n = 0;
  Vector x;
  double grad_norm = 0.0;
  std::optional<double> r;           // ||x - x*|| when the reference is known
  std::optional<double> alpha;       // eigensolver accuracy at this iterate
  std::optional<double> contraction; // r_{n+1} / r_n, filled by the next step
  double beta = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::string termination;
  double wall_seconds = 0.0;

  void put(const std::string& key, const std::string& value);
  const std::string* find(const std::string& key) const;
};

/// x - beta (I - 2 V V^T) grad E(x), assembled as g - 2 V (V^T g).
Vector position_step(const EnergyLandscape& land, const Vector& x,
                     const OrthoFrame& v, double beta);

/// The default warm start: exact eigenframe at x0 plus Gaussian noise of the
/// given scale, re-orthonormalized. Deterministic in the seed.
OrthoFrame default_initial_frame(const EnergyLandscape& land, const Vector& x0,
                                 std::size_t k, std::uint64_t seed, double noise);

/// Alternates the position update with the configured eigensolver (which
/// always sees the freshly updated point). Stops on the gradient tolerance,
/// the distance tolerance, the iteration cap, or the divergence guard
/// ||x - x0|| > 1e6 (1 + ||x0||).
IterationTrace run(const EnergyLandscape& land, const SaddleRunConfig& cfg,
                   const Vector& x0, std::optional<OrthoFrame> v0,
                   std::optional<Vector> x_star);

/// One-step splitting of the iteration map around a known stationary point:
/// Q from the current Hessian, B as the quadrature remainder, together with
/// the residual of the identity x' - x* = (Q + B)(x - x*) and the sampled
/// remainder bound.
struct StepDecomposition {
  Matrix q;
  Matrix b;
  double q_norm = 0.0;
  double b_norm = 0.0;
  double identity_residual = 0.0; // vs 1e-8 * r
  double b_bound = 0.0;           // beta/2 * sampled M * r
  double m_hat = 0.0;
  double r = 0.0;
};

StepDecomposition single_step_decomposition(const EnergyLandscape& land,
                                            const Vector& x, const OrthoFrame& v,
                                            double beta, const Vector& x_star);

struct RateFit {
  double rate = 0.0;
  double r_squared = 0.0;
  long points = 0;
};

/// Least-squares slope of log r_n over the trailing fraction of records with
/// positive r; rate = exp(slope). Needs at least 10 usable tail records.
RateFit empirical_rate(const IterationTrace& trace, double tail_fraction);

} // namespace hisd::dynamics
