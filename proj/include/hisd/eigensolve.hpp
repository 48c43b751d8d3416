#pragma once

#include <optional>
#include <utility>

#include "hisd/landscape.hpp"
#include "hisd/linalg.hpp"

namespace hisd::eigensolve {

using landscape::EnergyLandscape;
using linalg::Matrix;
using linalg::OrthoFrame;
using linalg::Vector;

struct EigenSolverConfig {
  enum class Method { exact, sirqit, lobpcg };
  Method method = Method::exact;
  int sub_iterations = 1;
  double gamma = 0.0;        // relaxation step of the projected update (sirqit)
  double dimer_length = 1e-3;
  bool use_dimer = true;     // false: exact Hessian-vector products
};

/// Previous update direction carried between position steps; empty on the
/// first call.
struct LobpcgState {
  Matrix previous_direction; // d x k, or 0 x 0
};

/// Invariant subspace of the k smallest eigenvalues, ascending values.
std::pair<OrthoFrame, Vector> exact_k_smallest(const Matrix& h, std::size_t k);

/// One projected-gradient sweep per sub-iteration:
///   v_i* = v_i - gamma (I - v_i v_i^T - 2 sum_{j<i} v_j v_j^T) H v_i
/// followed by modified Gram-Schmidt; products are re-evaluated each sweep.
OrthoFrame sirqit_step(const EnergyLandscape& land, const Vector& x,
                       const OrthoFrame& v, const EigenSolverConfig& cfg);

/// Rayleigh-Ritz over span{V, HV - V(V^T H V), P} per sub-iteration; the
/// returned state carries the new direction block P = V_out - V (V^T V_out).
std::pair<OrthoFrame, LobpcgState> lobpcg_step(const EnergyLandscape& land,
                                               const Vector& x, const OrthoFrame& v,
                                               LobpcgState state,
                                               const EigenSolverConfig& cfg);

struct EigensolResult {
  OrthoFrame frame;
  LobpcgState state;
  std::optional<double> alpha; // projector distance to the exact subspace
};

/// Dispatch of the configured eigenvector refinement, warm-started from the
/// previous frame. With diagnostics on, alpha is measured against the exact
/// k-smallest subspace of the Hessian at x.
EigensolResult eigensol(const EnergyLandscape& land, const Vector& x,
                        const OrthoFrame& warm, LobpcgState state,
                        const EigenSolverConfig& cfg, bool diagnostics);

} // namespace hisd::eigensolve
