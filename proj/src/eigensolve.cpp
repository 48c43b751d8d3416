#include "hisd/eigensolve.hpp"

#include <cmath>

namespace hisd::eigensolve {

namespace {

using landscape::dimer_hvp;
using linalg::dot;
using linalg::matmul;
using linalg::matvec;
using linalg::mgs_orth;
using linalg::mgs_orth_drop;
using linalg::norm2;
using linalg::sym_eig;
using linalg::transpose;

// Hessian-vector products at a fixed point: either dimer differences of the
// gradient or one shared Hessian evaluation.
class HvpProvider {
public:
  HvpProvider(const EnergyLandscape& land, const Vector& x, const EigenSolverConfig& cfg)
      : land_(land), x_(x), cfg_(cfg) {}

  Vector apply(const Vector& unit_v) const {
    if (cfg_.use_dimer) return dimer_hvp(land_, x_, unit_v, cfg_.dimer_length);
    if (!hess_) hess_ = land_.hessian(x_);
    return matvec(*hess_, unit_v);
  }

private:
  const EnergyLandscape& land_;
  const Vector& x_;
  const EigenSolverConfig& cfg_;
  mutable std::optional<Matrix> hess_;
};

void validate_cfg(const EigenSolverConfig& cfg) {
  if (cfg.sub_iterations < 1)
    fail(ErrorCode::invalid_argument, "eigensolver: sub_iterations must be >= 1");
  if (cfg.dimer_length <= 0.0)
    fail(ErrorCode::invalid_argument, "eigensolver: dimer length must be > 0");
  if (cfg.method == EigenSolverConfig::Method::sirqit && cfg.gamma < 0.0)
    fail(ErrorCode::invalid_argument, "eigensolver: gamma must be >= 0");
}

} // namespace

std::pair<OrthoFrame, Vector> exact_k_smallest(const Matrix& h, std::size_t k) {
  if (k < 1 || k > h.rows())
    fail(ErrorCode::invalid_argument, "exact_k_smallest: need 1 <= k <= d");
  const linalg::Spectrum s = sym_eig(h);
  Matrix frame(h.rows(), k);
  Vector values(k);
  for (std::size_t j = 0; j < k; ++j) {
    values[j] = s.eigenvalues[j];
    for (std::size_t i = 0; i < h.rows(); ++i) frame(i, j) = s.eigenvectors(i, j);
  }
  return {OrthoFrame(std::move(frame)), std::move(values)};
}

OrthoFrame sirqit_step(const EnergyLandscape& land, const Vector& x,
                       const OrthoFrame& v, const EigenSolverConfig& cfg) {
  validate_cfg(cfg);
  const HvpProvider hvp(land, x, cfg);
  const std::size_t d = v.dim();
  const std::size_t k = v.width();
  Matrix cur = v.columns();
  for (int sweep = 0; sweep < cfg.sub_iterations; ++sweep) {
    Matrix next(d, k);
    for (std::size_t i = 0; i < k; ++i) {
      const Vector vi = cur.column(i);
      const Vector h = hvp.apply(vi);
      Vector w = h;
      const double vih = dot(vi, h);
      for (std::size_t r = 0; r < d; ++r) w[r] -= vih * vi[r];
      for (std::size_t j = 0; j < i; ++j) {
        const Vector vj = cur.column(j);
        const double vjh = 2.0 * dot(vj, h);
        for (std::size_t r = 0; r < d; ++r) w[r] -= vjh * vj[r];
      }
      for (std::size_t r = 0; r < d; ++r) next(r, i) = vi[r] - cfg.gamma * w[r];
    }
    try {
      cur = mgs_orth(next).columns();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::rank_deficient) throw;
      fail(ErrorCode::rank_deficient,
           std::string("sirqit_step: frame collapsed during sweep ") +
               std::to_string(sweep + 1) + " of " + std::to_string(cfg.sub_iterations) +
               " (" + e.what() + ")");
    }
  }
  return OrthoFrame(std::move(cur));
}

std::pair<OrthoFrame, LobpcgState> lobpcg_step(const EnergyLandscape& land,
                                               const Vector& x, const OrthoFrame& v,
                                               LobpcgState state,
                                               const EigenSolverConfig& cfg) {
  validate_cfg(cfg);
  const HvpProvider hvp(land, x, cfg);
  const std::size_t d = v.dim();
  const std::size_t k = v.width();
  Matrix cur = v.columns();

  for (int sweep = 0; sweep < cfg.sub_iterations; ++sweep) {
    // Residual block W = H V - V (V^T H V).
    Matrix hv(d, k);
    for (std::size_t j = 0; j < k; ++j) {
      const Vector h = hvp.apply(cur.column(j));
      for (std::size_t i = 0; i < d; ++i) hv(i, j) = h[i];
    }
    const Matrix rayleigh = matmul(transpose(cur), hv);
    const Matrix res = linalg::subtract(hv, matmul(cur, rayleigh));

    const bool has_p = !state.previous_direction.empty();
    Matrix trial(d, k + k + (has_p ? state.previous_direction.cols() : 0));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        trial(i, j) = cur(i, j);
        trial(i, k + j) = res(i, j);
      }
      if (has_p)
        for (std::size_t j = 0; j < state.previous_direction.cols(); ++j)
          trial(i, 2 * k + j) = state.previous_direction(i, j);
    }
    const Matrix basis = mgs_orth_drop(trial, 1e-10);
    if (basis.cols() < k)
      fail(ErrorCode::rank_deficient,
           "lobpcg_step: trial basis kept only " + std::to_string(basis.cols()) +
               " independent columns, need " + std::to_string(k));

    Matrix hbasis(d, basis.cols());
    for (std::size_t j = 0; j < basis.cols(); ++j) {
      const Vector h = hvp.apply(basis.column(j));
      for (std::size_t i = 0; i < d; ++i) hbasis(i, j) = h[i];
    }
    Matrix gram = matmul(transpose(basis), hbasis);
    for (std::size_t i = 0; i < gram.rows(); ++i)
      for (std::size_t j = i + 1; j < gram.cols(); ++j) {
        const double s = 0.5 * (gram(i, j) + gram(j, i));
        gram(i, j) = s;
        gram(j, i) = s;
      }
    const linalg::Spectrum ritz = sym_eig(gram);
    Matrix y(gram.rows(), k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < gram.rows(); ++i) y(i, j) = ritz.eigenvectors(i, j);
    Matrix out = matmul(basis, y);

    const Matrix overlap = matmul(transpose(cur), out);
    state.previous_direction = linalg::subtract(out, matmul(cur, overlap));
    // Ritz vectors of an orthonormal basis are orthonormal up to roundoff;
    // one MGS pass restores the frame contract exactly.
    cur = mgs_orth(out).columns();
  }
  return {OrthoFrame(std::move(cur)), std::move(state)};
}

EigensolResult eigensol(const EnergyLandscape& land, const Vector& x,
                        const OrthoFrame& warm, LobpcgState state,
                        const EigenSolverConfig& cfg, bool diagnostics) {
  validate_cfg(cfg);
  const std::size_t k = warm.width();
  OrthoFrame out = warm;
  switch (cfg.method) {
    case EigenSolverConfig::Method::exact:
      out = exact_k_smallest(land.hessian(x), k).first;
      break;
    case EigenSolverConfig::Method::sirqit:
      out = sirqit_step(land, x, warm, cfg);
      break;
    case EigenSolverConfig::Method::lobpcg: {
      auto [frame, st] = lobpcg_step(land, x, warm, std::move(state), cfg);
      out = std::move(frame);
      state = std::move(st);
      break;
    }
  }

  EigensolResult result{std::move(out), std::move(state), std::nullopt};
  if (diagnostics) {
    const auto [exact_frame, values] = exact_k_smallest(land.hessian(x), k);
    const double alpha = linalg::projector_distance(result.frame, exact_frame);
    if (k == 1) {
      // Line case: |v^T vhat|^2 = 1 - alpha^2 up to roundoff.
      double c = 0.0;
      for (std::size_t i = 0; i < warm.dim(); ++i)
        c += exact_frame.columns()(i, 0) * result.frame.columns()(i, 0);
      if (c * c < 1.0 - alpha * alpha - 1e-10)
        fail(ErrorCode::no_convergence,
             "eigensol diagnostics: cosine condition violated (cos^2 = " +
                 std::to_string(c * c) + ", 1 - alpha^2 = " +
                 std::to_string(1.0 - alpha * alpha) + ")");
    }
    result.alpha = alpha;
  }
  return result;
}

} // namespace hisd::eigensolve
