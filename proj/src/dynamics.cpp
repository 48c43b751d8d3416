#include "hisd/dynamics.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "hisd/theory.hpp"

namespace hisd::dynamics {

namespace {

using eigensolve::eigensol;
using eigensolve::exact_k_smallest;
using eigensolve::LobpcgState;
using linalg::axpy;
using linalg::dot;
using linalg::matvec;
using linalg::mgs_orth;
using linalg::norm2;
using linalg::operator_norm;
using linalg::subtract;

constexpr double kContractionFloor = 1e-14; // stop logging ratios below this r

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Nodes and weights of n-point Gauss-Legendre quadrature on [0, 1], via
// Newton iteration on the Legendre recurrence.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_01(int n) {
  std::vector<double> nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 + x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp); // already halved for [0,1]
  }
  return {nodes, weights};
}

double resolve_beta(const EnergyLandscape& land, const SaddleRunConfig& cfg,
                    const Vector& x0, const std::optional<Vector>& x_star,
                    IterationTrace& trace) {
  if (cfg.beta_policy == SaddleRunConfig::BetaPolicy::constant) {
    if (!(cfg.beta > 0.0))
      fail(ErrorCode::invalid_argument, "run: constant beta policy needs beta > 0");
    return cfg.beta;
  }
  const Vector& ref = x_star ? *x_star : x0;
  const theory::SpectrumStats st = theory::spectrum_stats(land.hessian(ref));
  trace.put("mu_hat", fmt(st.mu));
  trace.put("L_hat", fmt(st.L));
  trace.put("kappa_hat", fmt(st.kappa));
  theory::RateBundle bundle;
  switch (cfg.beta_policy) {
    case SaddleRunConfig::BetaPolicy::theory_exact:
      bundle = theory::rate_exact(st.mu, st.L, 1.0);
      break;
    case SaddleRunConfig::BetaPolicy::theory_alpha_index1:
      bundle = theory::rate_index1_approx(st.mu, st.L, 1.0, cfg.alpha);
      break;
    case SaddleRunConfig::BetaPolicy::theory_alpha_indexk:
      bundle = theory::rate_indexk_approx(st.mu, st.L, 1.0, cfg.alpha);
      break;
    default: break;
  }
  trace.put("beta_policy_rate", fmt(bundle.rate));
  return bundle.beta;
}

const char* policy_name(SaddleRunConfig::BetaPolicy p) {
  switch (p) {
    case SaddleRunConfig::BetaPolicy::constant: return "constant";
    case SaddleRunConfig::BetaPolicy::theory_exact: return "theory-exact";
    case SaddleRunConfig::BetaPolicy::theory_alpha_index1: return "theory-alpha-index1";
    case SaddleRunConfig::BetaPolicy::theory_alpha_indexk: return "theory-alpha-indexk";
  }
  return "?";
}

const char* method_name(EigenSolverConfig::Method m) {
  switch (m) {
    case EigenSolverConfig::Method::exact: return "exact";
    case EigenSolverConfig::Method::sirqit: return "sirqit";
    case EigenSolverConfig::Method::lobpcg: return "lobpcg";
  }
  return "?";
}

} // namespace

void IterationTrace::put(const std::string& key, const std::string& value) {
  for (auto& kv : metadata)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  metadata.emplace_back(key, value);
}

const std::string* IterationTrace::find(const std::string& key) const {
  for (const auto& kv : metadata)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

Vector position_step(const EnergyLandscape& land, const Vector& x,
                     const OrthoFrame& v, double beta) {
  if (x.size() != land.dim)
    fail(ErrorCode::invalid_argument, "position_step: dimension mismatch");
  if (!(beta > 0.0)) fail(ErrorCode::invalid_argument, "position_step: beta must be > 0");
  const Vector g = land.gradient(x);
  if (!linalg::all_finite(g)) {
    std::ostringstream os;
    os << "position_step: non-finite gradient at x = [";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << "]";
    fail(ErrorCode::contract_violation, os.str());
  }
  // reflected = g - 2 V (V^T g)
  const std::size_t d = x.size();
  const Matrix& vc = v.columns();
  Vector vt_g(v.width(), 0.0);
  for (std::size_t j = 0; j < v.width(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += vc(i, j) * g[i];
    vt_g[j] = s;
  }
  Vector out(d);
  for (std::size_t i = 0; i < d; ++i) {
    double refl = g[i];
    for (std::size_t j = 0; j < v.width(); ++j) refl -= 2.0 * vc(i, j) * vt_g[j];
    out[i] = x[i] - beta * refl;
  }
  return out;
}

OrthoFrame default_initial_frame(const EnergyLandscape& land, const Vector& x0,
                                 std::size_t k, std::uint64_t seed, double noise) {
  const auto [frame, values] = exact_k_smallest(land.hessian(x0), k);
  if (noise == 0.0) return frame;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise);
  Matrix m = frame.columns();
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) += gauss(rng);
  return mgs_orth(m);
}

IterationTrace run(const EnergyLandscape& land, const SaddleRunConfig& cfg,
                   const Vector& x0, std::optional<OrthoFrame> v0,
                   std::optional<Vector> x_star) {
  const auto t_start = std::chrono::steady_clock::now();
  if (x0.size() != land.dim)
    fail(ErrorCode::invalid_argument, "run: x0 dimension mismatch");
  if (!linalg::all_finite(x0))
    fail(ErrorCode::invalid_argument, "run: x0 has non-finite entries");
  if (cfg.index_k < 1 || static_cast<std::size_t>(cfg.index_k) > land.dim)
    fail(ErrorCode::invalid_argument, "run: index k out of [1, d]");
  if (x_star && x_star->size() != land.dim)
    fail(ErrorCode::invalid_argument, "run: reference point dimension mismatch");
  if (cfg.r_tol > 0.0 && !x_star)
    fail(ErrorCode::missing_data, "run: r tolerance needs a reference point");

  IterationTrace trace;
  const std::size_t k = cfg.index_k;
  const double beta = resolve_beta(land, cfg, x0, x_star, trace);
  EigenSolverConfig eig = cfg.eigen;
  if (eig.method == EigenSolverConfig::Method::sirqit && eig.gamma == 0.0)
    eig.gamma = beta; // one timescale unless overridden

  trace.put("landscape", land.name);
  trace.put("dim", std::to_string(land.dim));
  trace.put("index_k", std::to_string(k));
  trace.put("beta_policy", policy_name(cfg.beta_policy));
  trace.put("beta", fmt(beta));
  trace.put("eigensolver", method_name(eig.method));
  trace.put("sub_iterations", std::to_string(eig.sub_iterations));
  trace.put("gamma", fmt(eig.gamma));
  trace.put("dimer_length", fmt(eig.dimer_length));
  trace.put("use_dimer", eig.use_dimer ? "true" : "false");
  trace.put("seed", std::to_string(cfg.seed));
  trace.put("v0_noise", fmt(cfg.v0_noise));
  trace.put("v0_source", v0 ? "explicit" : "default-perturbed");
  trace.put("grad_tol", fmt(cfg.grad_tol));
  trace.put("r_tol", fmt(cfg.r_tol));
  trace.put("max_iterations", std::to_string(cfg.max_iterations));
  trace.put("diagnostics", cfg.diagnostics ? "true" : "false");
  if (cfg.alpha != 0.0) trace.put("alpha_config", fmt(cfg.alpha));

  OrthoFrame v = v0 ? std::move(*v0)
                    : default_initial_frame(land, x0, k, cfg.seed, cfg.v0_noise);
  if (v.dim() != land.dim || v.width() != k)
    fail(ErrorCode::invalid_argument, "run: v0 shape disagrees with (d, k)");

  const double guard = 1e6 * (1.0 + norm2(x0));
  LobpcgState state;
  Vector x = x0;
  std::string reason;
  // Eigensolver evaluation points trail the position update by construction;
  // counted to let callers assert the ordering.
  long eigensol_calls = 0;
  // Per-record copies of x are skipped for large systems unless diagnostics
  // asked for them; a 400-dim run can hold tens of thousands of records.
  const bool keep_x = cfg.diagnostics || land.dim <= 64;

  const auto record_at = [&](long n, const Vector& xi, std::optional<double> alpha) {
    IterationRecord rec;
    rec.n = n;
    if (keep_x) rec.x = xi;
    rec.grad_norm = norm2(land.gradient(xi));
    if (x_star) {
      Vector diff(xi.size());
      for (std::size_t i = 0; i < xi.size(); ++i) diff[i] = xi[i] - (*x_star)[i];
      rec.r = norm2(diff);
    }
    rec.alpha = alpha;
    rec.beta = beta;
    if (!trace.records.empty() && x_star) {
      IterationRecord& prev = trace.records.back();
      if (prev.r && *prev.r >= kContractionFloor)
        prev.contraction = *rec.r / *prev.r;
    }
    trace.records.push_back(std::move(rec));
  };

  std::optional<double> alpha0;
  if (cfg.diagnostics)
    alpha0 = linalg::projector_distance(v, exact_k_smallest(land.hessian(x0), k).first);
  record_at(0, x0, alpha0);

  for (long n = 0; n < cfg.max_iterations; ++n) {
    const IterationRecord& cur = trace.records.back();
    if (cfg.grad_tol > 0.0 && cur.grad_norm < cfg.grad_tol) {
      reason = "gradient_tolerance";
      break;
    }
    if (cfg.r_tol > 0.0 && cur.r && *cur.r < cfg.r_tol) {
      reason = "r_tolerance";
      break;
    }
    Vector x_next = position_step(land, x, v, beta);
    Vector from_start(x_next.size());
    for (std::size_t i = 0; i < x_next.size(); ++i) from_start[i] = x_next[i] - x0[i];
    if (norm2(from_start) > guard) {
      reason = "diverged";
      x = std::move(x_next);
      record_at(n + 1, x, std::nullopt);
      break;
    }
    auto res = eigensol(land, x_next, v, std::move(state), eig, cfg.diagnostics);
    ++eigensol_calls;
    v = std::move(res.frame);
    state = std::move(res.state);
    x = std::move(x_next);
    record_at(n + 1, x, res.alpha);
  }
  if (reason.empty()) reason = "max_iterations";

  trace.termination = reason;
  trace.put("termination", reason);
  trace.put("iterations", std::to_string(trace.records.size() - 1));
  trace.put("eigensol_calls", std::to_string(eigensol_calls));
  trace.put("eigensol_trails_position", "true");
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  trace.put("wall_seconds", fmt(trace.wall_seconds));
  return trace;
}

StepDecomposition single_step_decomposition(const EnergyLandscape& land,
                                            const Vector& x, const OrthoFrame& v,
                                            double beta, const Vector& x_star) {
  if (x.size() != land.dim || x_star.size() != land.dim)
    fail(ErrorCode::invalid_argument, "single_step_decomposition: dimension mismatch");
  const std::size_t d = land.dim;

  // A = I - 2 V V^T
  Matrix a = Matrix::identity(d);
  {
    const Matrix p = v.projector();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) a(i, j) -= 2.0 * p(i, j);
  }
  const Matrix h_now = land.hessian(x);

  StepDecomposition out;
  out.q = subtract(Matrix::identity(d), linalg::scale(matmul(a, h_now), beta));
  out.q_norm = operator_norm(out.q);

  Vector diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - x_star[i];
  out.r = norm2(diff);

  const auto [nodes, weights] = gauss_legendre_01(32);
  Matrix h_avg(d, d);
  double m_hat = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    Vector xt(d);
    for (std::size_t i = 0; i < d; ++i) xt[i] = x_star[i] + nodes[q] * diff[i];
    const Matrix ht = land.hessian(xt);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) h_avg(i, j) += weights[q] * ht(i, j);
    if (out.r > 0.0 && nodes[q] < 1.0) {
      const double dist = (1.0 - nodes[q]) * out.r;
      m_hat = std::max(m_hat, operator_norm(subtract(h_now, ht)) / dist);
    }
  }
  out.m_hat = m_hat;

  const Matrix t_map = subtract(Matrix::identity(d), linalg::scale(matmul(a, h_avg), beta));
  out.b = subtract(t_map, out.q);
  out.b_norm = operator_norm(out.b);
  out.b_bound = 0.5 * beta * m_hat * out.r;

  const Vector x_next = position_step(land, x, v, beta);
  Vector lhs(d);
  const Vector qb_diff = matvec(t_map, diff); // (Q + B)(x - x*) = T (x - x*)
  for (std::size_t i = 0; i < d; ++i) lhs[i] = x_next[i] - x_star[i] - qb_diff[i];
  out.identity_residual = norm2(lhs);
  return out;
}

RateFit empirical_rate(const IterationTrace& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    fail(ErrorCode::invalid_argument, "empirical_rate: tail fraction must be in (0,1]");
  std::vector<std::pair<double, double>> pts; // (n, log r)
  for (const IterationRecord& rec : trace.records) {
    if (!rec.r) fail(ErrorCode::missing_data, "empirical_rate: trace lacks distances");
    if (*rec.r <= 0.0) break; // underflow hit; use records before it
    pts.emplace_back(double(rec.n), std::log(*rec.r));
  }
  const std::size_t tail =
      std::max<std::size_t>(std::size_t(std::ceil(pts.size() * tail_fraction)), 1);
  if (pts.size() < tail || tail < 10)
    fail(ErrorCode::invalid_argument,
         "empirical_rate: need at least 10 tail records with positive r, have " +
             std::to_string(tail));
  const std::size_t first = pts.size() - tail;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < pts.size(); ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += pts[i].first * pts[i].first;
    sxy += pts[i].first * pts[i].second;
  }
  const double m = double(tail);
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) fail(ErrorCode::invalid_argument, "empirical_rate: degenerate fit");
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;

  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / m;
  for (std::size_t i = first; i < pts.size(); ++i) {
    const double pred = slope * pts[i].first + intercept;
    ss_res += (pts[i].second - pred) * (pts[i].second - pred);
    ss_tot += (pts[i].second - mean) * (pts[i].second - mean);
  }
  RateFit fit;
  fit.rate = std::exp(slope);
  fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-20 ? 1.0 : 0.0);
  fit.points = long(tail);
  return fit;
}

} // namespace hisd::dynamics
