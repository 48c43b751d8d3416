#include "hisd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hisd::theory {

namespace {

using linalg::matmul;
using linalg::matvec;
using linalg::mgs_orth;
using linalg::operator_norm;
using linalg::OrthoFrame;
using linalg::subtract;
using linalg::sym_eig;
using linalg::transpose;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_mu_l_m(double mu, double L, double M) {
  if (!(mu > 0.0) || !(L >= mu))
    fail(ErrorCode::invalid_argument, "rate bundle: need 0 < mu <= L");
  if (!(M > 0.0)) fail(ErrorCode::invalid_argument, "rate bundle: need M > 0");
}

// All three regimes share the assembled form; keeping one code path makes the
// alpha = 0 reductions bit-identical to the exact regime.
RateBundle assemble(double mu, double L, double M, double alpha, Regime regime,
                    double eta, double denom_beta, double q_denom_kappa_units) {
  RateBundle b;
  b.mu = mu;
  b.L = L;
  b.kappa = L / mu;
  b.M = M;
  b.alpha = alpha;
  b.regime = regime;
  b.eta = eta;
  b.beta = 2.0 / denom_beta;
  b.q = 2.0 * eta / q_denom_kappa_units;
  b.c = (M / mu) / q_denom_kappa_units;
  b.rate = 1.0 - 2.0 * eta / (q_denom_kappa_units + 2.0 * eta);
  b.r_hat = 2.0 * mu * eta / M;
  return b;
}

} // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::exact: return "exact";
    case Regime::index1_approx: return "index1-approx";
    case Regime::indexk_approx: return "indexk-approx";
  }
  return "?";
}

std::vector<double> contraction_bound_seq(double q, double c, double r0, int n_terms) {
  if (!(q > 0.0) || !(q < 1.0))
    fail(ErrorCode::invalid_argument, "contraction_bound_seq: q must lie in (0,1)");
  if (!(c > 0.0)) fail(ErrorCode::invalid_argument, "contraction_bound_seq: c must be > 0");
  if (!(r0 >= 0.0)) fail(ErrorCode::invalid_argument, "contraction_bound_seq: r0 must be >= 0");
  if (!(r0 < q / c))
    fail(ErrorCode::inadmissible,
         "contraction_bound_seq: r0 = " + fmt(r0) + " is not below q/c = " + fmt(q / c));
  if (n_terms < 0) fail(ErrorCode::invalid_argument, "contraction_bound_seq: negative length");
  std::vector<double> bounds(n_terms);
  const double base = q * r0 / (q - c * r0);
  const double shrink = 1.0 / (1.0 + q);
  double factor = 1.0;
  for (int n = 0; n < n_terms; ++n) {
    factor *= shrink;
    bounds[n] = factor * base;
  }
  return bounds;
}

RateBundle rate_exact(double mu, double L, double M) {
  require_mu_l_m(mu, L, M);
  const double kappa = L / mu;
  return assemble(mu, L, M, 0.0, Regime::exact, 1.0, L + mu, kappa + 1.0);
}

RateBundle rate_index1_approx(double mu, double L, double M, double alpha) {
  require_mu_l_m(mu, L, M);
  if (!(alpha >= 0.0) || !(alpha <= 1.0))
    fail(ErrorCode::invalid_argument, "rate_index1_approx: alpha must lie in [0,1]");
  const double kappa = L / mu;
  if (alpha >= 0.5)
    fail(ErrorCode::inadmissible,
         "rate_index1_approx: alpha = " + fmt(alpha) +
             " violates alpha < 1/2; sup admissible alpha = " +
             fmt(sup_admissible_alpha(kappa, Regime::index1_approx)));
  const double lhs = 1.0 - 2.0 * alpha;
  const double rhs = 2.0 * kappa * (alpha + 2.0 * std::sqrt(alpha));
  if (alpha > 0.0 && !(lhs > rhs))
    fail(ErrorCode::inadmissible,
         "rate_index1_approx: 1 - 2 alpha = " + fmt(lhs) +
             " does not exceed 2 kappa (alpha + 2 sqrt(alpha)) = " + fmt(rhs) +
             "; sup admissible alpha = " +
             fmt(sup_admissible_alpha(kappa, Regime::index1_approx)));
  const double eta = lhs - rhs;
  return assemble(mu, L, M, alpha, Regime::index1_approx, eta,
                  L + (1.0 - 2.0 * alpha) * mu, kappa + (1.0 - 2.0 * alpha));
}

RateBundle rate_indexk_approx(double mu, double L, double M, double alpha) {
  require_mu_l_m(mu, L, M);
  if (!(alpha >= 0.0) || !(alpha <= 1.0))
    fail(ErrorCode::invalid_argument, "rate_indexk_approx: alpha must lie in [0,1]");
  const double kappa = L / mu;
  const double lhs = 1.0 - alpha;
  const double rhs = kappa * alpha * (alpha + 5.0);
  if (alpha > 0.0 && !(lhs > rhs))
    fail(ErrorCode::inadmissible,
         "rate_indexk_approx: 1 - alpha = " + fmt(lhs) +
             " does not exceed kappa alpha (alpha + 5) = " + fmt(rhs) +
             "; sup admissible alpha = " +
             fmt(sup_admissible_alpha(kappa, Regime::indexk_approx)));
  const double eta = lhs - rhs;
  return assemble(mu, L, M, alpha, Regime::indexk_approx, eta,
                  L * (1.0 - alpha * alpha) + mu * (1.0 - alpha),
                  kappa * (1.0 - alpha * alpha) + (1.0 - alpha));
}

double sup_admissible_alpha(double kappa, Regime regime) {
  if (!(kappa >= 1.0))
    fail(ErrorCode::invalid_argument, "sup_admissible_alpha: kappa must be >= 1");
  if (regime == Regime::exact) return 0.0;
  const auto margin = [&](double a) {
    if (regime == Regime::index1_approx)
      return 1.0 - 2.0 * a - 2.0 * kappa * (a + 2.0 * std::sqrt(a));
    return 1.0 - a - kappa * a * (a + 5.0);
  };
  double lo = 0.0;
  double hi = (regime == Regime::index1_approx) ? 0.5 : 1.0;
  // margin(0) = 1 > 0 and margin(hi) < 0; both conditions are strictly
  // decreasing in alpha, so plain bisection applies.
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (margin(mid) > 0.0 ? lo : hi) = mid;
  }
  return lo;
}

SpectrumStats spectrum_stats(const Matrix& h) {
  const linalg::Spectrum s = sym_eig(h);
  SpectrumStats st;
  st.mu = std::numeric_limits<double>::infinity();
  for (double ev : s.eigenvalues) {
    const double a = std::abs(ev);
    st.mu = std::min(st.mu, a);
    st.L = std::max(st.L, a);
    if (ev < 0.0) ++st.morse_index;
  }
  st.gap_to_zero = st.mu;
  if (st.mu <= 1e-10)
    fail(ErrorCode::degenerate,
         "spectrum_stats: eigenvalue of magnitude " + fmt(st.mu) +
             " lies within 1e-10 of zero");
  st.kappa = st.L / st.mu;
  return st;
}

double estimate_M(const landscape::EnergyLandscape& land, const Vector& center,
                  double radius, int samples, std::uint64_t seed) {
  if (center.size() != land.dim)
    fail(ErrorCode::invalid_argument, "estimate_M: center dimension mismatch");
  if (!(radius > 0.0)) fail(ErrorCode::invalid_argument, "estimate_M: radius must be > 0");
  if (samples < 2) fail(ErrorCode::invalid_argument, "estimate_M: need at least 2 samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t d = land.dim;
  const auto draw = [&]() {
    Vector p(d);
    for (double& v : p) v = gauss(rng);
    const double n = linalg::norm2(p);
    const double r = radius * std::pow(unif(rng), 1.0 / double(d));
    Vector out = center;
    if (n > 0.0)
      for (std::size_t i = 0; i < d; ++i) out[i] += p[i] * (r / n);
    return out;
  };
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector x = draw();
    const Vector y = draw();
    Vector delta(d);
    for (std::size_t i = 0; i < d; ++i) delta[i] = x[i] - y[i];
    const double dist = linalg::norm2(delta);
    if (dist < 1e-12) continue;
    const double diff = operator_norm(subtract(land.hessian(x), land.hessian(y)));
    best = std::max(best, diff / dist);
  }
  return best;
}

namespace {

constexpr double kSlack = 1e-10;

struct CheckRecorder {
  PropertyCheck check;
  bool flip = false; // fault injection: negate the bound

  CheckRecorder() { check.worst_margin = std::numeric_limits<double>::infinity(); }

  void observe(double value, double bound, const std::string& context) {
    const double effective = flip ? -bound : bound;
    const double margin = effective - value;
    ++check.trials;
    check.margins.push_back(margin);
    if (margin < check.worst_margin) check.worst_margin = margin;
    if (margin < -kSlack) {
      ++check.violations;
      if (check.detail.empty())
        check.detail = context + ": value " + fmt(value) + " exceeds bound " +
                       fmt(effective);
    }
  }

  PropertyCheck finish() {
    if (check.trials == 0) check.worst_margin = 0.0;
    return std::move(check);
  }
};

Matrix random_orthogonal(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = gauss(rng);
  return mgs_orth(g).columns();
}

void run_lemma31(std::mt19937_64& rng, CheckRecorder& rec, long trials) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (long t = 0; t < trials; ++t) {
    const double q = 0.01 + 0.98 * unif(rng);
    const double c = 1e-3 + 10.0 * unif(rng);
    const double r0 = 0.999 * (q / c) * unif(rng);
    const int steps = 50;
    std::vector<double> bound;
    try {
      bound = contraction_bound_seq(q, c, r0, steps);
    } catch (const Error&) {
      continue; // r0 drawn at the admissibility edge
    }
    double r = r0;
    for (int n = 0; n < steps; ++n) {
      r = (1.0 - q) * r + c * r * r; // extremal recursion: the inequality tight
      rec.observe(r, bound[n] * (1.0 + 1e-12) + 1e-300,
                  "lemma3.1 q=" + fmt(q) + " c=" + fmt(c) + " r0=" + fmt(r0) +
                      " n=" + std::to_string(n));
    }
  }
}

void run_lemma33(std::mt19937_64& rng, CheckRecorder& rec, long trials) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dims(2, 30);
  for (long t = 0; t < trials; ++t) {
    const std::size_t d = dims(rng);
    const double mu = 0.1 + 2.0 * unif(rng);
    const double L = mu * (1.0 + 9.0 * unif(rng));
    const bool special = (t % 10 == 0);
    const double beta = special ? 2.0 / (L + mu) : (0.01 + 3.0 * unif(rng)) / L;
    const Matrix u = random_orthogonal(rng, d);
    Vector z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = mu + (L - mu) * unif(rng);
    if (d >= 2) {
      z[0] = mu; // pin the extremes so the special-case bound is exercised tight
      z[1] = L;
    }
    Matrix q = Matrix::identity(d);
    const Matrix n_mat = matmul(u, matmul(Matrix::diagonal(z), transpose(u)));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) q(i, j) -= beta * n_mat(i, j);
    const double bound = special
                             ? (L - mu) / (L + mu)
                             : std::max(std::abs(1.0 - beta * L), std::abs(1.0 - beta * mu));
    rec.observe(operator_norm(q), bound + kSlack,
                "lemma3.3 d=" + std::to_string(d) + " mu=" + fmt(mu) + " L=" + fmt(L) +
                    " beta=" + fmt(beta));
  }
}

void run_lemma43(std::mt19937_64& rng, CheckRecorder& rec, long trials) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dims(2, 30);
  for (long t = 0; t < trials; ++t) {
    const std::size_t d = dims(rng);
    const double L = 0.5 + 9.5 * unif(rng);
    const Matrix v = random_orthogonal(rng, d);
    Vector c(d);
    if (t % 7 == 0) {
      std::fill(c.begin(), c.end(), 0.0);
      c[0] = 1.0; // degenerate coupling: D must vanish
    } else {
      for (double& x : c) x = gauss(rng);
      const double n = linalg::norm2(c);
      for (double& x : c) x /= n;
    }
    Vector lambda(d);
    for (std::size_t i = 0; i < d; ++i) lambda[i] = L * (2.0 * unif(rng) - 1.0);
    // D = (V c)(V Lambda c)^T - lambda_1 c_1^2 v_1 v_1^T
    const Vector vc = matvec(v, c);
    Vector lc(d);
    for (std::size_t i = 0; i < d; ++i) lc[i] = lambda[i] * c[i];
    const Vector vlc = matvec(v, lc);
    Matrix dmat(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        dmat(i, j) = vc[i] * vlc[j] - lambda[0] * c[0] * c[0] * v(i, 0) * v(j, 0);
    double cminus = 0.0;
    for (std::size_t i = 1; i < d; ++i) cminus += c[i] * c[i];
    cminus = std::sqrt(cminus);
    const double bound = L * cminus * cminus + 2.0 * L * std::abs(c[0]) * cminus;
    rec.observe(operator_norm(dmat), bound + kSlack,
                "lemma4.3 d=" + std::to_string(d) + " L=" + fmt(L));
  }
}

struct FrameWithAlpha {
  Matrix v_full;  // exact orthogonal basis, first k columns span the reference
  Matrix v_hat;   // approximate frame, d x k
  double alpha = 0.0;
  std::size_t k = 0;
};

// Builds an approximate frame a known rotation angle away from the reference
// subspace, then scrambles its basis; the projector distance equals sin(theta).
FrameWithAlpha make_perturbed_frame(std::mt19937_64& rng, std::size_t d, std::size_t k,
                                    double max_angle) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  FrameWithAlpha out;
  out.k = k;
  out.v_full = random_orthogonal(rng, d);
  const double theta = max_angle * unif(rng);
  Matrix vhat(d, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < d; ++i)
      vhat(i, j) = std::cos(theta) * out.v_full(i, j) +
                   std::sin(theta) * out.v_full(i, k + j); // needs d >= 2k
  const Matrix r = random_orthogonal(rng, k);
  out.v_hat = matmul(vhat, r);

  Matrix vk(d, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < d; ++i) vk(i, j) = out.v_full(i, j);
  out.alpha = linalg::projector_distance(OrthoFrame(out.v_hat), OrthoFrame(vk));
  return out;
}

void run_lemma53(std::mt19937_64& rng, CheckRecorder& rec, long trials) {
  std::uniform_int_distribution<std::size_t> dims(4, 30);
  std::uniform_int_distribution<int> pick_mode(0, 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (long t = 0; t < trials; ++t) {
    const std::size_t d = dims(rng);
    const std::size_t k = 1 + (rng() % (d / 2));
    Matrix v_full(d, d), v_hat(d, k);
    if (pick_mode(rng) == 0) {
      const FrameWithAlpha f = make_perturbed_frame(rng, d, k, 1.2);
      v_full = f.v_full;
      v_hat = f.v_hat;
    } else {
      v_full = random_orthogonal(rng, d);
      Matrix base(d, k);
      const double sigma = 0.5 * unif(rng);
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < d; ++i)
          base(i, j) = v_full(i, j) + sigma * gauss(rng);
      v_hat = mgs_orth(base).columns();
    }
    Matrix vk(d, k), vmk(d, d - k);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < k; ++j) vk(i, j) = v_full(i, j);
      for (std::size_t j = k; j < d; ++j) vmk(i, j - k) = v_full(i, j);
    }
    const double alpha =
        linalg::projector_distance(OrthoFrame(v_hat), OrthoFrame(vk));
    const Matrix ck = matmul(transpose(vk), v_hat);
    const Matrix cmk = matmul(transpose(vmk), v_hat);
    const linalg::Spectrum gram = sym_eig(matmul(ck, transpose(ck)));
    const std::string ctx =
        "lemma5.3 d=" + std::to_string(d) + " k=" + std::to_string(k) + " alpha=" + fmt(alpha);
    rec.observe(-gram.eigenvalues.front(), -(1.0 - alpha) + kSlack, ctx + " [lower]");
    rec.observe(gram.eigenvalues.back(), 1.0 + kSlack, ctx + " [upper]");
    rec.observe(operator_norm(cmk), alpha + kSlack, ctx + " [cross]");
  }
}

void run_eq512(std::mt19937_64& rng, CheckRecorder& rec, long trials) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dims(4, 30);
  for (long t = 0; t < trials; ++t) {
    const std::size_t d = dims(rng);
    const std::size_t k = 1 + (rng() % (d / 2)); // frame construction needs d >= 2k
    const double mu = 0.1 + 2.0 * unif(rng);
    const double kappa = 1.0 + 19.0 * unif(rng);
    const double L = mu * kappa;
    const double sup_alpha = sup_admissible_alpha(kappa, Regime::indexk_approx);
    const double target = 0.95 * sup_alpha;
    const double angle = std::asin(std::min(1.0, target));
    const FrameWithAlpha f = make_perturbed_frame(rng, d, k, angle);
    const double alpha = f.alpha;
    if (!(1.0 - alpha > kappa * alpha * (alpha + 5.0))) continue;

    Vector lambda(d);
    for (std::size_t i = 0; i < k; ++i) lambda[i] = -(mu + (L - mu) * unif(rng));
    for (std::size_t i = k; i < d; ++i) lambda[i] = mu + (L - mu) * unif(rng);
    lambda[0] = -L;
    lambda[d - 1] = L;
    if (k >= 2) lambda[k - 1] = -mu;
    if (d - k >= 2) lambda[k] = mu;
    const Matrix h =
        matmul(f.v_full, matmul(Matrix::diagonal(lambda), transpose(f.v_full)));

    const double beta = 2.0 / (L * (1.0 - alpha * alpha) + mu * (1.0 - alpha));
    // Q = I - beta (I - 2 Vhat Vhat^T) H
    const Matrix proj = OrthoFrame(f.v_hat).projector();
    Matrix refl = Matrix::identity(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) refl(i, j) -= 2.0 * proj(i, j);
    const Matrix q = subtract(Matrix::identity(d), linalg::scale(matmul(refl, h), beta));
    const double bound =
        (kappa * (1.0 - alpha * alpha) - (1.0 - alpha) + 2.0 * kappa * alpha * (alpha + 5.0)) /
        (kappa * (1.0 - alpha * alpha) + (1.0 - alpha));
    rec.observe(operator_norm(q), bound + kSlack,
                "eq5.12 d=" + std::to_string(d) + " k=" + std::to_string(k) +
                    " kappa=" + fmt(kappa) + " alpha=" + fmt(alpha));
  }
}

} // namespace

std::vector<PropertyCheck> lemma_bound_suite(const LemmaSuiteOptions& opts) {
  if (opts.trials < 1)
    fail(ErrorCode::invalid_argument, "lemma_bound_suite: trials must be >= 1");
  struct Entry {
    const char* name;
    void (*fn)(std::mt19937_64&, CheckRecorder&, long);
  };
  const Entry entries[] = {
      {"lemma3.1", run_lemma31}, {"lemma3.3", run_lemma33}, {"lemma4.3", run_lemma43},
      {"lemma5.3", run_lemma53}, {"eq5.12", run_eq512},
  };
  std::vector<PropertyCheck> out;
  for (const Entry& e : entries) {
    CheckRecorder rec;
    rec.check.name = e.name;
    rec.flip = (opts.inject_fault == e.name);
    std::mt19937_64 rng(opts.seed ^ std::hash<std::string>{}(e.name));
    e.fn(rng, rec, opts.trials);
    out.push_back(rec.finish());
  }
  return out;
}

} // namespace hisd::theory
