#include "hisd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "hisd/dynamics.hpp"
#include "hisd/eigensolve.hpp"
#include "hisd/landscape.hpp"
#include "hisd/linalg.hpp"

namespace hisd::verify {

namespace {

using landscape::BenchmarkSpec;
using landscape::EnergyLandscape;
using landscape::make_benchmark;
using linalg::Matrix;
using linalg::matmul;
using linalg::matvec;
using linalg::mgs_orth;
using linalg::norm2;
using linalg::operator_norm;
using linalg::OrthoFrame;
using linalg::subtract;
using linalg::sym_eig;
using linalg::transpose;
using linalg::Vector;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

struct Recorder {
  PropertyCheck check;
  bool flip = false;
  double slack = 1e-10;

  explicit Recorder(std::string name, bool flipped)
      : flip(flipped) {
    check.name = std::move(name);
    check.worst_margin = std::numeric_limits<double>::infinity();
  }

  void observe(double value, double bound, const std::string& context) {
    const double effective = flip ? -bound : bound;
    const double margin = effective - value;
    ++check.trials;
    check.margins.push_back(margin);
    if (margin < check.worst_margin) check.worst_margin = margin;
    if (margin < -slack) {
      ++check.violations;
      if (check.detail.empty())
        check.detail =
            context + ": value " + fmt(value) + " exceeds bound " + fmt(effective);
    }
  }

  // For exact expectations: |value - target| <= tol.
  void observe_close(double value, double target, double tol, const std::string& ctx) {
    observe(std::abs(value - target), tol, ctx);
  }

  PropertyCheck finish() {
    if (check.trials == 0) check.worst_margin = 0.0;
    return std::move(check);
  }
};

Matrix random_gaussian(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

Matrix random_orthogonal(std::mt19937_64& rng, std::size_t d) {
  return mgs_orth(random_gaussian(rng, d, d)).columns();
}

Matrix random_symmetric(std::mt19937_64& rng, std::size_t d) {
  const Matrix g = random_gaussian(rng, d, d);
  Matrix s(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i, j) = 0.5 * (g(i, j) + g(j, i));
  return s;
}

Vector random_unit(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  for (double& x : v) x = gauss(rng);
  const double n = norm2(v);
  for (double& x : v) x /= n;
  return v;
}

EnergyLandscape powell_case1() {
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::powell;
  spec.s = {10.0, 12.0, 12.0, 1.0};
  spec.modified = 3;
  return make_benchmark(spec);
}

EnergyLandscape biggs_paper() {
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::biggs;
  spec.s = {4.0, 8.0, 16.0, 8.0, 4.0, 2.0};
  spec.modified = 4;
  return make_benchmark(spec);
}

EnergyLandscape rosenbrock_modified(std::size_t d, std::size_t h, double s_head) {
  if (h > d) fail(ErrorCode::invalid_argument, "rosenbrock helper: h > d");
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::rosenbrock;
  spec.dim = d;
  spec.modified = int(h);
  spec.s.assign(d, 1.0);
  for (std::size_t i = 0; i < h; ++i) spec.s[i] = s_head;
  return make_benchmark(spec);
}

EnergyLandscape rosenbrock_paper() { return rosenbrock_modified(400, 20, 200.0); }

// ---- suites -------------------------------------------------------------

void suite_lemma34(std::mt19937_64& rng, Recorder& rec, long trials) {
  std::uniform_int_distribution<std::size_t> dims(2, 30);
  for (long t = 0; t < trials; ++t) {
    const std::size_t d = dims(rng);
    const std::size_t k = 1 + (rng() % (d - 1));
    const Matrix w = random_orthogonal(rng, d);
    const Matrix z = random_orthogonal(rng, d);
    Matrix w1(d, k), w2(d, d - k), z1(d, k), z2(d, d - k);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        w1(i, j) = w(i, j);
        z1(i, j) = z(i, j);
      }
      for (std::size_t j = k; j < d; ++j) {
        w2(i, j - k) = w(i, j);
        z2(i, j - k) = z(i, j);
      }
    }
    const double lhs = operator_norm(
        subtract(OrthoFrame(w1).projector(), OrthoFrame(z1).projector()));
    const double mid = operator_norm(matmul(transpose(w1), z2));
    const double rhs = operator_norm(matmul(transpose(z1), w2));
    const std::string ctx = "lemma3.4 d=" + std::to_string(d) + " k=" + std::to_string(k);
    rec.observe_close(lhs, mid, 1e-10, ctx + " [proj vs W1'Z2]");
    rec.observe_close(lhs, rhs, 1e-10, ctx + " [proj vs Z1'W2]");
  }
}

void suite_symeig(std::mt19937_64& rng, Recorder& rec, long trials) {
  std::uniform_int_distribution<std::size_t> dims(1, 30);
  for (long t = 0; t < trials; ++t) {
    const std::size_t d = dims(rng);
    const Matrix a = random_symmetric(rng, d);
    const linalg::Spectrum s = sym_eig(a);
    const double anorm = operator_norm(a);
    const Matrix recon =
        matmul(s.eigenvectors,
               matmul(Matrix::diagonal(s.eigenvalues), transpose(s.eigenvectors)));
    const std::string ctx = "symeig d=" + std::to_string(d);
    rec.observe(operator_norm(subtract(recon, a)), 1e-10 * anorm + 1e-300,
                ctx + " [reconstruction]");
    const Matrix vtv = matmul(transpose(s.eigenvectors), s.eigenvectors);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        max_dev = std::max(max_dev, std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)));
    rec.observe(max_dev, 1e-12, ctx + " [orthonormality]");
    double worst_pair = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const Vector v = s.eigenvectors.column(j);
      const Vector av = matvec(a, v);
      Vector resid(d);
      for (std::size_t i = 0; i < d; ++i) resid[i] = av[i] - s.eigenvalues[j] * v[i];
      worst_pair = std::max(worst_pair, norm2(resid));
    }
    rec.observe(worst_pair, 1e-10 * anorm + 1e-300, ctx + " [pair residual]");
    bool ascending = true;
    for (std::size_t j = 1; j < d; ++j)
      if (s.eigenvalues[j] < s.eigenvalues[j - 1]) ascending = false;
    rec.observe(ascending ? 0.0 : 1.0, 0.5, ctx + " [ascending]");
  }
}

void suite_opnorm(std::mt19937_64& rng, Recorder& rec, long trials) {
  std::uniform_int_distribution<std::size_t> dims(1, 25);
  for (long t = 0; t < trials; ++t) {
    const Matrix a = random_gaussian(rng, dims(rng), dims(rng));
    const double na = operator_norm(a);
    const double nat = operator_norm(transpose(a));
    rec.observe_close(na, nat, 1e-12 * std::max(1.0, na),
                      "opnorm transpose " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()));
  }
}

void suite_projdist(std::mt19937_64& rng, Recorder& rec, long trials) {
  std::uniform_int_distribution<std::size_t> dims(2, 25);
  for (long t = 0; t < trials; ++t) {
    const std::size_t d = dims(rng);
    const std::size_t k = 1 + (rng() % d);
    const OrthoFrame v = mgs_orth(random_gaussian(rng, d, k));
    const OrthoFrame w = mgs_orth(random_gaussian(rng, d, k));
    const double vw = linalg::projector_distance(v, w);
    const double wv = linalg::projector_distance(w, v);
    const std::string ctx = "projdist d=" + std::to_string(d) + " k=" + std::to_string(k);
    rec.observe_close(vw, wv, 1e-10, ctx + " [symmetry]");
    const Matrix rot = random_orthogonal(rng, k);
    const OrthoFrame v_rot = OrthoFrame(matmul(v.columns(), rot));
    rec.observe_close(linalg::projector_distance(v_rot, w), vw, 1e-10,
                      ctx + " [rotation invariance]");
    rec.observe(vw, 1.0 + 1e-12, ctx + " [range high]");
    rec.observe(-vw, 1e-12, ctx + " [range low]");
  }
}

void suite_mgs(std::mt19937_64& rng, Recorder& rec, long trials) {
  std::uniform_int_distribution<std::size_t> dims(2, 40);
  for (long t = 0; t < trials; ++t) {
    const std::size_t d = dims(rng);
    const std::size_t k = 1 + (rng() % d);
    const Matrix a = random_gaussian(rng, d, k);
    const OrthoFrame q = mgs_orth(a);
    const std::string ctx = "mgs d=" + std::to_string(d) + " k=" + std::to_string(k);
    const Matrix qtq = matmul(transpose(q.columns()), q.columns());
    double dev = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        dev = std::max(dev, std::abs(qtq(i, j) - (i == j ? 1.0 : 0.0)));
    rec.observe(dev, 1e-12, ctx + " [orthonormality]");
    // Span preservation: every input column reconstructs from the frame.
    double recon = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const Vector col = a.column(j);
      Vector proj(d, 0.0);
      for (std::size_t c = 0; c < k; ++c) {
        const Vector qc = q.columns().column(c);
        const double s = linalg::dot(qc, col);
        for (std::size_t i = 0; i < d; ++i) proj[i] += s * qc[i];
      }
      Vector resid(d);
      for (std::size_t i = 0; i < d; ++i) resid[i] = col[i] - proj[i];
      recon = std::max(recon, norm2(resid) / std::max(1.0, norm2(col)));
    }
    rec.observe(recon, 1e-10, ctx + " [span]");
    // Triangular structure: q_i ^T a_j = 0 for j < i.
    const Matrix r = matmul(transpose(q.columns()), a);
    double lower = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < i; ++j) lower = std::max(lower, std::abs(r(i, j)));
    rec.observe(lower, 1e-10 * a.max_abs() * double(d), ctx + " [triangular]");
  }
}

void suite_stationarity(std::mt19937_64&, Recorder& rec, long) {
  const auto check = [&](const EnergyLandscape& land) {
    const Vector& xs = *land.stationary_point;
    rec.observe(norm2(land.gradient(xs)), 1e-10, land.name + " [grad at x*]");
  };
  check(powell_case1());
  check(biggs_paper());
  check(rosenbrock_modified(40, 8, 50.0)); // small replica; d=400 lives in the inertia suite
  BenchmarkSpec q;
  q.family = BenchmarkSpec::Family::quadratic;
  q.quadratic_matrix = Matrix::diagonal({-1.0, 2.0});
  check(make_benchmark(q));
}

void suite_inertia(std::mt19937_64&, Recorder& rec, long) {
  const auto check = [&](const EnergyLandscape& land, int expected) {
    rec.observe_close(double(*land.morse_index), double(expected), 0.1,
                      land.name + " [morse index]");
    const linalg::Spectrum s = sym_eig(land.hessian(*land.stationary_point));
    double gap = std::numeric_limits<double>::infinity();
    for (double ev : s.eigenvalues) gap = std::min(gap, std::abs(ev));
    rec.observe(-gap, -1e-8, land.name + " [eigenvalue gap to zero]");
  };
  check(powell_case1(), 2);
  check(biggs_paper(), 4);
  check(rosenbrock_paper(), 5);
}

void suite_gradcheck(std::mt19937_64& rng, Recorder& rec, long) {
  const auto check = [&](const EnergyLandscape& land) {
    const Vector& xs = *land.stationary_point;
    for (int p = 0; p < 20; ++p) {
      Vector x = xs;
      const Vector dir = random_unit(rng, land.dim);
      std::uniform_real_distribution<double> unif(0.0, 0.5);
      const double rad = unif(rng);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += rad * dir[i];
      rec.observe(landscape::gradient_check(land, x, 1e-6), 1e-6,
                  land.name + " [gradient check #" + std::to_string(p) + "]");
    }
  };
  check(powell_case1());
  check(biggs_paper());
  check(rosenbrock_modified(12, 3, 50.0));
}

void suite_dimer(std::mt19937_64& rng, Recorder& rec, long) {
  const auto check = [&](const EnergyLandscape& land, bool analytic) {
    const Vector& xs = *land.stationary_point;
    for (int p = 0; p < 5; ++p) {
      Vector x = xs;
      const Vector dir = random_unit(rng, land.dim);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.4 * dir[i];
      const Vector v = random_unit(rng, land.dim);
      const Matrix h = analytic ? land.hessian(x) : landscape::hessian_fd(land, x, 1e-6);
      const Vector hv = matvec(h, v);
      const auto err = [&](double l) {
        const Vector approx = landscape::dimer_hvp(land, x, v, l);
        Vector diff(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) diff[i] = approx[i] - hv[i];
        return norm2(diff);
      };
      const double ratio = err(1e-2) / err(5e-3);
      const std::string ctx = land.name + " [dimer ratio #" + std::to_string(p) + "]";
      rec.observe(ratio, 4.5, ctx + " (upper)");
      rec.observe(-ratio, -3.5, ctx + " (lower)");
    }
  };
  check(powell_case1(), true);
  check(biggs_paper(), false);
}

void suite_eigensolve(std::mt19937_64& rng, Recorder& rec, long trials) {
  using eigensolve::EigenSolverConfig;
  std::uniform_int_distribution<std::size_t> dims(3, 16);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long n = std::max(1L, trials / 10); // each trial runs two solvers
  for (long t = 0; t < n; ++t) {
    const std::size_t d = dims(rng);
    const std::size_t k = 1 + (rng() % std::max<std::size_t>(1, d / 2));
    Vector evs(d);
    for (std::size_t i = 0; i < d; ++i) evs[i] = -2.0 + 6.0 * unif(rng);
    std::sort(evs.begin(), evs.end());
    for (std::size_t i = 1; i < d; ++i)
      if (evs[i] - evs[i - 1] < 0.15) evs[i] = evs[i - 1] + 0.15; // keep gaps workable
    BenchmarkSpec spec;
    spec.family = BenchmarkSpec::Family::quadratic;
    spec.quadratic_matrix = Matrix::diagonal(evs);
    const EnergyLandscape land = make_benchmark(spec);
    const Vector x(d, 0.0);

    const auto [exact_frame, vals] = eigensolve::exact_k_smallest(land.hessian(x), k);
    Matrix warm_m = exact_frame.columns();
    std::normal_distribution<double> gauss(0.0, 0.2);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < d; ++i) warm_m(i, j) += gauss(rng);
    const OrthoFrame warm = mgs_orth(warm_m);

    EigenSolverConfig cfg;
    cfg.use_dimer = (t % 2 == 0);
    cfg.dimer_length = 1e-3;
    cfg.method = EigenSolverConfig::Method::sirqit;
    cfg.sub_iterations = 4;
    cfg.gamma = 0.15;
    const OrthoFrame s_out = eigensolve::sirqit_step(land, x, warm, cfg);

    cfg.method = EigenSolverConfig::Method::lobpcg;
    cfg.sub_iterations = 2;
    const auto [l_out, state] =
        eigensolve::lobpcg_step(land, x, warm, eigensolve::LobpcgState{}, cfg);

    for (const OrthoFrame* frame : {&s_out, &l_out}) {
      const Matrix vtv = matmul(transpose(frame->columns()), frame->columns());
      double dev = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          dev = std::max(dev, std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)));
      rec.observe(dev, 1e-12, "eigensolve output orthonormality d=" + std::to_string(d));

      // Subspace-overlap block bounds at the measured accuracy.
      const double alpha = linalg::projector_distance(*frame, exact_frame);
      const linalg::Spectrum full = sym_eig(land.hessian(x));
      Matrix vk(d, k), vmk(d, d - k);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < k; ++j) vk(i, j) = full.eigenvectors(i, j);
        for (std::size_t j = k; j < d; ++j) vmk(i, j - k) = full.eigenvectors(i, j);
      }
      const Matrix ck = matmul(transpose(vk), frame->columns());
      const Matrix cmk = matmul(transpose(vmk), frame->columns());
      const linalg::Spectrum gram = sym_eig(matmul(ck, transpose(ck)));
      const std::string ctx = "eigensolve blocks d=" + std::to_string(d) +
                              " k=" + std::to_string(k) + " alpha=" + fmt(alpha);
      rec.observe(-gram.eigenvalues.front(), -(1.0 - alpha) + 1e-10, ctx + " [lower]");
      rec.observe(gram.eigenvalues.back(), 1.0 + 1e-10, ctx + " [upper]");
      rec.observe(operator_norm(cmk), alpha + 1e-10, ctx + " [cross]");
      if (k == 1) {
        double cos = 0.0;
        for (std::size_t i = 0; i < d; ++i)
          cos += vk(i, 0) * frame->columns()(i, 0);
        rec.observe(1.0 - alpha * alpha - cos * cos, 1e-10, ctx + " [cosine]");
      }
    }
  }
}

void suite_contraction(std::mt19937_64& rng, Recorder& rec, long trials) {
  std::uniform_int_distribution<std::size_t> dims(2, 12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long n = std::max(1L, trials / 25); // each trial runs a full trajectory
  for (long t = 0; t < n; ++t) {
    const std::size_t d = dims(rng);
    const std::size_t k = 1 + (rng() % d);
    const double mu = 0.3 + 1.5 * unif(rng);
    const double L = mu * (1.5 + 6.0 * unif(rng));
    // Magnitudes drawn from {mu, L} only: with beta = 2/(L+mu) both map to the
    // same contraction factor, so the distance sequence is exactly geometric
    // and the fitted rate must match the spectral radius to roundoff.
    Vector evs(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double mag = (unif(rng) < 0.5) ? mu : L;
      evs[i] = (i < k) ? -mag : mag;
    }
    evs[0] = -L;
    BenchmarkSpec spec;
    spec.family = BenchmarkSpec::Family::quadratic;
    spec.quadratic_matrix = Matrix::diagonal(evs);
    const EnergyLandscape land = make_benchmark(spec);

    dynamics::SaddleRunConfig cfg;
    cfg.index_k = int(k);
    cfg.beta_policy = dynamics::SaddleRunConfig::BetaPolicy::constant;
    cfg.beta = 2.0 / (L + mu);
    cfg.eigen.method = eigensolve::EigenSolverConfig::Method::exact;
    cfg.eigen.use_dimer = false;
    cfg.max_iterations = 200;
    cfg.grad_tol = 0.0;
    cfg.v0_noise = 0.0;
    Vector x0(d);
    for (double& v : x0) v = 0.2 * (2.0 * unif(rng) - 1.0);
    if (norm2(x0) < 1e-3) x0[0] = 0.1;
    const auto trace =
        dynamics::run(land, cfg, x0, std::nullopt, Vector(d, 0.0));

    const double bound = (L - mu) / (L + mu);
    const std::string ctx = "contraction d=" + std::to_string(d) + " k=" + std::to_string(k);
    for (const auto& recd : trace.records)
      if (recd.contraction)
        rec.observe(*recd.contraction, bound + 1e-12, ctx + " [per-step ratio]");

    double rho = 0.0;
    for (double ev : evs) rho = std::max(rho, std::abs(1.0 - cfg.beta * std::abs(ev)));
    const auto fit = dynamics::empirical_rate(trace, 0.5);
    rec.observe_close(fit.rate, rho, 1e-6, ctx + " [rate vs spectral radius]");
  }
}

void suite_decomposition(std::mt19937_64& rng, Recorder& rec, long) {
  // Constant Hessian: the quadrature remainder must vanish.
  BenchmarkSpec qspec;
  qspec.family = BenchmarkSpec::Family::quadratic;
  qspec.quadratic_matrix = Matrix::diagonal({-1.0, 2.0, 3.0});
  const EnergyLandscape quad = make_benchmark(qspec);
  {
    const OrthoFrame v(Matrix::from_columns({{1.0, 0.0, 0.0}}));
    const auto dec = dynamics::single_step_decomposition(
        quad, Vector{0.4, -0.3, 0.2}, v, 0.5, Vector(3, 0.0));
    rec.observe(dec.b_norm, 1e-12, "decomposition quadratic [B = 0]");
    rec.observe(dec.identity_residual, 1e-8 * dec.r + 1e-300,
                "decomposition quadratic [identity]");
  }

  const EnergyLandscape powell = powell_case1();
  const theory::SpectrumStats st =
      theory::spectrum_stats(powell.hessian(*powell.stationary_point));
  const double beta = 2.0 / (st.L + st.mu);
  for (int t = 0; t < 20; ++t) {
    Vector x = *powell.stationary_point;
    const Vector dir = random_unit(rng, 4);
    for (std::size_t i = 0; i < 4; ++i) x[i] += 0.02 * dir[i];
    const auto [frame, vals] = eigensolve::exact_k_smallest(powell.hessian(x), 2);
    const auto dec = dynamics::single_step_decomposition(powell, x, frame, beta,
                                                         *powell.stationary_point);
    const std::string ctx = "decomposition powell #" + std::to_string(t);
    rec.observe(dec.identity_residual, 1e-8 * dec.r, ctx + " [identity]");
    rec.observe(dec.b_norm, dec.b_bound + 1e-8, ctx + " [B bound]");
    rec.observe(dec.q_norm, (st.L - st.mu) / (st.L + st.mu) + 0.05, ctx + " [Q norm]");
  }
}

void suite_consistency(std::mt19937_64& rng, Recorder& rec, long) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double mu = 0.05 + 3.0 * unif(rng);
    const double L = mu * (1.0 + 30.0 * unif(rng));
    const double M = 0.1 + 10.0 * unif(rng);
    const auto exact = theory::rate_exact(mu, L, M);
    const auto i1 = theory::rate_index1_approx(mu, L, M, 0.0);
    const auto ik = theory::rate_indexk_approx(mu, L, M, 0.0);
    const std::string ctx = "consistency mu=" + fmt(mu) + " L=" + fmt(L);
    rec.observe_close(i1.rate, exact.rate, 1e-15, ctx + " [index1]");
    rec.observe_close(ik.rate, exact.rate, 1e-15, ctx + " [indexk]");
  }
}

void suite_alphagrid(std::mt19937_64& rng, Recorder& rec, long) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 12; ++t) {
    const double mu = 0.2 + 2.0 * unif(rng);
    const double kappa = 1.0 + 24.0 * unif(rng);
    const double L = mu * kappa;
    const double M = 1.0;
    for (const theory::Regime regime :
         {theory::Regime::index1_approx, theory::Regime::indexk_approx}) {
      const double sup = theory::sup_admissible_alpha(kappa, regime);
      const auto bundle = [&](double a) {
        return regime == theory::Regime::index1_approx
                   ? theory::rate_index1_approx(mu, L, M, a)
                   : theory::rate_indexk_approx(mu, L, M, a);
      };
      const std::string ctx = std::string("alphagrid ") + theory::regime_name(regime) +
                              " kappa=" + fmt(kappa);
      double prev_rate = -1.0;
      for (double a = 0.0; a < sup * 0.999; a += 1e-3) {
        const auto b = bundle(a);
        rec.observe(b.rate, 1.0 - 1e-15, ctx + " [rate < 1]");
        rec.observe(-b.rate, -1e-15, ctx + " [rate > 0]");
        if (prev_rate >= 0.0)
          rec.observe(std::abs(b.rate - prev_rate), 0.05, ctx + " [continuity]");
        prev_rate = b.rate;
      }
      // Monotone admissibility: everything below sup passes, above fails.
      bool below_ok = true, above_rejected = true;
      for (double frac : {0.1, 0.5, 0.9}) {
        try {
          bundle(frac * sup);
        } catch (const Error&) {
          below_ok = false;
        }
      }
      try {
        bundle(std::min(1.0, sup * 1.05 + 1e-9));
        above_rejected = false;
      } catch (const Error&) {
      }
      rec.observe(below_ok ? 0.0 : 1.0, 0.5, ctx + " [admissible below sup]");
      rec.observe(above_rejected ? 0.0 : 1.0, 0.5, ctx + " [rejected above sup]");
    }
  }
}

void suite_estimate_m(std::mt19937_64& rng, Recorder& rec, long) {
  BenchmarkSpec qspec;
  qspec.family = BenchmarkSpec::Family::quadratic;
  qspec.quadratic_matrix = Matrix::diagonal({-2.0, 1.0, 5.0});
  const EnergyLandscape quad = make_benchmark(qspec);
  rec.observe(theory::estimate_M(quad, Vector(3, 0.0), 0.5, 20, 1), 1e-10,
              "estimate_M quadratic [zero]");

  const EnergyLandscape powell = powell_case1();
  const Vector center = *powell.stationary_point;
  const std::uint64_t s0 = rng();
  const double m50 = theory::estimate_M(powell, center, 0.1, 50, s0);
  const double m100 = theory::estimate_M(powell, center, 0.1, 100, s0);
  rec.observe(-m50, -1e-6, "estimate_M powell [positive]");
  rec.observe(m50 - m100, 1e-15, "estimate_M powell [monotone in samples]");
}

} // namespace

std::vector<std::string> battery_suites() {
  return {"lemma3.4",  "symeig",      "opnorm",        "projdist",    "mgs",
          "stationarity", "inertia",  "gradcheck",     "dimer",       "eigensolve",
          "contraction",  "decomposition", "lemma3.1", "lemma3.3",    "lemma4.3",
          "lemma5.3",     "eq5.12",   "consistency",   "alphagrid",   "estimate_m"};
}

std::vector<PropertyCheck> run_battery(const BatteryOptions& opts) {
  if (opts.trials < 1)
    fail(ErrorCode::invalid_argument, "run_battery: trials must be >= 1");
  using SuiteFn = std::function<void(std::mt19937_64&, Recorder&, long)>;
  const std::vector<std::pair<std::string, SuiteFn>> suites = {
      {"lemma3.4", suite_lemma34},
      {"symeig", suite_symeig},
      {"opnorm", suite_opnorm},
      {"projdist", suite_projdist},
      {"mgs", suite_mgs},
      {"stationarity", suite_stationarity},
      {"inertia", suite_inertia},
      {"gradcheck", suite_gradcheck},
      {"dimer", suite_dimer},
      {"eigensolve", suite_eigensolve},
      {"contraction", suite_contraction},
      {"decomposition", suite_decomposition},
      {"consistency", suite_consistency},
      {"alphagrid", suite_alphagrid},
      {"estimate_m", suite_estimate_m},
  };
  const std::vector<std::string> theory_names = {"lemma3.1", "lemma3.3", "lemma4.3",
                                                 "lemma5.3", "eq5.12"};

  if (!opts.only.empty()) {
    bool known = std::any_of(suites.begin(), suites.end(),
                             [&](const auto& s) { return s.first == opts.only; }) ||
                 std::find(theory_names.begin(), theory_names.end(), opts.only) !=
                     theory_names.end();
    if (!known) {
      std::string names;
      for (const std::string& n : battery_suites()) names += (names.empty() ? "" : ", ") + n;
      fail(ErrorCode::invalid_argument,
           "run_battery: unknown suite '" + opts.only + "'; available: " + names);
    }
  }

  std::vector<PropertyCheck> out;
  for (const auto& [name, fn] : suites) {
    if (!opts.only.empty() && opts.only != name) continue;
    Recorder rec(name, opts.inject_fault == name);
    std::mt19937_64 rng(opts.seed ^ std::hash<std::string>{}(name));
    fn(rng, rec, opts.trials);
    out.push_back(rec.finish());
  }

  const bool want_theory =
      opts.only.empty() || std::find(theory_names.begin(), theory_names.end(),
                                     opts.only) != theory_names.end();
  if (want_theory) {
    theory::LemmaSuiteOptions lopts;
    lopts.seed = opts.seed;
    lopts.trials = opts.trials;
    lopts.inject_fault = opts.inject_fault;
    for (auto& check : theory::lemma_bound_suite(lopts)) {
      if (!opts.only.empty() && opts.only != check.name) continue;
      out.push_back(std::move(check));
    }
  }

  // Keep the declared order.
  std::vector<PropertyCheck> ordered;
  for (const std::string& name : battery_suites())
    for (auto& check : out)
      if (check.name == name) ordered.push_back(std::move(check));
  return ordered;
}

bool battery_clean(const std::vector<PropertyCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.violations == 0; });
}

} // namespace hisd::verify
