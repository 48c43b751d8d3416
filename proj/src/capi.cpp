#include "hisd.h"

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "hisd/dynamics.hpp"
#include "hisd/landscape.hpp"
#include "hisd/theory.hpp"
#include "hisd/trace_io.hpp"
#include "hisd/verify.hpp"

namespace {

using hisd::Error;
using hisd::ErrorCode;

thread_local std::string g_last_error;
thread_local std::vector<hisd::theory::PropertyCheck> g_last_battery;

hisd_status code_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return HISD_ERR_INVALID_ARGUMENT;
    case ErrorCode::contract_violation: return HISD_ERR_CONTRACT;
    case ErrorCode::rank_deficient: return HISD_ERR_RANK_DEFICIENT;
    case ErrorCode::degenerate: return HISD_ERR_DEGENERATE;
    case ErrorCode::inadmissible: return HISD_ERR_INADMISSIBLE;
    case ErrorCode::no_convergence: return HISD_ERR_NO_CONVERGENCE;
    case ErrorCode::diverged: return HISD_ERR_DIVERGED;
    case ErrorCode::missing_data: return HISD_ERR_MISSING_DATA;
    case ErrorCode::io_failure: return HISD_ERR_IO;
  }
  return HISD_ERR_INTERNAL;
}

template <typename Fn>
hisd_status guarded(Fn&& fn) {
  try {
    fn();
    return HISD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return code_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HISD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return HISD_ERR_INTERNAL;
  }
}

hisd_status invalid(const char* message) {
  g_last_error = message;
  return HISD_ERR_INVALID_ARGUMENT;
}

hisd::linalg::Vector to_vector(const double* p, std::size_t n) {
  return hisd::linalg::Vector(p, p + n);
}

void fill_bundle(const hisd::theory::RateBundle& b, hisd_rate_bundle* out) {
  out->mu = b.mu;
  out->L = b.L;
  out->kappa = b.kappa;
  out->M = b.M;
  out->alpha = b.alpha;
  out->regime = int(b.regime);
  out->beta = b.beta;
  out->q = b.q;
  out->c = b.c;
  out->eta = b.eta;
  out->r_hat = b.r_hat;
  out->rate = b.rate;
}

} // namespace

struct hisd_landscape {
  hisd::landscape::EnergyLandscape land;
};

struct hisd_trace {
  hisd::dynamics::IterationTrace trace;
};

extern "C" {

const char* hisd_last_error(void) { return g_last_error.c_str(); }

const char* hisd_version(void) { return "1.0.0"; }

hisd_status hisd_landscape_quadratic(const double* a, int d, hisd_landscape** out) {
  if (!a || !out || d < 1) return invalid("hisd_landscape_quadratic: bad arguments");
  return guarded([&] {
    hisd::landscape::BenchmarkSpec spec;
    spec.family = hisd::landscape::BenchmarkSpec::Family::quadratic;
    spec.quadratic_matrix = hisd::linalg::Matrix(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) spec.quadratic_matrix(i, j) = a[i * d + j];
    *out = new hisd_landscape{hisd::landscape::make_benchmark(spec)};
  });
}

hisd_status hisd_landscape_powell(const double* s, int modified, hisd_landscape** out) {
  if (!s || !out) return invalid("hisd_landscape_powell: bad arguments");
  return guarded([&] {
    hisd::landscape::BenchmarkSpec spec;
    spec.family = hisd::landscape::BenchmarkSpec::Family::powell;
    spec.s = to_vector(s, 4);
    spec.modified = modified;
    *out = new hisd_landscape{hisd::landscape::make_benchmark(spec)};
  });
}

hisd_status hisd_landscape_biggs(const double* s, int modified, hisd_landscape** out) {
  if (!s || !out) return invalid("hisd_landscape_biggs: bad arguments");
  return guarded([&] {
    hisd::landscape::BenchmarkSpec spec;
    spec.family = hisd::landscape::BenchmarkSpec::Family::biggs;
    spec.s = to_vector(s, 6);
    spec.modified = modified;
    *out = new hisd_landscape{hisd::landscape::make_benchmark(spec)};
  });
}

hisd_status hisd_landscape_rosenbrock(const double* s, int d, int modified,
                                      hisd_landscape** out) {
  if (!s || !out || d < 2) return invalid("hisd_landscape_rosenbrock: bad arguments");
  return guarded([&] {
    hisd::landscape::BenchmarkSpec spec;
    spec.family = hisd::landscape::BenchmarkSpec::Family::rosenbrock;
    spec.dim = std::size_t(d);
    spec.s = to_vector(s, std::size_t(d));
    spec.modified = modified;
    *out = new hisd_landscape{hisd::landscape::make_benchmark(spec)};
  });
}

void hisd_landscape_free(hisd_landscape* land) { delete land; }

int hisd_landscape_dim(const hisd_landscape* land) {
  return land ? int(land->land.dim) : 0;
}

const char* hisd_landscape_name(const hisd_landscape* land) {
  return land ? land->land.name.c_str() : "";
}

hisd_status hisd_landscape_value(const hisd_landscape* land, const double* x,
                                 double* out) {
  if (!land || !x || !out) return invalid("hisd_landscape_value: bad arguments");
  return guarded([&] { *out = land->land.value(to_vector(x, land->land.dim)); });
}

hisd_status hisd_landscape_gradient(const hisd_landscape* land, const double* x,
                                    double* out) {
  if (!land || !x || !out) return invalid("hisd_landscape_gradient: bad arguments");
  return guarded([&] {
    const auto g = land->land.gradient(to_vector(x, land->land.dim));
    std::memcpy(out, g.data(), g.size() * sizeof(double));
  });
}

hisd_status hisd_landscape_stationary_point(const hisd_landscape* land, double* out) {
  if (!land || !out) return invalid("hisd_landscape_stationary_point: bad arguments");
  return guarded([&] {
    if (!land->land.stationary_point)
      hisd::fail(ErrorCode::missing_data, "landscape records no stationary point");
    std::memcpy(out, land->land.stationary_point->data(),
                land->land.stationary_point->size() * sizeof(double));
  });
}

hisd_status hisd_landscape_morse_index(const hisd_landscape* land, int* out) {
  if (!land || !out) return invalid("hisd_landscape_morse_index: bad arguments");
  return guarded([&] {
    if (!land->land.morse_index)
      hisd::fail(ErrorCode::missing_data, "landscape records no Morse index");
    *out = *land->land.morse_index;
  });
}

hisd_status hisd_landscape_spectrum_stats(const hisd_landscape* land, const double* x,
                                          hisd_spectrum_stats* out) {
  if (!land || !x || !out) return invalid("hisd_landscape_spectrum_stats: bad arguments");
  return guarded([&] {
    const auto st =
        hisd::theory::spectrum_stats(land->land.hessian(to_vector(x, land->land.dim)));
    out->mu = st.mu;
    out->L = st.L;
    out->kappa = st.kappa;
    out->morse_index = st.morse_index;
    out->gap_to_zero = st.gap_to_zero;
  });
}

hisd_status hisd_estimate_M(const hisd_landscape* land, const double* center,
                            double radius, int samples, uint64_t seed, double* out) {
  if (!land || !center || !out) return invalid("hisd_estimate_M: bad arguments");
  return guarded([&] {
    *out = hisd::theory::estimate_M(land->land, to_vector(center, land->land.dim),
                                    radius, samples, seed);
  });
}

void hisd_run_options_default(hisd_run_options* opts) {
  if (!opts) return;
  opts->index_k = 1;
  opts->beta_policy = HISD_BETA_CONSTANT;
  opts->beta = 0.0;
  opts->alpha = 0.0;
  opts->eigen_method = HISD_EIGEN_EXACT;
  opts->sub_iterations = 1;
  opts->gamma = 0.0;
  opts->dimer_length = 1e-3;
  opts->use_dimer = 1;
  opts->max_iterations = 10000;
  opts->grad_tol = 1e-10;
  opts->r_tol = 0.0;
  opts->diagnostics = 0;
  opts->seed = 0;
  opts->v0_noise = 0.1;
}

hisd_status hisd_run(const hisd_landscape* land, const hisd_run_options* opts,
                     const double* x0, const double* x_star, hisd_trace** out) {
  if (!land || !opts || !x0 || !out) return invalid("hisd_run: bad arguments");
  return guarded([&] {
    hisd::dynamics::SaddleRunConfig cfg;
    cfg.index_k = opts->index_k;
    switch (opts->beta_policy) {
      case HISD_BETA_CONSTANT:
        cfg.beta_policy = hisd::dynamics::SaddleRunConfig::BetaPolicy::constant;
        break;
      case HISD_BETA_THEORY_EXACT:
        cfg.beta_policy = hisd::dynamics::SaddleRunConfig::BetaPolicy::theory_exact;
        break;
      case HISD_BETA_THEORY_ALPHA_INDEX1:
        cfg.beta_policy =
            hisd::dynamics::SaddleRunConfig::BetaPolicy::theory_alpha_index1;
        break;
      case HISD_BETA_THEORY_ALPHA_INDEXK:
        cfg.beta_policy =
            hisd::dynamics::SaddleRunConfig::BetaPolicy::theory_alpha_indexk;
        break;
      default:
        hisd::fail(ErrorCode::invalid_argument, "hisd_run: unknown beta policy");
    }
    cfg.beta = opts->beta;
    cfg.alpha = opts->alpha;
    switch (opts->eigen_method) {
      case HISD_EIGEN_EXACT:
        cfg.eigen.method = hisd::eigensolve::EigenSolverConfig::Method::exact;
        break;
      case HISD_EIGEN_SIRQIT:
        cfg.eigen.method = hisd::eigensolve::EigenSolverConfig::Method::sirqit;
        break;
      case HISD_EIGEN_LOBPCG:
        cfg.eigen.method = hisd::eigensolve::EigenSolverConfig::Method::lobpcg;
        break;
      default:
        hisd::fail(ErrorCode::invalid_argument, "hisd_run: unknown eigensolver method");
    }
    cfg.eigen.sub_iterations = opts->sub_iterations;
    cfg.eigen.gamma = opts->gamma > 0.0 ? opts->gamma : 0.0;
    cfg.eigen.dimer_length = opts->dimer_length;
    cfg.eigen.use_dimer = opts->use_dimer != 0;
    cfg.max_iterations = opts->max_iterations;
    cfg.grad_tol = opts->grad_tol;
    cfg.r_tol = opts->r_tol;
    cfg.diagnostics = opts->diagnostics != 0;
    cfg.seed = opts->seed;
    cfg.v0_noise = opts->v0_noise;

    std::optional<hisd::linalg::Vector> xs;
    if (x_star) xs = to_vector(x_star, land->land.dim);
    auto trace = hisd::dynamics::run(land->land, cfg, to_vector(x0, land->land.dim),
                                     std::nullopt, xs);
    *out = new hisd_trace{std::move(trace)};
  });
}

void hisd_trace_free(hisd_trace* trace) { delete trace; }

long hisd_trace_size(const hisd_trace* trace) {
  return trace ? long(trace->trace.records.size()) : 0;
}

hisd_status hisd_trace_record(const hisd_trace* trace, long i, hisd_record* out) {
  if (!trace || !out) return invalid("hisd_trace_record: bad arguments");
  if (i < 0 || i >= long(trace->trace.records.size()))
    return invalid("hisd_trace_record: index out of range");
  const auto& rec = trace->trace.records[std::size_t(i)];
  out->n = rec.n;
  out->grad_norm = rec.grad_norm;
  out->r = rec.r.value_or(-1.0);
  out->alpha = rec.alpha.value_or(-1.0);
  out->contraction = rec.contraction.value_or(-1.0);
  out->beta = rec.beta;
  return HISD_OK;
}

const char* hisd_trace_termination(const hisd_trace* trace) {
  return trace ? trace->trace.termination.c_str() : "";
}

long hisd_trace_metadata_count(const hisd_trace* trace) {
  return trace ? long(trace->trace.metadata.size()) : 0;
}

hisd_status hisd_trace_metadata(const hisd_trace* trace, long i, const char** key,
                                const char** value) {
  if (!trace || !key || !value) return invalid("hisd_trace_metadata: bad arguments");
  if (i < 0 || i >= long(trace->trace.metadata.size()))
    return invalid("hisd_trace_metadata: index out of range");
  *key = trace->trace.metadata[std::size_t(i)].first.c_str();
  *value = trace->trace.metadata[std::size_t(i)].second.c_str();
  return HISD_OK;
}

hisd_status hisd_trace_write_csv(const hisd_trace* trace, const char* path) {
  if (!trace || !path) return invalid("hisd_trace_write_csv: bad arguments");
  return guarded(
      [&] { hisd::trace_io::write_file(path, hisd::trace_io::trace_csv(trace->trace)); });
}

hisd_status hisd_trace_write_plot(const hisd_trace* trace, const char* path) {
  if (!trace || !path) return invalid("hisd_trace_write_plot: bad arguments");
  return guarded(
      [&] { hisd::trace_io::write_file(path, hisd::trace_io::plot_data(trace->trace)); });
}

hisd_status hisd_trace_empirical_rate(const hisd_trace* trace, double tail_fraction,
                                      double* rate, double* r_squared) {
  if (!trace || !rate || !r_squared)
    return invalid("hisd_trace_empirical_rate: bad arguments");
  return guarded([&] {
    const auto fit = hisd::dynamics::empirical_rate(trace->trace, tail_fraction);
    *rate = fit.rate;
    *r_squared = fit.r_squared;
  });
}

hisd_status hisd_rate_exact(double mu, double L, double M, hisd_rate_bundle* out) {
  if (!out) return invalid("hisd_rate_exact: bad arguments");
  return guarded([&] { fill_bundle(hisd::theory::rate_exact(mu, L, M), out); });
}

hisd_status hisd_rate_index1(double mu, double L, double M, double alpha,
                             hisd_rate_bundle* out) {
  if (!out) return invalid("hisd_rate_index1: bad arguments");
  return guarded(
      [&] { fill_bundle(hisd::theory::rate_index1_approx(mu, L, M, alpha), out); });
}

hisd_status hisd_rate_indexk(double mu, double L, double M, double alpha,
                             hisd_rate_bundle* out) {
  if (!out) return invalid("hisd_rate_indexk: bad arguments");
  return guarded(
      [&] { fill_bundle(hisd::theory::rate_indexk_approx(mu, L, M, alpha), out); });
}

hisd_status hisd_sup_admissible_alpha(double kappa, int regime, double* out) {
  if (!out || (regime != 1 && regime != 2))
    return invalid("hisd_sup_admissible_alpha: bad arguments");
  return guarded([&] {
    *out = hisd::theory::sup_admissible_alpha(
        kappa, regime == 1 ? hisd::theory::Regime::index1_approx
                           : hisd::theory::Regime::indexk_approx);
  });
}

hisd_status hisd_verify_run(uint64_t seed, long trials, const char* only,
                            const char* inject_fault, hisd_property_result* results,
                            int cap, int* n_out) {
  if (!results || !n_out || cap < 1) return invalid("hisd_verify_run: bad arguments");
  return guarded([&] {
    hisd::verify::BatteryOptions opts;
    opts.seed = seed;
    opts.trials = trials;
    if (only) opts.only = only;
    if (inject_fault) opts.inject_fault = inject_fault;
    auto checks = hisd::verify::run_battery(opts);
    const int n = int(checks.size());
    *n_out = n;
    for (int i = 0; i < n && i < cap; ++i) {
      hisd_property_result& r = results[i];
      std::snprintf(r.name, sizeof(r.name), "%s", checks[i].name.c_str());
      r.trials = checks[i].trials;
      r.violations = checks[i].violations;
      r.worst_margin = checks[i].worst_margin;
      std::snprintf(r.detail, sizeof(r.detail), "%s", checks[i].detail.c_str());
    }
    g_last_battery = std::move(checks);
  });
}

hisd_status hisd_verify_write_margins_csv(const char* path) {
  if (!path) return invalid("hisd_verify_write_margins_csv: bad arguments");
  return guarded([&] {
    std::string out = "suite,trial,margin\n";
    for (const auto& check : g_last_battery)
      for (std::size_t i = 0; i < check.margins.size(); ++i) {
        out += check.name;
        out += ',';
        out += std::to_string(i);
        out += ',';
        out += hisd::trace_io::format_double(check.margins[i]);
        out += '\n';
      }
    hisd::trace_io::write_file(path, out);
  });
}

} // extern "C"
