#include <cmath>
#include <random>

#include "doctest.h"
#include "hisd/eigensolve.hpp"
#include "hisd/landscape.hpp"

using namespace hisd::eigensolve;
using hisd::Error;
using hisd::landscape::BenchmarkSpec;
using hisd::landscape::make_benchmark;
using hisd::linalg::Matrix;
using hisd::linalg::mgs_orth;
using hisd::linalg::OrthoFrame;
using hisd::linalg::projector_distance;
using hisd::linalg::Vector;

namespace {

EnergyLandscape diag_quadratic(Vector evs) {
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::quadratic;
  spec.quadratic_matrix = Matrix::diagonal(std::move(evs));
  return make_benchmark(spec);
}

OrthoFrame perturbed_e12() {
  // mgs of (e1 + 0.1 e3, e2 + 0.1 e3)
  return mgs_orth(
      Matrix::from_columns({{1.0, 0.0, 0.1}, {0.0, 1.0, 0.1}}));
}

OrthoFrame span_e12() {
  return OrthoFrame(Matrix::from_columns({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}));
}

} // namespace

TEST_CASE("exact_k_smallest on a diagonal matrix") {
  const auto [frame, values] = exact_k_smallest(Matrix::diagonal({-2.0, -1.0, 3.0}), 2);
  CHECK(values[0] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(values[1] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(projector_distance(frame, span_e12()) <= 1e-12);
}

TEST_CASE("exact_k_smallest matches the block characteristic roots") {
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::powell;
  spec.s = {10.0, 12.0, 12.0, 1.0};
  spec.modified = 3;
  const EnergyLandscape land = make_benchmark(spec);
  const auto [frame, values] = exact_k_smallest(land.hessian(Vector(4, 0.0)), 2);
  // Ascending roots of the two 2x2 blocks: (158 - sqrt(39236))/2, (-2 - sqrt(1076))/2.
  const double lo1 = (158.0 - std::sqrt(39236.0)) / 2.0;
  const double lo2 = (-2.0 - std::sqrt(1076.0)) / 2.0;
  CHECK(values[0] == doctest::Approx(lo1).epsilon(1e-12));
  CHECK(values[1] == doctest::Approx(lo2).epsilon(1e-12));
}

TEST_CASE("exact_k_smallest with k = d returns a full orthogonal frame") {
  const auto [frame, values] = exact_k_smallest(Matrix::diagonal({-2.0, -1.0, 3.0}), 3);
  CHECK(frame.width() == 3);
  CHECK(values[2] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("a quadratic eigenframe is a fixed point of the projected sweep") {
  const EnergyLandscape land = diag_quadratic({-2.0, -1.0, 3.0});
  EigenSolverConfig cfg;
  cfg.method = EigenSolverConfig::Method::sirqit;
  cfg.gamma = 0.1;
  cfg.sub_iterations = 1;
  cfg.use_dimer = false;
  const OrthoFrame out = sirqit_step(land, Vector(3, 0.0), span_e12(), cfg);
  CHECK(projector_distance(out, span_e12()) <= 1e-10);
}

TEST_CASE("gamma = 0 keeps the subspace") {
  const EnergyLandscape land = diag_quadratic({-2.0, -1.0, 3.0});
  EigenSolverConfig cfg;
  cfg.method = EigenSolverConfig::Method::sirqit;
  cfg.gamma = 0.0;
  cfg.sub_iterations = 3;
  const OrthoFrame start = perturbed_e12();
  const OrthoFrame out = sirqit_step(land, Vector(3, 0.0), start, cfg);
  CHECK(projector_distance(out, start) <= 1e-12);
}

TEST_CASE("projected sweeps converge to the minimal invariant subspace") {
  const EnergyLandscape land = diag_quadratic({-2.0, -1.0, 3.0});
  EigenSolverConfig cfg;
  cfg.method = EigenSolverConfig::Method::sirqit;
  cfg.gamma = 0.1;
  cfg.sub_iterations = 50;
  cfg.use_dimer = false;
  const OrthoFrame out = sirqit_step(land, Vector(3, 0.0), perturbed_e12(), cfg);
  CHECK(projector_distance(out, span_e12()) <= 1e-4);
}

TEST_CASE("Rayleigh-Ritz block step: fixed point and fast convergence") {
  const EnergyLandscape land = diag_quadratic({-2.0, -1.0, 3.0});
  EigenSolverConfig cfg;
  cfg.method = EigenSolverConfig::Method::lobpcg;
  cfg.use_dimer = false;

  cfg.sub_iterations = 1;
  const auto [fixed, st0] =
      lobpcg_step(land, Vector(3, 0.0), span_e12(), LobpcgState{}, cfg);
  CHECK(projector_distance(fixed, span_e12()) <= 1e-10);

  cfg.sub_iterations = 10;
  const auto [out, st1] =
      lobpcg_step(land, Vector(3, 0.0), perturbed_e12(), LobpcgState{}, cfg);
  const double lob = projector_distance(out, span_e12());
  CHECK(lob <= 1e-8);

  EigenSolverConfig scfg;
  scfg.method = EigenSolverConfig::Method::sirqit;
  scfg.gamma = 0.1;
  scfg.sub_iterations = 10;
  scfg.use_dimer = false;
  const OrthoFrame sout = sirqit_step(land, Vector(3, 0.0), perturbed_e12(), scfg);
  CHECK(lob <= projector_distance(sout, span_e12()));
}

TEST_CASE("Ritz values do not exceed the warm frame's Ritz values") {
  const EnergyLandscape land = diag_quadratic({-2.0, -1.0, 1.5, 3.0});
  const OrthoFrame start = mgs_orth(
      Matrix::from_columns({{1.0, 0.2, 0.0, 0.1}, {0.0, 1.0, 0.3, 0.0}}));
  const Matrix h = land.hessian(Vector(4, 0.0));
  const Matrix pre =
      hisd::linalg::matmul(hisd::linalg::transpose(start.columns()),
                           hisd::linalg::matmul(h, start.columns()));
  const auto warm_ritz = hisd::linalg::sym_eig(pre).eigenvalues;

  EigenSolverConfig cfg;
  cfg.method = EigenSolverConfig::Method::lobpcg;
  cfg.sub_iterations = 1;
  cfg.use_dimer = false;
  const auto [out, st] = lobpcg_step(land, Vector(4, 0.0), start, LobpcgState{}, cfg);
  const Matrix post =
      hisd::linalg::matmul(hisd::linalg::transpose(out.columns()),
                           hisd::linalg::matmul(h, out.columns()));
  const auto new_ritz = hisd::linalg::sym_eig(post).eigenvalues;
  // Minimization over a trial space containing span(start): coordinate-wise
  // the new Ritz values cannot exceed the warm ones.
  for (std::size_t i = 0; i < new_ritz.size(); ++i)
    CHECK(new_ritz[i] <= warm_ritz[i] + 1e-12);
}

TEST_CASE("dispatch: exact solver reports alpha = 0") {
  const EnergyLandscape land = diag_quadratic({-2.0, -1.0, 3.0});
  EigenSolverConfig cfg;
  cfg.method = EigenSolverConfig::Method::exact;
  const auto res =
      eigensol(land, Vector(3, 0.0), perturbed_e12(), LobpcgState{}, cfg, true);
  REQUIRE(res.alpha.has_value());
  CHECK(*res.alpha <= 1e-12);
}

TEST_CASE("dispatch: more sub-iterations are at least as accurate") {
  // A representative off-path point of the exp-fitting run.
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::biggs;
  spec.s = {4, 8, 16, 8, 4, 2};
  spec.modified = 4;
  const EnergyLandscape land = make_benchmark(spec);
  const Vector x{0.2, 9.3, 1.05, 4.9, 4.02, 3.01};
  const OrthoFrame warm = mgs_orth(Matrix::from_columns({{1, 0, 0, 0, 0.05, 0},
                                                         {0, 1, 0.08, 0, 0, 0},
                                                         {0, 0, 1, 0, 0, -0.06},
                                                         {0.07, 0, 0, 1, 0, 0}}));
  EigenSolverConfig cfg;
  cfg.method = EigenSolverConfig::Method::sirqit;
  cfg.gamma = 0.02;
  cfg.dimer_length = 1e-3;

  cfg.sub_iterations = 1;
  const auto one = eigensol(land, x, warm, LobpcgState{}, cfg, true);
  cfg.sub_iterations = 5;
  const auto five = eigensol(land, x, warm, LobpcgState{}, cfg, true);
  CHECK(*five.alpha <= *one.alpha + 1e-12);

  cfg.method = EigenSolverConfig::Method::lobpcg;
  cfg.sub_iterations = 1;
  const auto lob = eigensol(land, x, warm, LobpcgState{}, cfg, true);
  CHECK(*lob.alpha <= *one.alpha + 1e-12);
}

TEST_CASE("dimer and exact products give fourfold-closer frames as l halves") {
  BenchmarkSpec spec;
  spec.family = BenchmarkSpec::Family::biggs;
  spec.s = {4, 8, 16, 8, 4, 2};
  spec.modified = 4;
  const EnergyLandscape land = make_benchmark(spec);
  const Vector x{0.0, 9.0, 1.0, 5.0, 4.0, 3.0};
  const OrthoFrame warm = mgs_orth(Matrix::from_columns(
      {{1, 0.1, 0, 0, 0, 0}, {0, 1, 0, 0.1, 0, 0}, {0, 0, 1, 0, 0.1, 0}, {0, 0, 0, 1, 0, 0.1}}));

  EigenSolverConfig exact_cfg;
  exact_cfg.method = EigenSolverConfig::Method::sirqit;
  exact_cfg.gamma = 0.02;
  exact_cfg.sub_iterations = 3;
  exact_cfg.use_dimer = false;
  const OrthoFrame ref = sirqit_step(land, x, warm, exact_cfg);

  const auto dist_at = [&](double l) {
    EigenSolverConfig cfg = exact_cfg;
    cfg.use_dimer = true;
    cfg.dimer_length = l;
    return projector_distance(sirqit_step(land, x, warm, cfg), ref);
  };
  const double ratio = dist_at(1e-2) / dist_at(5e-3);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("config validation") {
  const EnergyLandscape land = diag_quadratic({-1.0, 2.0});
  EigenSolverConfig cfg;
  cfg.sub_iterations = 0;
  CHECK_THROWS_AS(
      sirqit_step(land, Vector(2, 0.0),
                  OrthoFrame(Matrix::from_columns({{1.0, 0.0}})), cfg),
      Error);
  cfg.sub_iterations = 1;
  cfg.dimer_length = -1.0;
  CHECK_THROWS_AS(
      eigensol(land, Vector(2, 0.0), OrthoFrame(Matrix::from_columns({{1.0, 0.0}})),
               LobpcgState{}, cfg, false),
      Error);
}
