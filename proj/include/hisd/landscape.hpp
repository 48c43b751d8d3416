#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hisd/linalg.hpp"

namespace hisd::landscape {

using linalg::Matrix;
using linalg::Vector;

/// A twice-differentiable energy with gradient access and a Hessian that is
/// analytic where implemented and central-difference of the gradient
/// otherwise. Instances are immutable and reentrant.
struct EnergyLandscape {
  std::string name;
  std::size_t dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
  bool analytic_hessian = false;
  std::optional<Vector> stationary_point;
  std::optional<int> morse_index; // negative-eigenvalue count at stationary_point
};

struct BenchmarkSpec {
  enum class Family { quadratic, powell, biggs, rosenbrock };
  Family family = Family::quadratic;
  Vector s;         // per-coordinate modification weights (4 / 6 / d)
  int modified = 0; // how many leading arctan^2 terms enter with a minus sign
  std::size_t dim = 0; // rosenbrock dimension (others fix their own)
  Matrix quadratic_matrix; // symmetric A for E = x^T A x / 2
};

/// Builds one of the benchmark energies, records its stationary point and
/// the Morse index measured from the Hessian inertia there.
EnergyLandscape make_benchmark(const BenchmarkSpec& spec);

/// Central-difference Hessian-vector product from two gradient calls:
/// [grad(x + l v) - grad(x - l v)] / (2 l). Requires unit v and l > 0.
Vector dimer_hvp(const EnergyLandscape& land, const Vector& x, const Vector& v,
                 double l);

/// Max over coordinates of |central-FD(E) - grad_i| / (1 + |grad_i|).
double gradient_check(const EnergyLandscape& land, const Vector& x, double h);

/// Central differences of the analytic gradient, symmetrized.
Matrix hessian_fd(const EnergyLandscape& land, const Vector& x, double h);

} // namespace hisd::landscape
