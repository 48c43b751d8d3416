#pragma once

#include <cstddef>
#include <vector>

#include "hisd/errors.hpp"

namespace hisd::linalg {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small (d <= a few hundred), always owning.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);
  static Matrix from_columns(const std::vector<Vector>& cols);

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double* row(std::size_t i) { return a_.data() + i * cols_; }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, const Vector& v);

  /// max_ij |A_ij - A_ji| <= rel_tol * max_ij |A_ij| (zero matrix counts as symmetric).
  bool is_symmetric(double rel_tol = 1e-12) const;

  double max_abs() const;
  double frobenius_norm() const;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
Vector axpy(double a, const Vector& x, const Vector& y); // a*x + y
Vector scale(const Vector& v, double s);
bool all_finite(const Vector& v);

/// A d x k matrix with orthonormal columns; the constructor enforces
/// V^T V = I to 1e-12 per entry.
class OrthoFrame {
public:
  explicit OrthoFrame(Matrix columns);

  const Matrix& columns() const { return m_; }
  std::size_t dim() const { return m_.rows(); }
  std::size_t width() const { return m_.cols(); }

  /// V V^T (d x d).
  Matrix projector() const;

private:
  Matrix m_;
};

struct Spectrum {
  Vector eigenvalues;      // ascending
  Matrix eigenvectors;     // column i pairs with eigenvalues[i]; orthogonal d x d
};

/// Full symmetric eigendecomposition by cyclic Jacobi sweeps.
/// Off-diagonal Frobenius threshold 1e-14 * ||A||_F, sweep cap 100.
/// Eigenvalues ascend; ties keep the original diagonal order.
Spectrum sym_eig(const Matrix& a);

/// Spectral norm ||A||_2. Symmetric input reuses sym_eig directly,
/// otherwise sqrt(lambda_max(A^T A)).
double operator_norm(const Matrix& a);

/// Modified Gram-Schmidt with one re-orthogonalization pass.
/// Column i of the output spans the same flag as columns 0..i of the input.
/// A dependent column (residual below 1e-10 of the largest input column norm)
/// raises rank_deficient naming that column.
OrthoFrame mgs_orth(const Matrix& columns);

/// Same sweep but near-dependent columns are dropped instead of raising;
/// used by trial-basis assembly. Returns possibly fewer columns.
Matrix mgs_orth_drop(const Matrix& columns, double drop_tol = 1e-10);

/// Orthonormal basis of the complement of span(V), d x (d-k).
Matrix complete_basis(const OrthoFrame& v);

/// ||V V^T - W W^T||_2 in [0, 1]. Evaluated twice: directly and through the
/// orthogonal-splitting identity ||V^T W_perp||_2; disagreement beyond 1e-10
/// raises no_convergence (it indicates a broken basis completion).
double projector_distance(const OrthoFrame& v, const OrthoFrame& w);

} // namespace hisd::linalg
