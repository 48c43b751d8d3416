#include "hisd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hisd::linalg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::from_columns(const std::vector<Vector>& cols) {
  if (cols.empty()) return {};
  Matrix m(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != m.rows())
      fail(ErrorCode::invalid_argument, "from_columns: ragged column lengths");
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = cols[j][i];
  }
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_column(std::size_t j, const Vector& v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

bool Matrix::is_symmetric(double rel_tol) const {
  if (rows_ != cols_) return false;
  const double scale = max_abs();
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > rel_tol * scale) return false;
  return true;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorCode::invalid_argument, "matmul: inner dimensions disagree");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size())
    fail(ErrorCode::invalid_argument, "matvec: dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::invalid_argument, "add: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::invalid_argument, "subtract: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * s;
  return c;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

Vector axpy(double a, const Vector& x, const Vector& y) {
  Vector r(y);
  for (std::size_t i = 0; i < x.size(); ++i) r[i] += a * x[i];
  return r;
}

Vector scale(const Vector& v, double s) {
  Vector r(v);
  for (double& x : r) x *= s;
  return r;
}

bool all_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

OrthoFrame::OrthoFrame(Matrix columns) : m_(std::move(columns)) {
  if (m_.rows() == 0 || m_.cols() == 0 || m_.cols() > m_.rows())
    fail(ErrorCode::invalid_argument, "OrthoFrame: need 1 <= k <= d");
  for (std::size_t i = 0; i < m_.cols(); ++i) {
    for (std::size_t j = i; j < m_.cols(); ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < m_.rows(); ++r) s += m_(r, i) * m_(r, j);
      const double target = (i == j) ? 1.0 : 0.0;
      if (std::abs(s - target) > 1e-12)
        fail(ErrorCode::contract_violation,
             "OrthoFrame: columns not orthonormal (V^T V deviates by " +
                 std::to_string(std::abs(s - target)) + " at (" + std::to_string(i) +
                 "," + std::to_string(j) + "))");
    }
  }
}

Matrix OrthoFrame::projector() const {
  Matrix p(dim(), dim());
  for (std::size_t c = 0; c < width(); ++c)
    for (std::size_t i = 0; i < dim(); ++i) {
      const double vi = m_(i, c);
      if (vi == 0.0) continue;
      for (std::size_t j = 0; j < dim(); ++j) p(i, j) += vi * m_(j, c);
    }
  return p;
}

namespace {

// One Jacobi rotation zeroing w(p,q); updates w symmetrically and the
// accumulated eigenvector rows in vt (vt row r = eigenvector r, transposed
// storage keeps both updates contiguous).
void jacobi_rotate(Matrix& w, Matrix& vt, std::size_t p, std::size_t q) {
  const double apq = w(p, q);
  const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
  double t;
  if (std::isinf(theta)) {
    t = 0.0;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  const std::size_t d = w.rows();
  w(p, p) -= t * apq;
  w(q, q) += t * apq;
  w(p, q) = 0.0;
  w(q, p) = 0.0;
  double* wp = w.row(p);
  double* wq = w.row(q);
  for (std::size_t i = 0; i < d; ++i) {
    if (i == p || i == q) continue;
    const double wip = wp[i];
    const double wiq = wq[i];
    wp[i] = wip - s * (wiq + tau * wip);
    wq[i] = wiq + s * (wip - tau * wiq);
    w(i, p) = wp[i];
    w(i, q) = wq[i];
  }
  double* vp = vt.row(p);
  double* vq = vt.row(q);
  for (std::size_t i = 0; i < d; ++i) {
    const double vip = vp[i];
    const double viq = vq[i];
    vp[i] = vip - s * (viq + tau * vip);
    vq[i] = viq + s * (vip - tau * viq);
  }
}

double offdiag_frobenius(const Matrix& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j)
      if (i != j) s += w(i, j) * w(i, j);
  return std::sqrt(s);
}

} // namespace

Spectrum sym_eig(const Matrix& a) {
  if (a.rows() != a.cols())
    fail(ErrorCode::invalid_argument, "sym_eig: matrix not square");
  if (!a.is_symmetric())
    fail(ErrorCode::contract_violation, "sym_eig: matrix not symmetric to 1e-12");
  const std::size_t d = a.rows();
  Matrix w = a;
  Matrix vt = Matrix::identity(d);

  const double norm_f = a.frobenius_norm();
  const double stop = 1e-14 * norm_f;
  // Entries below this cannot lift off(W) above the stopping threshold.
  const double skip = (d > 1) ? stop / std::sqrt(double(d) * double(d - 1)) : 0.0;

  bool converged = (norm_f == 0.0);
  double off = 0.0;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    off = offdiag_frobenius(w);
    if (off <= stop) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q)
        if (std::abs(w(p, q)) > skip) jacobi_rotate(w, vt, p, q);
  }
  if (!converged) {
    off = offdiag_frobenius(w);
    if (off > stop)
      fail(ErrorCode::no_convergence,
           "sym_eig: Jacobi sweep cap reached, off-diagonal residual " +
               std::to_string(off));
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return w(i, i) < w(j, j); });

  Spectrum s;
  s.eigenvalues.resize(d);
  s.eigenvectors = Matrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    s.eigenvalues[k] = w(order[k], order[k]);
    const double* vrow = vt.row(order[k]);
    for (std::size_t i = 0; i < d; ++i) s.eigenvectors(i, k) = vrow[i];
  }
  return s;
}

double operator_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  if (a.rows() == a.cols() && a.is_symmetric()) {
    const Spectrum s = sym_eig(a);
    double m = 0.0;
    for (double ev : s.eigenvalues) m = std::max(m, std::abs(ev));
    return m;
  }
  const Matrix g = matmul(transpose(a), a);
  const Spectrum s = sym_eig(g);
  const double lmax = std::max(0.0, s.eigenvalues.back());
  return std::sqrt(lmax);
}

namespace {

// Shared MGS sweep. In drop mode dependent columns are removed, otherwise
// they raise rank_deficient with the offending input column index.
Matrix mgs_impl(const Matrix& input, bool drop, double drop_tol,
                std::vector<std::size_t>* kept_out) {
  const std::size_t d = input.rows();
  const std::size_t k = input.cols();
  if (d == 0 || k == 0) fail(ErrorCode::invalid_argument, "mgs_orth: empty input");

  double max_col_norm = 0.0;
  std::vector<Vector> cols(k);
  for (std::size_t j = 0; j < k; ++j) {
    cols[j] = input.column(j);
    max_col_norm = std::max(max_col_norm, norm2(cols[j]));
  }
  if (max_col_norm == 0.0) {
    if (drop) return {};
    fail(ErrorCode::rank_deficient, "mgs_orth: all columns zero");
  }
  const double tol = drop_tol * max_col_norm;

  std::vector<Vector> q;
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < k; ++j) {
    Vector v = cols[j];
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& u : q) {
        const double c = dot(u, v);
        for (std::size_t i = 0; i < d; ++i) v[i] -= c * u[i];
      }
    const double n = norm2(v);
    if (n <= tol) {
      if (drop) continue;
      fail(ErrorCode::rank_deficient,
           "mgs_orth: column " + std::to_string(j) +
               " is numerically dependent on the preceding columns");
    }
    for (double& x : v) x /= n;
    q.push_back(std::move(v));
    kept.push_back(j);
  }
  if (kept_out) *kept_out = kept;
  return Matrix::from_columns(q);
}

} // namespace

OrthoFrame mgs_orth(const Matrix& columns) {
  return OrthoFrame(mgs_impl(columns, false, 1e-10, nullptr));
}

Matrix mgs_orth_drop(const Matrix& columns, double drop_tol) {
  return mgs_impl(columns, true, drop_tol, nullptr);
}

Matrix complete_basis(const OrthoFrame& v) {
  const std::size_t d = v.dim();
  const std::size_t k = v.width();
  if (k == d) return Matrix(d, 0);
  Matrix trial(d, k + d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < k; ++j) trial(i, j) = v.columns()(i, j);
  for (std::size_t i = 0; i < d; ++i) trial(i, k + i) = 1.0;
  const Matrix q = mgs_orth_drop(trial, 1e-8);
  if (q.cols() != d)
    fail(ErrorCode::no_convergence, "complete_basis: completion did not reach full rank");
  Matrix comp(d, d - k);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d - k; ++j) comp(i, j) = q(i, k + j);
  return comp;
}

double projector_distance(const OrthoFrame& v, const OrthoFrame& w) {
  if (v.dim() != w.dim() || v.width() != w.width())
    fail(ErrorCode::invalid_argument, "projector_distance: frames must share d and k");
  const Matrix diff = subtract(v.projector(), w.projector());
  const double direct = operator_norm(diff);

  const Matrix w_perp = complete_basis(w);
  double via_identity = 0.0;
  if (!w_perp.empty()) {
    via_identity = operator_norm(matmul(transpose(v.columns()), w_perp));
  }
  if (std::abs(direct - via_identity) > 1e-10)
    fail(ErrorCode::no_convergence,
         "projector_distance: direct and splitting-identity routes disagree by " +
             std::to_string(std::abs(direct - via_identity)));
  return std::clamp(direct, 0.0, 1.0);
}

} // namespace hisd::linalg
