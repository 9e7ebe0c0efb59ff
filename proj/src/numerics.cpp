#include "histlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "histlab/errors.hpp"

namespace histlab {

Tolerance::Tolerance(double e) : eps(e) {
  if (!(e > 0.0 && e < 1.0)) {
    throw DomainError("tolerance must satisfy 0 < eps < 1, got " + std::to_string(e));
  }
}

CVector CVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw IndexError("basis index out of range");
  CVector v(dim);
  v[index] = 1.0;
  return v;
}

double CVector::norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

CVector CVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw DegenerateInputError("cannot normalize the zero vector");
  CVector out(*this);
  for (auto& z : out.data_) z /= n;
  return out;
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<CNum>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw ShapeError("ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::outer(const CVector& a, const CVector& b) {
  CMatrix m(a.dim(), b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  }
  return m;
}

CMatrix CMatrix::from_columns(std::span<const CVector> vs) {
  if (vs.empty()) return {};
  const std::size_t n = vs.front().dim();
  CMatrix m(n, vs.size());
  for (std::size_t c = 0; c < vs.size(); ++c) {
    if (vs[c].dim() != n) throw ShapeError("columns of differing dimension");
    for (std::size_t r = 0; r < n; ++r) m(r, c) = vs[c][r];
  }
  return m;
}

CVector CMatrix::column(std::size_t c) const {
  if (c >= cols_) throw IndexError("column index out of range");
  CVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("matrix sum shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("matrix difference shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(CNum s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(CMatrix a, CNum s) { return a *= s; }
CMatrix operator*(CNum s, CMatrix a) { return a *= s; }

CMatrix mat_mul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("mat_mul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const CNum aik = a(i, k);
      if (aik == CNum{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

CVector mat_vec(const CMatrix& a, const CVector& v) {
  if (a.cols() != v.dim()) throw ShapeError("mat_vec: dimension mismatch");
  CVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    CNum s{};
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * v[k];
    out[i] = s;
  }
  return out;
}

CMatrix adjoint(const CMatrix& a) {
  CMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  }
  return out;
}

CNum trace(const CMatrix& a) {
  if (!a.is_square()) throw ShapeError("trace of a non-square matrix");
  CNum s{};
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

CNum inner(const CVector& a, const CVector& b) {
  if (a.dim() != b.dim()) throw ShapeError("inner product dimension mismatch");
  CNum s{};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

CNum trace_of_product_with_adjoint(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("Tr(A B^dagger) shape mismatch");
  CNum s{};
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) s += ea[i] * std::conj(eb[i]);
  return s;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("max_abs_diff shape mismatch");
  double m = 0.0;
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) m = std::max(m, std::abs(ea[i] - eb[i]));
  return m;
}

double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.entries()) m = std::max(m, std::abs(z));
  return m;
}

bool is_unitary(const CMatrix& u, Tolerance tol) {
  if (!u.is_square()) throw ShapeError("is_unitary: non-square matrix");
  return max_abs_diff(adjoint(u) * u, CMatrix::identity(u.rows())) <= tol.eps;
}

bool is_hermitian(const CMatrix& a, Tolerance tol) {
  if (!a.is_square()) return false;
  return max_abs_diff(a, adjoint(a)) <= tol.eps;
}

bool is_orthonormal_basis(std::span<const CVector> vs, Tolerance tol) {
  if (vs.empty()) return false;
  const std::size_t n = vs.front().dim();
  for (const auto& v : vs) {
    if (v.dim() != n) throw ShapeError("is_orthonormal_basis: mixed dimensions");
  }
  if (vs.size() != n) return false;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i; j < vs.size(); ++j) {
      const CNum expected = i == j ? CNum{1.0} : CNum{};
      if (std::abs(inner(vs[i], vs[j]) - expected) > tol.eps) return false;
    }
  }
  return true;
}

CMatrix projector_from_vector(const CVector& v, Tolerance tol) {
  const double n = v.norm();
  if (!(n > tol.eps)) throw DegenerateInputError("projector_from_vector: vector norm below tolerance");
  const CVector u = v.normalized();
  return CMatrix::outer(u, u);
}

CVector vector_from_rank1_projector(const CMatrix& p) {
  if (!p.is_square() || p.rows() == 0) throw ShapeError("vector_from_rank1_projector: non-square input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.rows(); ++i) {
    if (p(i, i).real() > p(best, best).real()) best = i;
  }
  const CVector col = p.column(best);
  if (col.norm() == 0.0) throw DegenerateInputError("vector_from_rank1_projector: zero projector");
  CVector v = col.normalized();
  const CNum phase = v[best] / std::abs(v[best]);
  for (std::size_t i = 0; i < v.dim(); ++i) v[i] /= phase;
  return v;
}

bool is_positive_semidefinite(const CMatrix& a, Tolerance tol) {
  if (!a.is_square()) throw ShapeError("is_positive_semidefinite: non-square matrix");
  // Eigenvalues >= -eps make a + 2 eps I strictly positive definite.
  const std::size_t n = a.rows();
  CMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j).real() + 2.0 * tol.eps;
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0)) return false;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      CNum s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j).real();
    }
  }
  return true;
}

}  // namespace histlab
