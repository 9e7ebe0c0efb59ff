#pragma once

// Dense complex linear algebra for the small dimensions (<= ~16) that
// history families live in. Everything here is a pure function of its
// arguments.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace histlab {

using CNum = std::complex<double>;

/// Absolute numeric tolerance applied entrywise. 0 < eps < 1.
struct Tolerance {
  double eps = 1e-9;

  constexpr Tolerance() = default;
  explicit Tolerance(double e);
};

class CVector {
 public:
  CVector() = default;
  explicit CVector(std::size_t dim) : data_(dim) {}
  CVector(std::initializer_list<CNum> values) : data_(values) {}
  explicit CVector(std::vector<CNum> values) : data_(std::move(values)) {}

  static CVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return data_.size(); }
  CNum& operator[](std::size_t i) { return data_[i]; }
  const CNum& operator[](std::size_t i) const { return data_[i]; }
  std::span<const CNum> entries() const { return data_; }

  double norm() const;
  CVector normalized() const;

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::vector<CNum> data_;
};

/// Row-major dense complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  /// Nested rows; every row must have the same length.
  CMatrix(std::initializer_list<std::initializer_list<CNum>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  /// |a><b|
  static CMatrix outer(const CVector& a, const CVector& b);
  /// Matrix whose k-th column is vs[k].
  static CMatrix from_columns(std::span<const CVector> vs);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  CNum& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const CNum& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const CNum> entries() const { return data_; }

  CVector column(std::size_t c) const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(CNum s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<CNum> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(CMatrix a, CNum s);
CMatrix operator*(CNum s, CMatrix a);

/// Throws ShapeError unless a.cols() == b.rows().
CMatrix mat_mul(const CMatrix& a, const CMatrix& b);
inline CMatrix operator*(const CMatrix& a, const CMatrix& b) { return mat_mul(a, b); }
CVector mat_vec(const CMatrix& a, const CVector& v);

CMatrix adjoint(const CMatrix& a);
CNum trace(const CMatrix& a);

/// <a|b>, conjugate-linear in the first argument.
CNum inner(const CVector& a, const CVector& b);

/// Tr(a b^dagger) without forming the product.
CNum trace_of_product_with_adjoint(const CMatrix& a, const CMatrix& b);

/// Largest entrywise modulus of a - b. Shapes must agree.
double max_abs_diff(const CMatrix& a, const CMatrix& b);
double max_abs(const CMatrix& a);

bool is_unitary(const CMatrix& u, Tolerance tol = {});
bool is_hermitian(const CMatrix& a, Tolerance tol = {});
/// Gram matrix within eps of the identity and one vector per dimension.
bool is_orthonormal_basis(std::span<const CVector> vs, Tolerance tol = {});

/// |v><v| / <v|v>. Throws DegenerateInputError when ||v|| <= eps.
CMatrix projector_from_vector(const CVector& v, Tolerance tol = {});

/// Recovers a unit vector spanning the range of a rank-1 projector, fixing
/// the phase so the largest-modulus component is real and positive.
CVector vector_from_rank1_projector(const CMatrix& p);

/// Cholesky test of a + shift*I; true iff every pivot stays positive.
bool is_positive_semidefinite(const CMatrix& a, Tolerance tol = {});

}  // namespace histlab
