#include "gls/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace gls {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::diagonal(const Vector& d) {
  DenseMatrix out(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
  return out;
}

DenseMatrix DenseMatrix::column(const Vector& v) {
  DenseMatrix out(v.size(), 1);
  std::copy(v.begin(), v.end(), out.data_.begin());
  return out;
}

DenseMatrix DenseMatrix::reshape(const Vector& v, std::size_t rows, std::size_t cols) {
  require(v.size() == rows * cols, "reshape: size mismatch");
  DenseMatrix out(rows, cols);
  std::copy(v.begin(), v.end(), out.data_.begin());
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
  return out;
}

Vector DenseMatrix::col(std::size_t j) const {
  Vector out(rows_);
  std::copy(data_.begin() + j * rows_, data_.begin() + (j + 1) * rows_, out.begin());
  return out;
}

void DenseMatrix::set_col(std::size_t j, const Vector& v) {
  require(v.size() == rows_, "set_col: size mismatch");
  std::copy(v.begin(), v.end(), data_.begin() + j * rows_);
}

DenseMatrix DenseMatrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                               std::size_t ncols) const {
  require(row0 + nrows <= rows_ && col0 + ncols <= cols_, "block: out of range");
  DenseMatrix out(nrows, ncols);
  for (std::size_t j = 0; j < ncols; ++j)
    for (std::size_t i = 0; i < nrows; ++i) out(i, j) = (*this)(row0 + i, col0 + j);
  return out;
}

Vector DenseMatrix::apply(const Vector& x) const {
  require(x.size() == cols_, "apply: size mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* colj = data_.data() + j * rows_;
    for (std::size_t i = 0; i < rows_; ++i) y[i] += colj[i] * xj;
  }
  return y;
}

Vector DenseMatrix::apply_transpose(const Vector& x) const {
  require(x.size() == rows_, "apply_transpose: size mismatch");
  Vector y(cols_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    const double* colj = data_.data() + j * rows_;
    double acc = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) acc += colj[i] * x[i];
    y[j] = acc;
  }
  return y;
}

double DenseMatrix::frobenius_norm() const {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return std::sqrt(acc);
}

double DenseMatrix::max_abs() const {
  double acc = 0.0;
  for (double v : data_) acc = std::max(acc, std::fabs(v));
  return acc;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "operator+=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "operator-=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("operator*: shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c.data() + j * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double bpj = b(p, j);
      if (bpj == 0.0) continue;
      const double* ap = a.data() + p * m;
      for (std::size_t i = 0; i < m; ++i) cj[i] += ap[i] * bpj;
    }
  }
  return c;
}

DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

Vector operator*(const DenseMatrix& a, const Vector& x) { return a.apply(x); }

DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom) {
  if (top.cols() != bottom.cols()) throw DimensionMismatch("vstack: column mismatch");
  DenseMatrix out(top.rows() + bottom.rows(), top.cols());
  for (std::size_t j = 0; j < out.cols(); ++j) {
    for (std::size_t i = 0; i < top.rows(); ++i) out(i, j) = top(i, j);
    for (std::size_t i = 0; i < bottom.rows(); ++i) out(top.rows() + i, j) = bottom(i, j);
  }
  return out;
}

DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right) {
  if (left.rows() != right.rows()) throw DimensionMismatch("hstack: row mismatch");
  DenseMatrix out(left.rows(), left.cols() + right.cols());
  for (std::size_t j = 0; j < left.cols(); ++j)
    for (std::size_t i = 0; i < left.rows(); ++i) out(i, j) = left(i, j);
  for (std::size_t j = 0; j < right.cols(); ++j)
    for (std::size_t i = 0; i < right.rows(); ++i) out(i, left.cols() + j) = right(i, j);
  return out;
}

double dot(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Vector& a) {
  double acc = 0.0;
  for (double v : a) acc = std::max(acc, std::fabs(v));
  return acc;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector scaled(double alpha, Vector v) {
  for (double& x : v) x *= alpha;
  return v;
}

Vector add(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "add: size mismatch");
  Vector out(a);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Vector sub(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "sub: size mismatch");
  Vector out(a);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

}  // namespace gls
