#ifndef GLS_DENSE_MATRIX_HPP
#define GLS_DENSE_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "gls/errors.hpp"

namespace gls {

using Vector = std::vector<double>;

// Dense real matrix in column-major order: entry (i,j) lives at
// data()[i + j*rows()].  This is the single storage layout used across the
// library; no routine ever reinterprets a buffer in another order.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(const Vector& d);
  // m x 1 matrix from a vector.
  static DenseMatrix column(const Vector& v);
  // Column-major reshape of v into rows x cols (no data movement semantics).
  static DenseMatrix reshape(const Vector& v, std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  DenseMatrix transpose() const;

  Vector col(std::size_t j) const;
  void set_col(std::size_t j, const Vector& v);
  DenseMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
                    std::size_t ncols) const;

  // y = A * x
  Vector apply(const Vector& x) const;
  // y = A' * x
  Vector apply_transpose(const Vector& x) const;

  // Flatten column-major (the vec operator).
  Vector to_vector() const { return data_; }

  double frobenius_norm() const;
  double max_abs() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);
Vector operator*(const DenseMatrix& a, const Vector& x);

DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom);
DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right);

// Vector helpers.
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double max_abs(const Vector& a);
// y += alpha * x
void axpy(double alpha, const Vector& x, Vector& y);
Vector scaled(double alpha, Vector v);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);

}  // namespace gls

#endif  // GLS_DENSE_MATRIX_HPP
