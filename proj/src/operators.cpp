#include "gls/operators.hpp"

#include <cmath>

#include "gls/errors.hpp"

namespace gls {

SymmetricOperator SymmetricOperator::dense(DenseMatrix sigma) {
  if (sigma.rows() != sigma.cols())
    throw DimensionMismatch("SymmetricOperator: dense part must be square");
  const double scale = sigma.max_abs();
  for (std::size_t j = 0; j < sigma.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (std::fabs(sigma(i, j) - sigma(j, i)) > 1e-12 * std::max(1.0, scale))
        throw NotSymmetric("SymmetricOperator: dense part is not symmetric");
  return SymmetricOperator(Dense{std::move(sigma)});
}

SymmetricOperator SymmetricOperator::kronecker_identity(DenseMatrix core,
                                                        std::size_t block) {
  if (core.rows() != core.cols())
    throw DimensionMismatch("SymmetricOperator: Kronecker core must be square");
  if (block == 0) throw DimensionMismatch("SymmetricOperator: block must be positive");
  return SymmetricOperator(Kron{std::move(core), block});
}

SymmetricOperator SymmetricOperator::block_zero_padded(DenseMatrix top,
                                                       std::size_t zero_rows) {
  if (top.rows() != top.cols())
    throw DimensionMismatch("SymmetricOperator: padded top must be square");
  return SymmetricOperator(Padded{std::move(top), zero_rows});
}

std::size_t SymmetricOperator::dim() const {
  if (const auto* d = std::get_if<Dense>(&repr_)) return d->sigma.rows();
  if (const auto* k = std::get_if<Kron>(&repr_)) return k->core.rows() * k->block;
  const auto& p = std::get<Padded>(repr_);
  return p.top.rows() + p.zero_rows;
}

Vector SymmetricOperator::apply(const Vector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("SymmetricOperator: size mismatch");
  if (const auto* d = std::get_if<Dense>(&repr_)) return d->sigma.apply(x);
  if (const auto* k = std::get_if<Kron>(&repr_)) {
    // (Sigma0 (x) I_M) vec(U) = vec(U Sigma0') and Sigma0 is symmetric.
    const std::size_t big = k->block, g = k->core.rows();
    DenseMatrix u = DenseMatrix::reshape(x, big, g);
    return (u * k->core).to_vector();
  }
  const auto& p = std::get<Padded>(repr_);
  const std::size_t m0 = p.top.rows();
  Vector top_in(x.begin(), x.begin() + m0);
  Vector out(x.size(), 0.0);
  Vector top_out = p.top.apply(top_in);
  std::copy(top_out.begin(), top_out.end(), out.begin());
  return out;
}

DenseMatrix SymmetricOperator::to_dense() const {
  if (const auto* d = std::get_if<Dense>(&repr_)) return d->sigma;
  if (const auto* k = std::get_if<Kron>(&repr_))
    return kronecker(k->core, DenseMatrix::identity(k->block));
  const auto& p = std::get<Padded>(repr_);
  const std::size_t m0 = p.top.rows(), m = m0 + p.zero_rows;
  DenseMatrix out(m, m);
  for (std::size_t j = 0; j < m0; ++j)
    for (std::size_t i = 0; i < m0; ++i) out(i, j) = p.top(i, j);
  return out;
}

Vector SymmetricOperator::diagonal() const {
  Vector d(dim(), 0.0);
  if (const auto* dd = std::get_if<Dense>(&repr_)) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = dd->sigma(i, i);
  } else if (const auto* k = std::get_if<Kron>(&repr_)) {
    for (std::size_t g = 0; g < k->core.rows(); ++g)
      for (std::size_t i = 0; i < k->block; ++i) d[g * k->block + i] = k->core(g, g);
  } else {
    const auto& p = std::get<Padded>(repr_);
    for (std::size_t i = 0; i < p.top.rows(); ++i) d[i] = p.top(i, i);
  }
  return d;
}

DenseMatrix kronecker(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ja = 0; ja < a.cols(); ++ja)
    for (std::size_t ia = 0; ia < a.rows(); ++ia) {
      const double s = a(ia, ja);
      if (s == 0.0) continue;
      for (std::size_t jb = 0; jb < b.cols(); ++jb)
        for (std::size_t ib = 0; ib < b.rows(); ++ib)
          out(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
    }
  return out;
}

}  // namespace gls
