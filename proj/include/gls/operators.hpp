#ifndef GLS_OPERATORS_HPP
#define GLS_OPERATORS_HPP

#include <cstddef>
#include <variant>

#include "gls/dense_matrix.hpp"

namespace gls {

// Symmetric m x m covariance operator.  Three concrete layouts:
//   Dense            - explicit matrix
//   KroneckerIdentity- Sigma0 (x) I_M for a G x G core (SUR covariance)
//   BlockZeroPadded  - diag(Omega, 0_k) (restricted-GLM embedding)
class SymmetricOperator {
 public:
  static SymmetricOperator dense(DenseMatrix sigma);
  static SymmetricOperator kronecker_identity(DenseMatrix core, std::size_t block);
  static SymmetricOperator block_zero_padded(DenseMatrix top, std::size_t zero_rows);

  std::size_t dim() const;
  Vector apply(const Vector& x) const;
  DenseMatrix to_dense() const;

  // Diagonal of the operator (used by the diag(Sigma) preconditioner choice).
  Vector diagonal() const;

  bool is_dense() const { return std::holds_alternative<Dense>(repr_); }
  bool is_kronecker() const { return std::holds_alternative<Kron>(repr_); }
  bool is_block_zero_padded() const { return std::holds_alternative<Padded>(repr_); }

  // Structure accessors; only valid for the matching layout.
  const DenseMatrix& kron_core() const { return std::get<Kron>(repr_).core; }
  std::size_t kron_block() const { return std::get<Kron>(repr_).block; }
  const DenseMatrix& padded_top() const { return std::get<Padded>(repr_).top; }
  std::size_t padded_zero_rows() const { return std::get<Padded>(repr_).zero_rows; }

 private:
  struct Dense {
    DenseMatrix sigma;
  };
  struct Kron {
    DenseMatrix core;
    std::size_t block;
  };
  struct Padded {
    DenseMatrix top;
    std::size_t zero_rows;
  };
  std::variant<Dense, Kron, Padded> repr_;

  explicit SymmetricOperator(std::variant<Dense, Kron, Padded> repr)
      : repr_(std::move(repr)) {}
};

DenseMatrix kronecker(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace gls

#endif  // GLS_OPERATORS_HPP
