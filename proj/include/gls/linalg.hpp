#ifndef GLS_LINALG_HPP
#define GLS_LINALG_HPP

#include <complex>
#include <vector>

#include "gls/dense_matrix.hpp"

namespace gls {

// Relative diagonal-ratio threshold below which QR declares rank deficiency.
inline constexpr double kDefaultRankTol = 1e-10;

// Full QR of an m x n matrix (m >= n): A = [Q_R Q_N] [R; 0] with
// [Q_R Q_N] orthogonal.  Q_N spans the null space of A'.
struct QrFull {
  DenseMatrix q_range;  // m x n
  DenseMatrix q_null;   // m x (m-n)
  DenseMatrix r;        // n x n upper triangular
};

struct QrThin {
  DenseMatrix q;  // m x n, semi-orthogonal
  DenseMatrix r;  // n x n upper triangular
};

QrFull qr_full(const DenseMatrix& a, double rank_tol = kDefaultRankTol);
QrThin qr_thin(const DenseMatrix& a, double rank_tol = kDefaultRankTol);

enum class Side { Left, Right };

// Solve R X = B (Left) or X R = B (Right) with R upper triangular;
// `transpose` replaces R by R'.
DenseMatrix tri_solve(const DenseMatrix& r, const DenseMatrix& b,
                      Side side = Side::Left, bool transpose = false);
Vector tri_solve(const DenseMatrix& r, const Vector& b, bool transpose = false);

// Lower Cholesky factor of a symmetric positive definite matrix.
DenseMatrix cholesky(const DenseMatrix& s);
Vector chol_solve(const DenseMatrix& lower, const Vector& b);
DenseMatrix chol_solve(const DenseMatrix& lower, const DenseMatrix& b);

struct SymEig {
  Vector eigenvalues;        // ascending
  DenseMatrix eigenvectors;  // orthonormal columns, matching order
};

// Symmetric eigendecomposition via Householder tridiagonalization and the
// implicitly shifted QL iteration.
SymEig sym_eig(const DenseMatrix& s);

// Solve A X = B for square A by LU with partial pivoting.
DenseMatrix lu_solve(const DenseMatrix& a, const DenseMatrix& b);
Vector lu_solve(const DenseMatrix& a, const Vector& b);

// Eigenvalues of a general real square matrix (balancing, Householder
// Hessenberg reduction, Francis double-shift QR).  No eigenvectors.
std::vector<std::complex<double>> general_eigenvalues(const DenseMatrix& a);

double spectral_radius(const DenseMatrix& a);

}  // namespace gls

#endif  // GLS_LINALG_HPP
