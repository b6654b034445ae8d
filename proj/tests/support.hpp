// Test-side oracles, kept independent of the library paths they check.
#ifndef GLS_TESTS_SUPPORT_HPP
#define GLS_TESTS_SUPPORT_HPP

#include <cmath>

#include "gls/experiments.hpp"
#include "gls/glm.hpp"
#include "gls/linalg.hpp"
#include "gls/pcg.hpp"
#include "gls/rng.hpp"
#include "gls/structured.hpp"

namespace gls::testing {

// Explicit Eq. (12) matrices through LU solves (no shared code with the
// operator implementations).
struct DensePair {
  DenseMatrix xstar;  // m x n
  DenseMatrix pi;     // m x m
};

inline DensePair form_eq12(const DenseMatrix& x, const DenseMatrix& d) {
  const std::size_t m = x.rows();
  DenseMatrix d_inv_x = lu_solve(d, x);                      // D^-1 X
  DenseMatrix gram = x.transpose() * d_inv_x;                // X'D^-1X
  DenseMatrix xstar = lu_solve(gram.transpose(), d_inv_x.transpose()).transpose();
  DenseMatrix pi = DenseMatrix::identity(m) - xstar * x.transpose();
  pi = lu_solve(d.transpose(), pi.transpose()).transpose();  // (I - X*X') D^-1
  return {std::move(xstar), std::move(pi)};
}

// Dense augmented matrix G = (Sigma X; X' 0).
inline DenseMatrix dense_aug(const Glm& glm) {
  const std::size_t m = glm.x.rows(), n = glm.x.cols();
  DenseMatrix g(m + n, m + n);
  const DenseMatrix sigma = glm.sigma.to_dense();
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) g(i, j) = sigma(i, j);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      g(i, m + j) = glm.x(i, j);
      g(m + j, i) = glm.x(i, j);
    }
  return g;
}

// Dense K = (D X; X' 0)^-1 by direct inversion.
inline DenseMatrix dense_k(const DenseMatrix& x, const DenseMatrix& d) {
  const std::size_t m = x.rows(), n = x.cols();
  DenseMatrix aug(m + n, m + n);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) aug(i, j) = d(i, j);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      aug(i, m + j) = x(i, j);
      aug(m + j, i) = x(i, j);
    }
  return lu_solve(aug, DenseMatrix::identity(m + n));
}

// Equality-constrained least squares min |zeta - Z beta|_{Omega^-1} subject
// to C beta = 0, solved by the null-space method: beta = N theta with N an
// orthonormal basis of null(C) and theta the GLS estimator of the projected
// model.
inline Vector constrained_ls_nullspace(const DenseMatrix& z, const Vector& zeta,
                                       const DenseMatrix& omega, const DenseMatrix& c) {
  QrFull qc = qr_full(c.transpose());
  const DenseMatrix null_basis = qc.q_null;  // n x (n - k)
  Glm reduced = make_glm(zeta, z * null_basis, SymmetricOperator::dense(omega));
  const Vector theta = gls_estimate_direct(reduced).b;
  return null_basis.apply(theta);
}

// Greedy Gram-Schmidt rank, independent of sym_eig.
inline std::size_t brute_force_rank(const DenseMatrix& w, double tol = 1e-10) {
  std::vector<Vector> basis;
  double max_norm = 0.0;
  for (std::size_t j = 0; j < w.cols(); ++j) max_norm = std::max(max_norm, norm2(w.col(j)));
  for (std::size_t j = 0; j < w.cols(); ++j) {
    Vector v = w.col(j);
    for (const Vector& b : basis) axpy(-dot(b, v), b, v);
    for (const Vector& b : basis) axpy(-dot(b, v), b, v);  // reorthogonalize
    const double nrm = norm2(v);
    if (nrm > tol * max_norm) {
      for (double& t : v) t /= nrm;
      basis.push_back(std::move(v));
    }
  }
  return basis.size();
}

inline Glm random_spd_glm(std::size_t m, std::size_t n, double cond, std::uint64_t seed) {
  Rng master(seed);
  DenseMatrix x = seeded_gaussian(m, n, 0.0, 1.0, master.split(0).seed());
  DenseMatrix sigma = gen_spd_with_cond(m, cond, master.split(1).seed());
  Rng yr = master.split(2);
  Vector beta = yr.gaussian_vector(n);
  Vector y = x.apply(beta);
  const DenseMatrix l = cholesky(sigma);
  Vector g = yr.gaussian_vector(m);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += l(i, j) * g[j];
    y[i] += acc;
  }
  return make_glm(std::move(y), std::move(x), SymmetricOperator::dense(sigma));
}

inline double rel_err(const Vector& got, const Vector& want) {
  const double scale = std::max(norm2(want), 1e-300);
  return norm2(sub(got, want)) / scale;
}

}  // namespace gls::testing

#endif  // GLS_TESTS_SUPPORT_HPP
