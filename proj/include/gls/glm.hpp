#ifndef GLS_GLM_HPP
#define GLS_GLM_HPP

#include <cstddef>
#include <optional>

#include "gls/dense_matrix.hpp"
#include "gls/linalg.hpp"
#include "gls/operators.hpp"

namespace gls {

// Relative positivity threshold for the projected covariance Q_N' Sigma Q_N;
// relative so that rescaling the covariance does not flip the verdict.
inline constexpr double kDefaultPdTol = 1e-10;

// General linear model y = X beta + eps, eps ~ (0, Sigma).
struct Glm {
  Vector y;
  DenseMatrix x;
  SymmetricOperator sigma;
};

Glm make_glm(Vector y, DenseMatrix x, SymmetricOperator sigma);

enum class Termination { Converged, Breakdown, Stagnation, MaxIter, Direct };

const char* to_string(Termination t);

struct GlsSolution {
  Vector b;  // parameter estimator
  Vector w;  // dual vector; Sigma*w is the GLM residual
  std::size_t iterations = 0;
  Termination termination = Termination::Direct;
  double residual_seminorm = 0.0;  // final c_i for iterative solvers
  std::optional<DenseMatrix> estimator_cov;
};

// b = (X'X)^-1 X'y by thin QR.  Accepts m == n.
GlsSolution ols_estimate(const DenseMatrix& x, const Vector& y);

// b = (X' Sigma^-1 X)^-1 X' Sigma^-1 y; requires Sigma positive definite.
GlsSolution gls_estimate_direct(const Glm& glm);

struct NullspacePositivity {
  bool positive = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

// Checks that Sigma is positive definite on the null space of X'.
NullspacePositivity check_positivity_on_nullspace(const Glm& glm,
                                                  double pd_tol = kDefaultPdTol);

// Factorized direct solver for the augmented system
//   (Sigma X; X' 0)(w; b) = (y; 0).
// Valid whenever Q_N' Sigma Q_N is positive definite, singular Sigma
// included.  Factorizations happen once; solve() may be called repeatedly
// with fresh responses (Monte Carlo use).
class BlueSolver {
 public:
  explicit BlueSolver(const Glm& glm, double rank_tol = kDefaultRankTol);

  GlsSolution solve(const Vector& y, bool with_cov = false) const;

  const DenseMatrix& q_range() const { return qr_.q_range; }
  const DenseMatrix& q_null() const { return qr_.q_null; }
  const DenseMatrix& r_factor() const { return qr_.r; }
  // Q_N' Sigma Q_N and its Cholesky factor.
  const DenseMatrix& sigma_nn() const { return sigma_nn_; }
  const DenseMatrix& sigma_nn_chol() const { return sigma_nn_chol_; }

 private:
  const SymmetricOperator sigma_;
  DenseMatrix x_;
  QrFull qr_;
  DenseMatrix sigma_q_null_;  // Sigma Q_N
  DenseMatrix sigma_nn_;
  DenseMatrix sigma_nn_chol_;
  DenseMatrix sigma_rn_;  // Q_R' Sigma Q_N
};

GlsSolution blue_augmented_direct(const Glm& glm, bool with_cov = false);

// P_N = I - Sigma Q_N (Q_N' Sigma Q_N)^-1 Q_N' applied matrix-free.
class ProjectorPn {
 public:
  explicit ProjectorPn(const Glm& glm);
  Vector apply(const Vector& v) const;
  DenseMatrix to_dense() const;

 private:
  DenseMatrix q_null_;
  DenseMatrix sigma_q_null_;
  DenseMatrix sigma_nn_chol_;
};

ProjectorPn projector_pn(const Glm& glm);

}  // namespace gls

#endif  // GLS_GLM_HPP
