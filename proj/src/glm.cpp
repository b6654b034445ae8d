#include "gls/glm.hpp"

#include <cmath>
#include <utility>

#include "gls/errors.hpp"

namespace gls {

Glm make_glm(Vector y, DenseMatrix x, SymmetricOperator sigma) {
  if (y.size() != x.rows()) throw DimensionMismatch("make_glm: y/X row mismatch");
  if (sigma.dim() != x.rows()) throw DimensionMismatch("make_glm: Sigma dim mismatch");
  if (x.cols() < 1 || x.rows() <= x.cols())
    throw DimensionMismatch("make_glm: need m > n >= 1");
  return Glm{std::move(y), std::move(x), std::move(sigma)};
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::Breakdown: return "Breakdown";
    case Termination::Stagnation: return "Stagnation";
    case Termination::MaxIter: return "MaxIter";
    case Termination::Direct: return "Direct";
  }
  return "?";
}

GlsSolution ols_estimate(const DenseMatrix& x, const Vector& y) {
  if (y.size() != x.rows()) throw DimensionMismatch("ols_estimate: y/X row mismatch");
  QrThin qr = qr_thin(x);
  GlsSolution out;
  out.b = tri_solve(qr.r, qr.q.apply_transpose(y));
  out.w.assign(x.rows(), 0.0);
  out.termination = Termination::Direct;
  return out;
}

GlsSolution gls_estimate_direct(const Glm& glm) {
  DenseMatrix sigma = glm.sigma.to_dense();
  DenseMatrix lower;
  try {
    lower = cholesky(sigma);
  } catch (const NotPositiveDefinite&) {
    throw SingularCovariance(
        "gls_estimate_direct: covariance is not positive definite; "
        "use blue_augmented_direct");
  }
  // Whiten: solve L Xt = X and L yt = y, then OLS on the whitened data.
  const std::size_t m = glm.x.rows(), n = glm.x.cols();
  DenseMatrix xt(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector col = glm.x.col(j);
    for (std::size_t i = 0; i < m; ++i) {
      double s = col[i];
      for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * col[k];
      col[i] = s / lower(i, i);
    }
    xt.set_col(j, col);
  }
  Vector yt = glm.y;
  for (std::size_t i = 0; i < m; ++i) {
    double s = yt[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * yt[k];
    yt[i] = s / lower(i, i);
  }
  GlsSolution out = ols_estimate(xt, yt);
  // w = Sigma^-1 (y - X b): the dual consistent with the augmented system.
  Vector resid = sub(glm.y, glm.x.apply(out.b));
  out.w = chol_solve(lower, resid);
  return out;
}

NullspacePositivity check_positivity_on_nullspace(const Glm& glm, double pd_tol) {
  QrFull qr = qr_full(glm.x);
  const std::size_t m = glm.x.rows(), n = glm.x.cols();
  DenseMatrix sqn(m, m - n);
  for (std::size_t j = 0; j + n < m; ++j) sqn.set_col(j, glm.sigma.apply(qr.q_null.col(j)));
  DenseMatrix snn = qr.q_null.transpose() * sqn;
  // symmetrize roundoff before the eigensolve
  for (std::size_t j = 0; j < snn.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (snn(i, j) + snn(j, i));
      snn(i, j) = v;
      snn(j, i) = v;
    }
  SymEig eig = sym_eig(snn);
  NullspacePositivity out;
  out.min_eigenvalue = eig.eigenvalues.front();
  out.max_eigenvalue = eig.eigenvalues.back();
  out.positive = out.min_eigenvalue > pd_tol * std::max(out.max_eigenvalue, 0.0);
  return out;
}

BlueSolver::BlueSolver(const Glm& glm, double rank_tol)
    : sigma_(glm.sigma), x_(glm.x), qr_(qr_full(glm.x, rank_tol)) {
  const std::size_t m = x_.rows(), n = x_.cols();
  sigma_q_null_ = DenseMatrix(m, m - n);
  for (std::size_t j = 0; j + n < m; ++j)
    sigma_q_null_.set_col(j, sigma_.apply(qr_.q_null.col(j)));
  sigma_nn_ = qr_.q_null.transpose() * sigma_q_null_;
  for (std::size_t j = 0; j < sigma_nn_.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (sigma_nn_(i, j) + sigma_nn_(j, i));
      sigma_nn_(i, j) = v;
      sigma_nn_(j, i) = v;
    }
  try {
    sigma_nn_chol_ = cholesky(sigma_nn_);
  } catch (const NotPositiveDefinite&) {
    throw NullspaceSingular(
        "blue_augmented_direct: Q_N' Sigma Q_N is not positive definite");
  }
  sigma_rn_ = qr_.q_range.transpose() * sigma_q_null_;
}

GlsSolution BlueSolver::solve(const Vector& y, bool with_cov) const {
  if (y.size() != x_.rows()) throw DimensionMismatch("BlueSolver: y size mismatch");
  const Vector y_n = qr_.q_null.apply_transpose(y);
  const Vector y_r = qr_.q_range.apply_transpose(y);
  const Vector t = chol_solve(sigma_nn_chol_, y_n);

  GlsSolution out;
  out.w = qr_.q_null.apply(t);
  out.b = tri_solve(qr_.r, sub(y_r, sigma_rn_.apply(t)));
  out.termination = Termination::Direct;

  if (with_cov) {
    // cov(b) = R^-1 Q_R' P_N Sigma Q_R R^-T
    //        = R^-1 (Sigma_RR - Sigma_RN Sigma_NN^-1 Sigma_RN') R^-T
    const std::size_t m = x_.rows(), n = x_.cols();
    DenseMatrix sigma_qr(m, n);
    for (std::size_t j = 0; j < n; ++j) sigma_qr.set_col(j, sigma_.apply(qr_.q_range.col(j)));
    DenseMatrix sigma_rr = qr_.q_range.transpose() * sigma_qr;
    DenseMatrix core = sigma_rr - sigma_rn_ * chol_solve(sigma_nn_chol_, sigma_rn_.transpose());
    DenseMatrix left = tri_solve(qr_.r, core, Side::Left, false);
    out.estimator_cov = tri_solve(qr_.r, left, Side::Right, true);
  }
  return out;
}

GlsSolution blue_augmented_direct(const Glm& glm, bool with_cov) {
  return BlueSolver(glm).solve(glm.y, with_cov);
}

ProjectorPn::ProjectorPn(const Glm& glm) {
  BlueSolver solver(glm);
  q_null_ = solver.q_null();
  const std::size_t m = glm.x.rows(), n = glm.x.cols();
  sigma_q_null_ = DenseMatrix(m, m - n);
  for (std::size_t j = 0; j + n < m; ++j)
    sigma_q_null_.set_col(j, glm.sigma.apply(q_null_.col(j)));
  sigma_nn_chol_ = solver.sigma_nn_chol();
}

Vector ProjectorPn::apply(const Vector& v) const {
  const Vector t = chol_solve(sigma_nn_chol_, q_null_.apply_transpose(v));
  return sub(v, sigma_q_null_.apply(t));
}

DenseMatrix ProjectorPn::to_dense() const {
  const std::size_t m = q_null_.rows();
  DenseMatrix out(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    Vector e(m, 0.0);
    e[j] = 1.0;
    out.set_col(j, apply(e));
  }
  return out;
}

ProjectorPn projector_pn(const Glm& glm) { return ProjectorPn(glm); }

}  // namespace gls
