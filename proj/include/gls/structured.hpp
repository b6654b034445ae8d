#ifndef GLS_STRUCTURED_HPP
#define GLS_STRUCTURED_HPP

#include <memory>
#include <utility>
#include <vector>

#include "gls/glm.hpp"
#include "gls/preconditioner.hpp"

namespace gls {

// GLM with k linear equality restrictions C beta = gamma, embedded as k
// extra zero-variance observations.
struct RestrictedGlm {
  DenseMatrix z;           // m x n
  Vector zeta;             // m
  SymmetricOperator omega; // m x m covariance of the genuine observations
  DenseMatrix c;           // k x n, k >= 0
  Vector gamma;            // k
  bool selection = false;  // C rows are rows of the identity
};

RestrictedGlm make_rglm(DenseMatrix z, Vector zeta, SymmetricOperator omega,
                        DenseMatrix c, Vector gamma, bool selection = false);

// Stacked GLM: X = [Z; C], y = [zeta; gamma], Sigma = diag(Omega, 0_k).
Glm embed_rglm(const RestrictedGlm& rglm);

// Multivariate GLM Y = Z0 B + U with exclusion restrictions per equation
// (no cross-equation restrictions): restrictions[i] lists the zero-forced
// rows of column i of B.
struct MvRglm {
  DenseMatrix z0;      // M x N, full column rank
  DenseMatrix y;       // M x G
  DenseMatrix omega0;  // G x G row covariance
  std::vector<std::vector<std::size_t>> restrictions;  // size G

  std::size_t obs() const { return z0.rows(); }
  std::size_t params_per_eq() const { return z0.cols(); }
  std::size_t equations() const { return y.cols(); }
  std::size_t total_restrictions() const;
};

MvRglm make_mvrglm(DenseMatrix z0, DenseMatrix y, DenseMatrix omega0,
                   std::vector<std::vector<std::size_t>> restrictions);

// RGLM embedding of the multivariate model: Z = I_G (x) Z0 stacked over the
// per-equation selection rows, Sigma = diag(Omega0 (x) I_M, 0_k).
Glm embed_mvrglm(const MvRglm& mv);

// Seemingly unrelated regressions: X = (+) X_i, Sigma = Sigma0 (x) I_M.
struct SurModel {
  std::vector<DenseMatrix> blocks;  // X_i, each M x N_i
  DenseMatrix y;                    // M x G responses
  DenseMatrix sigma0;               // G x G

  std::size_t obs() const { return y.rows(); }
  std::size_t equations() const { return blocks.size(); }
  std::size_t total_params() const;
};

SurModel make_sur(std::vector<DenseMatrix> blocks, DenseMatrix y, DenseMatrix sigma0);

Glm embed_sur(const SurModel& sur);

struct ReductionRecord {
  std::size_t original_rows = 0;  // per equation
  std::size_t reduced_rows = 0;
  DenseMatrix transform;  // orthonormal columns; reduced data = transform' data
  std::size_t rank = 0;   // numerical rank q (SUR reduction)
};

// Premultiplication by Q0' from the thin QR Z0 = Q0 R0; shrinks each
// equation from M to N rows without moving the estimator.
std::pair<MvRglm, ReductionRecord> mv_reduce(const MvRglm& mv);

// Remark-1 reduction: rotate every equation onto an orthonormal basis of
// range([X_1 ... X_G]); q rows per equation afterwards.
std::pair<SurModel, ReductionRecord> sur_reduce(const SurModel& sur,
                                                double rank_tol = 1e-10);

// Eq. (26) operators for the stacked RGLM with block auxiliary
// D = diag(D_Z, D_C); both parts symmetric positive definite.
std::unique_ptr<IndefinitePreconditioner> rglm_preconditioner(const RestrictedGlm& rglm,
                                                              const DenseMatrix& d_z,
                                                              const DenseMatrix& d_c);
// D_Z = I_m, D_C = I_k.
std::unique_ptr<IndefinitePreconditioner> rglm_preconditioner(const RestrictedGlm& rglm);

// Per-equation operators built from G QRDs of the stacked [Z0; C_i]
// (scaled by the per-equation auxiliary variances): block i of X*'xi is
// R_i^-1 Q_i' xi_i and block i of Pi xi is xi_i - Q_i Q_i' xi_i in the
// scaled metric.  z_scale/c_scale hold the per-equation diagonal auxiliary
// variances for the observation and constraint rows.
std::unique_ptr<IndefinitePreconditioner> mvrglm_preconditioner(const MvRglm& mv,
                                                                const Vector& z_scale,
                                                                const Vector& c_scale);
// Identity auxiliary.
std::unique_ptr<IndefinitePreconditioner> mvrglm_preconditioner(const MvRglm& mv);

// Per-block QRDs X_i = Q_i R_i; block i of X*'xi is the OLS estimator of
// xi_i on X_i and block i of Pi xi the OLS residual (scaled by the
// per-block auxiliary variance).
std::unique_ptr<IndefinitePreconditioner> sur_preconditioner(const SurModel& sur,
                                                             const Vector& block_scale);
// D = I_{MG}.
std::unique_ptr<IndefinitePreconditioner> sur_preconditioner(const SurModel& sur);

}  // namespace gls

#endif  // GLS_STRUCTURED_HPP
