#ifndef GLS_PCG_HPP
#define GLS_PCG_HPP

#include <functional>
#include <optional>

#include "gls/glm.hpp"
#include "gls/preconditioner.hpp"

namespace gls {

struct PcgConfig {
  // Stop when c_{i+1} <= tol_rel^2 * c_1.
  double tol_rel = 1e-10;
  // 0 selects the finite-termination bound m - n + 1 (2n for the
  // normal-equations solver).
  std::size_t max_iter = 0;
  // Relative curvature threshold: |d_i| <= breakdown_tol * |u_i|^2 * |Sigma|.
  double breakdown_tol = 1e-14;
  // Consecutive steps with c unchanged to 1e-15 relative before declaring
  // stagnation.
  std::size_t stagnation_window = 5;
  // Seminorm growth beyond growth_tol * best over at least growth_window
  // steps is treated as a breakdown (the seminorm can no longer decrease).
  double growth_tol = 1e4;
  std::size_t growth_window = 10;
  // Stride at which the recovered estimator is passed to the observer and
  // the rmse column is filled.
  std::size_t record_z_every = 1;
};

struct PcgTraceRow {
  std::size_t iter = 0;  // 0 = initial iterate
  double c = 0.0;
  double aug_residual_norm = 0.0;
  double dual_feas_norm = 0.0;
  double rmse = 0.0;  // NaN when beta unknown or iteration not sampled
  long long elapsed_ns = 0;
};

struct PcgTrace {
  std::vector<PcgTraceRow> rows;  // rows.size() == iterations + 1
  Termination termination = Termination::MaxIter;
  std::optional<std::size_t> breakdown_iteration;
  bool w1_projected = false;
};

struct AugSolveResult {
  GlsSolution solution;
  PcgTrace trace;
};

// Per-iteration hook; `estimator` is the recovered z-hat (or the propagated
// z for the full variant, the CG iterate for the normal equations).
struct PcgObservation {
  std::size_t iter;
  const Vector& w;
  const Vector& estimator;
};
using PcgObserverFn = std::function<void(const PcgObservation&)>;

using LinearOp = std::function<Vector(const Vector&)>;

// Observer for the generic method: iterate, residual and direction vectors.
using GenericObserverFn =
    std::function<void(std::size_t iter, const Vector& x, const Vector& f, const Vector& p)>;

struct GenericPcgResult {
  Vector x;
  PcgTrace trace;
};

// Algorithm 1: PCG on G x = h with symmetric G and preconditioner K.
GenericPcgResult pcg_generic(const LinearOp& apply_g, const LinearOp& apply_k,
                             const Vector& h, const Vector& x1, const PcgConfig& config,
                             const GenericObserverFn& observer = nullptr);

// Algorithm 3 (PCG-Aug): w-recurrence only, estimator recovered as
// z-hat = X*'(y - Sigma w).
AugSolveResult pcg_aug(const Glm& glm, const IndefinitePreconditioner& precond,
                       const Vector& w1, const Vector& z1, const PcgConfig& config,
                       const Vector* true_beta = nullptr,
                       const PcgObserverFn& observer = nullptr);

// Algorithm 2: additionally propagates z_{i+1} = z_i - lambda_i v_i and
// reports that drifting iterate as the estimator.
AugSolveResult pcg_aug_full(const Glm& glm, const IndefinitePreconditioner& precond,
                            const Vector& w1, const Vector& z1, const PcgConfig& config,
                            const Vector* true_beta = nullptr,
                            const PcgObserverFn& observer = nullptr);

// Algorithm 4: single s-recurrence; algebraically equivalent to pcg_aug.
AugSolveResult pcg_aug_alt(const Glm& glm, const IndefinitePreconditioner& precond,
                           const Vector& w1, const Vector& z1, const PcgConfig& config,
                           const Vector* true_beta = nullptr,
                           const PcgObserverFn& observer = nullptr);

// Classical CG on the normal equations (X'Sigma^-1 X) b = X'Sigma^-1 y.
// precond_ne applies an n x n symmetric preconditioner; empty means identity.
AugSolveResult pcg_normal_equations(const Glm& glm, const LinearOp& precond_ne,
                                    const PcgConfig& config,
                                    const Vector* true_beta = nullptr,
                                    const PcgObserverFn& observer = nullptr);

// Spectrum of GK = (H  (Sigma-D)X*; 0  I_n): the 2n exact unit eigenvalues
// plus the m-n eigenvalues of (Q_N'Sigma Q_N)(Q_N'D Q_N)^-1 obtained through
// the symmetric similarity; GK itself is never formed.
struct GkSpectrum {
  std::vector<double> eigenvalues;  // ascending, size m + n
  std::size_t unit_count = 0;       // |lambda - 1| <= unit_tol
  double condition_number = 0.0;    // max|lambda| / min|lambda|
};

inline constexpr std::size_t kGkDimGuard = 2000;

GkSpectrum eigs_of_gk(const Glm& glm, const IndefinitePreconditioner& precond,
                      double unit_tol = 1e-8);

// Condition number kappa of B^-1/2 A B^-1/2 (A = Q_N'Sigma Q_N,
// B = Q_N'D Q_N) and the standard CG error bound built from it.
struct ReducedDiagnostics {
  double kappa = 0.0;
  std::vector<double> reduced_spectrum;  // ascending

  double bound(std::size_t i) const;  // 2 sqrt(k) ((sqrt(k)-1)/(sqrt(k)+1))^(i-1)
  std::vector<double> bound_curve(std::size_t iters) const;
};

ReducedDiagnostics reduced_diagnostics(const Glm& glm,
                                       const IndefinitePreconditioner& precond);

// Power-iteration estimate of the spectral norm of a symmetric operator.
double operator_norm_probe(const SymmetricOperator& sigma, std::size_t iters = 12);

}  // namespace gls

#endif  // GLS_PCG_HPP
