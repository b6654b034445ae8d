#ifndef GLS_EXPERIMENTS_HPP
#define GLS_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "gls/io.hpp"
#include "gls/pcg.hpp"
#include "gls/rng.hpp"
#include "gls/structured.hpp"

namespace gls {

// ---------------------------------------------------------------------------
// Generators

struct SpectrumSpec {
  Vector eigenvalues;
  std::vector<std::size_t> multiplicities;
};

struct SpectrumSigma {
  DenseMatrix sigma;
  DenseMatrix basis;         // random orthogonal eigenvectors
  Vector eigenvalues;        // expanded, one per dimension
};

// Symmetric matrix with the prescribed spectrum and seeded random
// eigenvectors.
SpectrumSigma gen_spectrum_sigma_detailed(std::size_t dim, const SpectrumSpec& spec,
                                          std::uint64_t seed);
DenseMatrix gen_spectrum_sigma(std::size_t dim, const Vector& eigenvalues,
                               const std::vector<std::size_t>& multiplicities,
                               std::uint64_t seed);

// Constant first column, remaining entries iid N(0, m); full rank enforced
// with bounded sub-seed retries.
DenseMatrix gen_regressor(std::size_t m, std::size_t n, std::uint64_t seed);

// SPD matrix with prescribed condition number (geometric spectrum in
// [1, cond]) and seeded random eigenvectors.
DenseMatrix gen_spd_with_cond(std::size_t dim, double cond, std::uint64_t seed);

// Sample eps ~ N(0, Sigma) from the spectral factor of a SpectrumSigma.
Vector sample_gaussian_with_cov(const SpectrumSigma& sigma, Rng& rng);

// ---------------------------------------------------------------------------
// Scaling study: spectrum of GK and convergence under alpha-rescaling.

struct ScalingConfig {
  std::size_t m = 300;
  std::size_t n = 50;
  Vector base_eigenvalues{0.5, 1.0, 1.5, 2.0};  // multiplicities balanced
  std::vector<double> alphas{1.0, 0.25, 4.0};
  std::uint64_t seed = 20217;
  double tol_rel = 1e-10;
};

struct ScalingAlphaResult {
  double alpha = 1.0;
  GkSpectrum spectrum;
  AugSolveResult run;
  double recovered_residual_rel = 0.0;  // |y - Sigma w - X b| / |y|
  double dual_residual_rel = 0.0;       // |X'w| / |y|
  Vector sigma_error_curve;             // (w_i - w)' Sigma (w_i - w)
  std::string error_note;               // solver error, if any
};

struct ScalingResult {
  ScalingConfig config;
  Vector beta;
  std::vector<ScalingAlphaResult> per_alpha;
};

ScalingResult run_scaling(const ScalingConfig& config);

// ---------------------------------------------------------------------------
// Monte Carlo unbiasedness study.

struct MonteCarloConfig {
  std::size_t m = 80;
  std::size_t n = 20;
  Vector eigenvalues{0.01, 0.1, 10.0, 50.0};  // equal multiplicities
  std::size_t replications = 1000;
  std::uint64_t seed = 46234;
  double tol_rel = 1e-10;
  std::size_t horizon = 0;       // recorded iterations; 0 -> m - n + 1
  std::size_t ne_max_iter = 0;   // 0 -> horizon
  std::size_t lemma2_sample = 50;  // replications checked against the Lemma-2 bound
};

struct McSolverSummary {
  std::string solver;
  // indexed [iteration][element]; iteration 0 is the initial iterate
  std::vector<Vector> mean_error;
  std::vector<Vector> se_error;
  std::vector<Vector> band95_lo, band95_hi;
  std::vector<Vector> band99_lo, band99_hi;
  std::vector<double> rmse_mean, rmse_se;
  std::vector<double> rmse_b95_lo, rmse_b95_hi, rmse_b99_lo, rmse_b99_hi;
  // MC estimate of tr(Sigma Omega_i) = E[(w_i - w)' Sigma (w_i - w)]
  std::vector<double> sigma_omega_trace, sigma_omega_se;
};

struct McSummary {
  MonteCarloConfig config;
  Vector beta;
  std::size_t horizon = 0;
  McSolverSummary aug;
  McSolverSummary ne;
  Vector gls_mean_error, gls_se_error;
  double gls_rmse_mean = 0.0;
  // Lemma-2 bound bookkeeping over the sampled replications
  std::size_t lemma2_checked = 0;
  std::size_t lemma2_violations = 0;       // q > 2 (t1 + t2)
  std::size_t zeta_monotone_violations = 0;
};

McSummary run_monte_carlo(const MonteCarloConfig& config);

// ---------------------------------------------------------------------------
// Synthetic SUR benchmark (Fair-shaped, data replaced by seeded draws).

struct SurBenchConfig {
  std::size_t obs = 40;          // M
  std::size_t equations = 4;     // G
  std::size_t base_params = 6;   // N of the common regressor
  double sparsity = 0.4;         // zero fraction of B
  double sigma0_cond = 10.0;
  std::uint64_t seed = 7311;
  double tol_rel = 1e-10;
  bool reduce = false;  // apply the Remark-1 pre-pass to the SUR path
};

struct SurBenchMethod {
  std::string name;
  Vector b_sur;  // estimator in the SUR parameter space
  std::size_t iterations = 0;
  Termination termination = Termination::Direct;
  double rel_diff_vs_direct = 0.0;
  CostReport cost{};
  PcgTrace trace;
};

struct SurBenchResult {
  SurBenchConfig config;
  std::vector<SurBenchMethod> methods;  // direct first
  double max_rel_diff = 0.0;
  // iterate agreement between the structured and dense-operator runs
  double structured_vs_dense_sup = 0.0;
};

SurBenchResult run_sur_bench(const SurBenchConfig& config);

// ---------------------------------------------------------------------------
// Restricted-VAR suite.

struct VarSpec {
  std::size_t lag_order = 4;
  std::size_t dim_g = 6;       // G
  std::size_t sample_len = 100;  // M
  double lambda_max = 0.9;
  double sparsity = 0.26;      // zero fraction of B
  double omega_cond = 4.48;    // condition number of Omega0
};

struct VarModel {
  MvRglm model;
  DenseMatrix b_true;  // N x G
  double realized_root = 0.0;
};

VarModel gen_var_model(const VarSpec& spec, std::uint64_t seed);

struct VarSuiteConfig {
  std::size_t dim_g = 6;
  std::size_t sample_len = 100;
  std::size_t lag_order = 4;
  bool paper_scale = false;  // M=300, G=12, N=60 and dense diagnostics skipped
  std::uint64_t seed = 8106;
  double tol_rel = 1e-8;
  std::size_t diag_dim_guard = 1200;  // skip sym_eig diagnostics beyond this
};

struct VarMethodRun {
  std::string name;
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIter;
  bool converged = false;
  double final_ne_residual_rel = 0.0;
  std::vector<double> ne_residual_curve;  // per recorded iteration
  PcgTrace trace;
};

struct VarModelResult {
  VarSpec spec;
  double realized_root = 0.0;
  std::size_t restriction_count = 0;
  double cond_x0 = 0.0, cond_omega0 = 0.0, cond_x = 0.0;
  double cond_g = 0.0, cond_k1g = 0.0, cond_k2g = 0.0;  // NaN when skipped
  std::vector<VarMethodRun> methods;
};

struct VarSuiteResult {
  VarSuiteConfig config;
  std::vector<VarModelResult> models;
};

VarSuiteResult run_var_suite(const VarSuiteConfig& config);

// ---------------------------------------------------------------------------
// Report emission

void emit_scaling_report(const std::filesystem::path& out_dir, const ScalingResult& result);
void emit_mc_report(const std::filesystem::path& out_dir, const McSummary& summary);
void emit_sur_bench_report(const std::filesystem::path& out_dir,
                           const SurBenchResult& result);
void emit_var_suite_report(const std::filesystem::path& out_dir,
                           const VarSuiteResult& result);

}  // namespace gls

#endif  // GLS_EXPERIMENTS_HPP
