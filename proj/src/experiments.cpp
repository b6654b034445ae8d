#include "gls/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gls/errors.hpp"

namespace gls {

namespace fs = std::filesystem;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Vector expand_spectrum(std::size_t dim, const SpectrumSpec& spec) {
  if (spec.eigenvalues.size() != spec.multiplicities.size())
    throw BadMultiplicities("spectrum: eigenvalues/multiplicities length mismatch");
  std::size_t total = 0;
  for (std::size_t m : spec.multiplicities) total += m;
  if (total != dim) throw BadMultiplicities("spectrum: multiplicities must sum to dim");
  for (double v : spec.eigenvalues)
    if (v < 0.0) throw BadMultiplicities("spectrum: eigenvalues must be nonnegative");
  Vector out;
  out.reserve(dim);
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
    out.insert(out.end(), spec.multiplicities[i], spec.eigenvalues[i]);
  return out;
}

// Even split of dim over the given eigenvalues, remainder to the front.
SpectrumSpec balanced_spec(std::size_t dim, const Vector& eigenvalues) {
  SpectrumSpec spec;
  spec.eigenvalues = eigenvalues;
  const std::size_t k = eigenvalues.size();
  spec.multiplicities.assign(k, dim / k);
  for (std::size_t i = 0; i < dim % k; ++i) ++spec.multiplicities[i];
  return spec;
}

double percentile(Vector sorted, double p) {
  if (sorted.empty()) return kNan;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const Vector& xs) {
  const double r = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= r;
  double var = 0.0;
  for (double v : xs) var += (v - mean) * (v - mean);
  var /= std::max(r - 1.0, 1.0);
  return {mean, std::sqrt(var / r)};
}

double cond_from_gram(const DenseMatrix& a) {
  DenseMatrix g = a.transpose() * a;
  for (std::size_t j = 0; j < g.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (g(i, j) + g(j, i));
      g(i, j) = g(j, i) = v;
    }
  SymEig eig = sym_eig(g);
  const double lo = eig.eigenvalues.front(), hi = eig.eigenvalues.back();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(hi / lo);
}

double cond_symmetric_abs(const DenseMatrix& s) {
  SymEig eig = sym_eig(s);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : eig.eigenvalues) {
    lo = std::min(lo, std::fabs(v));
    hi = std::max(hi, std::fabs(v));
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

SpectrumSigma gen_spectrum_sigma_detailed(std::size_t dim, const SpectrumSpec& spec,
                                          std::uint64_t seed) {
  SpectrumSigma out;
  out.eigenvalues = expand_spectrum(dim, spec);
  out.basis = qr_full(seeded_gaussian(dim, dim, 0.0, 1.0, seed)).q_range;
  DenseMatrix scaled = out.basis;
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < dim; ++i) scaled(i, j) *= out.eigenvalues[j];
  out.sigma = scaled * out.basis.transpose();
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (out.sigma(i, j) + out.sigma(j, i));
      out.sigma(i, j) = out.sigma(j, i) = v;
    }
  return out;
}

DenseMatrix gen_spectrum_sigma(std::size_t dim, const Vector& eigenvalues,
                               const std::vector<std::size_t>& multiplicities,
                               std::uint64_t seed) {
  return gen_spectrum_sigma_detailed(dim, SpectrumSpec{eigenvalues, multiplicities}, seed)
      .sigma;
}

DenseMatrix gen_regressor(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m <= n && n != 1) throw DimensionMismatch("gen_regressor: need m > n");
  const double stddev = std::sqrt(static_cast<double>(m));
  for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
    Rng rng = Rng(seed).split(attempt);
    DenseMatrix x(m, n);
    for (std::size_t i = 0; i < m; ++i) x(i, 0) = 1.0;
    for (std::size_t j = 1; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) x(i, j) = rng.gaussian(0.0, stddev);
    try {
      qr_thin(x);
      return x;
    } catch (const RankDeficient&) {
      continue;
    }
  }
  throw RankDeficient("gen_regressor: could not draw a full-rank matrix");
}

DenseMatrix gen_spd_with_cond(std::size_t dim, double cond, std::uint64_t seed) {
  if (cond < 1.0) throw DimensionMismatch("gen_spd_with_cond: cond must be >= 1");
  Vector eigs(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double t = dim == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
    eigs[i] = std::pow(cond, t);
  }
  SpectrumSpec spec;
  spec.eigenvalues = eigs;
  spec.multiplicities.assign(dim, 1);
  return gen_spectrum_sigma_detailed(dim, spec, seed).sigma;
}

Vector sample_gaussian_with_cov(const SpectrumSigma& sigma, Rng& rng) {
  const std::size_t dim = sigma.eigenvalues.size();
  Vector g(dim);
  for (std::size_t i = 0; i < dim; ++i)
    g[i] = rng.gaussian() * std::sqrt(sigma.eigenvalues[i]);
  return sigma.basis.apply(g);
}

// ---------------------------------------------------------------------------
// Scaling study

ScalingResult run_scaling(const ScalingConfig& config) {
  const std::size_t m = config.m, n = config.n;
  Rng master(config.seed);

  ScalingResult result;
  result.config = config;

  DenseMatrix x = gen_regressor(m, n, master.split(0).seed());
  SpectrumSigma base =
      gen_spectrum_sigma_detailed(m, balanced_spec(m, config.base_eigenvalues),
                                  master.split(1).seed());
  Rng beta_rng = master.split(2);
  result.beta = beta_rng.gaussian_vector(n);
  Rng noise_rng = master.split(3);
  Vector noise = sample_gaussian_with_cov(base, noise_rng);  // eps at alpha = 1
  const Vector xb = x.apply(result.beta);

  auto precond = dense_preconditioner(x, DenseMatrix::identity(m));

  for (double alpha : config.alphas) {
    ScalingAlphaResult ar;
    ar.alpha = alpha;
    DenseMatrix sigma_alpha = base.sigma;
    sigma_alpha *= alpha;
    Vector y = xb;
    axpy(std::sqrt(alpha), noise, y);
    Glm glm = make_glm(y, x, SymmetricOperator::dense(sigma_alpha));

    try {
      ar.spectrum = eigs_of_gk(glm, *precond);

      PcgConfig pcg;
      pcg.tol_rel = config.tol_rel;
      std::vector<Vector> w_history;
      auto observer = [&](const PcgObservation& obs) { w_history.push_back(obs.w); };
      ar.run = pcg_aug(glm, *precond, Vector(m, 0.0), Vector(n, 0.0), pcg, &result.beta,
                       observer);

      const GlsSolution& sol = ar.run.solution;
      Vector resid = sub(glm.y, glm.sigma.apply(sol.w));
      resid = sub(resid, x.apply(sol.b));
      const double ynorm = norm2(glm.y);
      ar.recovered_residual_rel = norm2(resid) / ynorm;
      ar.dual_residual_rel = norm2(x.apply_transpose(sol.w)) / ynorm;

      const Vector w_direct = blue_augmented_direct(glm).w;
      ar.sigma_error_curve.reserve(w_history.size());
      for (const Vector& wi : w_history) {
        const Vector diff = sub(wi, w_direct);
        ar.sigma_error_curve.push_back(dot(diff, glm.sigma.apply(diff)));
      }
    } catch (const Error& e) {
      ar.error_note = e.what();
    }
    result.per_alpha.push_back(std::move(ar));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo study

namespace {

// Snapshot store with carry-forward padding to the horizon.
struct IterateStore {
  std::vector<Vector> estimators;  // [iter]
  std::vector<Vector> duals;       // [iter]

  void reset(std::size_t horizon, std::size_t n, std::size_t m) {
    estimators.assign(horizon + 1, Vector(n, 0.0));
    duals.assign(horizon + 1, Vector(m, 0.0));
    last = 0;
  }
  void record(std::size_t iter, const Vector& est, const Vector& w) {
    if (iter < estimators.size()) {
      estimators[iter] = est;
      duals[iter] = w;
      last = std::max(last, iter);
    }
  }
  void pad() {
    for (std::size_t t = last + 1; t < estimators.size(); ++t) {
      estimators[t] = estimators[last];
      duals[t] = duals[last];
    }
  }
  std::size_t last = 0;
};

McSolverSummary summarize_solver(const std::string& name,
                                 const std::vector<std::vector<Vector>>& errors,
                                 const std::vector<Vector>& rmse,
                                 const std::vector<Vector>& sigma_omega) {
  McSolverSummary s;
  s.solver = name;
  const std::size_t horizon1 = errors.size();
  const std::size_t reps = errors.empty() ? 0 : errors[0].size();
  const std::size_t n = reps ? errors[0][0].size() : 0;

  for (std::size_t t = 0; t < horizon1; ++t) {
    Vector mean(n), se(n), b95l(n), b95h(n), b99l(n), b99h(n);
    Vector column(reps);
    for (std::size_t e = 0; e < n; ++e) {
      for (std::size_t r = 0; r < reps; ++r) column[r] = errors[t][r][e];
      const MeanSe ms = mean_se(column);
      mean[e] = ms.mean;
      se[e] = ms.se;
      std::sort(column.begin(), column.end());
      b95l[e] = percentile(column, 0.025);
      b95h[e] = percentile(column, 0.975);
      b99l[e] = percentile(column, 0.005);
      b99h[e] = percentile(column, 0.995);
    }
    s.mean_error.push_back(std::move(mean));
    s.se_error.push_back(std::move(se));
    s.band95_lo.push_back(std::move(b95l));
    s.band95_hi.push_back(std::move(b95h));
    s.band99_lo.push_back(std::move(b99l));
    s.band99_hi.push_back(std::move(b99h));

    Vector rm = rmse[t];
    const MeanSe ms = mean_se(rm);
    s.rmse_mean.push_back(ms.mean);
    s.rmse_se.push_back(ms.se);
    std::sort(rm.begin(), rm.end());
    s.rmse_b95_lo.push_back(percentile(rm, 0.025));
    s.rmse_b95_hi.push_back(percentile(rm, 0.975));
    s.rmse_b99_lo.push_back(percentile(rm, 0.005));
    s.rmse_b99_hi.push_back(percentile(rm, 0.995));

    if (!sigma_omega.empty()) {
      const MeanSe q = mean_se(sigma_omega[t]);
      s.sigma_omega_trace.push_back(q.mean);
      s.sigma_omega_se.push_back(q.se);
    }
  }
  return s;
}

}  // namespace

McSummary run_monte_carlo(const MonteCarloConfig& config) {
  const std::size_t m = config.m, n = config.n, reps = config.replications;
  const std::size_t horizon = config.horizon ? config.horizon : (m - n + 1);
  Rng master(config.seed);

  McSummary out;
  out.config = config;
  out.horizon = horizon;

  DenseMatrix x = gen_regressor(m, n, master.split(0).seed());
  SpectrumSigma sig = gen_spectrum_sigma_detailed(m, balanced_spec(m, config.eigenvalues),
                                                  master.split(1).seed());
  Rng beta_rng = master.split(2);
  out.beta = beta_rng.gaussian_vector(n);
  const Vector xb = x.apply(out.beta);

  Glm glm = make_glm(Vector(m, 0.0), x, SymmetricOperator::dense(sig.sigma));
  BlueSolver blue(glm);
  auto precond = dense_preconditioner(x, DenseMatrix::identity(m));
  const DenseMatrix sigma_chol = cholesky(sig.sigma);

  // (X'Sigma^-1 X)-weighted rmse metric
  const DenseMatrix sinv_x = chol_solve(sigma_chol, x);
  DenseMatrix wn = x.transpose() * sinv_x;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (wn(i, j) + wn(j, i));
      wn(i, j) = wn(j, i) = v;
    }
  auto weighted_rmse = [&](const Vector& err) {
    return std::sqrt(dot(err, wn.apply(err)) / static_cast<double>(n));
  };

  // Lemma-2 machinery (D = I): q = e' (X*'Sigma X*)^-1 e = (Ge)' C^-1 (Ge)
  // with G = X'X and C = X'Sigma X; t1 = (X'P_N eps)' C^-1 (X'P_N eps).
  DenseMatrix gram = x.transpose() * x;
  DenseMatrix sigma_x(m, n);
  for (std::size_t j = 0; j < n; ++j) sigma_x.set_col(j, glm.sigma.apply(x.col(j)));
  DenseMatrix c_mat = x.transpose() * sigma_x;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      double v = 0.5 * (gram(i, j) + gram(j, i));
      gram(i, j) = gram(j, i) = v;
      v = 0.5 * (c_mat(i, j) + c_mat(j, i));
      c_mat(i, j) = c_mat(j, i) = v;
    }
  const DenseMatrix c_chol = cholesky(c_mat);
  auto c_inv_quad = [&](const Vector& v) { return dot(v, chol_solve(c_chol, v)); };
  ProjectorPn pn(glm);

  // storage: [iter][rep]
  std::vector<std::vector<Vector>> aug_err(horizon + 1, std::vector<Vector>(reps)),
      ne_err(horizon + 1, std::vector<Vector>(reps));
  std::vector<Vector> aug_rmse(horizon + 1, Vector(reps)),
      ne_rmse(horizon + 1, Vector(reps)),
      aug_sigma_omega(horizon + 1, Vector(reps));
  Vector gls_rmse(reps);
  std::vector<Vector> gls_err(reps);

  PcgConfig aug_cfg;
  aug_cfg.tol_rel = config.tol_rel;
  aug_cfg.max_iter = horizon;
  PcgConfig ne_cfg;
  ne_cfg.tol_rel = config.tol_rel;
  ne_cfg.max_iter = config.ne_max_iter ? config.ne_max_iter : horizon;

  IterateStore aug_store, ne_store;
  const Vector w0(m, 0.0), z0(n, 0.0);

  for (std::size_t rep = 0; rep < reps; ++rep) {
    Rng rng = master.split(1000 + rep);
    const Vector eps = sample_gaussian_with_cov(sig, rng);
    Vector y = xb;
    for (std::size_t i = 0; i < m; ++i) y[i] += eps[i];
    glm.y = y;

    const GlsSolution direct = blue.solve(y);
    gls_err[rep] = sub(direct.b, out.beta);
    gls_rmse[rep] = weighted_rmse(gls_err[rep]);

    aug_store.reset(horizon, n, m);
    pcg_aug(glm, *precond, w0, z0, aug_cfg, nullptr,
            [&](const PcgObservation& obs) { aug_store.record(obs.iter, obs.estimator, obs.w); });
    aug_store.pad();

    ne_store.reset(horizon, n, m);
    pcg_normal_equations(glm, nullptr, ne_cfg, nullptr,
                         [&](const PcgObservation& obs) {
                           ne_store.record(obs.iter, obs.estimator, obs.w);
                         });
    ne_store.pad();

    for (std::size_t t = 0; t <= horizon; ++t) {
      Vector ea = sub(aug_store.estimators[t], out.beta);
      Vector en = sub(ne_store.estimators[t], out.beta);
      aug_rmse[t][rep] = weighted_rmse(ea);
      ne_rmse[t][rep] = weighted_rmse(en);
      const Vector dw = sub(aug_store.duals[t], direct.w);
      aug_sigma_omega[t][rep] = dot(dw, glm.sigma.apply(dw));
      aug_err[t][rep] = std::move(ea);
      ne_err[t][rep] = std::move(en);
    }

    if (rep < config.lemma2_sample) {
      ++out.lemma2_checked;
      const Vector pn_eps = pn.apply(eps);
      const double t1 = c_inv_quad(x.apply_transpose(pn_eps));
      bool violated = false, zeta_violated = false;
      double prev_zeta = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t <= horizon; ++t) {
        const Vector e = sub(aug_store.estimators[t], out.beta);
        const double q = c_inv_quad(gram.apply(e));
        const double t2 = aug_sigma_omega[t][rep];
        const double zeta = t1 + t2;
        if (q > 2.0 * zeta * (1.0 + 1e-10) + 1e-300) violated = true;
        if (t > 0 && zeta > prev_zeta * (1.0 + 1e-10) &&
            t <= aug_store.last)  // past convergence zeta flattens
          zeta_violated = true;
        prev_zeta = zeta;
      }
      if (violated) ++out.lemma2_violations;
      if (zeta_violated) ++out.zeta_monotone_violations;
    }
  }

  out.aug = summarize_solver("pcg-aug", aug_err, aug_rmse, aug_sigma_omega);
  out.ne = summarize_solver("pcg-ne", ne_err, ne_rmse, {});

  out.gls_mean_error.assign(n, 0.0);
  out.gls_se_error.assign(n, 0.0);
  {
    Vector column(reps);
    for (std::size_t e = 0; e < n; ++e) {
      for (std::size_t r = 0; r < reps; ++r) column[r] = gls_err[r][e];
      const MeanSe ms = mean_se(column);
      out.gls_mean_error[e] = ms.mean;
      out.gls_se_error[e] = ms.se;
    }
    out.gls_rmse_mean = mean_se(gls_rmse).mean;
  }
  return out;
}

// ---------------------------------------------------------------------------
// SUR benchmark

namespace {

// Column-keep lists per equation from the restriction pattern.
std::vector<std::vector<std::size_t>> kept_columns(
    const std::vector<std::vector<std::size_t>>& restrictions, std::size_t n) {
  std::vector<std::vector<std::size_t>> kept(restrictions.size());
  for (std::size_t i = 0; i < restrictions.size(); ++i) {
    std::size_t r = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (r < restrictions[i].size() && restrictions[i][r] == j) {
        ++r;
        continue;
      }
      kept[i].push_back(j);
    }
  }
  return kept;
}

// Scatter the full GN-vector estimator into the SUR parameter space.
Vector gather_sur_params(const Vector& full, const std::vector<std::vector<std::size_t>>& kept,
                         std::size_t n) {
  Vector out;
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j : kept[i]) out.push_back(full[i * n + j]);
  return out;
}

SurModel sur_from_exclusions(const MvRglm& mv) {
  const auto kept = kept_columns(mv.restrictions, mv.params_per_eq());
  SurModel sur;
  sur.y = mv.y;
  sur.sigma0 = mv.omega0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    DenseMatrix b(mv.obs(), kept[i].size());
    for (std::size_t j = 0; j < kept[i].size(); ++j) b.set_col(j, mv.z0.col(kept[i][j]));
    sur.blocks.push_back(std::move(b));
  }
  return sur;
}

double rel_diff(const Vector& a, const Vector& b) {
  double ref = std::max(norm2(a), norm2(b));
  if (ref == 0.0) return 0.0;
  return norm2(sub(a, b)) / ref;
}

}  // namespace

SurBenchResult run_sur_bench(const SurBenchConfig& config) {
  const std::size_t m0 = config.obs, g = config.equations, n0 = config.base_params;
  Rng master(config.seed);

  // Multivariate model with exclusion restrictions; heterogeneous widths.
  DenseMatrix x0 = gen_regressor(m0, n0, master.split(0).seed());
  Rng brng = master.split(1);
  DenseMatrix b_true = brng.gaussian_matrix(n0, g);
  Rng krng = master.split(2);
  std::vector<std::vector<std::size_t>> restrictions(g);
  for (std::size_t i = 0; i < g; ++i) {
    std::size_t ki = static_cast<std::size_t>(
        std::llround(config.sparsity * static_cast<double>(n0)));
    if (i % 2 == 1 && ki + 1 < n0) ++ki;  // vary block widths
    ki = std::min(ki, n0 - 1);
    auto perm = krng.permutation(n0);
    std::vector<std::size_t> zeros(perm.begin(), perm.begin() + ki);
    std::sort(zeros.begin(), zeros.end());
    for (std::size_t j : zeros) b_true(j, i) = 0.0;
    restrictions[i] = std::move(zeros);
  }

  DenseMatrix sigma0 = gen_spd_with_cond(g, config.sigma0_cond, master.split(3).seed());
  const DenseMatrix l0 = cholesky(sigma0);
  Rng erng = master.split(4);
  DenseMatrix noise = erng.gaussian_matrix(m0, g);
  DenseMatrix y = x0 * b_true + noise * l0.transpose();

  MvRglm mv = make_mvrglm(x0, y, sigma0, restrictions);
  const auto kept = kept_columns(restrictions, n0);

  SurBenchResult result;
  result.config = config;

  PcgConfig pcg;
  pcg.tol_rel = config.tol_rel;

  // direct oracle on the reduced embedding
  auto [mv_red, mv_rec] = mv_reduce(mv);
  const Glm glm_mv = embed_mvrglm(mv_red);
  {
    SurBenchMethod direct;
    direct.name = "direct";
    direct.b_sur = gather_sur_params(blue_augmented_direct(glm_mv).b, kept, n0);
    result.methods.push_back(std::move(direct));
  }
  const Vector& b_ref = result.methods[0].b_sur;

  {
    SurBenchMethod mvm;
    mvm.name = "mvrglm";
    auto op = mvrglm_preconditioner(mv_red);
    // finite precision needs headroom beyond the k+1 termination bound
    PcgConfig mv_cfg = pcg;
    mv_cfg.max_iter = 3 * (mv.total_restrictions() + 1) + 10;
    auto run = pcg_aug(glm_mv, *op, Vector(glm_mv.x.rows(), 0.0),
                       Vector(glm_mv.x.cols(), 0.0), mv_cfg);
    mvm.b_sur = gather_sur_params(run.solution.b, kept, n0);
    mvm.iterations = run.solution.iterations;
    mvm.termination = run.solution.termination;
    mvm.cost = cost_counters(*op);
    mvm.trace = std::move(run.trace);
    mvm.rel_diff_vs_direct = rel_diff(mvm.b_sur, b_ref);
    result.methods.push_back(std::move(mvm));
  }

  SurModel sur = sur_from_exclusions(mv);
  ReductionRecord sur_rec;
  if (config.reduce) {
    auto reduced = sur_reduce(sur);
    sur = std::move(reduced.first);
    sur_rec = std::move(reduced.second);
  }
  const Glm glm_sur = embed_sur(sur);
  std::vector<Vector> structured_iterates, dense_iterates;
  {
    SurBenchMethod s;
    s.name = "pcg-aug-sur";
    auto op = sur_preconditioner(sur);
    auto run = pcg_aug(glm_sur, *op, Vector(glm_sur.x.rows(), 0.0),
                       Vector(glm_sur.x.cols(), 0.0), pcg, nullptr,
                       [&](const PcgObservation& obs) { structured_iterates.push_back(obs.w); });
    s.b_sur = run.solution.b;
    s.iterations = run.solution.iterations;
    s.termination = run.solution.termination;
    s.cost = cost_counters(*op);
    s.trace = std::move(run.trace);
    s.rel_diff_vs_direct = rel_diff(s.b_sur, b_ref);
    result.methods.push_back(std::move(s));
  }
  {
    SurBenchMethod s;
    s.name = "pcg-aug-dense";
    auto op = dense_preconditioner(glm_sur.x, DenseMatrix::identity(glm_sur.x.rows()));
    auto run = pcg_aug(glm_sur, *op, Vector(glm_sur.x.rows(), 0.0),
                       Vector(glm_sur.x.cols(), 0.0), pcg, nullptr,
                       [&](const PcgObservation& obs) { dense_iterates.push_back(obs.w); });
    s.b_sur = run.solution.b;
    s.iterations = run.solution.iterations;
    s.termination = run.solution.termination;
    s.cost = cost_counters(*op);
    s.trace = std::move(run.trace);
    s.rel_diff_vs_direct = rel_diff(s.b_sur, b_ref);
    result.methods.push_back(std::move(s));
  }
  {
    SurBenchMethod s;
    s.name = "pcg-ne";
    auto run = pcg_normal_equations(glm_sur, nullptr, pcg);
    s.b_sur = run.solution.b;
    s.iterations = run.solution.iterations;
    s.termination = run.solution.termination;
    s.trace = std::move(run.trace);
    s.rel_diff_vs_direct = rel_diff(s.b_sur, b_ref);
    result.methods.push_back(std::move(s));
  }

  for (const auto& mrun : result.methods)
    result.max_rel_diff = std::max(result.max_rel_diff, mrun.rel_diff_vs_direct);

  const std::size_t common = std::min(structured_iterates.size(), dense_iterates.size());
  for (std::size_t i = 0; i < common; ++i) {
    const double scale = std::max({norm2(structured_iterates[i]),
                                   norm2(dense_iterates[i]), 1e-30});
    result.structured_vs_dense_sup =
        std::max(result.structured_vs_dense_sup,
                 norm2(sub(structured_iterates[i], dense_iterates[i])) / scale);
  }
  return result;
}

// ---------------------------------------------------------------------------
// VAR generator and suite

VarModel gen_var_model(const VarSpec& spec, std::uint64_t seed) {
  const std::size_t g = spec.dim_g, p = spec.lag_order, n = g * p, m0 = spec.sample_len;
  const std::size_t burn = 200;
  Rng master(seed);

  DenseMatrix omega0 = gen_spd_with_cond(g, spec.omega_cond, master.split(0).seed());
  const DenseMatrix l0 = cholesky(omega0);

  for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
    Rng arng = master.split(10 + attempt);
    DenseMatrix b = arng.gaussian_matrix(n, g, 0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    // exclusion pattern: exactly round(sparsity * N * G) zeros
    Rng zrng = master.split(100 + attempt);
    const std::size_t zeros =
        static_cast<std::size_t>(std::llround(spec.sparsity * static_cast<double>(n * g)));
    auto perm = zrng.permutation(n * g);
    for (std::size_t idx = 0; idx < zeros; ++idx) {
      const std::size_t pos = perm[idx];
      b(pos % n, pos / n) = 0.0;
    }

    // companion matrix: x_t = sum_j A_j x_{t-j}, A_j(i,c) = B((j-1)G + c, i)
    DenseMatrix comp(n, n);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t c = 0; c < g; ++c) comp(i, j * g + c) = b(j * g + c, i);
    for (std::size_t i = g; i < n; ++i) comp(i, i - g) = 1.0;
    const double rho0 = spectral_radius(comp);
    if (rho0 < 1e-10) continue;

    // scaling lag block j by s^j moves every root by the factor s
    const double s = spec.lambda_max / rho0;
    for (std::size_t j = 0; j < p; ++j) {
      const double f = std::pow(s, static_cast<double>(j + 1));
      for (std::size_t c = 0; c < g; ++c)
        for (std::size_t i = 0; i < g; ++i) b(j * g + c, i) *= f;
    }

    // simulate the series with zero initial history
    Rng srng = master.split(200 + attempt);
    const std::size_t total = burn + m0;
    DenseMatrix series(total + p, g);  // rows 0..p-1 are the zero history
    bool overflow = false;
    for (std::size_t t = p; t < total + p && !overflow; ++t) {
      Vector eta(g);
      for (std::size_t i = 0; i < g; ++i) eta[i] = srng.gaussian();
      // x_t = B' z_t + L0 eta
      for (std::size_t i = 0; i < g; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < p; ++j)
          for (std::size_t c = 0; c < g; ++c)
            acc += series(t - 1 - j, c) * b(j * g + c, i);
        for (std::size_t c = 0; c <= i; ++c) acc += l0(i, c) * eta[c];
        if (!std::isfinite(acc) || std::fabs(acc) > 1e120) {
          overflow = true;
          break;
        }
        series(t, i) = acc;
      }
    }
    if (overflow)
      throw UnstableSimulation("gen_var_model: series overflow at lambda_max = " +
                               std::to_string(spec.lambda_max));

    DenseMatrix z0(m0, n), y(m0, g);
    for (std::size_t r = 0; r < m0; ++r) {
      const std::size_t t = burn + p + r;
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t c = 0; c < g; ++c) z0(r, j * g + c) = series(t - 1 - j, c);
      for (std::size_t c = 0; c < g; ++c) y(r, c) = series(t, c);
    }

    std::vector<std::vector<std::size_t>> restrictions(g);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (b(j, i) == 0.0) restrictions[i].push_back(j);

    try {
      qr_thin(z0);
    } catch (const RankDeficient&) {
      continue;
    }

    VarModel out;
    out.model = make_mvrglm(std::move(z0), std::move(y), omega0, std::move(restrictions));
    out.b_true = std::move(b);
    // realized largest root after scaling
    DenseMatrix comp2(n, n);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t c = 0; c < g; ++c) comp2(i, j * g + c) = out.b_true(j * g + c, i);
    for (std::size_t i = g; i < n; ++i) comp2(i, i - g) = 1.0;
    out.realized_root = spectral_radius(comp2);
    return out;
  }
  throw RankDeficient("gen_var_model: could not generate a full-rank regressor");
}

namespace {

// |X' Sigma^-1 (X b - y)| in the SUR form, Sigma = Sigma0 (x) I.
struct SurNeResidual {
  const SurModel& sur;
  DenseMatrix sigma0_chol;
  double ref_norm = 1.0;

  explicit SurNeResidual(const SurModel& s) : sur(s), sigma0_chol(cholesky(s.sigma0)) {
    ref_norm = norm2(eval_vec(Vector(total_params(), 0.0)));
    if (ref_norm == 0.0) ref_norm = 1.0;
  }

  std::size_t total_params() const {
    std::size_t n = 0;
    for (const auto& bl : sur.blocks) n += bl.cols();
    return n;
  }

  // residual matrix E = Y - [X_i b_i], then vec(X' vec(E Sigma0^-1))
  Vector eval_vec(const Vector& b_sur) const {
    const std::size_t m0 = sur.obs(), g = sur.equations();
    DenseMatrix e = sur.y;
    std::size_t off = 0;
    for (std::size_t i = 0; i < g; ++i) {
      const auto& bl = sur.blocks[i];
      const Vector bi(b_sur.begin() + off, b_sur.begin() + off + bl.cols());
      const Vector fit = bl.apply(bi);
      for (std::size_t r = 0; r < m0; ++r) e(r, i) -= fit[r];
      off += bl.cols();
    }
    // rows of E Sigma0^-1: solve Sigma0 t = row'
    DenseMatrix es = e;
    for (std::size_t r = 0; r < m0; ++r) {
      Vector row(g);
      for (std::size_t i = 0; i < g; ++i) row[i] = e(r, i);
      row = chol_solve(sigma0_chol, row);
      for (std::size_t i = 0; i < g; ++i) es(r, i) = row[i];
    }
    Vector out;
    for (std::size_t i = 0; i < g; ++i) {
      const Vector t = sur.blocks[i].apply_transpose(es.col(i));
      out.insert(out.end(), t.begin(), t.end());
    }
    return out;
  }

  double rel(const Vector& b_sur) const { return norm2(eval_vec(b_sur)) / ref_norm; }
};

}  // namespace

VarSuiteResult run_var_suite(const VarSuiteConfig& config) {
  VarSuiteResult result;
  result.config = config;

  const std::size_t g = config.paper_scale ? 12 : config.dim_g;
  const std::size_t m0 = config.paper_scale ? 300 : config.sample_len;
  // Table dimensions need N = 60 at paper scale, which forces five lag
  // blocks with G = 12.
  const std::size_t lag = config.paper_scale ? 5 : config.lag_order;

  const double well = 4.48, ill = 4.48e2;
  const std::vector<std::array<double, 3>> grid = {
      {0.26, 0.90, well}, {0.26, 1.05, well}, {0.26, 0.90, ill},
      {0.26, 1.05, ill},  {0.80, 0.90, ill},  {0.80, 1.05, ill}};

  Rng master(config.seed);
  for (std::size_t model_idx = 0; model_idx < grid.size(); ++model_idx) {
    VarSpec spec;
    spec.lag_order = lag;
    spec.dim_g = g;
    spec.sample_len = m0;
    spec.sparsity = grid[model_idx][0];
    spec.lambda_max = grid[model_idx][1];
    spec.omega_cond = grid[model_idx][2];

    VarModelResult mr;
    mr.spec = spec;
    VarModel var = gen_var_model(spec, master.split(model_idx).seed());
    mr.realized_root = var.realized_root;
    mr.restriction_count = var.model.total_restrictions();

    mr.cond_x0 = cond_from_gram(var.model.z0);
    mr.cond_omega0 = cond_symmetric_abs(var.model.omega0);

    auto [mv_red, mv_rec] = mv_reduce(var.model);
    const Glm glm_emb = embed_mvrglm(mv_red);
    const std::size_t n_emb = glm_emb.x.cols(), m_emb = glm_emb.x.rows();

    mr.cond_x = n_emb <= config.diag_dim_guard ? cond_from_gram(glm_emb.x) : kNan;

    // SUR form of the reduced model for PCG-NE, PCG-Aug and the common
    // normal-equation residual metric.  The G / K1 G / K2 G condition
    // numbers refer to this nonsingular formulation.
    SurModel sur = sur_from_exclusions(mv_red);
    const Glm glm_sur = embed_sur(sur);
    const auto kept = kept_columns(mv_red.restrictions, mv_red.params_per_eq());
    SurNeResidual metric(sur);

    // K1: alpha I with alpha = max_i Sigma_ii; K2: diag(Sigma).  On the
    // zero-variance constraint rows of the multivariate embedding the
    // auxiliary variance is matched to the data scale (D_C is free in the
    // block auxiliary; diag(Sigma) vanishes there).
    double alpha = 0.0;
    Vector omega_diag(g);
    for (std::size_t i = 0; i < g; ++i) {
      omega_diag[i] = var.model.omega0(i, i);
      alpha = std::max(alpha, omega_diag[i]);
    }
    const double z_scale2 =
        mv_red.z0.frobenius_norm() * mv_red.z0.frobenius_norm() /
        static_cast<double>(mv_red.params_per_eq());
    Vector k1_c(g, alpha / z_scale2), k2_c(g);
    for (std::size_t i = 0; i < g; ++i) k2_c[i] = omega_diag[i] / z_scale2;
    auto k1 = mvrglm_preconditioner(mv_red, Vector(g, alpha), k1_c);
    auto k2 = mvrglm_preconditioner(mv_red, omega_diag, k2_c);

    Vector sur_k1_scale(g, alpha);
    auto sur_k1 = sur_preconditioner(sur, sur_k1_scale);
    auto sur_k2 = sur_preconditioner(sur, omega_diag);

    const std::size_t m_sur = glm_sur.x.rows(), n_sur = glm_sur.x.cols();
    if (m_sur + n_sur <= config.diag_dim_guard) {
      DenseMatrix aug(m_sur + n_sur, m_sur + n_sur);
      const DenseMatrix sig = glm_sur.sigma.to_dense();
      for (std::size_t j = 0; j < m_sur; ++j)
        for (std::size_t i = 0; i < m_sur; ++i) aug(i, j) = sig(i, j);
      for (std::size_t j = 0; j < n_sur; ++j)
        for (std::size_t i = 0; i < m_sur; ++i) {
          aug(i, m_sur + j) = glm_sur.x(i, j);
          aug(m_sur + j, i) = glm_sur.x(i, j);
        }
      mr.cond_g = cond_symmetric_abs(aug);
      mr.cond_k1g = eigs_of_gk(glm_sur, *sur_k1).condition_number;
      mr.cond_k2g = eigs_of_gk(glm_sur, *sur_k2).condition_number;
    } else {
      mr.cond_g = kNan;
      mr.cond_k1g = kNan;
      mr.cond_k2g = kNan;
    }

    const std::size_t k_total = var.model.total_restrictions();
    PcgConfig aug_cfg;
    aug_cfg.tol_rel = 1e-12;  // run to the floor; convergence judged on the metric
    aug_cfg.max_iter = 3 * (k_total + 1) + 10;
    PcgConfig ne_cfg;
    ne_cfg.tol_rel = 1e-14;
    ne_cfg.max_iter = 2 * glm_sur.x.cols();

    auto run_method = [&](const std::string& name, bool full_space,
                          std::function<AugSolveResult(const PcgObserverFn&)> runner) {
      VarMethodRun run;
      run.name = name;
      std::vector<Vector> estimates;
      AugSolveResult res = runner(
          [&](const PcgObservation& obs) { estimates.push_back(obs.estimator); });
      for (const Vector& est : estimates) {
        const Vector b_sur =
            full_space ? gather_sur_params(est, kept, mv_red.params_per_eq()) : est;
        run.ne_residual_curve.push_back(metric.rel(b_sur));
      }
      const Vector final_b =
          full_space ? gather_sur_params(res.solution.b, kept, mv_red.params_per_eq())
                     : res.solution.b;
      run.final_ne_residual_rel = metric.rel(final_b);
      run.converged = run.final_ne_residual_rel <= config.tol_rel;
      run.iterations = res.solution.iterations;
      run.termination = res.solution.termination;
      run.trace = std::move(res.trace);
      mr.methods.push_back(std::move(run));
    };

    const Vector w0_emb(m_emb, 0.0), z0_emb(n_emb, 0.0);
    const Vector w0_sur(glm_sur.x.rows(), 0.0), z0_sur(glm_sur.x.cols(), 0.0);

    run_method("pcg-ne", false, [&](const PcgObserverFn& obs) {
      return pcg_normal_equations(glm_sur, nullptr, ne_cfg, nullptr, obs);
    });
    run_method("pcg-aug-k1", false, [&](const PcgObserverFn& obs) {
      return pcg_aug(glm_sur, *sur_k1, w0_sur, z0_sur, aug_cfg, nullptr, obs);
    });
    run_method("pcg-aug-k2", false, [&](const PcgObserverFn& obs) {
      return pcg_aug(glm_sur, *sur_k2, w0_sur, z0_sur, aug_cfg, nullptr, obs);
    });
    run_method("mvrglm-k1", true, [&](const PcgObserverFn& obs) {
      return pcg_aug(glm_emb, *k1, w0_emb, z0_emb, aug_cfg, nullptr, obs);
    });
    run_method("mvrglm-k2", true, [&](const PcgObserverFn& obs) {
      return pcg_aug(glm_emb, *k2, w0_emb, z0_emb, aug_cfg, nullptr, obs);
    });

    result.models.push_back(std::move(mr));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::ofstream open_report(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_replay(const fs::path& out_dir, const std::string& experiment,
                  KeyValues extra) {
  extra["experiment"] = experiment;
  extra["generator"] = Rng::kGeneratorId;
  write_key_values(out_dir / "config.replay.toml", extra);
}

void write_curve_csv(const fs::path& path, const std::string& header,
                     const std::vector<double>& values) {
  std::ofstream out = open_report(path);
  out << "iter," << header << "\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    out << i << "," << format_double(values[i]) << "\n";
}

}  // namespace

void emit_scaling_report(const fs::path& out_dir, const ScalingResult& result) {
  fs::create_directories(out_dir);
  std::ofstream md = open_report(out_dir / "summary.md");
  md << "# Scaling study\n\n";
  md << "m = " << result.config.m << ", n = " << result.config.n
     << ", seed = " << result.config.seed << "\n\n";
  md << "| alpha | cond(GK) | unit eigenvalues | iterations | termination | "
        "recovered residual | dual residual |\n";
  md << "|---|---|---|---|---|---|---|\n";
  for (const auto& ar : result.per_alpha) {
    md << "| " << ar.alpha << " | " << ar.spectrum.condition_number << " | "
       << ar.spectrum.unit_count << " | " << ar.run.solution.iterations << " | "
       << to_string(ar.run.solution.termination) << " | " << ar.recovered_residual_rel
       << " | " << ar.dual_residual_rel << " |\n";
    const std::string tag = "alpha_" + std::to_string(ar.alpha);
    write_trace_csv(out_dir / (tag + "_trace.csv"), ar.run.trace);
    write_vector_csv(out_dir / (tag + "_gk_spectrum.csv"), ar.spectrum.eigenvalues);
    write_curve_csv(out_dir / (tag + "_sigma_error.csv"), "sigma_error",
                    ar.sigma_error_curve);
    if (!ar.error_note.empty()) md << "Error: " << ar.error_note << "\n";
  }
  write_vector_csv(out_dir / "beta.csv", result.beta);
  write_replay(out_dir, "scaling",
               {{"seed", std::to_string(result.config.seed)},
                {"m", std::to_string(result.config.m)},
                {"n", std::to_string(result.config.n)},
                {"tol", format_double(result.config.tol_rel)}});
}

void emit_mc_report(const fs::path& out_dir, const McSummary& summary) {
  fs::create_directories(out_dir);
  auto write_solver = [&](const McSolverSummary& s) {
    std::ofstream out = open_report(out_dir / (s.solver + "_summary.csv"));
    out << "iter,element,mean_error,se,band95_lo,band95_hi,band99_lo,band99_hi\n";
    for (std::size_t t = 0; t < s.mean_error.size(); ++t)
      for (std::size_t e = 0; e < s.mean_error[t].size(); ++e)
        out << t << "," << e << "," << format_double(s.mean_error[t][e]) << ","
            << format_double(s.se_error[t][e]) << "," << format_double(s.band95_lo[t][e])
            << "," << format_double(s.band95_hi[t][e]) << ","
            << format_double(s.band99_lo[t][e]) << ","
            << format_double(s.band99_hi[t][e]) << "\n";
    std::ofstream rm = open_report(out_dir / (s.solver + "_rmse.csv"));
    rm << "iter,rmse_mean,rmse_se,b95_lo,b95_hi,b99_lo,b99_hi";
    const bool has_tr = !s.sigma_omega_trace.empty();
    if (has_tr) rm << ",sigma_omega_trace,sigma_omega_se";
    rm << "\n";
    for (std::size_t t = 0; t < s.rmse_mean.size(); ++t) {
      rm << t << "," << format_double(s.rmse_mean[t]) << "," << format_double(s.rmse_se[t])
         << "," << format_double(s.rmse_b95_lo[t]) << "," << format_double(s.rmse_b95_hi[t])
         << "," << format_double(s.rmse_b99_lo[t]) << ","
         << format_double(s.rmse_b99_hi[t]);
      if (has_tr)
        rm << "," << format_double(s.sigma_omega_trace[t]) << ","
           << format_double(s.sigma_omega_se[t]);
      rm << "\n";
    }
  };
  write_solver(summary.aug);
  write_solver(summary.ne);
  write_vector_csv(out_dir / "beta.csv", summary.beta);
  write_vector_csv(out_dir / "gls_mean_error.csv", summary.gls_mean_error);
  write_vector_csv(out_dir / "gls_se_error.csv", summary.gls_se_error);

  std::ofstream md = open_report(out_dir / "summary.md");
  md << "# Monte Carlo study\n\n";
  md << "m = " << summary.config.m << ", n = " << summary.config.n
     << ", replications = " << summary.config.replications
     << ", horizon = " << summary.horizon << ", seed = " << summary.config.seed << "\n\n";
  md << "GLS reference rmse: " << summary.gls_rmse_mean << "\n\n";
  md << "Lemma-2 bound: " << summary.lemma2_violations << " violations over "
     << summary.lemma2_checked << " replications; zeta monotonicity violations: "
     << summary.zeta_monotone_violations << "\n\n";
  md << "| iter | aug rmse | ne rmse | tr(Sigma Omega_i) |\n|---|---|---|---|\n";
  for (std::size_t t = 0; t < summary.aug.rmse_mean.size(); ++t)
    md << "| " << t << " | " << summary.aug.rmse_mean[t] << " | "
       << summary.ne.rmse_mean[t] << " | " << summary.aug.sigma_omega_trace[t] << " |\n";
  write_replay(out_dir, "monte-carlo",
               {{"seed", std::to_string(summary.config.seed)},
                {"m", std::to_string(summary.config.m)},
                {"n", std::to_string(summary.config.n)},
                {"replications", std::to_string(summary.config.replications)},
                {"tol", format_double(summary.config.tol_rel)}});
}

void emit_sur_bench_report(const fs::path& out_dir, const SurBenchResult& result) {
  fs::create_directories(out_dir);
  std::ofstream md = open_report(out_dir / "summary.md");
  md << "# SUR benchmark\n\n";
  md << "M = " << result.config.obs << ", G = " << result.config.equations
     << ", N = " << result.config.base_params << ", seed = " << result.config.seed
     << (result.config.reduce ? ", with reduction pre-pass" : "") << "\n\n";
  md << "| method | iterations | termination | rel diff vs direct | factorizations | "
        "multiplies/apply |\n|---|---|---|---|---|---|\n";
  for (const auto& mrun : result.methods) {
    md << "| " << mrun.name << " | " << mrun.iterations << " | "
       << to_string(mrun.termination) << " | " << mrun.rel_diff_vs_direct << " | "
       << mrun.cost.factorizations << " | " << mrun.cost.multiplies_per_apply << " |\n";
    if (!mrun.trace.rows.empty())
      write_trace_csv(out_dir / (mrun.name + "_trace.csv"), mrun.trace);
  }
  md << "\nStructured vs dense iterate agreement (sup rel diff): "
     << result.structured_vs_dense_sup << "\n";
  write_replay(out_dir, "sur-bench",
               {{"seed", std::to_string(result.config.seed)},
                {"M", std::to_string(result.config.obs)},
                {"G", std::to_string(result.config.equations)},
                {"N", std::to_string(result.config.base_params)},
                {"tol", format_double(result.config.tol_rel)}});
}

void emit_var_suite_report(const fs::path& out_dir, const VarSuiteResult& result) {
  fs::create_directories(out_dir);
  std::ofstream md = open_report(out_dir / "summary.md");
  md << "# Restricted VAR suite\n\n";
  md << "| model | sparsity | lambda_max | cond(X0) | cond(Omega0) | cond(X) | cond(G) "
        "| cond(K1G) | cond(K2G) |\n|---|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < result.models.size(); ++i) {
    const auto& mr = result.models[i];
    md << "| " << (i + 1) << " | " << mr.spec.sparsity << " | " << mr.spec.lambda_max
       << " | " << mr.cond_x0 << " | " << mr.cond_omega0 << " | " << mr.cond_x << " | "
       << mr.cond_g << " | " << mr.cond_k1g << " | " << mr.cond_k2g << " |\n";
  }
  md << "\n| model | method | iterations | termination | final NE residual | converged "
        "|\n|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < result.models.size(); ++i)
    for (const auto& mrun : result.models[i].methods) {
      md << "| " << (i + 1) << " | " << mrun.name << " | " << mrun.iterations << " | "
         << to_string(mrun.termination) << " | " << mrun.final_ne_residual_rel << " | "
         << (mrun.converged ? "yes" : "no") << " |\n";
      const std::string tag = "model" + std::to_string(i + 1) + "_" + mrun.name;
      write_trace_csv(out_dir / (tag + "_trace.csv"), mrun.trace);
      write_curve_csv(out_dir / (tag + "_ne_residual.csv"), "ne_residual_rel",
                      mrun.ne_residual_curve);
    }
  write_replay(out_dir, "var-suite",
               {{"seed", std::to_string(result.config.seed)},
                {"G", std::to_string(result.config.dim_g)},
                {"M", std::to_string(result.config.sample_len)},
                {"paper_scale", result.config.paper_scale ? "true" : "false"},
                {"tol", format_double(result.config.tol_rel)}});
}

}  // namespace gls
