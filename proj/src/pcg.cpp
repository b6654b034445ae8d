#include "gls/pcg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "gls/errors.hpp"

namespace gls {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

long long elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

double rmse_of(const Vector& est, const Vector* beta) {
  if (!beta) return kNan;
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - (*beta)[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(est.size()));
}

enum class AugVariant { Recovery, Full, Alt };

std::size_t default_aug_max_iter(std::size_t m, std::size_t n) { return m - n + 1; }

AugSolveResult run_aug(const Glm& glm, const IndefinitePreconditioner& precond,
                       const Vector& w1, const Vector& z1, const PcgConfig& config,
                       AugVariant variant, const Vector* true_beta,
                       const PcgObserverFn& observer) {
  const std::size_t m = glm.x.rows(), n = glm.x.cols();
  if (precond.rows() != m || precond.params() != n)
    throw DimensionMismatch("pcg_aug: preconditioner dims do not match the GLM");
  if (w1.size() != m || z1.size() != n)
    throw DimensionMismatch("pcg_aug: bad initial iterate size");

  const std::size_t max_iter =
      config.max_iter ? config.max_iter : default_aug_max_iter(m, n);
  const std::size_t stride = config.record_z_every ? config.record_z_every : 1;
  const double sigma_scale = operator_norm_probe(glm.sigma);
  const auto start = Clock::now();

  AugSolveResult out;
  PcgTrace& trace = out.trace;

  // Enforce X'w1 = 0: project along X* if violated.
  Vector w = w1;
  {
    Vector xtw = glm.x.apply_transpose(w);
    const double feas = norm2(xtw);
    const double scale = glm.x.frobenius_norm() * norm2(w);
    if (feas > 1e-14 * scale && feas > 0.0) {
      Vector corr = precond.apply_xstar(xtw);
      for (std::size_t i = 0; i < m; ++i) w[i] -= corr[i];
      trace.w1_projected = true;
    }
  }

  Vector z = z1;
  Vector sw = glm.sigma.apply(w);
  Vector r = sub(add(sw, glm.x.apply(z)), glm.y);
  Vector pr = precond.apply_pi(r);
  double c = std::max(dot(r, pr), 0.0);
  const double c1 = c;
  const double threshold = config.tol_rel * config.tol_rel * c1;

  // Attainable floor of the computed seminorm: c = r'(Pi r) carries an
  // absolute uncertainty of order eps |Pi| |r|^2, driven by the O(|r|)
  // range-space ballast of r contracting against the noise in Pi r.
  constexpr double kEpsC = std::numeric_limits<double>::epsilon();
  double pi_gain = 0.0;
  auto c_floor = [&](double r_norm2, double pr_norm) {
    if (r_norm2 > 0.0)
      pi_gain = std::max(pi_gain, pr_norm / std::sqrt(r_norm2));
    return 16.0 * kEpsC * std::max(pi_gain, 1e-3) * r_norm2;
  };
  (void)c_floor(dot(r, r), norm2(pr));

  Vector u, v, srec;
  if (variant == AugVariant::Alt) {
    srec = r;
  } else {
    u = pr;
    v = precond.apply_xstar_t(r);
  }

  auto recover = [&](const Vector& sw_sel) {
    return precond.apply_xstar_t(sub(glm.y, sw_sel));
  };
  auto estimator_now = [&]() {
    if (variant == AugVariant::Full) return z;
    return recover(sw);
  };

  auto push_row = [&](std::size_t iter, double cval, const Vector& est, bool sampled) {
    PcgTraceRow row;
    row.iter = iter;
    row.c = cval;
    Vector resid = glm.y;
    const Vector xe = glm.x.apply(est);
    for (std::size_t i = 0; i < m; ++i) resid[i] -= sw[i] + xe[i];
    row.aug_residual_norm = norm2(resid);
    row.dual_feas_norm = norm2(glm.x.apply_transpose(w));
    row.rmse = sampled ? rmse_of(est, true_beta) : kNan;
    row.elapsed_ns = elapsed_ns(start);
    trace.rows.push_back(row);
  };

  {
    const Vector est0 = estimator_now();
    push_row(0, c, est0, true);
    if (observer) observer(PcgObservation{0, w, est0});
  }

  Vector w_best = w, sw_best = sw;
  double c_best = c;
  std::size_t best_iter = 0;
  std::size_t stagnant = 0;
  std::size_t done = 0;
  trace.termination = Termination::MaxIter;

  if (c1 == 0.0) {
    trace.termination = Termination::Converged;
  } else {
    for (std::size_t i = 1; i <= max_iter; ++i) {
      Vector u_cur, v_cur;
      if (variant == AugVariant::Alt) {
        u_cur = precond.apply_pi(srec);
        v_cur = precond.apply_xstar_t(srec);
      } else {
        u_cur = u;
        v_cur = v;
      }
      const Vector su = glm.sigma.apply(u_cur);
      const double d = dot(u_cur, su);
      if (std::fabs(d) <= config.breakdown_tol * dot(u_cur, u_cur) * sigma_scale) {
        trace.termination = Termination::Breakdown;
        trace.breakdown_iteration = i;
        break;
      }
      const double lambda = c / d;
      axpy(-lambda, u_cur, w);
      axpy(-lambda, su, sw);
      if (variant == AugVariant::Full) axpy(-lambda, v_cur, z);
      const Vector xv = glm.x.apply(v_cur);
      for (std::size_t k = 0; k < m; ++k) r[k] -= lambda * (su[k] + xv[k]);
      pr = precond.apply_pi(r);
      double c_next = dot(r, pr);
      done = i;

      const bool sampled = (i % stride == 0) || c_next <= threshold || i == max_iter;
      const Vector est = estimator_now();
      push_row(i, c_next, est, sampled);
      if (observer && sampled) observer(PcgObservation{i, w, est});

      const double floor_c = c_floor(dot(r, r), norm2(pr));
      // Exhaustion of the search space shows up either as a pure-noise
      // seminorm (deep below the measurement floor) or as a single-step
      // collapse landing at the floor (exact termination).
      const bool exhausted = std::fabs(c_next) <= floor_c / 64.0 ||
                             (std::fabs(c_next) <= floor_c && c_next <= 1e-6 * c);
      if (c_next < 0.0 && std::fabs(c_next) > floor_c) {
        // significantly negative seminorm above the roundoff floor: the
        // recurrence lost its meaning
        trace.termination = Termination::Breakdown;
        trace.breakdown_iteration = i;
        break;
      }
      if (c_next < 0.0) c_next = 0.0;
      if (c_next < c_best) {
        c_best = c_next;
        w_best = w;
        sw_best = sw;
        best_iter = i;
      }
      if (c_next <= threshold || exhausted) {
        trace.termination = Termination::Converged;
        break;
      }
      if (std::fabs(c_next - c) <= 1e-15 * c) {
        if (++stagnant >= config.stagnation_window) {
          trace.termination = Termination::Stagnation;
          break;
        }
      } else {
        stagnant = 0;
      }
      if (c_next > config.growth_tol * c_best && i - best_iter >= config.growth_window) {
        trace.termination = Termination::Breakdown;
        trace.breakdown_iteration = i;
        break;
      }

      const double mu = c_next / c;
      c = c_next;
      if (variant == AugVariant::Alt) {
        for (std::size_t k = 0; k < m; ++k) srec[k] = r[k] + mu * srec[k];
      } else {
        Vector xstar_r = precond.apply_xstar_t(r);
        for (std::size_t k = 0; k < n; ++k) v[k] = xstar_r[k] + mu * v[k];
        for (std::size_t k = 0; k < m; ++k) u[k] = pr[k] + mu * u[k];
      }
    }
  }

  GlsSolution& sol = out.solution;
  const bool keep_last = trace.termination == Termination::Converged;
  const Vector& w_sel = keep_last ? w : w_best;
  const Vector& sw_sel = keep_last ? sw : sw_best;
  sol.w = w_sel;
  // Every variant returns the recovered estimator: the propagated z of the
  // full variant cannot absorb the final range-space correction (that step
  // is the 0/0 breakdown of Section 3.2) and is reported via the trace and
  // observer instead.
  sol.b = recover(sw_sel);
  sol.iterations = done;
  sol.termination = trace.termination;
  sol.residual_seminorm = keep_last ? c : c_best;
  return out;
}

}  // namespace

double operator_norm_probe(const SymmetricOperator& sigma, std::size_t iters) {
  const std::size_t m = sigma.dim();
  Vector v(m, 1.0 / std::sqrt(static_cast<double>(m)));
  double nrm = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    v = sigma.apply(v);
    nrm = norm2(v);
    if (nrm == 0.0) return 0.0;
    for (double& x : v) x /= nrm;
  }
  return nrm;
}

GenericPcgResult pcg_generic(const LinearOp& apply_g, const LinearOp& apply_k,
                             const Vector& h, const Vector& x1, const PcgConfig& config,
                             const GenericObserverFn& observer) {
  const std::size_t dim = h.size();
  if (x1.size() != dim) throw DimensionMismatch("pcg_generic: x1 size mismatch");
  const std::size_t max_iter = config.max_iter ? config.max_iter : dim;
  const auto start = Clock::now();

  GenericPcgResult out;
  PcgTrace& trace = out.trace;
  Vector x = x1;
  Vector f = sub(apply_g(x), h);
  Vector kf = apply_k(f);
  double c = dot(f, kf);
  const double c1_abs = std::fabs(c);
  const double threshold = config.tol_rel * config.tol_rel * c1_abs;
  Vector p = kf;

  constexpr double kEpsC = std::numeric_limits<double>::epsilon();
  double k_gain = 0.0;
  auto c_floor = [&](double f_norm2, double kf_norm) {
    if (f_norm2 > 0.0) k_gain = std::max(k_gain, kf_norm / std::sqrt(f_norm2));
    return 16.0 * kEpsC * std::max(k_gain, 1e-3) * f_norm2;
  };
  (void)c_floor(dot(f, f), norm2(kf));

  auto push_row = [&](std::size_t iter, double cval) {
    PcgTraceRow row;
    row.iter = iter;
    row.c = cval;
    row.aug_residual_norm = norm2(f);
    row.dual_feas_norm = kNan;
    row.rmse = kNan;
    row.elapsed_ns = elapsed_ns(start);
    trace.rows.push_back(row);
  };

  push_row(0, c);
  if (observer) observer(0, x, f, p);

  double c_best = std::fabs(c);
  std::size_t best_iter = 0, stagnant = 0;
  trace.termination = Termination::MaxIter;

  if (c1_abs == 0.0) {
    trace.termination = Termination::Converged;
  } else {
    for (std::size_t i = 1; i <= max_iter; ++i) {
      const Vector gp = apply_g(p);
      const double d = dot(p, gp);
      if (std::fabs(d) <= config.breakdown_tol * norm2(p) * norm2(gp)) {
        trace.termination = Termination::Breakdown;
        trace.breakdown_iteration = i;
        break;
      }
      const double lambda = c / d;
      axpy(-lambda, p, x);
      axpy(-lambda, gp, f);
      kf = apply_k(f);
      const double c_next = dot(f, kf);
      push_row(i, c_next);

      const double floor_c = c_floor(dot(f, f), norm2(kf));
      const bool exhausted = std::fabs(c_next) <= floor_c / 64.0 ||
                             (std::fabs(c_next) <= floor_c &&
                              std::fabs(c_next) <= 1e-6 * std::fabs(c));
      if (std::fabs(c_next) <= threshold || exhausted) {
        trace.termination = Termination::Converged;
        break;
      }
      if (std::fabs(c_next) < c_best) {
        c_best = std::fabs(c_next);
        best_iter = i;
      }
      if (std::fabs(c_next - c) <= 1e-15 * std::fabs(c)) {
        if (++stagnant >= config.stagnation_window) {
          trace.termination = Termination::Stagnation;
          break;
        }
      } else {
        stagnant = 0;
      }
      if (std::fabs(c_next) > config.growth_tol * c_best &&
          i - best_iter >= config.growth_window) {
        trace.termination = Termination::Breakdown;
        trace.breakdown_iteration = i;
        break;
      }

      const double mu = c_next / c;
      c = c_next;
      for (std::size_t k = 0; k < dim; ++k) p[k] = kf[k] + mu * p[k];
      if (observer) observer(i, x, f, p);
    }
  }

  out.x = x;
  return out;
}

AugSolveResult pcg_aug(const Glm& glm, const IndefinitePreconditioner& precond,
                       const Vector& w1, const Vector& z1, const PcgConfig& config,
                       const Vector* true_beta, const PcgObserverFn& observer) {
  return run_aug(glm, precond, w1, z1, config, AugVariant::Recovery, true_beta, observer);
}

AugSolveResult pcg_aug_full(const Glm& glm, const IndefinitePreconditioner& precond,
                            const Vector& w1, const Vector& z1, const PcgConfig& config,
                            const Vector* true_beta, const PcgObserverFn& observer) {
  return run_aug(glm, precond, w1, z1, config, AugVariant::Full, true_beta, observer);
}

AugSolveResult pcg_aug_alt(const Glm& glm, const IndefinitePreconditioner& precond,
                           const Vector& w1, const Vector& z1, const PcgConfig& config,
                           const Vector* true_beta, const PcgObserverFn& observer) {
  return run_aug(glm, precond, w1, z1, config, AugVariant::Alt, true_beta, observer);
}

AugSolveResult pcg_normal_equations(const Glm& glm, const LinearOp& precond_ne,
                                    const PcgConfig& config, const Vector* true_beta,
                                    const PcgObserverFn& observer) {
  const std::size_t n = glm.x.cols();
  DenseMatrix lower;
  try {
    lower = cholesky(glm.sigma.to_dense());
  } catch (const NotPositiveDefinite&) {
    throw SingularCovariance("pcg_normal_equations: covariance is singular");
  }
  const auto start = Clock::now();
  const std::size_t max_iter = config.max_iter ? config.max_iter : 2 * n;
  const std::size_t stride = config.record_z_every ? config.record_z_every : 1;

  auto apply_g = [&](const Vector& vv) {
    return glm.x.apply_transpose(chol_solve(lower, glm.x.apply(vv)));
  };
  auto apply_k = [&](const Vector& vv) { return precond_ne ? precond_ne(vv) : vv; };

  // crude norm probe for the breakdown scale
  double g_scale;
  {
    Vector vv(n, 1.0 / std::sqrt(static_cast<double>(n)));
    g_scale = 0.0;
    for (int it = 0; it < 12; ++it) {
      vv = apply_g(vv);
      g_scale = norm2(vv);
      if (g_scale == 0.0) break;
      for (double& t : vv) t /= g_scale;
    }
  }

  AugSolveResult out;
  PcgTrace& trace = out.trace;
  const Vector h = glm.x.apply_transpose(chol_solve(lower, glm.y));
  Vector x(n, 0.0);
  Vector f = scaled(-1.0, h);
  Vector kf = apply_k(f);
  double c = std::max(dot(f, kf), 0.0);
  const double c1 = c;
  const double threshold = config.tol_rel * config.tol_rel * c1;
  Vector p = kf;

  constexpr double kEpsC = std::numeric_limits<double>::epsilon();
  double k_gain = 0.0;
  auto c_floor = [&](double f_norm2, double kf_norm) {
    if (f_norm2 > 0.0) k_gain = std::max(k_gain, kf_norm / std::sqrt(f_norm2));
    return 16.0 * kEpsC * std::max(k_gain, 1e-3) * f_norm2;
  };
  (void)c_floor(dot(f, f), norm2(kf));

  auto implied_w = [&](const Vector& b) {
    return chol_solve(lower, sub(glm.y, glm.x.apply(b)));
  };

  auto push_row = [&](std::size_t iter, double cval, bool sampled) {
    PcgTraceRow row;
    row.iter = iter;
    row.c = cval;
    row.aug_residual_norm = norm2(f);  // normal-equation residual
    row.dual_feas_norm = norm2(f);     // X'w for the implied w = Sigma^-1(y - Xb)
    row.rmse = sampled ? rmse_of(x, true_beta) : kNan;
    row.elapsed_ns = elapsed_ns(start);
    trace.rows.push_back(row);
  };

  push_row(0, c, true);
  if (observer) {
    const Vector w0 = implied_w(x);
    observer(PcgObservation{0, w0, x});
  }

  Vector x_best = x;
  double c_best = c;
  std::size_t best_iter = 0, stagnant = 0, done = 0;
  trace.termination = Termination::MaxIter;

  if (c1 == 0.0) {
    trace.termination = Termination::Converged;
  } else {
    for (std::size_t i = 1; i <= max_iter; ++i) {
      const Vector gp = apply_g(p);
      const double d = dot(p, gp);
      if (std::fabs(d) <= config.breakdown_tol * dot(p, p) * std::max(g_scale, 1e-300)) {
        trace.termination = Termination::Breakdown;
        trace.breakdown_iteration = i;
        break;
      }
      const double lambda = c / d;
      axpy(-lambda, p, x);
      axpy(-lambda, gp, f);
      kf = apply_k(f);
      double c_next = dot(f, kf);
      done = i;
      const bool sampled = (i % stride == 0) || c_next <= threshold || i == max_iter;
      push_row(i, c_next, sampled);
      if (observer && sampled) {
        const Vector wi = implied_w(x);
        observer(PcgObservation{i, wi, x});
      }

      const double floor_c = c_floor(dot(f, f), norm2(kf));
      const bool exhausted = std::fabs(c_next) <= floor_c / 64.0 ||
                             (std::fabs(c_next) <= floor_c && c_next <= 1e-6 * c);
      if (c_next < 0.0 && std::fabs(c_next) > floor_c) {
        trace.termination = Termination::Breakdown;
        trace.breakdown_iteration = i;
        break;
      }
      if (c_next < 0.0) c_next = 0.0;
      if (c_next < c_best) {
        c_best = c_next;
        x_best = x;
        best_iter = i;
      }
      if (c_next <= threshold || exhausted) {
        trace.termination = Termination::Converged;
        break;
      }
      if (std::fabs(c_next - c) <= 1e-15 * c) {
        if (++stagnant >= config.stagnation_window) {
          trace.termination = Termination::Stagnation;
          break;
        }
      } else {
        stagnant = 0;
      }
      if (c_next > config.growth_tol * c_best && i - best_iter >= config.growth_window) {
        trace.termination = Termination::Breakdown;
        trace.breakdown_iteration = i;
        break;
      }

      const double mu = c_next / c;
      c = c_next;
      for (std::size_t k = 0; k < n; ++k) p[k] = kf[k] + mu * p[k];
    }
  }

  GlsSolution& sol = out.solution;
  const bool keep_last = trace.termination == Termination::Converged;
  sol.b = keep_last ? x : x_best;
  sol.w = implied_w(sol.b);
  sol.iterations = done;
  sol.termination = trace.termination;
  sol.residual_seminorm = keep_last ? c : c_best;
  return out;
}

namespace {

// Eigenvalues of (Q_N'Sigma Q_N)(Q_N'D Q_N)^-1, computed from the operator
// pair alone: Pi = Q_N B^-1 Q_N' implies B^-1 = Q_N' Pi Q_N.
Vector reduced_spectrum_impl(const Glm& glm, const IndefinitePreconditioner& precond,
                             DenseMatrix* a_out) {
  const std::size_t m = glm.x.rows(), n = glm.x.cols();
  if (m + n > kGkDimGuard)
    throw TooLarge("eigs_of_gk: problem exceeds the dense diagnostic guard");
  QrFull qr = qr_full(glm.x);
  const std::size_t k = m - n;
  DenseMatrix sq(m, k), pq(m, k);
  for (std::size_t j = 0; j < k; ++j) {
    const Vector col = qr.q_null.col(j);
    sq.set_col(j, glm.sigma.apply(col));
    pq.set_col(j, precond.apply_pi(col));
  }
  DenseMatrix a = qr.q_null.transpose() * sq;
  DenseMatrix b_inv = qr.q_null.transpose() * pq;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = v;
      v = 0.5 * (b_inv(i, j) + b_inv(j, i));
      b_inv(i, j) = b_inv(j, i) = v;
    }
  if (a_out) *a_out = a;

  try {
    // B^-1 = L L' makes A B^-1 similar to the symmetric L' A L.
    DenseMatrix l = cholesky(b_inv);
    DenseMatrix s = l.transpose() * (a * l);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < j; ++i) {
        const double v = 0.5 * (s(i, j) + s(j, i));
        s(i, j) = s(j, i) = v;
      }
    return sym_eig(s).eigenvalues;
  } catch (const NotPositiveDefinite&) {
    // Indefinite D: fall back to the nonsymmetric product.
    auto eigs = general_eigenvalues(a * b_inv);
    Vector vals(eigs.size());
    for (std::size_t i = 0; i < eigs.size(); ++i) vals[i] = eigs[i].real();
    std::sort(vals.begin(), vals.end());
    return vals;
  }
}

}  // namespace

GkSpectrum eigs_of_gk(const Glm& glm, const IndefinitePreconditioner& precond,
                      double unit_tol) {
  const std::size_t n = glm.x.cols();
  GkSpectrum out;
  out.eigenvalues = reduced_spectrum_impl(glm, precond, nullptr);
  out.eigenvalues.insert(out.eigenvalues.end(), 2 * n, 1.0);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  double max_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (double v : out.eigenvalues) {
    if (std::fabs(v - 1.0) <= unit_tol) ++out.unit_count;
    max_abs = std::max(max_abs, std::fabs(v));
    min_abs = std::min(min_abs, std::fabs(v));
  }
  out.condition_number = min_abs > 0.0 ? max_abs / min_abs
                                       : std::numeric_limits<double>::infinity();
  return out;
}

double ReducedDiagnostics::bound(std::size_t i) const {
  if (i == 0) return 2.0 * std::sqrt(kappa);
  const double rk = std::sqrt(kappa);
  const double rho = (rk - 1.0) / (rk + 1.0);
  return 2.0 * rk * std::pow(rho, static_cast<double>(i - 1));
}

std::vector<double> ReducedDiagnostics::bound_curve(std::size_t iters) const {
  std::vector<double> out(iters);
  for (std::size_t i = 0; i < iters; ++i) out[i] = bound(i + 1);
  return out;
}

ReducedDiagnostics reduced_diagnostics(const Glm& glm,
                                       const IndefinitePreconditioner& precond) {
  ReducedDiagnostics out;
  out.reduced_spectrum = reduced_spectrum_impl(glm, precond, nullptr);
  const double lo = out.reduced_spectrum.front();
  const double hi = out.reduced_spectrum.back();
  if (lo <= 0.0)
    throw NullspaceSingular("reduced_diagnostics: A B^-1 spectrum is not positive");
  out.kappa = hi / lo;
  return out;
}

}  // namespace gls
