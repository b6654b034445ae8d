#include "gls/pcg.hpp"

#include <cmath>

#include "doctest.h"
#include "gls/errors.hpp"
#include "gls/experiments.hpp"
#include "gls/rng.hpp"
#include "support.hpp"

using namespace gls;
using gls::testing::rel_err;

namespace {

LinearOp matrix_op(const DenseMatrix& a) {
  return [a](const Vector& v) { return a.apply(v); };
}

// Sigma with a prescribed spectrum split between range(X) and null(X').
Glm constructed_spectrum_glm(std::size_t m, std::size_t n, const Vector& null_eigs,
                             std::uint64_t seed) {
  Rng master(seed);
  DenseMatrix x = seeded_gaussian(m, n, 0.0, 1.0, master.split(0).seed());
  QrFull qr = qr_full(x);
  DenseMatrix q = hstack(qr.q_range, qr.q_null);
  Vector spectrum(m, 1.0);
  for (std::size_t i = 0; i < m - n; ++i) spectrum[n + i] = null_eigs[i % null_eigs.size()];
  DenseMatrix scaled = q;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) scaled(i, j) *= spectrum[j];
  DenseMatrix sigma = scaled * q.transpose();
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (sigma(i, j) + sigma(j, i));
      sigma(i, j) = sigma(j, i) = v;
    }
  Rng yr = master.split(1);
  return make_glm(yr.gaussian_vector(m), x, SymmetricOperator::dense(sigma));
}

}  // namespace

TEST_CASE("pcg_generic: exact preconditioner solves in one step") {
  DenseMatrix g = gen_spd_with_cond(6, 30.0, 3);
  DenseMatrix k = lu_solve(g, DenseMatrix::identity(6));
  Rng rng(9);
  Vector h = rng.gaussian_vector(6);
  PcgConfig cfg;
  auto res = pcg_generic(matrix_op(g), matrix_op(k), h, Vector(6, 0.0), cfg);
  CHECK(res.trace.termination == Termination::Converged);
  CHECK(res.trace.rows.size() <= 2);
  CHECK(rel_err(res.x, lu_solve(g, h)) < 1e-10);
}

TEST_CASE("pcg_generic: iteration count equals distinct eigenvalue count") {
  // diag(1,2): two distinct eigenvalues
  DenseMatrix g = DenseMatrix::diagonal({1.0, 2.0});
  PcgConfig cfg;
  cfg.tol_rel = 1e-12;
  auto res = pcg_generic(matrix_op(g), matrix_op(DenseMatrix::identity(2)),
                         Vector{1.0, 2.0}, Vector(2, 0.0), cfg);
  CHECK(res.trace.termination == Termination::Converged);
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(1.0));
  CHECK(res.trace.rows.back().iter <= 2);

  // 5x5 SPD with 3 distinct eigenvalues
  DenseMatrix q = qr_full(seeded_gaussian(5, 5, 0.0, 1.0, 12)).q_range;
  DenseMatrix scaled = q;
  const Vector spectrum{0.5, 0.5, 1.0, 1.0, 2.0};
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 5; ++i) scaled(i, j) *= spectrum[j];
  DenseMatrix g3 = scaled * q.transpose();
  Rng rng(5);
  auto res3 = pcg_generic(matrix_op(g3), matrix_op(DenseMatrix::identity(5)),
                          rng.gaussian_vector(5), Vector(5, 0.0), cfg);
  CHECK(res3.trace.termination == Termination::Converged);
  CHECK(res3.trace.rows.back().iter <= 3);
  CHECK(std::sqrt(res3.trace.rows.back().c / res3.trace.rows.front().c) <= 1e-12);
}

TEST_CASE("pcg_generic on the augmented system satisfies Properties 1 and 2") {
  Glm glm = gls::testing::random_spd_glm(12, 3, 40.0, 81);
  DenseMatrix d = gen_spd_with_cond(12, 5.0, 82);
  DenseMatrix g = gls::testing::dense_aug(glm);
  DenseMatrix k = gls::testing::dense_k(glm.x, d);

  Vector h = glm.y;
  h.resize(15, 0.0);

  std::vector<Vector> fs, ps;
  PcgConfig cfg;
  cfg.tol_rel = 1e-12;
  cfg.max_iter = 9;
  auto res = pcg_generic(matrix_op(g), matrix_op(k), h, Vector(15, 0.0), cfg,
                         [&](std::size_t, const Vector&, const Vector& f, const Vector& p) {
                           fs.push_back(f);
                           ps.push_back(p);
                         });

  // Property 2: p_j' f_i = 0 and p_j' G p_i = 0 for j < i
  for (std::size_t i = 1; i < fs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      CHECK(std::fabs(dot(ps[j], fs[i])) <= 1e-8 * norm2(ps[j]) * norm2(fs[i]));
      const Vector gpi = g.apply(ps[i]);
      const double gnorm_i = std::sqrt(std::fabs(dot(ps[i], gpi)));
      const double gnorm_j = std::sqrt(std::fabs(dot(ps[j], g.apply(ps[j]))));
      CHECK(std::fabs(dot(ps[j], gpi)) <= 1e-8 * std::max(1.0, gnorm_i * gnorm_j));
    }

  // Property 1: f_i lies in the Krylov space spanned by (GK)^j f_1
  DenseMatrix gk = g * k;
  for (std::size_t i = 1; i < std::min<std::size_t>(fs.size(), 6); ++i) {
    DenseMatrix basis(15, i + 1);
    Vector col = fs[0];
    for (std::size_t j = 0; j <= i; ++j) {
      Vector unit = col;
      const double nrm = norm2(unit);
      for (double& v : unit) v /= nrm;
      basis.set_col(j, unit);
      col = gk.apply(col);
    }
    // least-squares fit of f_i on the basis
    QrThin qr = qr_thin(basis);
    const Vector coef = tri_solve(qr.r, qr.q.apply_transpose(fs[i]));
    const Vector fit = basis.apply(coef);
    CHECK(norm2(sub(fs[i], fit)) <= 1e-6 * norm2(fs[i]));
  }
}

TEST_CASE("pcg_aug: D = Sigma converges in one iteration") {
  for (std::uint64_t seed : {7ULL, 8ULL}) {
    Glm glm = gls::testing::random_spd_glm(10, 3, 20.0, seed);
    auto precond = dense_preconditioner(glm.x, glm.sigma.to_dense());
    PcgConfig cfg;
    auto res = pcg_aug(glm, *precond, Vector(10, 0.0), Vector(3, 0.0), cfg);
    CHECK(res.trace.termination == Termination::Converged);
    CHECK(res.solution.iterations == 1);
    CHECK(rel_err(res.solution.b, blue_augmented_direct(glm).b) < 1e-10);
  }
}

TEST_CASE("pcg_aug matches the direct oracle on SPD problems") {
  Glm glm = gls::testing::random_spd_glm(12, 3, 500.0, 99);
  auto precond = dense_preconditioner(glm.x, DenseMatrix::identity(12));
  PcgConfig cfg;
  cfg.tol_rel = 1e-12;
  auto res = pcg_aug(glm, *precond, Vector(12, 0.0), Vector(3, 0.0), cfg);
  CHECK(rel_err(res.solution.b, blue_augmented_direct(glm).b) < 1e-8);
  // dual feasibility along the trace
  for (const auto& row : res.trace.rows)
    CHECK(row.dual_feas_norm <= 1e-8 * norm2(glm.y));
}

TEST_CASE("pcg_aug_full propagates z and shares the w recurrence") {
  Glm glm = gls::testing::random_spd_glm(11, 3, 50.0, 123);
  auto precond = dense_preconditioner(glm.x, DenseMatrix::identity(11));
  PcgConfig cfg;
  cfg.tol_rel = 1e-12;

  std::vector<Vector> w_aug, w_full;
  auto r1 = pcg_aug(glm, *precond, Vector(11, 0.0), Vector(3, 0.0), cfg, nullptr,
                    [&](const PcgObservation& o) { w_aug.push_back(o.w); });
  auto r2 = pcg_aug_full(glm, *precond, Vector(11, 0.0), Vector(3, 0.0), cfg, nullptr,
                         [&](const PcgObservation& o) { w_full.push_back(o.w); });
  REQUIRE(w_aug.size() == w_full.size());
  for (std::size_t i = 0; i < w_aug.size(); ++i)
    CHECK(max_abs(sub(w_aug[i], w_full[i])) == 0.0);  // identical code path

  CHECK(rel_err(r2.solution.b, blue_augmented_direct(glm).b) < 1e-8);

  // D = Sigma: z_2 = b_Aug
  auto exact = dense_preconditioner(glm.x, glm.sigma.to_dense());
  auto r3 = pcg_aug_full(glm, *exact, Vector(11, 0.0), Vector(3, 0.0), cfg);
  CHECK(r3.solution.iterations == 1);
  CHECK(rel_err(r3.solution.b, blue_augmented_direct(glm).b) < 1e-10);
}

TEST_CASE("pcg_aug_alt agrees with pcg_aug for the first iterations") {
  Glm glm = gls::testing::random_spd_glm(14, 4, 80.0, 321);
  auto precond = dense_preconditioner(glm.x, DenseMatrix::identity(14));
  PcgConfig cfg;
  cfg.tol_rel = 1e-14;
  cfg.max_iter = 10;

  std::vector<Vector> w_a, w_b;
  pcg_aug(glm, *precond, Vector(14, 0.0), Vector(4, 0.0), cfg, nullptr,
          [&](const PcgObservation& o) { w_a.push_back(o.w); });
  pcg_aug_alt(glm, *precond, Vector(14, 0.0), Vector(4, 0.0), cfg, nullptr,
              [&](const PcgObservation& o) { w_b.push_back(o.w); });
  const std::size_t common = std::min(w_a.size(), w_b.size());
  for (std::size_t i = 0; i < common; ++i) {
    const double scale = std::max(norm2(w_a[i]), 1e-30);
    CHECK(norm2(sub(w_a[i], w_b[i])) <= 1e-10 * std::max(1.0, scale));
  }

  // D = Sigma: one iteration
  auto exact = dense_preconditioner(glm.x, glm.sigma.to_dense());
  PcgConfig cfg2;
  auto res = pcg_aug_alt(glm, *exact, Vector(14, 0.0), Vector(4, 0.0), cfg2);
  CHECK(res.solution.iterations == 1);
  CHECK(res.trace.termination == Termination::Converged);
}

TEST_CASE("pcg_aug projects an infeasible w1 and flags it") {
  Glm glm = gls::testing::random_spd_glm(9, 2, 10.0, 11);
  auto precond = dense_preconditioner(glm.x, DenseMatrix::identity(9));
  Rng rng(3);
  Vector w1 = rng.gaussian_vector(9);
  PcgConfig cfg;
  auto res = pcg_aug(glm, *precond, w1, Vector(2, 0.0), cfg);
  CHECK(res.trace.w1_projected);
  CHECK(rel_err(res.solution.b, blue_augmented_direct(glm).b) < 1e-8);
  for (const auto& row : res.trace.rows)
    CHECK(row.dual_feas_norm <= 1e-8 * norm2(glm.y));
}

TEST_CASE("pcg_normal_equations reduces to CG on OLS and matches the oracle") {
  Rng rng(44);
  DenseMatrix x = rng.gaussian_matrix(12, 4);
  Vector y = rng.gaussian_vector(12);
  Glm glm = make_glm(y, x, SymmetricOperator::dense(DenseMatrix::identity(12)));
  PcgConfig cfg;
  cfg.tol_rel = 1e-12;
  auto res = pcg_normal_equations(glm, nullptr, cfg);
  CHECK(res.trace.termination == Termination::Converged);
  CHECK(res.solution.iterations <= 4);
  CHECK(rel_err(res.solution.b, ols_estimate(x, y).b) < 1e-10);

  Glm spd = gls::testing::random_spd_glm(12, 4, 200.0, 55);
  auto res2 = pcg_normal_equations(spd, nullptr, cfg);
  CHECK(rel_err(res2.solution.b, gls_estimate_direct(spd).b) < 1e-8);
}

TEST_CASE("pcg_normal_equations rejects singular covariance") {
  Rng rng(45);
  DenseMatrix x = rng.gaussian_matrix(6, 2);
  DenseMatrix omega = gen_spd_with_cond(4, 3.0, 8);
  Glm glm = make_glm(rng.gaussian_vector(6), x,
                     SymmetricOperator::block_zero_padded(omega, 2));
  PcgConfig cfg;
  CHECK_THROWS_AS(pcg_normal_equations(glm, nullptr, cfg), SingularCovariance);
}

TEST_CASE("eigs_of_gk: exact preconditioner gives all unit eigenvalues") {
  Glm glm = gls::testing::random_spd_glm(9, 3, 12.0, 71);
  auto precond = dense_preconditioner(glm.x, glm.sigma.to_dense());
  GkSpectrum spec = eigs_of_gk(glm, *precond);
  CHECK(spec.eigenvalues.size() == 12);
  CHECK(spec.unit_count == 12);
  CHECK(spec.condition_number == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("eigs_of_gk matches the dense GK spectrum") {
  Glm glm = gls::testing::random_spd_glm(10, 3, 30.0, 72);
  DenseMatrix d = gen_spd_with_cond(10, 6.0, 73);
  auto precond = dense_preconditioner(glm.x, d);
  GkSpectrum spec = eigs_of_gk(glm, *precond);

  DenseMatrix gk = gls::testing::dense_aug(glm) * gls::testing::dense_k(glm.x, d);
  auto dense_eigs = general_eigenvalues(gk);
  REQUIRE(dense_eigs.size() == spec.eigenvalues.size());
  Vector re;
  for (auto z : dense_eigs) {
    CHECK(std::fabs(z.imag()) < 1e-7);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  for (std::size_t i = 0; i < re.size(); ++i)
    CHECK(spec.eigenvalues[i] == doctest::Approx(re[i]).epsilon(1e-7));

  // at least 2n unit eigenvalues, via the independent dense route
  std::size_t units = 0;
  for (double v : re)
    if (std::fabs(v - 1.0) <= 1e-8) ++units;
  CHECK(units >= 2 * glm.x.cols());
}

TEST_CASE("alpha scaling moves the non-unit block exactly") {
  Glm glm = gls::testing::random_spd_glm(10, 2, 25.0, 74);
  auto precond = dense_preconditioner(glm.x, DenseMatrix::identity(10));
  GkSpectrum base = eigs_of_gk(glm, *precond);

  const double alpha = 4.0;
  DenseMatrix sig = glm.sigma.to_dense();
  sig *= alpha;
  Glm scaled = make_glm(glm.y, glm.x, SymmetricOperator::dense(sig));
  GkSpectrum spec = eigs_of_gk(scaled, *precond);

  // b is unchanged
  CHECK(rel_err(blue_augmented_direct(scaled).b, blue_augmented_direct(glm).b) < 1e-10);

  // the m-n reduced eigenvalues scale by alpha; compare after stripping the
  // 2n exact units from both sorted lists
  auto strip_units = [](const GkSpectrum& s, std::size_t count) {
    Vector out;
    std::size_t skipped = 0;
    for (double v : s.eigenvalues) {
      if (v == 1.0 && skipped < count) {
        ++skipped;
        continue;
      }
      out.push_back(v);
    }
    return out;
  };
  const std::size_t n2 = 2 * glm.x.cols();
  Vector a = strip_units(base, n2), b = strip_units(spec, n2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(b[i] == doctest::Approx(alpha * a[i]).epsilon(1e-9));
}

TEST_CASE("reduced_diagnostics kappa behaviour") {
  Glm glm = gls::testing::random_spd_glm(9, 2, 15.0, 75);
  auto exact = dense_preconditioner(glm.x, glm.sigma.to_dense());
  CHECK(reduced_diagnostics(glm, *exact).kappa == doctest::Approx(1.0).epsilon(1e-9));

  // proportional Sigma and D ratio is constant
  DenseMatrix two_eye = 2.0 * DenseMatrix::identity(9);
  Glm prop = make_glm(glm.y, glm.x, SymmetricOperator::dense(two_eye));
  auto eye_precond = dense_preconditioner(glm.x, DenseMatrix::identity(9));
  ReducedDiagnostics diag = reduced_diagnostics(prop, *eye_precond);
  CHECK(diag.kappa == doctest::Approx(1.0).epsilon(1e-10));

  auto rough = dense_preconditioner(glm.x, DenseMatrix::identity(9));
  ReducedDiagnostics d2 = reduced_diagnostics(glm, *rough);
  CHECK(d2.kappa >= 1.0);
  auto curve = d2.bound_curve(10);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] <= curve[i - 1] + 1e-12);
}

TEST_CASE("monotone Sigma-norm error along the aug iterates") {
  Glm glm = gls::testing::random_spd_glm(16, 4, 300.0, 76);
  auto precond = dense_preconditioner(glm.x, DenseMatrix::identity(16));
  const Vector w_star = blue_augmented_direct(glm).w;
  std::vector<double> errs;
  PcgConfig cfg;
  cfg.tol_rel = 1e-12;
  pcg_aug(glm, *precond, Vector(16, 0.0), Vector(4, 0.0), cfg, nullptr,
          [&](const PcgObservation& o) {
            const Vector d = sub(o.w, w_star);
            errs.push_back(dot(d, glm.sigma.apply(d)));
          });
  for (std::size_t i = 1; i < errs.size(); ++i)
    CHECK(errs[i] <= errs[i - 1] * (1.0 + 1e-10) + 1e-300);
}

TEST_CASE("finite termination with p distinct null-space eigenvalues") {
  for (std::size_t p : {2UL, 3UL, 5UL}) {
    Vector eigs(p);
    for (std::size_t i = 0; i < p; ++i) eigs[i] = 1.0 + 0.7 * static_cast<double>(i + 1);
    Glm glm = constructed_spectrum_glm(24, 4, eigs, 900 + p);
    auto precond = dense_preconditioner(glm.x, DenseMatrix::identity(24));
    PcgConfig cfg;
    cfg.tol_rel = 1e-10;
    auto res = pcg_aug(glm, *precond, Vector(24, 0.0), Vector(4, 0.0), cfg);
    CHECK(res.trace.termination == Termination::Converged);
    CHECK(res.solution.iterations <= p + 1);
    CHECK(res.trace.rows.back().aug_residual_norm <= 1e-10 * norm2(glm.y));
    CHECK(res.trace.rows.back().dual_feas_norm <= 1e-10 * norm2(glm.y));
  }
}

TEST_CASE("trace row count equals iterations plus one") {
  Glm glm = gls::testing::random_spd_glm(10, 3, 40.0, 77);
  auto precond = dense_preconditioner(glm.x, DenseMatrix::identity(10));
  PcgConfig cfg;
  cfg.tol_rel = 1e-11;
  auto res = pcg_aug(glm, *precond, Vector(10, 0.0), Vector(3, 0.0), cfg);
  CHECK(res.trace.rows.size() == res.solution.iterations + 1);
  CHECK(res.solution.iterations <= 10 - 3 + 1);
}
