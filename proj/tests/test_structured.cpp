#include "gls/structured.hpp"

#include <cmath>

#include "doctest.h"
#include "gls/errors.hpp"
#include "gls/experiments.hpp"
#include "gls/pcg.hpp"
#include "gls/rng.hpp"
#include "support.hpp"

using namespace gls;
using gls::testing::rel_err;

namespace {

// Probe-level agreement between an operator and the dense Eq. (12) pair.
void check_against_dense(const IndefinitePreconditioner& op, const DenseMatrix& x,
                         const DenseMatrix& d, double tol, std::size_t probes = 20) {
  const auto pair = gls::testing::form_eq12(x, d);
  Rng rng(2718);
  for (std::size_t rep = 0; rep < probes; ++rep) {
    Vector xi = rng.gaussian_vector(x.rows());
    CHECK(max_abs(sub(op.apply_pi(xi), pair.pi.apply(xi))) <= tol);
    CHECK(max_abs(sub(op.apply_xstar_t(xi), pair.xstar.apply_transpose(xi))) <= tol);
    Vector v = rng.gaussian_vector(x.cols());
    CHECK(max_abs(sub(op.apply_xstar(v), pair.xstar.apply(v))) <= tol);
  }
}

// The four operator invariants, via the known D action.
void check_invariants(const IndefinitePreconditioner& op, const DenseMatrix& x,
                      const DenseMatrix& d) {
  Rng rng(314);
  for (int rep = 0; rep < 5; ++rep) {
    Vector xi = rng.gaussian_vector(x.cols());
    // X' X* v = v
    CHECK(rel_err(x.apply_transpose(op.apply_xstar(xi)), xi) < 1e-10);
    // pseudo-inverse identity X*'(X xi) = xi
    CHECK(rel_err(op.apply_xstar_t(x.apply(xi)), xi) < 1e-10);
    // Pi X xi = 0
    CHECK(norm2(op.apply_pi(x.apply(xi))) <= 1e-10 * std::max(1.0, norm2(x.apply(xi))));
    // oblique idempotency Pi D Pi v = Pi v
    Vector v = rng.gaussian_vector(x.rows());
    const Vector pv = op.apply_pi(v);
    CHECK(rel_err(op.apply_pi(d.apply(pv)), pv) < 1e-10);
    // X*' D Pi v = 0
    CHECK(norm2(op.apply_xstar_t(d.apply(pv))) <= 1e-10 * std::max(1.0, norm2(pv)));
  }
}

}  // namespace

TEST_CASE("dense_preconditioner with D = I is the orthogonal projector pair") {
  DenseMatrix x = seeded_gaussian(8, 3, 0.0, 1.0, 1);
  auto op = dense_preconditioner(x, DenseMatrix::identity(8));
  QrFull qr = qr_full(x);
  DenseMatrix pi_expect = qr.q_null * qr.q_null.transpose();
  Rng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    Vector v = rng.gaussian_vector(8);
    CHECK(max_abs(sub(op->apply_pi(v), pi_expect.apply(v))) < 1e-12);
  }
}

TEST_CASE("dense_preconditioner agrees with explicit Eq. 12 formation") {
  DenseMatrix x = seeded_gaussian(8, 3, 0.0, 1.0, 7);
  DenseMatrix d = gen_spd_with_cond(8, 9.0, 8);
  auto op = dense_preconditioner(x, d);
  check_against_dense(*op, x, d, 1e-12);
  check_invariants(*op, x, d);
}

TEST_CASE("dense_preconditioner error paths") {
  DenseMatrix x = seeded_gaussian(6, 2, 0.0, 1.0, 9);
  CHECK_THROWS_AS(dense_preconditioner(x, DenseMatrix(6, 6)), SingularD);
  // a column-deficient X makes the projected Gram X'D^-1X singular
  DenseMatrix bad = x;
  bad.set_col(1, bad.col(0));
  CHECK_THROWS_AS(dense_preconditioner(bad, DenseMatrix::identity(6)),
                  SingularProjectedGram);
}

TEST_CASE("rglm_preconditioner matches the dense stacked operator") {
  Rng rng(31);
  const std::size_t m = 7, n = 4, k = 2;
  DenseMatrix z = rng.gaussian_matrix(m, n);
  DenseMatrix c = rng.gaussian_matrix(k, n);
  DenseMatrix omega = gen_spd_with_cond(m, 5.0, 32);
  RestrictedGlm rglm = make_rglm(z, rng.gaussian_vector(m),
                                 SymmetricOperator::dense(omega), c, Vector(k, 0.0));
  DenseMatrix d_z = gen_spd_with_cond(m, 3.0, 33);
  DenseMatrix d_c = gen_spd_with_cond(k, 2.0, 34);
  auto op = rglm_preconditioner(rglm, d_z, d_c);

  DenseMatrix x = vstack(z, c);
  DenseMatrix d(m + k, m + k);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) d(i, j) = d_z(i, j);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) d(m + i, m + j) = d_c(i, j);
  check_against_dense(*op, x, d, 1e-12);
  check_invariants(*op, x, d);
}

TEST_CASE("rglm_preconditioner shrinkage identity for selection constraints") {
  Rng rng(35);
  const std::size_t m = 9, n = 4, k = 2;
  DenseMatrix z = rng.gaussian_matrix(m, n);
  DenseMatrix c(k, n);
  c(0, 1) = 1.0;
  c(1, 3) = 1.0;
  RestrictedGlm rglm = make_rglm(z, rng.gaussian_vector(m),
                                 SymmetricOperator::dense(DenseMatrix::identity(m)), c,
                                 Vector(k, 0.0), true);
  auto op = rglm_preconditioner(rglm);

  // X*'(r; 0) = (Z'Z + C'C)^-1 Z'r: one ridge-like shrinkage regression
  Vector r = rng.gaussian_vector(m);
  Vector stacked = r;
  stacked.resize(m + k, 0.0);
  const Vector got = op->apply_xstar_t(stacked);
  DenseMatrix shrink = z.transpose() * z + c.transpose() * c;
  const Vector expect = lu_solve(shrink, z.apply_transpose(r));
  CHECK(rel_err(got, expect) < 1e-11);
}

TEST_CASE("rglm_preconditioner with no constraints reduces to the dense operator") {
  Rng rng(36);
  const std::size_t m = 8, n = 3;
  DenseMatrix z = rng.gaussian_matrix(m, n);
  RestrictedGlm rglm = make_rglm(z, rng.gaussian_vector(m),
                                 SymmetricOperator::dense(DenseMatrix::identity(m)),
                                 DenseMatrix(0, n), Vector{});
  auto op = rglm_preconditioner(rglm);
  check_against_dense(*op, z, DenseMatrix::identity(m), 1e-12);
}

TEST_CASE("mvrglm_preconditioner matches the dense stacked formation") {
  Rng rng(41);
  const std::size_t m0 = 5, n0 = 3, g = 2;
  DenseMatrix z0 = rng.gaussian_matrix(m0, n0);
  DenseMatrix y = rng.gaussian_matrix(m0, g);
  DenseMatrix omega0 = gen_spd_with_cond(g, 2.0, 42);
  MvRglm mv = make_mvrglm(z0, y, omega0, {{}, {1}});

  auto op = mvrglm_preconditioner(mv);
  CHECK(op->counters().factorizations == g);

  const Glm emb = embed_mvrglm(mv);
  check_against_dense(*op, emb.x, DenseMatrix::identity(emb.x.rows()), 1e-11);
  check_invariants(*op, emb.x, DenseMatrix::identity(emb.x.rows()));

  // scaled auxiliaries
  const Vector z_scale{2.0, 0.5}, c_scale{1.0, 3.0};
  auto scaled = mvrglm_preconditioner(mv, z_scale, c_scale);
  Vector diag(emb.x.rows(), 0.0);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t r = 0; r < m0; ++r) diag[i * m0 + r] = z_scale[i];
  diag[g * m0] = c_scale[1];  // the single restriction row belongs to eq 2
  check_against_dense(*scaled, emb.x, DenseMatrix::diagonal(diag), 1e-11);
}

TEST_CASE("mvrglm_preconditioner with no restrictions projects per block") {
  Rng rng(43);
  DenseMatrix z0 = rng.gaussian_matrix(6, 2);
  DenseMatrix y = rng.gaussian_matrix(6, 2);
  MvRglm mv = make_mvrglm(z0, y, DenseMatrix::identity(2), {{}, {}});
  auto op = mvrglm_preconditioner(mv);
  // Pi annihilates per-block range(Z0)
  Vector v(12, 0.0);
  Vector zcol = z0.col(0);
  std::copy(zcol.begin(), zcol.end(), v.begin() + 6);  // second block
  CHECK(norm2(op->apply_pi(v)) <= 1e-10 * norm2(v));
}

TEST_CASE("sur_preconditioner blocks act as per-equation OLS") {
  Rng rng(51);
  const std::size_t m0 = 8, g = 3;
  std::vector<DenseMatrix> blocks;
  for (std::size_t i = 0; i < g; ++i) blocks.push_back(rng.gaussian_matrix(m0, 2 + i % 2));
  DenseMatrix y = rng.gaussian_matrix(m0, g);
  SurModel sur = make_sur(blocks, y, gen_spd_with_cond(g, 3.0, 52));
  auto op = sur_preconditioner(sur);
  CHECK(op->counters().factorizations == g);

  // block i of X*' xi is the OLS estimator of xi_i on X_i; Pi gives the
  // OLS residual
  Vector xi = rng.gaussian_vector(m0 * g);
  const Vector est = op->apply_xstar_t(xi);
  const Vector res = op->apply_pi(xi);
  std::size_t off = 0;
  for (std::size_t i = 0; i < g; ++i) {
    const Vector xi_i(xi.begin() + i * m0, xi.begin() + (i + 1) * m0);
    const GlsSolution ols = ols_estimate(sur.blocks[i], xi_i);
    const Vector est_i(est.begin() + off, est.begin() + off + sur.blocks[i].cols());
    CHECK(rel_err(est_i, ols.b) < 1e-10);
    const Vector res_i(res.begin() + i * m0, res.begin() + (i + 1) * m0);
    const Vector expect = sub(xi_i, sur.blocks[i].apply(ols.b));
    CHECK(rel_err(res_i, expect) < 1e-10);
    off += sur.blocks[i].cols();
  }

  // probe with every component in range(X_i) is annihilated
  Vector in_range;
  for (std::size_t i = 0; i < g; ++i) {
    const Vector v = sur.blocks[i].apply(Vector(sur.blocks[i].cols(), 1.0));
    in_range.insert(in_range.end(), v.begin(), v.end());
  }
  CHECK(norm2(op->apply_pi(in_range)) <= 1e-10 * norm2(in_range));

  // dense equivalence on the stacked embedding
  const Glm emb = embed_sur(sur);
  check_against_dense(*op, emb.x, DenseMatrix::identity(emb.x.rows()), 1e-11);
}

TEST_CASE("sur_preconditioner with one block equals the dense operator") {
  Rng rng(53);
  std::vector<DenseMatrix> blocks{rng.gaussian_matrix(7, 3)};
  SurModel sur = make_sur(blocks, rng.gaussian_matrix(7, 1), DenseMatrix::identity(1));
  auto op = sur_preconditioner(sur);
  check_against_dense(*op, blocks[0], DenseMatrix::identity(7), 1e-11);
}

TEST_CASE("sur_preconditioner with per-block scales matches the diagonal-D operator") {
  Rng rng(54);
  const std::size_t m0 = 6, g = 3;
  std::vector<DenseMatrix> blocks;
  for (std::size_t i = 0; i < g; ++i) blocks.push_back(rng.gaussian_matrix(m0, 2));
  SurModel sur = make_sur(blocks, rng.gaussian_matrix(m0, g), gen_spd_with_cond(g, 2.0, 55));
  const Vector scales{2.79, 0.4, 1.3};
  auto op = sur_preconditioner(sur, scales);
  const Glm emb = embed_sur(sur);
  Vector diag(emb.x.rows());
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t r = 0; r < m0; ++r) diag[i * m0 + r] = scales[i];
  DenseMatrix d = DenseMatrix::diagonal(diag);
  check_against_dense(*op, emb.x, d, 1e-11);
  check_invariants(*op, emb.x, d);
}

TEST_CASE("mv_reduce preserves the estimator and shrinks rows") {
  Rng rng(61);
  const std::size_t m0 = 20, n0 = 4, g = 2;
  DenseMatrix z0 = rng.gaussian_matrix(m0, n0);
  DenseMatrix y = rng.gaussian_matrix(m0, g);
  DenseMatrix omega0 = gen_spd_with_cond(g, 4.0, 62);
  MvRglm mv = make_mvrglm(z0, y, omega0, {{1}, {0, 2}});

  auto [reduced, rec] = mv_reduce(mv);
  CHECK(rec.original_rows == m0);
  CHECK(rec.reduced_rows == n0);
  CHECK(reduced.obs() == n0);
  // row count of the embedding drops from GM + k to GN + k
  CHECK(embed_mvrglm(mv).x.rows() == g * m0 + 3);
  CHECK(embed_mvrglm(reduced).x.rows() == g * n0 + 3);

  const Vector b_full = blue_augmented_direct(embed_mvrglm(mv)).b;
  const Vector b_red = blue_augmented_direct(embed_mvrglm(reduced)).b;
  CHECK(rel_err(b_red, b_full) < 1e-10);

  // triangular Z0 reduces to itself up to signs
  DenseMatrix tri(3, 3);
  tri(0, 0) = 2.0;
  tri(0, 1) = 1.0;
  tri(1, 1) = -3.0;
  tri(2, 2) = 0.5;
  tri(0, 2) = 0.25;
  MvRglm trimv = make_mvrglm(tri, rng.gaussian_matrix(3, 1), DenseMatrix::identity(1), {{}});
  auto [tred, trec] = mv_reduce(trimv);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(std::fabs(std::fabs(tred.z0(i, j)) - std::fabs(tri(i, j))) < 1e-12);
}

TEST_CASE("sur_reduce rank cases") {
  Rng rng(71);
  const std::size_t m0 = 12;
  DenseMatrix shared = rng.gaussian_matrix(m0, 3);

  // identical blocks: q = 3
  SurModel same = make_sur({shared, shared}, rng.gaussian_matrix(m0, 2),
                           gen_spd_with_cond(2, 2.0, 72));
  auto [same_red, same_rec] = sur_reduce(same);
  CHECK(same_rec.rank == 3);
  CHECK(same_red.obs() == 3);
  DenseMatrix w_same = hstack(shared, shared);
  CHECK(same_rec.rank == gls::testing::brute_force_rank(w_same));

  // disjoint column spaces: q = sum of widths
  DenseMatrix a = rng.gaussian_matrix(m0, 2), b = rng.gaussian_matrix(m0, 3);
  SurModel disjoint = make_sur({a, b}, rng.gaussian_matrix(m0, 2),
                               gen_spd_with_cond(2, 2.0, 73));
  auto [dis_red, dis_rec] = sur_reduce(disjoint);
  CHECK(dis_rec.rank == 5);
  CHECK(dis_rec.rank == gls::testing::brute_force_rank(hstack(a, b)));

  // q = M: reduction is a no-op
  DenseMatrix c = rng.gaussian_matrix(4, 2), d = rng.gaussian_matrix(4, 2);
  SurModel full = make_sur({c, d}, rng.gaussian_matrix(4, 2),
                           gen_spd_with_cond(2, 2.0, 74));
  auto [full_red, full_rec] = sur_reduce(full);
  CHECK(full_rec.rank == 4);
  CHECK(full_red.obs() == 4);
  CHECK((full_red.blocks[0] - c).max_abs() == 0.0);
}

TEST_CASE("sur_reduce preserves the GLS estimator") {
  Rng rng(75);
  const std::size_t m0 = 15, g = 2;
  std::vector<DenseMatrix> blocks{rng.gaussian_matrix(m0, 2), rng.gaussian_matrix(m0, 3)};
  SurModel sur = make_sur(blocks, rng.gaussian_matrix(m0, g),
                          gen_spd_with_cond(g, 6.0, 76));
  auto [reduced, rec] = sur_reduce(sur);
  CHECK(rec.rank == 5);
  const Vector b_full = blue_augmented_direct(embed_sur(sur)).b;
  const Vector b_red = blue_augmented_direct(embed_sur(reduced)).b;
  CHECK(rel_err(b_red, b_full) < 1e-9);
}

TEST_CASE("cost counters: factorizations once, applies scale with G") {
  Rng rng(81);
  const std::size_t m0 = 10;
  auto build = [&](std::size_t g) {
    std::vector<DenseMatrix> blocks;
    Rng local(81);
    for (std::size_t i = 0; i < g; ++i) blocks.push_back(local.gaussian_matrix(m0, 3));
    return make_sur(blocks, DenseMatrix(m0, g), gen_spd_with_cond(g, 2.0, 82));
  };
  SurModel small = build(2), big = build(4);
  auto op_small = sur_preconditioner(small);
  auto op_big = sur_preconditioner(big);
  CHECK(op_small->counters().factorizations == 2);
  CHECK(op_big->counters().factorizations == 4);

  Vector v_small(m0 * 2, 1.0), v_big(m0 * 4, 1.0);
  op_small->apply_pi(v_small);
  op_big->apply_pi(v_big);
  const auto rep_small = cost_counters(*op_small);
  const auto rep_big = cost_counters(*op_big);
  // doubling G doubles the per-apply multiply count (same widths)
  CHECK(rep_big.multiplies_per_apply ==
        doctest::Approx(2.0 * rep_small.multiplies_per_apply).epsilon(0.05));

  // the dense operator on the same embedding costs strictly more per apply
  const Glm emb = embed_sur(big);
  auto dense_op = dense_preconditioner(emb.x, DenseMatrix::identity(emb.x.rows()));
  dense_op->apply_pi(Vector(emb.x.rows(), 1.0));
  CHECK(cost_counters(*dense_op).multiplies_per_apply > rep_big.multiplies_per_apply);
}

TEST_CASE("pcg_aug with the RGLM operator honors constraints at convergence") {
  Rng rng(91);
  const std::size_t m = 14, n = 5, k = 2;
  DenseMatrix z = rng.gaussian_matrix(m, n);
  DenseMatrix c(k, n);
  c(0, 0) = 1.0;
  c(1, 2) = 1.0;
  DenseMatrix omega = gen_spd_with_cond(m, 30.0, 92);
  RestrictedGlm rglm = make_rglm(z, rng.gaussian_vector(m),
                                 SymmetricOperator::dense(omega), c, Vector(k, 0.0), true);
  Glm glm = embed_rglm(rglm);
  auto op = rglm_preconditioner(rglm);
  PcgConfig cfg;
  cfg.tol_rel = 1e-12;
  auto res = pcg_aug(glm, *op, Vector(m + k, 0.0), Vector(n, 0.0), cfg);
  CHECK(res.trace.termination == Termination::Converged);
  CHECK(norm2(c.apply(res.solution.b)) <= 1e-8 * norm2(res.solution.b));
  const Vector oracle = gls::testing::constrained_ls_nullspace(z, rglm.zeta, omega, c);
  CHECK(rel_err(res.solution.b, oracle) < 1e-8);
}

TEST_CASE("restriction validation") {
  Rng rng(95);
  DenseMatrix z0 = rng.gaussian_matrix(5, 3);
  DenseMatrix y = rng.gaussian_matrix(5, 2);
  CHECK_THROWS_AS(make_mvrglm(z0, y, DenseMatrix::identity(2), {{3}, {}}),
                  DimensionMismatch);
  CHECK_THROWS_AS(make_mvrglm(z0, y, DenseMatrix::identity(2), {{1, 1}, {}}),
                  DimensionMismatch);
}
