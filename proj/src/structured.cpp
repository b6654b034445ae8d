#include "gls/structured.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gls/errors.hpp"

namespace gls {

namespace {

void check_restrictions(const std::vector<std::vector<std::size_t>>& restrictions,
                        std::size_t g, std::size_t n) {
  if (restrictions.size() != g)
    throw DimensionMismatch("restrictions: need one list per equation");
  for (const auto& list : restrictions) {
    for (std::size_t idx = 0; idx < list.size(); ++idx) {
      if (list[idx] >= n) throw DimensionMismatch("restrictions: index out of range");
      if (idx > 0 && list[idx] <= list[idx - 1])
        throw DimensionMismatch("restrictions: indices must be strictly increasing");
    }
  }
}

}  // namespace

std::size_t MvRglm::total_restrictions() const {
  std::size_t k = 0;
  for (const auto& list : restrictions) k += list.size();
  return k;
}

std::size_t SurModel::total_params() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.cols();
  return n;
}

RestrictedGlm make_rglm(DenseMatrix z, Vector zeta, SymmetricOperator omega,
                        DenseMatrix c, Vector gamma, bool selection) {
  if (zeta.size() != z.rows()) throw DimensionMismatch("make_rglm: zeta/Z mismatch");
  if (omega.dim() != z.rows()) throw DimensionMismatch("make_rglm: Omega dim mismatch");
  if (c.rows() != gamma.size()) throw DimensionMismatch("make_rglm: C/gamma mismatch");
  if (c.rows() > 0 && c.cols() != z.cols())
    throw DimensionMismatch("make_rglm: C column mismatch");
  if (selection) {
    DenseMatrix cct = c * c.transpose();
    if ((cct - DenseMatrix::identity(c.rows())).max_abs() != 0.0)
      throw DimensionMismatch("make_rglm: selection flag requires C C' = I exactly");
  }
  return RestrictedGlm{std::move(z), std::move(zeta), std::move(omega),
                       std::move(c),  std::move(gamma), selection};
}

Glm embed_rglm(const RestrictedGlm& rglm) {
  const std::size_t m = rglm.z.rows(), k = rglm.c.rows();
  DenseMatrix x = k ? vstack(rglm.z, rglm.c) : rglm.z;
  Vector y = rglm.zeta;
  y.insert(y.end(), rglm.gamma.begin(), rglm.gamma.end());
  SymmetricOperator sigma =
      SymmetricOperator::block_zero_padded(rglm.omega.to_dense(), k);
  (void)m;
  return make_glm(std::move(y), std::move(x), std::move(sigma));
}

MvRglm make_mvrglm(DenseMatrix z0, DenseMatrix y, DenseMatrix omega0,
                   std::vector<std::vector<std::size_t>> restrictions) {
  if (z0.rows() < z0.cols()) throw DimensionMismatch("make_mvrglm: Z0 must be tall");
  if (y.rows() != z0.rows()) throw DimensionMismatch("make_mvrglm: Y/Z0 row mismatch");
  if (omega0.rows() != y.cols() || omega0.cols() != y.cols())
    throw DimensionMismatch("make_mvrglm: Omega0 must be G x G");
  check_restrictions(restrictions, y.cols(), z0.cols());
  return MvRglm{std::move(z0), std::move(y), std::move(omega0), std::move(restrictions)};
}

Glm embed_mvrglm(const MvRglm& mv) {
  const std::size_t m0 = mv.obs(), n0 = mv.params_per_eq(), g = mv.equations();
  const std::size_t k = mv.total_restrictions();
  const std::size_t m = g * m0, n = g * n0;
  DenseMatrix x(m + k, n);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < n0; ++j)
      for (std::size_t r = 0; r < m0; ++r) x(i * m0 + r, i * n0 + j) = mv.z0(r, j);
  std::size_t row = m;
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t col : mv.restrictions[i]) x(row++, i * n0 + col) = 1.0;

  Vector y = mv.y.to_vector();
  y.resize(m + k, 0.0);

  SymmetricOperator sigma = SymmetricOperator::block_zero_padded(
      kronecker(mv.omega0, DenseMatrix::identity(m0)), k);
  return make_glm(std::move(y), std::move(x), std::move(sigma));
}

SurModel make_sur(std::vector<DenseMatrix> blocks, DenseMatrix y, DenseMatrix sigma0) {
  if (blocks.empty()) throw DimensionMismatch("make_sur: need at least one block");
  if (y.cols() != blocks.size()) throw DimensionMismatch("make_sur: Y/blocks mismatch");
  for (const auto& b : blocks)
    if (b.rows() != y.rows()) throw DimensionMismatch("make_sur: block row mismatch");
  if (sigma0.rows() != blocks.size() || sigma0.cols() != blocks.size())
    throw DimensionMismatch("make_sur: Sigma0 must be G x G");
  return SurModel{std::move(blocks), std::move(y), std::move(sigma0)};
}

Glm embed_sur(const SurModel& sur) {
  const std::size_t big_m = sur.obs(), g = sur.equations(), n = sur.total_params();
  DenseMatrix x(big_m * g, n);
  std::size_t col0 = 0;
  for (std::size_t i = 0; i < g; ++i) {
    const DenseMatrix& b = sur.blocks[i];
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t r = 0; r < big_m; ++r) x(i * big_m + r, col0 + j) = b(r, j);
    col0 += b.cols();
  }
  return make_glm(sur.y.to_vector(), std::move(x),
                  SymmetricOperator::kronecker_identity(sur.sigma0, big_m));
}

std::pair<MvRglm, ReductionRecord> mv_reduce(const MvRglm& mv) {
  QrThin qr = qr_thin(mv.z0);
  ReductionRecord rec;
  rec.original_rows = mv.obs();
  rec.reduced_rows = mv.params_per_eq();
  rec.transform = qr.q;
  rec.rank = mv.params_per_eq();
  MvRglm reduced{qr.r, qr.q.transpose() * mv.y, mv.omega0, mv.restrictions};
  return {std::move(reduced), std::move(rec)};
}

std::pair<SurModel, ReductionRecord> sur_reduce(const SurModel& sur, double rank_tol) {
  const std::size_t big_m = sur.obs(), g = sur.equations();
  DenseMatrix w = sur.blocks[0];
  for (std::size_t i = 1; i < g; ++i) w = hstack(w, sur.blocks[i]);

  // Numerical rank from the singular values of W via W'W.  The Gram route
  // floors the detectable eigenvalue at O(eps * lambda_max), so the
  // requested singular-value cutoff is clamped there.
  SymEig eig = sym_eig(w.transpose() * w);
  const std::size_t p = eig.eigenvalues.size();
  const double lam_max = std::max(eig.eigenvalues[p - 1], 0.0);
  const double smax = std::sqrt(lam_max);
  const double lam_floor = 64.0 * std::numeric_limits<double>::epsilon() * lam_max;
  const double lam_cut = std::max(rank_tol * smax * (rank_tol * smax), lam_floor);
  std::size_t q = 0;
  for (double lam : eig.eigenvalues)
    if (lam > lam_cut) ++q;

  ReductionRecord rec;
  rec.original_rows = big_m;
  rec.rank = q;
  if (q >= big_m) {
    rec.reduced_rows = big_m;
    rec.transform = DenseMatrix::identity(big_m);
    return {sur, std::move(rec)};
  }

  // orthonormal basis of range(W): W V_q scaled by 1/sigma, re-orthonormalized
  DenseMatrix basis(big_m, q);
  for (std::size_t j = 0; j < q; ++j) {
    const std::size_t idx = p - 1 - j;
    Vector col = w.apply(eig.eigenvectors.col(idx));
    const double s = std::sqrt(eig.eigenvalues[idx]);
    for (double& v : col) v /= s;
    basis.set_col(j, col);
  }
  basis = qr_thin(basis).q;

  SurModel reduced;
  reduced.sigma0 = sur.sigma0;
  reduced.y = basis.transpose() * sur.y;
  reduced.blocks.reserve(g);
  for (const auto& b : sur.blocks) reduced.blocks.push_back(basis.transpose() * b);
  rec.reduced_rows = q;
  rec.transform = basis;
  return {std::move(reduced), std::move(rec)};
}

namespace {

class RglmPreconditioner final : public IndefinitePreconditioner {
 public:
  RglmPreconditioner(const RestrictedGlm& rglm, const DenseMatrix& d_z,
                     const DenseMatrix& d_c)
      : m_(rglm.z.rows()), k_(rglm.c.rows()), n_(rglm.z.cols()) {
    if (d_z.rows() != m_ || d_z.cols() != m_)
      throw DimensionMismatch("rglm_preconditioner: D_Z must be m x m");
    if (d_c.rows() != k_ || d_c.cols() != k_)
      throw DimensionMismatch("rglm_preconditioner: D_C must be k x k");
    DenseMatrix lz, lc;
    try {
      lz = cholesky(d_z);
      if (k_) lc = cholesky(d_c);
    } catch (const NotPositiveDefinite&) {
      throw SingularD("rglm_preconditioner: auxiliary blocks must be positive definite");
    }
    ez_ = chol_solve(lz, rglm.z);
    dz_inv_cols_ = chol_solve(lz, DenseMatrix::identity(m_));
    if (k_) {
      ec_ = chol_solve(lc, rglm.c);
      dc_inv_cols_ = chol_solve(lc, DenseMatrix::identity(k_));
    }
    DenseMatrix gram = rglm.z.transpose() * ez_;
    if (k_) gram += rglm.c.transpose() * ec_;
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i < j; ++i) {
        const double v = 0.5 * (gram(i, j) + gram(j, i));
        gram(i, j) = gram(j, i) = v;
      }
    try {
      gram_chol_ = cholesky(gram);
    } catch (const NotPositiveDefinite&) {
      throw SingularProjectedGram("rglm_preconditioner: stacked Gram is singular");
    }
    counters_.factorizations = 1;
    counters_.factor_multiplies = m_ * m_ * m_ / 3 + k_ * k_ * k_ / 3 + n_ * n_ * n_ / 3;
  }

  std::size_t rows() const override { return m_ + k_; }
  std::size_t params() const override { return n_; }

 protected:
  Vector xstar_t_impl(const Vector& xi) const override {
    return chol_solve(gram_chol_, projected_rhs(xi));
  }

  Vector pi_impl(const Vector& xi) const override {
    const Vector t = chol_solve(gram_chol_, projected_rhs(xi));
    Vector out(m_ + k_);
    const Vector xz(xi.begin(), xi.begin() + m_);
    Vector top = dz_inv_cols_.apply(xz);
    const Vector corr_z = ez_.apply(t);
    for (std::size_t i = 0; i < m_; ++i) out[i] = top[i] - corr_z[i];
    if (k_) {
      const Vector xc(xi.begin() + m_, xi.end());
      Vector bot = dc_inv_cols_.apply(xc);
      const Vector corr_c = ec_.apply(t);
      for (std::size_t i = 0; i < k_; ++i) out[m_ + i] = bot[i] - corr_c[i];
    }
    return out;
  }

  Vector xstar_impl(const Vector& v) const override {
    const Vector t = chol_solve(gram_chol_, v);
    Vector out(m_ + k_);
    const Vector top = ez_.apply(t);
    std::copy(top.begin(), top.end(), out.begin());
    if (k_) {
      const Vector bot = ec_.apply(t);
      std::copy(bot.begin(), bot.end(), out.begin() + m_);
    }
    return out;
  }

  std::size_t pi_cost() const override {
    return m_ * m_ + k_ * k_ + 2 * (m_ + k_) * n_ + n_ * n_;
  }
  std::size_t xstar_t_cost() const override { return (m_ + k_) * n_ + n_ * n_; }
  std::size_t xstar_cost() const override { return (m_ + k_) * n_ + n_ * n_; }

 private:
  Vector projected_rhs(const Vector& xi) const {
    const Vector xz(xi.begin(), xi.begin() + m_);
    Vector rhs = ez_.apply_transpose(xz);
    if (k_) {
      const Vector xc(xi.begin() + m_, xi.end());
      const Vector rc = ec_.apply_transpose(xc);
      for (std::size_t i = 0; i < n_; ++i) rhs[i] += rc[i];
    }
    return rhs;
  }

  std::size_t m_, k_, n_;
  DenseMatrix ez_, ec_;              // D_Z^-1 Z, D_C^-1 C
  DenseMatrix dz_inv_cols_, dc_inv_cols_;
  DenseMatrix gram_chol_;
};

// Shared skeleton for the two block operators: per-equation thin QR factors
// plus per-row scale weights (D^-1/2 diagonal).
class BlockQrPreconditioner : public IndefinitePreconditioner {
 public:
  std::size_t rows() const override { return total_rows_; }
  std::size_t params() const override { return total_params_; }

 protected:
  struct Block {
    DenseMatrix q;       // rows_i x n_i
    DenseMatrix r;       // n_i x n_i
    std::vector<std::size_t> row_index;  // embedding rows of this block
    Vector inv_sqrt_d;   // per-row 1/sqrt(d)
    std::size_t param0;  // first parameter index
  };

  void finalize() {
    pi_cost_ = xstar_t_cost_ = xstar_cost_ = 0;
    for (const auto& b : blocks_) {
      const std::size_t r = b.row_index.size(), n = b.r.rows();
      pi_cost_ += 2 * r * n + 2 * r;
      xstar_t_cost_ += r * n + n * (n + 1) / 2 + r;
      xstar_cost_ += r * n + n * (n + 1) / 2 + r;
    }
    counters_.factorizations = blocks_.size();
  }

  Vector pi_impl(const Vector& xi) const override {
    Vector out(total_rows_, 0.0);
    Vector local, proj;
    for (const auto& b : blocks_) {
      gather(b, xi, local);
      proj = b.q.apply(b.q.apply_transpose(local));
      for (std::size_t i = 0; i < local.size(); ++i) local[i] -= proj[i];
      scatter(b, local, out);
    }
    return out;
  }

  Vector xstar_t_impl(const Vector& xi) const override {
    Vector out(total_params_, 0.0);
    Vector local;
    for (const auto& b : blocks_) {
      gather(b, xi, local);
      const Vector t = tri_solve(b.r, b.q.apply_transpose(local));
      std::copy(t.begin(), t.end(), out.begin() + b.param0);
    }
    return out;
  }

  Vector xstar_impl(const Vector& v) const override {
    Vector out(total_rows_, 0.0);
    Vector local;
    for (const auto& b : blocks_) {
      const std::size_t n = b.r.rows();
      const Vector vi(v.begin() + b.param0, v.begin() + b.param0 + n);
      local = b.q.apply(tri_solve(b.r, vi, true));
      scatter(b, local, out);
    }
    return out;
  }

  std::size_t pi_cost() const override { return pi_cost_; }
  std::size_t xstar_t_cost() const override { return xstar_t_cost_; }
  std::size_t xstar_cost() const override { return xstar_cost_; }

  // scaled gather: local = D^-1/2 xi restricted to the block rows
  void gather(const Block& b, const Vector& xi, Vector& local) const {
    local.resize(b.row_index.size());
    for (std::size_t i = 0; i < local.size(); ++i)
      local[i] = xi[b.row_index[i]] * b.inv_sqrt_d[i];
  }
  void scatter(const Block& b, const Vector& local, Vector& out) const {
    for (std::size_t i = 0; i < local.size(); ++i)
      out[b.row_index[i]] = local[i] * b.inv_sqrt_d[i];
  }

  std::vector<Block> blocks_;
  std::size_t total_rows_ = 0;
  std::size_t total_params_ = 0;

 private:
  std::size_t pi_cost_ = 0, xstar_t_cost_ = 0, xstar_cost_ = 0;
};

class MvRglmPreconditioner final : public BlockQrPreconditioner {
 public:
  MvRglmPreconditioner(const MvRglm& mv, const Vector& z_scale, const Vector& c_scale) {
    const std::size_t m0 = mv.obs(), n0 = mv.params_per_eq(), g = mv.equations();
    if (z_scale.size() != g || c_scale.size() != g)
      throw DimensionMismatch("mvrglm_preconditioner: need one scale per equation");
    for (std::size_t i = 0; i < g; ++i)
      if (z_scale[i] <= 0.0 || c_scale[i] <= 0.0)
        throw SingularD("mvrglm_preconditioner: scales must be positive");
    total_rows_ = g * m0 + mv.total_restrictions();
    total_params_ = g * n0;

    std::size_t c_row = g * m0;
    blocks_.reserve(g);
    for (std::size_t i = 0; i < g; ++i) {
      const auto& restr = mv.restrictions[i];
      const std::size_t ki = restr.size();
      const double wz = 1.0 / std::sqrt(z_scale[i]);
      const double wc = 1.0 / std::sqrt(c_scale[i]);
      DenseMatrix stacked(m0 + ki, n0);
      for (std::size_t j = 0; j < n0; ++j)
        for (std::size_t r = 0; r < m0; ++r) stacked(r, j) = mv.z0(r, j) * wz;
      for (std::size_t r = 0; r < ki; ++r) stacked(m0 + r, restr[r]) = wc;

      Block b;
      try {
        QrThin qr = qr_thin(stacked);
        b.q = std::move(qr.q);
        b.r = std::move(qr.r);
      } catch (const RankDeficient&) {
        throw RankDeficient("mvrglm_preconditioner: stacked block " + std::to_string(i) +
                            " is rank deficient");
      }
      b.row_index.resize(m0 + ki);
      b.inv_sqrt_d.resize(m0 + ki);
      for (std::size_t r = 0; r < m0; ++r) {
        b.row_index[r] = i * m0 + r;
        b.inv_sqrt_d[r] = wz;
      }
      for (std::size_t r = 0; r < ki; ++r) {
        b.row_index[m0 + r] = c_row + r;
        b.inv_sqrt_d[m0 + r] = wc;
      }
      c_row += ki;
      b.param0 = i * n0;
      blocks_.push_back(std::move(b));
    }
    finalize();
  }
};

class SurPreconditioner final : public BlockQrPreconditioner {
 public:
  SurPreconditioner(const SurModel& sur, const Vector& block_scale) {
    const std::size_t m0 = sur.obs(), g = sur.equations();
    if (block_scale.size() != g)
      throw DimensionMismatch("sur_preconditioner: need one scale per block");
    total_rows_ = g * m0;
    total_params_ = sur.total_params();

    std::size_t param0 = 0;
    blocks_.reserve(g);
    for (std::size_t i = 0; i < g; ++i) {
      if (block_scale[i] <= 0.0)
        throw SingularD("sur_preconditioner: scales must be positive");
      const double w = 1.0 / std::sqrt(block_scale[i]);
      Block b;
      try {
        // factor the scaled block D^-1/2 X_i, consistent with the scaled
        // gather/scatter of the applies
        DenseMatrix scaled = sur.blocks[i];
        scaled *= w;
        QrThin qr = qr_thin(scaled);
        b.q = std::move(qr.q);
        b.r = std::move(qr.r);
      } catch (const RankDeficient&) {
        throw RankDeficient("sur_preconditioner: block " + std::to_string(i) +
                            " is rank deficient");
      }
      b.row_index.resize(m0);
      b.inv_sqrt_d.assign(m0, w);
      for (std::size_t r = 0; r < m0; ++r) b.row_index[r] = i * m0 + r;
      b.param0 = param0;
      param0 += sur.blocks[i].cols();
      blocks_.push_back(std::move(b));
    }
    finalize();
  }
};

}  // namespace

std::unique_ptr<IndefinitePreconditioner> rglm_preconditioner(const RestrictedGlm& rglm,
                                                              const DenseMatrix& d_z,
                                                              const DenseMatrix& d_c) {
  return std::make_unique<RglmPreconditioner>(rglm, d_z, d_c);
}

std::unique_ptr<IndefinitePreconditioner> rglm_preconditioner(const RestrictedGlm& rglm) {
  return rglm_preconditioner(rglm, DenseMatrix::identity(rglm.z.rows()),
                             DenseMatrix::identity(rglm.c.rows()));
}

std::unique_ptr<IndefinitePreconditioner> mvrglm_preconditioner(const MvRglm& mv,
                                                                const Vector& z_scale,
                                                                const Vector& c_scale) {
  return std::make_unique<MvRglmPreconditioner>(mv, z_scale, c_scale);
}

std::unique_ptr<IndefinitePreconditioner> mvrglm_preconditioner(const MvRglm& mv) {
  const Vector ones(mv.equations(), 1.0);
  return mvrglm_preconditioner(mv, ones, ones);
}

std::unique_ptr<IndefinitePreconditioner> sur_preconditioner(const SurModel& sur,
                                                             const Vector& block_scale) {
  return std::make_unique<SurPreconditioner>(sur, block_scale);
}

std::unique_ptr<IndefinitePreconditioner> sur_preconditioner(const SurModel& sur) {
  return sur_preconditioner(sur, Vector(sur.equations(), 1.0));
}

}  // namespace gls
