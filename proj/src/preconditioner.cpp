#include "gls/preconditioner.hpp"

#include <cmath>

#include "gls/errors.hpp"

namespace gls {

Vector IndefinitePreconditioner::apply_pi(const Vector& xi) const {
  if (xi.size() != rows()) throw DimensionMismatch("apply_pi: size mismatch");
  ++counters_.pi_applies;
  counters_.apply_multiplies += pi_cost();
  return pi_impl(xi);
}

Vector IndefinitePreconditioner::apply_xstar_t(const Vector& xi) const {
  if (xi.size() != rows()) throw DimensionMismatch("apply_xstar_t: size mismatch");
  ++counters_.xstar_t_applies;
  counters_.apply_multiplies += xstar_t_cost();
  return xstar_t_impl(xi);
}

Vector IndefinitePreconditioner::apply_xstar(const Vector& v) const {
  if (v.size() != params()) throw DimensionMismatch("apply_xstar: size mismatch");
  ++counters_.xstar_applies;
  counters_.apply_multiplies += xstar_cost();
  return xstar_impl(v);
}

void IndefinitePreconditioner::reset_apply_counters() const {
  counters_.pi_applies = 0;
  counters_.xstar_t_applies = 0;
  counters_.xstar_applies = 0;
  counters_.apply_multiplies = 0;
}

CostReport cost_counters(const IndefinitePreconditioner& precond) {
  const CostCounters& c = precond.counters();
  CostReport r;
  r.factorizations = c.factorizations;
  r.factor_multiplies = c.factor_multiplies;
  r.total_applies = c.pi_applies + c.xstar_t_applies + c.xstar_applies;
  r.apply_multiplies = c.apply_multiplies;
  r.multiplies_per_apply =
      r.total_applies ? static_cast<double>(c.apply_multiplies) / r.total_applies : 0.0;
  return r;
}

namespace {

// Symmetric factorization used to apply an inverse; handles indefinite
// nonsingular matrices via the eigendecomposition.
class SymmetricInverse {
 public:
  SymmetricInverse() = default;

  template <typename SingularError>
  void factor(const DenseMatrix& s, SingularError on_singular) {
    eig_ = sym_eig(s);
    double max_abs = 0.0, min_abs = 0.0;
    for (double v : eig_.eigenvalues) max_abs = std::max(max_abs, std::fabs(v));
    min_abs = max_abs;
    for (double v : eig_.eigenvalues) min_abs = std::min(min_abs, std::fabs(v));
    if (max_abs == 0.0 || min_abs <= 1e-12 * max_abs) throw on_singular;
  }

  Vector solve(const Vector& b) const {
    Vector t = eig_.eigenvectors.apply_transpose(b);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] /= eig_.eigenvalues[i];
    return eig_.eigenvectors.apply(t);
  }

  DenseMatrix inverse() const {
    const std::size_t n = eig_.eigenvalues.size();
    DenseMatrix scaled = eig_.eigenvectors;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) scaled(i, j) /= eig_.eigenvalues[j];
    return scaled * eig_.eigenvectors.transpose();
  }

 private:
  SymEig eig_;
};

class DensePreconditioner final : public IndefinitePreconditioner {
 public:
  DensePreconditioner(const DenseMatrix& x, const DenseMatrix& d) : m_(x.rows()), n_(x.cols()) {
    if (d.rows() != m_ || d.cols() != m_)
      throw DimensionMismatch("dense_preconditioner: D must be m x m");
    SymmetricInverse d_inv_factor;
    d_inv_factor.factor(d, SingularD("dense_preconditioner: D is singular"));
    d_inv_ = d_inv_factor.inverse();
    e_ = d_inv_ * x;  // D^-1 X
    DenseMatrix gram = x.transpose() * e_;
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i < j; ++i) {
        const double v = 0.5 * (gram(i, j) + gram(j, i));
        gram(i, j) = v;
        gram(j, i) = v;
      }
    gram_inv_.factor(
        gram, SingularProjectedGram("dense_preconditioner: X'D^-1X is singular"));
    counters_.factorizations = 1;
    counters_.factor_multiplies = m_ * m_ * m_ + n_ * n_ * n_ + m_ * m_ * n_;
  }

  std::size_t rows() const override { return m_; }
  std::size_t params() const override { return n_; }

 protected:
  Vector pi_impl(const Vector& xi) const override {
    // Pi = D^-1 - D^-1 X (X'D^-1X)^-1 X'D^-1 (symmetric form)
    Vector t = gram_inv_.solve(e_.apply_transpose(xi));
    Vector out = d_inv_.apply(xi);
    Vector corr = e_.apply(t);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= corr[i];
    return out;
  }
  Vector xstar_t_impl(const Vector& xi) const override {
    return gram_inv_.solve(e_.apply_transpose(xi));
  }
  Vector xstar_impl(const Vector& v) const override { return e_.apply(gram_inv_.solve(v)); }

  std::size_t pi_cost() const override { return m_ * m_ + 2 * m_ * n_ + n_ * n_; }
  std::size_t xstar_t_cost() const override { return m_ * n_ + n_ * n_; }
  std::size_t xstar_cost() const override { return m_ * n_ + n_ * n_; }

 private:
  std::size_t m_, n_;
  DenseMatrix d_inv_;
  DenseMatrix e_;
  SymmetricInverse gram_inv_;
};

}  // namespace

std::unique_ptr<IndefinitePreconditioner> dense_preconditioner(const DenseMatrix& x,
                                                               const DenseMatrix& d) {
  return std::make_unique<DensePreconditioner>(x, d);
}

}  // namespace gls
