#ifndef GLS_PRECONDITIONER_HPP
#define GLS_PRECONDITIONER_HPP

#include <cstddef>
#include <memory>

#include "gls/dense_matrix.hpp"
#include "gls/linalg.hpp"

namespace gls {

// Work bookkeeping for an operator: factorizations happen at construction,
// applies accumulate an approximate multiply count.  Counters are plain
// (non-atomic) tallies; concurrent applies may undercount.
struct CostCounters {
  std::size_t factorizations = 0;
  std::size_t factor_multiplies = 0;
  std::size_t pi_applies = 0;
  std::size_t xstar_t_applies = 0;
  std::size_t xstar_applies = 0;
  std::size_t apply_multiplies = 0;
};

// The operator pair behind the indefinite preconditioner
//   K = (D X; X' 0)^-1,
// exposed through its action: X* = D^-1 X (X' D^-1 X)^-1 is a pseudo-inverse
// of X and Pi = (I - X* X') D^-1 an oblique projector onto the null space
// of X'.  Invariants (tested on probes): X'X* = I, Pi X = 0, Pi D Pi = Pi,
// X*' D Pi = 0.
class IndefinitePreconditioner {
 public:
  virtual ~IndefinitePreconditioner() = default;

  virtual std::size_t rows() const = 0;    // m
  virtual std::size_t params() const = 0;  // n

  Vector apply_pi(const Vector& xi) const;
  Vector apply_xstar_t(const Vector& xi) const;
  Vector apply_xstar(const Vector& v) const;

  const CostCounters& counters() const { return counters_; }
  void reset_apply_counters() const;

 protected:
  virtual Vector pi_impl(const Vector& xi) const = 0;
  virtual Vector xstar_t_impl(const Vector& xi) const = 0;
  virtual Vector xstar_impl(const Vector& v) const = 0;
  virtual std::size_t pi_cost() const = 0;
  virtual std::size_t xstar_t_cost() const = 0;
  virtual std::size_t xstar_cost() const = 0;

  mutable CostCounters counters_;
};

// Report snapshot of an operator's counters (the cost_counters operation).
struct CostReport {
  std::size_t factorizations;
  std::size_t factor_multiplies;
  std::size_t total_applies;
  std::size_t apply_multiplies;
  double multiplies_per_apply;
};

CostReport cost_counters(const IndefinitePreconditioner& precond);

// Eq. (12) operators formed from an explicit symmetric nonsingular D.
// D and the projected Gram matrix X'D^-1X are factorized by symmetric
// eigendecomposition so indefinite D is admitted.
std::unique_ptr<IndefinitePreconditioner> dense_preconditioner(const DenseMatrix& x,
                                                               const DenseMatrix& d);

}  // namespace gls

#endif  // GLS_PRECONDITIONER_HPP
