#include "gls/linalg.hpp"

#include <cmath>

#include "doctest.h"
#include "gls/errors.hpp"
#include "gls/rng.hpp"

using namespace gls;

namespace {

DenseMatrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  return qr_full(seeded_gaussian(n, n, 0.0, 1.0, seed)).q_range;
}

double recon_error(const QrFull& qr, const DenseMatrix& a) {
  DenseMatrix recon = qr.q_range * qr.r;
  return (recon - a).max_abs();
}

}  // namespace

TEST_CASE("qr_full identity columns") {
  DenseMatrix a(3, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  QrFull qr = qr_full(a);
  CHECK(recon_error(qr, a) < 1e-14);
  // null basis spans e3 up to sign
  CHECK(std::fabs(std::fabs(qr.q_null(2, 0)) - 1.0) < 1e-14);
  CHECK(std::fabs(qr.q_null(0, 0)) < 1e-14);
  CHECK(std::fabs(qr.q_null(1, 0)) < 1e-14);
}

TEST_CASE("qr_full random reconstruction and orthogonality") {
  DenseMatrix a = seeded_gaussian(6, 2, 0.0, 1.0, 42);
  QrFull qr = qr_full(a);
  DenseMatrix q = hstack(qr.q_range, qr.q_null);
  DenseMatrix qtq = q.transpose() * q;
  CHECK((qtq - DenseMatrix::identity(6)).max_abs() < 1e-12);
  CHECK(recon_error(qr, a) <= 1e-12 * a.max_abs() + 1e-14);
  // Q_N' A = 0
  DenseMatrix qna = qr.q_null.transpose() * a;
  CHECK(qna.max_abs() <= 1e-12 * a.max_abs());
}

TEST_CASE("qr_full of the ones column") {
  DenseMatrix a(4, 1, 1.0);
  QrFull qr = qr_full(a);
  CHECK(std::fabs(std::fabs(qr.r(0, 0)) - 2.0) < 1e-14);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(std::fabs(std::fabs(qr.q_range(i, 0)) - 0.5) < 1e-14);
}

TEST_CASE("qr detects rank deficiency") {
  DenseMatrix a = seeded_gaussian(5, 3, 0.0, 1.0, 7);
  a.set_col(2, a.col(1));  // repeated column
  CHECK_THROWS_AS(qr_thin(a), RankDeficient);
}

TEST_CASE("qr_thin stacked normal-equation identity") {
  // r'r = R0'R0 + C'C for the stacked [R0; C]
  DenseMatrix r0 = qr_thin(seeded_gaussian(4, 4, 0.0, 1.0, 3)).r;
  DenseMatrix c(2, 4);
  c(0, 1) = 1.0;
  c(1, 3) = 1.0;
  DenseMatrix stacked = vstack(r0, c);
  QrThin qr = qr_thin(stacked);
  DenseMatrix lhs = qr.r.transpose() * qr.r;
  DenseMatrix rhs = r0.transpose() * r0 + c.transpose() * c;
  CHECK((lhs - rhs).max_abs() < 1e-12 * rhs.max_abs());
}

TEST_CASE("tri_solve identity and hand case") {
  DenseMatrix eye = DenseMatrix::identity(3);
  Vector b{1.0, 2.0, 3.0};
  Vector x = tri_solve(eye, b);
  CHECK(x == b);

  DenseMatrix r(2, 2);
  r(0, 0) = 2.0;
  r(0, 1) = 1.0;
  r(1, 1) = 3.0;
  Vector sol = tri_solve(r, Vector{5.0, 6.0});
  CHECK(std::fabs(sol[0] - 1.5) < 1e-15);
  CHECK(std::fabs(sol[1] - 2.0) < 1e-15);

  r(1, 1) = 0.0;
  CHECK_THROWS_AS(tri_solve(r, Vector{5.0, 6.0}), SingularTriangular);
}

TEST_CASE("tri_solve all sides round trip") {
  Rng rng(11);
  DenseMatrix r(4, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t i = 0; i < j; ++i) r(i, j) = rng.gaussian();
    r(j, j) = 2.0 + rng.uniform();
  }
  DenseMatrix b = rng.gaussian_matrix(4, 3);
  DenseMatrix x = tri_solve(r, b, Side::Left, false);
  CHECK((r * x - b).max_abs() < 1e-12);
  x = tri_solve(r, b, Side::Left, true);
  CHECK((r.transpose() * x - b).max_abs() < 1e-12);
  DenseMatrix bw = rng.gaussian_matrix(3, 4);
  x = tri_solve(r, bw, Side::Right, false);
  CHECK((x * r - bw).max_abs() < 1e-12);
  x = tri_solve(r, bw, Side::Right, true);
  CHECK((x * r.transpose() - bw).max_abs() < 1e-12);
}

TEST_CASE("sym_eig diagonal, constructed and zero spectra") {
  DenseMatrix d = DenseMatrix::diagonal({3.0, 1.0, 2.0});
  SymEig eig = sym_eig(d);
  CHECK(eig.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(eig.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(eig.eigenvalues[2] == doctest::Approx(3.0));

  DenseMatrix q = random_orthogonal(4, 5);
  DenseMatrix s = q * DenseMatrix::diagonal({0.5, 1.0, 1.5, 2.0}) * q.transpose();
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = s(j, i) = v;
    }
  eig = sym_eig(s);
  CHECK(eig.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(eig.eigenvalues[3] == doctest::Approx(2.0).epsilon(1e-10));
  // reconstruction
  DenseMatrix recon =
      eig.eigenvectors * DenseMatrix::diagonal(eig.eigenvalues) * eig.eigenvectors.transpose();
  CHECK((recon - s).max_abs() < 1e-12);

  eig = sym_eig(DenseMatrix(3, 3));
  for (double v : eig.eigenvalues) CHECK(v == 0.0);
}

TEST_CASE("sym_eig matches 2x2 characteristic roots") {
  DenseMatrix s(2, 2);
  s(0, 0) = 3.0;
  s(0, 1) = s(1, 0) = 1.0;
  s(1, 1) = 2.0;
  // roots of x^2 - 5x + 5
  const double disc = std::sqrt(25.0 - 20.0);
  SymEig eig = sym_eig(s);
  CHECK(eig.eigenvalues[0] == doctest::Approx((5.0 - disc) / 2.0));
  CHECK(eig.eigenvalues[1] == doctest::Approx((5.0 + disc) / 2.0));
}

TEST_CASE("sym_eig rejects asymmetry") {
  DenseMatrix s(2, 2);
  s(0, 1) = 1.0;
  CHECK_THROWS_AS(sym_eig(s), NotSymmetric);
}

TEST_CASE("cholesky solves SPD systems") {
  DenseMatrix a = seeded_gaussian(5, 5, 0.0, 1.0, 9);
  DenseMatrix s = a.transpose() * a + 0.5 * DenseMatrix::identity(5);
  DenseMatrix l = cholesky(s);
  Vector b{1, 2, 3, 4, 5};
  Vector x = chol_solve(l, b);
  CHECK(max_abs(sub(s.apply(x), b)) < 1e-10);
  CHECK_THROWS_AS(cholesky(DenseMatrix(3, 3)), NotPositiveDefinite);
}

TEST_CASE("lu_solve round trip") {
  DenseMatrix a = seeded_gaussian(6, 6, 0.0, 1.0, 13);
  DenseMatrix b = seeded_gaussian(6, 2, 0.0, 1.0, 14);
  DenseMatrix x = lu_solve(a, b);
  CHECK((a * x - b).max_abs() < 1e-10);
}

TEST_CASE("general_eigenvalues on known spectra") {
  // symmetric case cross-check
  DenseMatrix q = random_orthogonal(5, 21);
  DenseMatrix s = q * DenseMatrix::diagonal({-2.0, -0.5, 0.0, 1.0, 3.0}) * q.transpose();
  auto eigs = general_eigenvalues(s);
  std::vector<double> re;
  for (auto z : eigs) {
    CHECK(std::fabs(z.imag()) < 1e-8);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  const std::vector<double> expect{-2.0, -0.5, 0.0, 1.0, 3.0};
  for (std::size_t i = 0; i < 5; ++i) CHECK(re[i] == doctest::Approx(expect[i]).epsilon(1e-8));

  // companion matrix of (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
  DenseMatrix comp(3, 3);
  comp(0, 0) = 6.0;
  comp(0, 1) = -11.0;
  comp(0, 2) = 6.0;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  CHECK(spectral_radius(comp) == doctest::Approx(3.0).epsilon(1e-10));

  // rotation by 90 degrees: eigenvalues +-i
  DenseMatrix rot(2, 2);
  rot(0, 1) = -1.0;
  rot(1, 0) = 1.0;
  auto ce = general_eigenvalues(rot);
  CHECK(std::abs(ce[0]) == doctest::Approx(1.0));
  CHECK(std::fabs(ce[0].imag()) == doctest::Approx(1.0));
}

TEST_CASE("qr orthogonality invariant on taller matrices") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    DenseMatrix a = seeded_gaussian(12, 5, 0.0, 2.0, seed);
    QrFull qr = qr_full(a);
    DenseMatrix q = hstack(qr.q_range, qr.q_null);
    CHECK((q.transpose() * q - DenseMatrix::identity(12)).max_abs() <= 1e-12);
    CHECK((qr.q_null.transpose() * a).max_abs() <= 1e-12 * a.max_abs());
  }
}
