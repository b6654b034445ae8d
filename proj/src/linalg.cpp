#include "gls/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gls/errors.hpp"

namespace gls {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct HouseholderFactor {
  DenseMatrix packed;  // reflectors below the diagonal, R on and above
  Vector beta;         // 2 / v'v for the unnormalized reflector
  Vector r_diag;
};

// Factor A = QR with Householder reflections.  Reflector k is stored with
// unit head: v = (1, packed(k+1,k), ..., packed(m-1,k)) and packed(k,k)
// holds the unnormalized head v0, so the scaled coefficient is beta*v0^2.
HouseholderFactor householder_factor(const DenseMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < n || n == 0) throw DimensionMismatch("qr: need rows >= cols >= 1");
  HouseholderFactor f{a, Vector(n, 0.0), Vector(n, 0.0)};
  DenseMatrix& w = f.packed;
  for (std::size_t k = 0; k < n; ++k) {
    double norm_x = 0.0;
    for (std::size_t i = k; i < m; ++i) norm_x = std::hypot(norm_x, w(i, k));
    if (norm_x == 0.0) {
      f.beta[k] = 0.0;
      f.r_diag[k] = 0.0;
      continue;
    }
    const double alpha = w(k, k) >= 0.0 ? -norm_x : norm_x;
    const double v0 = w(k, k) - alpha;
    f.beta[k] = -1.0 / (alpha * v0);  // 2 / v'v
    w(k, k) = v0;
    for (std::size_t i = k + 1; i < m; ++i) w(i, k) /= v0;
    const double beta_hat = f.beta[k] * v0 * v0;
    for (std::size_t j = k + 1; j < n; ++j) {
      double s = w(k, j);
      for (std::size_t i = k + 1; i < m; ++i) s += w(i, k) * w(i, j);
      s *= beta_hat;
      w(k, j) -= s;
      for (std::size_t i = k + 1; i < m; ++i) w(i, j) -= s * w(i, k);
    }
    f.r_diag[k] = alpha;
  }
  return f;
}

void check_rank(const HouseholderFactor& f, double rank_tol) {
  double max_d = 0.0, min_d = std::numeric_limits<double>::infinity();
  for (double d : f.r_diag) {
    max_d = std::max(max_d, std::fabs(d));
    min_d = std::min(min_d, std::fabs(d));
  }
  if (max_d == 0.0 || min_d <= rank_tol * max_d)
    throw RankDeficient("qr: matrix is numerically rank deficient");
}

DenseMatrix extract_r(const HouseholderFactor& f) {
  const std::size_t n = f.packed.cols();
  DenseMatrix r(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) r(i, j) = f.packed(i, j);
    r(j, j) = f.r_diag[j];
  }
  return r;
}

// Columns col0..col0+ncols-1 of the full orthogonal factor, formed by
// applying the reflectors in reverse to the matching slice of the identity.
DenseMatrix form_q_columns(const HouseholderFactor& f, std::size_t col0,
                           std::size_t ncols) {
  const std::size_t m = f.packed.rows(), n = f.packed.cols();
  DenseMatrix q(m, ncols);
  for (std::size_t j = 0; j < ncols; ++j) q(col0 + j, j) = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    if (f.beta[k] == 0.0) continue;
    const double v0 = f.packed(k, k);
    const double beta_hat = f.beta[k] * v0 * v0;
    for (std::size_t j = 0; j < ncols; ++j) {
      double s = q(k, j);
      for (std::size_t i = k + 1; i < m; ++i) s += f.packed(i, k) * q(i, j);
      s *= beta_hat;
      q(k, j) -= s;
      for (std::size_t i = k + 1; i < m; ++i) q(i, j) -= s * f.packed(i, k);
    }
  }
  return q;
}

}  // namespace

QrFull qr_full(const DenseMatrix& a, double rank_tol) {
  HouseholderFactor f = householder_factor(a);
  check_rank(f, rank_tol);
  const std::size_t m = a.rows(), n = a.cols();
  QrFull out;
  out.q_range = form_q_columns(f, 0, n);
  out.q_null = (m > n) ? form_q_columns(f, n, m - n) : DenseMatrix(m, 0);
  out.r = extract_r(f);
  return out;
}

QrThin qr_thin(const DenseMatrix& a, double rank_tol) {
  HouseholderFactor f = householder_factor(a);
  check_rank(f, rank_tol);
  QrThin out;
  out.q = form_q_columns(f, 0, a.cols());
  out.r = extract_r(f);
  return out;
}

DenseMatrix tri_solve(const DenseMatrix& r, const DenseMatrix& b, Side side,
                      bool transpose) {
  const std::size_t n = r.rows();
  if (r.cols() != n) throw DimensionMismatch("tri_solve: R must be square");
  for (std::size_t i = 0; i < n; ++i)
    if (r(i, i) == 0.0) throw SingularTriangular("tri_solve: zero diagonal entry");

  DenseMatrix x = b;
  if (side == Side::Left) {
    if (b.rows() != n) throw DimensionMismatch("tri_solve: RHS rows mismatch");
    const std::size_t k = b.cols();
    if (!transpose) {
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = n; i-- > 0;) {
          double s = x(i, c);
          for (std::size_t j = i + 1; j < n; ++j) s -= r(i, j) * x(j, c);
          x(i, c) = s / r(i, i);
        }
    } else {
      // R' is lower triangular
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < n; ++i) {
          double s = x(i, c);
          for (std::size_t j = 0; j < i; ++j) s -= r(j, i) * x(j, c);
          x(i, c) = s / r(i, i);
        }
    }
  } else {
    if (b.cols() != n) throw DimensionMismatch("tri_solve: RHS cols mismatch");
    const std::size_t k = b.rows();
    if (!transpose) {
      // X R = B
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < k; ++i) {
          double s = x(i, j);
          for (std::size_t p = 0; p < j; ++p) s -= x(i, p) * r(p, j);
          x(i, j) = s / r(j, j);
        }
    } else {
      // X R' = B
      for (std::size_t j = n; j-- > 0;)
        for (std::size_t i = 0; i < k; ++i) {
          double s = x(i, j);
          for (std::size_t p = j + 1; p < n; ++p) s -= x(i, p) * r(j, p);
          x(i, j) = s / r(j, j);
        }
    }
  }
  return x;
}

Vector tri_solve(const DenseMatrix& r, const Vector& b, bool transpose) {
  return tri_solve(r, DenseMatrix::column(b), Side::Left, transpose).col(0);
}

DenseMatrix cholesky(const DenseMatrix& s) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw DimensionMismatch("cholesky: matrix must be square");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(s(i, i)));
  const double floor = 64.0 * kEps * max_diag;
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= floor) throw NotPositiveDefinite("cholesky: non-positive pivot");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

Vector chol_solve(const DenseMatrix& lower, const Vector& b) {
  const std::size_t n = lower.rows();
  if (b.size() != n) throw DimensionMismatch("chol_solve: size mismatch");
  Vector x = b;
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= lower(i, j) * x[j];
    x[i] = s / lower(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lower(j, i) * x[j];
    x[i] = s / lower(i, i);
  }
  return x;
}

DenseMatrix chol_solve(const DenseMatrix& lower, const DenseMatrix& b) {
  DenseMatrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) x.set_col(j, chol_solve(lower, b.col(j)));
  return x;
}

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form with
// accumulated transformations (EISPACK tred2 lineage).
void tred2(DenseMatrix& v, Vector& d, Vector& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0, h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::fabs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k < i; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k < i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicitly shifted QL sweeps on the tridiagonal form (EISPACK tql2
// lineage), updating the eigenvector columns of v.
void tql2(DenseMatrix& v, Vector& d, Vector& e) {
  const std::size_t n = v.rows();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0, tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
    std::size_t m = l;
    while (m < n && std::fabs(e[m]) > kEps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 50)
          throw ConvergenceFailure("sym_eig: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = c, c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (std::size_t k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::fabs(e[l]) > kEps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    double p = d[i];
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[j] < p) {
        k = j;
        p = d[j];
      }
    if (k != i) {
      std::swap(d[k], d[i]);
      for (std::size_t r = 0; r < n; ++r) std::swap(v(r, i), v(r, k));
    }
  }
}

}  // namespace

SymEig sym_eig(const DenseMatrix& s) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw DimensionMismatch("sym_eig: matrix must be square");
  const double scale = s.max_abs();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (std::fabs(s(i, j) - s(j, i)) > 1e-12 * std::max(1.0, scale))
        throw NotSymmetric("sym_eig: input is not symmetric");

  SymEig out;
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      out.eigenvectors(i, j) = 0.5 * (s(i, j) + s(j, i));
  out.eigenvalues.assign(n, 0.0);
  Vector e(n, 0.0);
  if (n == 1) {
    out.eigenvalues[0] = s(0, 0);
    out.eigenvectors(0, 0) = 1.0;
    return out;
  }
  tred2(out.eigenvectors, out.eigenvalues, e);
  tql2(out.eigenvectors, out.eigenvalues, e);
  return out;
}

DenseMatrix lu_solve(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n) throw DimensionMismatch("lu_solve: shape mismatch");
  DenseMatrix lu = a;
  DenseMatrix x = b;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(lu(i, k)) > best) {
        best = std::fabs(lu(i, k));
        p = i;
      }
    if (best == 0.0) throw Error("lu_solve: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(p, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      lu(i, k) /= lu(k, k);
      const double lik = lu(i, k);
      if (lik == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= lik * lu(k, j);
    }
  }
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 1; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x(j, c);
      x(i, c) = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x(i, c);
      for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x(j, c);
      x(i, c) = s / lu(i, i);
    }
  }
  return x;
}

Vector lu_solve(const DenseMatrix& a, const Vector& b) {
  return lu_solve(a, DenseMatrix::column(b)).col(0);
}

namespace {

// Parlett-Reinsch balancing by powers of two.
void balance(DenseMatrix& a) {
  const std::size_t n = a.rows();
  const double radix = 2.0, sq = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) {
          c += std::fabs(a(j, i));
          r += std::fabs(a(i, j));
        }
      if (c != 0.0 && r != 0.0) {
        double g = r / radix, f = 1.0;
        const double s = c + r;
        while (c < g) {
          f *= radix;
          c *= sq;
        }
        g = r * radix;
        while (c > g) {
          f /= radix;
          c /= sq;
        }
        if ((c + r) / f < 0.95 * s) {
          done = false;
          g = 1.0 / f;
          for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
          for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
        }
      }
    }
  }
}

// Householder reduction to upper Hessenberg form, no accumulation.
void hessenberg(DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm_x = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm_x = std::hypot(norm_x, a(i, k));
    if (norm_x == 0.0) continue;
    const double alpha = a(k + 1, k) >= 0.0 ? -norm_x : norm_x;
    Vector v(n - k - 1);
    v[0] = a(k + 1, k) - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i - k - 1] = a(i, k);
    double vtv = 0.0;
    for (double t : v) vtv += t * t;
    if (vtv == 0.0) continue;
    const double beta = 2.0 / vtv;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i - k - 1] * a(i, j);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i - k - 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j - k - 1];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j - k - 1];
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr
// lineage); eigenvalues only.
std::vector<std::complex<double>> hqr(DenseMatrix& a) {
  const long n = static_cast<long>(a.rows());
  std::vector<std::complex<double>> eig(static_cast<std::size_t>(n));

  double anorm = 0.0;
  for (long i = 0; i < n; ++i)
    for (long j = std::max(i - 1, 0L); j < n; ++j) anorm += std::fabs(a(i, j));
  if (anorm == 0.0) return eig;

  long nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, u = 0.0, v = 0.0;
  double w = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 0) {
    int its = 0;
    long l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      x = a(nn, nn);
      if (l == nn) {
        eig[nn] = {x + t, 0.0};
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::fabs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            eig[nn - 1] = {x + z, 0.0};
            eig[nn] = eig[nn - 1];
            if (z != 0.0) eig[nn] = {x - w / z, 0.0};
          } else {
            eig[nn - 1] = {x + p, z};
            eig[nn] = {x + p, -z};
          }
          nn -= 2;
        } else {
          if (its == 60) throw ConvergenceFailure("general_eigenvalues: QR stalled");
          if (its % 10 == 0 && its > 0) {
            // exceptional shift
            t += x;
            for (long i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          long m;
          for (m = nn - 2; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
            v = std::fabs(p) *
                (std::fabs(a(m - 1, m - 1)) + std::fabs(z) + std::fabs(a(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          if (m < l) m = l;
          for (long i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (long k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
              x = std::fabs(p) + std::fabs(q) + std::fabs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (long j = k; j <= nn; ++j) {
              double pp = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                pp += r * a(k + 2, j);
                a(k + 2, j) -= pp * z;
              }
              a(k + 1, j) -= pp * y;
              a(k, j) -= pp * x;
            }
            const long mmin = nn < k + 3 ? nn : k + 3;
            for (long i = l; i <= mmin; ++i) {
              double pp = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                pp += z * a(i, k + 2);
                a(i, k + 2) -= pp * r;
              }
              a(i, k + 1) -= pp * q;
              a(i, k) -= pp;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return eig;
}

}  // namespace

std::vector<std::complex<double>> general_eigenvalues(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("general_eigenvalues: square input required");
  if (n == 0) return {};
  if (n == 1) return {std::complex<double>(a(0, 0), 0.0)};
  DenseMatrix h = a;
  balance(h);
  hessenberg(h);
  return hqr(h);
}

double spectral_radius(const DenseMatrix& a) {
  double rho = 0.0;
  for (const auto& zv : general_eigenvalues(a)) rho = std::max(rho, std::abs(zv));
  return rho;
}

}  // namespace gls
