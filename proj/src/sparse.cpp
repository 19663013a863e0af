#include "bulksurf/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bulksurf/errors.hpp"

namespace bulksurf {

CsrMatrix::CsrMatrix(Index n_rows, Index n_cols, std::vector<Index> offsets, std::vector<Index> cols,
                     std::vector<double> values)
    : n_rows_(n_rows), n_cols_(n_cols), offsets_(std::move(offsets)), cols_(std::move(cols)), values_(std::move(values)) {
  if (offsets_.size() != n_rows_ + 1 || cols_.size() != values_.size() || offsets_.back() != cols_.size()) {
    throw DimensionMismatch("inconsistent CSR arrays");
  }
}

CsrMatrix CsrMatrix::identity(Index n) {
  std::vector<Index> offsets(n + 1);
  std::iota(offsets.begin(), offsets.end(), Index{0});
  std::vector<Index> cols(n);
  std::iota(cols.begin(), cols.end(), Index{0});
  return CsrMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

double CsrMatrix::at(Index i, Index j) const {
  if (i >= n_rows_ || j >= n_cols_) throw IndexOutOfRange("CsrMatrix::at out of range");
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(n_rows_, n_cols_), 0.0);
  for (Index i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

std::vector<std::vector<double>> CsrMatrix::to_dense() const {
  std::vector<std::vector<double>> dense(n_rows_, std::vector<double>(n_cols_, 0.0));
  for (Index i = 0; i < n_rows_; ++i) {
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) dense[i][cols_[k]] = values_[k];
  }
  return dense;
}

double CsrMatrix::norm_inf() const {
  double best = 0.0;
  for (Index i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

bool CsrMatrix::is_symmetric(double tol) const {
  if (n_rows_ != n_cols_) return false;
  for (Index i = 0; i < n_rows_; ++i) {
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (std::abs(values_[k] - at(cols_[k], i)) > tol) return false;
    }
  }
  return true;
}

CsrMatrix to_csr(const TripletBuffer& t, Index n_rows, Index n_cols) {
  const std::size_t n = t.size();
  std::vector<Index> count(n_rows + 1, 0);
  for (std::size_t e = 0; e < n; ++e) {
    if (t.rows[e] >= n_rows || t.cols[e] >= n_cols) {
      throw IndexOutOfRange("triplet (" + std::to_string(t.rows[e]) + ", " + std::to_string(t.cols[e]) +
                            ") outside " + std::to_string(n_rows) + " x " + std::to_string(n_cols));
    }
    ++count[t.rows[e] + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());

  // Bucket by row, then sort and merge each row.
  std::vector<std::pair<Index, double>> bucket(n);
  std::vector<Index> fill(count.begin(), count.end() - 1);
  for (std::size_t e = 0; e < n; ++e) bucket[fill[t.rows[e]]++] = {t.cols[e], t.values[e]};

  std::vector<Index> offsets(n_rows + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;
  cols.reserve(n);
  values.reserve(n);
  for (Index i = 0; i < n_rows; ++i) {
    auto first = bucket.begin() + static_cast<std::ptrdiff_t>(count[i]);
    auto last = bucket.begin() + static_cast<std::ptrdiff_t>(count[i + 1]);
    std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (!cols.empty() && cols.size() > offsets[i] && cols.back() == it->first) {
        values.back() += it->second;
      } else {
        cols.push_back(it->first);
        values.push_back(it->second);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return CsrMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(values));
}

CsrMatrix from_dense(const std::vector<std::vector<double>>& dense) {
  TripletBuffer t;
  const Index n_rows = dense.size();
  const Index n_cols = dense.empty() ? 0 : dense.front().size();
  for (Index i = 0; i < n_rows; ++i) {
    if (dense[i].size() != n_cols) throw DimensionMismatch("ragged dense matrix");
    for (Index j = 0; j < n_cols; ++j) {
      if (dense[i][j] != 0.0) t.add(i, j, dense[i][j]);
    }
  }
  return to_csr(t, n_rows, n_cols);
}

CsrMatrix linear_combination(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("linear_combination shape mismatch");
  const auto ao = a.offsets();
  const auto ac = a.col_indices();
  const auto av = a.values();
  const auto bo = b.offsets();
  const auto bc = b.col_indices();
  const auto bv = b.values();
  std::vector<Index> offsets(a.rows() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;
  cols.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  for (Index i = 0; i < a.rows(); ++i) {
    Index p = ao[i];
    Index q = bo[i];
    while (p < ao[i + 1] || q < bo[i + 1]) {
      if (q == bo[i + 1] || (p < ao[i + 1] && ac[p] < bc[q])) {
        cols.push_back(ac[p]);
        values.push_back(alpha * av[p++]);
      } else if (p == ao[i + 1] || bc[q] < ac[p]) {
        cols.push_back(bc[q]);
        values.push_back(beta * bv[q++]);
      } else {
        cols.push_back(ac[p]);
        values.push_back(alpha * av[p++] + beta * bv[q++]);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return CsrMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols), std::move(values));
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw DimensionMismatch("spmv: matrix is " + std::to_string(a.rows()) + " x " + std::to_string(a.cols()) +
                            ", x has " + std::to_string(x.size()));
  }
  const auto off = a.offsets();
  const auto col = a.col_indices();
  const auto val = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (Index k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows(), 0.0);
  spmv(a, x, y);
  return y;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteBreakdown(std::string("non-finite ") + what + " in Krylov iteration");
}

struct Setup {
  std::vector<double> x;
  std::vector<double> inv_diag;
  double b_norm = 0.0;
  Index max_iters = 0;
};

Setup prepare(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts, std::span<const double> x0) {
  if (a.rows() != a.cols()) throw DimensionMismatch("solver needs a square matrix");
  if (b.size() != a.rows()) throw DimensionMismatch("rhs length does not match matrix");
  if (!x0.empty() && x0.size() != a.rows()) throw DimensionMismatch("initial guess length does not match matrix");
  Setup s;
  s.x = x0.empty() ? std::vector<double>(b.size(), 0.0) : std::vector<double>(x0.begin(), x0.end());
  s.inv_diag = a.diagonal();
  for (double& d : s.inv_diag) {
    if (d == 0.0 || !std::isfinite(d)) throw NonFiniteBreakdown("zero or non-finite diagonal entry; matrix is singular");
    d = 1.0 / d;
  }
  s.b_norm = norm2(b);
  require_finite(s.b_norm, "right-hand side");
  s.max_iters = opts.max_iters > 0 ? opts.max_iters : 10 * std::max<Index>(a.rows(), 1);
  return s;
}

// True residual r = b - A x; returns its norm.
double true_residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x, std::vector<double>& r) {
  spmv(a, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

// Near a singular matrix the iterate can run off along the null space until
// rounding in A x is as large as b itself, at which point a small computed
// residual says nothing.
void require_meaningful(const CsrMatrix& a, std::span<const double> b, std::span<const double> x) {
  const auto off = a.offsets();
  const auto col = a.col_indices();
  const auto val = a.values();
  double ax_abs = 0.0, b_max = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (Index k = off[i]; k < off[i + 1]; ++k) s += std::abs(val[k] * x[col[k]]);
    ax_abs = std::max(ax_abs, s);
    b_max = std::max(b_max, std::abs(b[i]));
  }
  if (std::numeric_limits<double>::epsilon() * ax_abs > 0.5 * b_max) {
    throw NoConvergence("solution dominated by rounding; matrix is numerically singular");
  }
}

void finish(SolveStats* stats, Index iterations, double rel) {
  if (stats) {
    stats->iterations = iterations;
    stats->relative_residual = rel;
  }
}

}  // namespace

std::vector<double> solve_spd(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts,
                              std::span<const double> x0, SolveStats* stats) {
  Setup s = prepare(a, b, opts, x0);
  const std::size_t n = b.size();
  if (s.b_norm == 0.0) {
    finish(stats, 0, 0.0);
    return std::vector<double>(n, 0.0);
  }
  const double target = opts.tol * s.b_norm;
  std::vector<double> r(n), z(n), p(n), ap(n);
  double r_norm = true_residual(a, b, s.x, r);
  require_finite(r_norm, "residual");
  Index it = 0;
  while (true) {
    if (r_norm <= target) {
      require_meaningful(a, b, s.x);
      finish(stats, it, r_norm / s.b_norm);
      return s.x;
    }
    if (it >= s.max_iters) break;
    // (Re)start from the current true residual.
    for (std::size_t i = 0; i < n; ++i) z[i] = s.inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    while (it < s.max_iters) {
      ++it;
      spmv(a, p, ap);
      const double pap = dot(p, ap);
      require_finite(pap, "curvature");
      if (pap <= 0.0) throw NonFiniteBreakdown("non-positive curvature p'Ap; matrix is not positive definite");
      const double alpha = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        s.x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      r_norm = norm2(r);
      require_finite(r_norm, "residual");
      if (r_norm <= target) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = s.inv_diag[i] * r[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    r_norm = true_residual(a, b, s.x, r);
    require_finite(r_norm, "residual");
  }
  throw NoConvergence("CG: relative residual " + std::to_string(r_norm / s.b_norm) + " after " +
                      std::to_string(it) + " iterations");
}

std::vector<double> solve_general(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts,
                                  std::span<const double> x0, SolveStats* stats) {
  Setup s = prepare(a, b, opts, x0);
  const std::size_t n = b.size();
  if (s.b_norm == 0.0) {
    finish(stats, 0, 0.0);
    return std::vector<double>(n, 0.0);
  }
  const double target = opts.tol * s.b_norm;
  std::vector<double> r(n), r_hat(n), p(n), v(n), y(n), sv(n), zz(n), t(n);
  double r_norm = true_residual(a, b, s.x, r);
  require_finite(r_norm, "residual");
  Index it = 0;
  while (true) {
    if (r_norm <= target) {
      require_meaningful(a, b, s.x);
      finish(stats, it, r_norm / s.b_norm);
      return s.x;
    }
    if (it >= s.max_iters) break;
    // (Re)start: shadow residual = current residual.
    r_hat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    while (it < s.max_iters) {
      ++it;
      const double rho_new = dot(r_hat, r);
      require_finite(rho_new, "rho");
      if (rho_new == 0.0) break;
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      for (std::size_t i = 0; i < n; ++i) y[i] = s.inv_diag[i] * p[i];
      spmv(a, y, v);
      const double denom = dot(r_hat, v);
      require_finite(denom, "denominator");
      if (denom == 0.0) break;
      alpha = rho / denom;
      for (std::size_t i = 0; i < n; ++i) sv[i] = r[i] - alpha * v[i];
      const double s_norm = norm2(sv);
      require_finite(s_norm, "residual");
      if (s_norm <= target) {
        for (std::size_t i = 0; i < n; ++i) s.x[i] += alpha * y[i];
        break;
      }
      for (std::size_t i = 0; i < n; ++i) zz[i] = s.inv_diag[i] * sv[i];
      spmv(a, zz, t);
      const double tt = dot(t, t);
      require_finite(tt, "denominator");
      if (tt == 0.0) {
        for (std::size_t i = 0; i < n; ++i) s.x[i] += alpha * y[i];
        break;
      }
      omega = dot(t, sv) / tt;
      require_finite(omega, "omega");
      for (std::size_t i = 0; i < n; ++i) {
        s.x[i] += alpha * y[i] + omega * zz[i];
        r[i] = sv[i] - omega * t[i];
      }
      r_norm = norm2(r);
      require_finite(r_norm, "residual");
      if (r_norm <= target || omega == 0.0) break;
    }
    r_norm = true_residual(a, b, s.x, r);
    require_finite(r_norm, "residual");
  }
  throw NoConvergence("BiCGStab: relative residual " + std::to_string(r_norm / s.b_norm) + " after " +
                      std::to_string(it) + " iterations");
}

}  // namespace bulksurf
