#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bulksurf {

using Index = std::size_t;

/// Unordered (row, col, value) entries; duplicates are summed by to_csr.
struct TripletBuffer {
  std::vector<Index> rows;
  std::vector<Index> cols;
  std::vector<double> values;

  void add(Index row, Index col, double value) {
    rows.push_back(row);
    cols.push_back(col);
    values.push_back(value);
  }
  void reserve(std::size_t n) {
    rows.reserve(n);
    cols.reserve(n);
    values.reserve(n);
  }
  std::size_t size() const { return values.size(); }
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class CsrMatrix {
public:
  CsrMatrix() = default;
  CsrMatrix(Index n_rows, Index n_cols, std::vector<Index> offsets, std::vector<Index> cols,
            std::vector<double> values);

  static CsrMatrix identity(Index n);

  Index rows() const { return n_rows_; }
  Index cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const Index> offsets() const { return offsets_; }
  std::span<const Index> col_indices() const { return cols_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Stored value at (i, j), zero when not in the pattern.
  double at(Index i, Index j) const;
  std::vector<double> diagonal() const;
  std::vector<std::vector<double>> to_dense() const;
  /// Max absolute row sum.
  double norm_inf() const;
  bool is_symmetric(double tol = 0.0) const;

private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
};

/// Throws IndexOutOfRange for entries outside n_rows x n_cols.
CsrMatrix to_csr(const TripletBuffer& t, Index n_rows, Index n_cols);
CsrMatrix from_dense(const std::vector<std::vector<double>>& dense);

/// alpha * a + beta * b; patterns are merged.
CsrMatrix linear_combination(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b);

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

struct SolverOptions {
  double tol = 1e-10;     ///< relative residual ||b - Ax|| / ||b||
  Index max_iters = 0;    ///< 0 selects 10 n
};

struct SolveStats {
  Index iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite A.
/// Throws NoConvergence or NonFiniteBreakdown; a returned x always meets the
/// relative residual bound, checked with an explicit product.
std::vector<double> solve_spd(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts = {},
                              std::span<const double> x0 = {}, SolveStats* stats = nullptr);

/// Jacobi-preconditioned BiCGStab for general nonsingular A; same contract as solve_spd.
std::vector<double> solve_general(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts = {},
                                  std::span<const double> x0 = {}, SolveStats* stats = nullptr);

}  // namespace bulksurf
