#pragma once

#include <functional>
#include <vector>

namespace bsf {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix sized for the operators used here
/// (a few nonzeros per row). Duplicate coordinates are rejected at
/// construction; structurally empty rows have norm zero and stay empty
/// through matvec, so "zeroed" rows are exact.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);

  /// Builds from a triplet list. Throws std::invalid_argument on
  /// out-of-range indices or duplicate (row, col) coordinates.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(const std::vector<double>& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  /// y = A x.
  std::vector<double> multiply(const std::vector<double>& x) const;
  /// y = A^T x.
  std::vector<double> multiply_transpose(const std::vector<double>& x) const;

  /// Euclidean norm of row r (0 for an empty row).
  double row_norm(int r) const;
  /// Multiplies row r by factor in place.
  void scale_row(int r, double factor);
  /// Multiplies each row r by factors[r] in place.
  void scale_rows(const std::vector<double>& factors);

  /// Entry-wise sum; coincident coordinates merge into one entry.
  SparseMatrix add(const SparseMatrix& other) const;

  /// Structurally removes all entries of the rows where drop[r] is true.
  SparseMatrix drop_rows(const std::vector<char>& drop) const;

  /// Relabels rows and columns: map entries give the new index or -1 to
  /// delete that row/column entirely.
  SparseMatrix remap(const std::vector<int>& row_map, int new_rows,
                     const std::vector<int>& col_map, int new_cols) const;

  std::vector<std::vector<double>> to_dense() const;

  /// Visits every stored entry in row-major order.
  void for_each(const std::function<void(int, int, double)>& fn) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_;  // size rows_+1
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// Kronecker product: entry ((ar*Brows + br), (ac*Bcols + bc)) = a * b.
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace bsf
