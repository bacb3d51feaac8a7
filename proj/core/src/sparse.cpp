#include "bsforecast/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bsf {

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("SparseMatrix: negative dimension");
  }
  row_ptr_.assign(rows_ + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<Triplet> entries) {
  SparseMatrix m(rows, cols);
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::invalid_argument("SparseMatrix: index out of range (" +
                                  std::to_string(t.row) + ", " +
                                  std::to_string(t.col) + ")");
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  for (size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].row == entries[k - 1].row &&
        entries[k].col == entries[k - 1].col) {
      throw std::invalid_argument("SparseMatrix: duplicate coordinate (" +
                                  std::to_string(entries[k].row) + ", " +
                                  std::to_string(entries[k].col) + ")");
    }
  }
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (const Triplet& t : entries) {
    ++m.row_ptr_[t.row + 1];
    m.col_idx_.push_back(t.col);
    m.values_.push_back(t.value);
  }
  for (int r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::diagonal(const std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, d[i]});
  return from_triplets(n, n, std::move(t));
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != cols_) {
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  }
  std::vector<double> y(rows_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[k] * x[col_idx_[k]];
    }
    y[r] = acc;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(
    const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != rows_) {
    throw std::invalid_argument(
        "SparseMatrix::multiply_transpose: dimension mismatch");
  }
  std::vector<double> y(cols_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      y[col_idx_[k]] += values_[k] * xr;
    }
  }
  return y;
}

double SparseMatrix::row_norm(int r) const {
  double acc = 0.0;
  for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
    acc += values_[k] * values_[k];
  }
  return std::sqrt(acc);
}

void SparseMatrix::scale_row(int r, double factor) {
  for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) values_[k] *= factor;
}

void SparseMatrix::scale_rows(const std::vector<double>& factors) {
  if (static_cast<int>(factors.size()) != rows_) {
    throw std::invalid_argument("SparseMatrix::scale_rows: dimension mismatch");
  }
  for (int r = 0; r < rows_; ++r) scale_row(r, factors[r]);
}

SparseMatrix SparseMatrix::add(const SparseMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw std::invalid_argument("SparseMatrix::add: shape mismatch");
  }
  SparseMatrix out(rows_, cols_);
  out.col_idx_.reserve(col_idx_.size() + other.col_idx_.size());
  out.values_.reserve(values_.size() + other.values_.size());
  for (int r = 0; r < rows_; ++r) {
    int ka = row_ptr_[r];
    int kb = other.row_ptr_[r];
    const int ea = row_ptr_[r + 1];
    const int eb = other.row_ptr_[r + 1];
    while (ka < ea || kb < eb) {
      int col;
      double val;
      if (kb >= eb || (ka < ea && col_idx_[ka] < other.col_idx_[kb])) {
        col = col_idx_[ka];
        val = values_[ka++];
      } else if (ka >= ea || other.col_idx_[kb] < col_idx_[ka]) {
        col = other.col_idx_[kb];
        val = other.values_[kb++];
      } else {
        col = col_idx_[ka];
        val = values_[ka++] + other.values_[kb++];
      }
      out.col_idx_.push_back(col);
      out.values_.push_back(val);
      ++out.row_ptr_[r + 1];
    }
  }
  for (int r = 0; r < rows_; ++r) out.row_ptr_[r + 1] += out.row_ptr_[r];
  return out;
}

SparseMatrix SparseMatrix::drop_rows(const std::vector<char>& drop) const {
  if (static_cast<int>(drop.size()) != rows_) {
    throw std::invalid_argument("SparseMatrix::drop_rows: dimension mismatch");
  }
  SparseMatrix out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    if (drop[r]) continue;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out.col_idx_.push_back(col_idx_[k]);
      out.values_.push_back(values_[k]);
      ++out.row_ptr_[r + 1];
    }
  }
  for (int r = 0; r < rows_; ++r) out.row_ptr_[r + 1] += out.row_ptr_[r];
  return out;
}

SparseMatrix SparseMatrix::remap(const std::vector<int>& row_map, int new_rows,
                                 const std::vector<int>& col_map,
                                 int new_cols) const {
  if (static_cast<int>(row_map.size()) != rows_ ||
      static_cast<int>(col_map.size()) != cols_) {
    throw std::invalid_argument("SparseMatrix::remap: map size mismatch");
  }
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r) {
    const int nr = row_map[r];
    if (nr < 0) continue;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int nc = col_map[col_idx_[k]];
      if (nc < 0) continue;
      t.push_back({nr, nc, values_[k]});
    }
  }
  return from_triplets(new_rows, new_cols, std::move(t));
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
  std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      d[r][col_idx_[k]] = values_[k];
    }
  }
  return d;
}

void SparseMatrix::for_each(
    const std::function<void(int, int, double)>& fn) const {
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      fn(r, col_idx_[k], values_[k]);
    }
  }
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(a.nnz()) * static_cast<size_t>(b.nnz()));
  a.for_each([&](int ar, int ac, double av) {
    b.for_each([&](int br, int bc, double bv) {
      t.push_back({ar * b.rows() + br, ac * b.cols() + bc, av * bv});
    });
  });
  return SparseMatrix::from_triplets(a.rows() * b.rows(), a.cols() * b.cols(),
                                     std::move(t));
}

}  // namespace bsf
