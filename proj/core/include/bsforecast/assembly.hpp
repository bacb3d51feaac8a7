#pragma once

#include <string>
#include <vector>

#include "bsforecast/grid.hpp"
#include "bsforecast/sparse.hpp"

namespace bsf {

/// Backward time difference: row 0 zero, rows r >= 1 hold (-1, +1)/dt at
/// columns (r-1, r).
SparseMatrix build_Dt(int M, double dt);

/// Central second space difference: rows 0 and M-1 zero, interior rows
/// hold (1, -2, 1)/ds^2 at columns (r-1, r, r+1).
SparseMatrix build_Dss(int M, double ds);

/// Diagonal PDE coefficient sigma^2(t_j)/2 * s_i^2 at k = j*M + i.
std::vector<double> coefficient_diagonal(const GridSpec& spec,
                                         const BoundaryData& bd);

/// Same coefficients as an M^2 x M^2 diagonal matrix.
SparseMatrix build_R(const GridSpec& spec, const BoundaryData& bd);

/// True for grid points carrying prescribed data: the initial row j = 0
/// and the two spatial edges i = 0, i = M-1.
inline bool is_boundary_point(int i, int j, int M) {
  return j == 0 || i == 0 || i == M - 1;
}

/// Assembles the discrete operator
///   L = Dt (x) I  +  R (I (x) Dss)
/// over the serialized grid, then structurally zeroes every row whose grid
/// point carries prescribed data, so that ||L u||^2 sums the T-shape
/// residual over exactly the free points.
SparseMatrix build_L(const GridSpec& spec, const BoundaryData& bd);

/// Bijection between the free (interior) grid points
/// {(i, j): 1 <= i <= M-2, 1 <= j <= M-1} and {0, ..., N_r - 1},
/// N_r = (M-1)(M-2), ordered by the serialized index k = j*M + i.
struct IndexMap {
  int M = 0;
  std::vector<int> full_to_reduced;  ///< size M^2, -1 on the boundary
  std::vector<int> reduced_to_full;  ///< size N_r

  int full_size() const { return M * M; }
  int reduced_size() const { return static_cast<int>(reduced_to_full.size()); }

  static IndexMap interior(int M);
};

/// The reduced least-squares system: boundary unknowns eliminated into the
/// right-hand side, optionally row-normalized afterwards.
struct AssembledSystem {
  SparseMatrix L_reduced;         ///< N_r x N_r
  std::vector<double> b_reduced;  ///< length N_r
  std::vector<double> F_reduced;  ///< length N_r
  std::vector<double> u_bd;       ///< length M^2; data on the boundary, 0 inside
  IndexMap map;
  std::vector<double> row_norms;  ///< length N_r; 1 until normalize_rows runs

  int reduced_size() const { return map.reduced_size(); }
};

/// Scatters prescribed values into u_bd (u_b on i=0, u_a on i=M-1, f on the
/// whole j=0 row including corners), moves their contribution to the right
/// side via b = -L u_bd, and deletes boundary rows and columns.
AssembledSystem reduce_system(const SparseMatrix& L, const GridSpec& spec,
                              const BoundaryData& bd);

/// Divides every nonzero row of L_reduced and the matching entry of
/// b_reduced by the row's Euclidean norm. Zero rows are left alone and
/// recorded with norm 0. Idempotent; norms accumulate into row_norms.
AssembledSystem normalize_rows(AssembledSystem sys);

/// Recombines a reduced solution with the prescribed boundary values into
/// the full serialized grid vector.
std::vector<double> scatter_solution(const AssembledSystem& sys,
                                     const std::vector<double>& u_reduced);

/// Debug dumps in `row col value` triplet form with a `# N_r=<n>` header;
/// vectors use column 0.
void dump_matrix(const SparseMatrix& m, const std::string& path);
void dump_vector(const std::vector<double>& v, const std::string& path);
/// Writes <stem>_L.txt, <stem>_b.txt, <stem>_F.txt under dir.
void dump_system(const AssembledSystem& sys, const std::string& dir,
                 const std::string& stem);

}  // namespace bsf
