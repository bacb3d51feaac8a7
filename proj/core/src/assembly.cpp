#include "bsforecast/assembly.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "bsforecast/errors.hpp"

namespace bsf {

SparseMatrix build_Dt(int M, double dt) {
  if (M < 2) throw InputError("build_Dt: M must be at least 2");
  if (!(dt > 0.0)) throw InputError("build_Dt: dt must be positive");
  std::vector<Triplet> t;
  t.reserve(2 * (M - 1));
  for (int r = 1; r < M; ++r) {
    t.push_back({r, r - 1, -1.0 / dt});
    t.push_back({r, r, 1.0 / dt});
  }
  return SparseMatrix::from_triplets(M, M, std::move(t));
}

SparseMatrix build_Dss(int M, double ds) {
  if (M < 3) throw InputError("build_Dss: M must be at least 3");
  if (!(ds > 0.0)) throw InputError("build_Dss: ds must be positive");
  const double w = 1.0 / (ds * ds);
  std::vector<Triplet> t;
  t.reserve(3 * (M - 2));
  for (int r = 1; r < M - 1; ++r) {
    t.push_back({r, r - 1, w});
    t.push_back({r, r, -2.0 * w});
    t.push_back({r, r + 1, w});
  }
  return SparseMatrix::from_triplets(M, M, std::move(t));
}

std::vector<double> coefficient_diagonal(const GridSpec& spec,
                                         const BoundaryData& bd) {
  std::vector<double> d(spec.size());
  for (int j = 0; j < spec.M; ++j) {
    const double sig = bd.sigma(spec.t(j));
    const double half_sig2 = 0.5 * sig * sig;
    for (int i = 0; i < spec.M; ++i) {
      const double s = spec.s(i);
      d[spec.index(i, j)] = half_sig2 * s * s;
    }
  }
  return d;
}

SparseMatrix build_R(const GridSpec& spec, const BoundaryData& bd) {
  return SparseMatrix::diagonal(coefficient_diagonal(spec, bd));
}

SparseMatrix build_L(const GridSpec& spec, const BoundaryData& bd) {
  const int M = spec.M;
  const SparseMatrix eye = SparseMatrix::identity(M);
  const SparseMatrix time_part = kron(build_Dt(M, spec.dt), eye);
  SparseMatrix space_part = kron(eye, build_Dss(M, spec.ds));
  space_part.scale_rows(coefficient_diagonal(spec, bd));
  SparseMatrix L = time_part.add(space_part);

  // The raw formula leaves nonzero residual rows on the prescribed points
  // (the space stencil on j=0, the time stencil on i=0 and i=M-1).
  std::vector<char> drop(spec.size(), 0);
  for (int j = 0; j < M; ++j) {
    for (int i = 0; i < M; ++i) {
      if (is_boundary_point(i, j, M)) drop[spec.index(i, j)] = 1;
    }
  }
  return L.drop_rows(drop);
}

IndexMap IndexMap::interior(int M) {
  IndexMap map;
  map.M = M;
  map.full_to_reduced.assign(M * M, -1);
  map.reduced_to_full.reserve((M - 1) * (M - 2));
  for (int j = 0; j < M; ++j) {
    for (int i = 0; i < M; ++i) {
      if (is_boundary_point(i, j, M)) continue;
      const int k = j * M + i;
      map.full_to_reduced[k] = static_cast<int>(map.reduced_to_full.size());
      map.reduced_to_full.push_back(k);
    }
  }
  return map;
}

AssembledSystem reduce_system(const SparseMatrix& L, const GridSpec& spec,
                              const BoundaryData& bd) {
  const int M = spec.M;
  if (L.rows() != spec.size() || L.cols() != spec.size()) {
    throw InputError("reduce_system: operator shape does not match the grid");
  }
  AssembledSystem sys;
  sys.map = IndexMap::interior(M);

  sys.u_bd.assign(spec.size(), 0.0);
  for (int j = 0; j < M; ++j) {
    sys.u_bd[spec.index(0, j)] = bd.u_b(spec.t(j));
    sys.u_bd[spec.index(M - 1, j)] = bd.u_a(spec.t(j));
  }
  for (int i = 0; i < M; ++i) {
    sys.u_bd[spec.index(i, 0)] = bd.f(spec.s(i));  // corners from this row
  }

  std::vector<double> b_full = L.multiply(sys.u_bd);
  for (double& v : b_full) v = -v;

  const int n_r = sys.map.reduced_size();
  sys.L_reduced = L.remap(sys.map.full_to_reduced, n_r,
                          sys.map.full_to_reduced, n_r);
  const SolutionGrid f_grid = tabulate_F(spec, bd);
  sys.b_reduced.resize(n_r);
  sys.F_reduced.resize(n_r);
  for (int r = 0; r < n_r; ++r) {
    const int k = sys.map.reduced_to_full[r];
    sys.b_reduced[r] = b_full[k];
    sys.F_reduced[r] = f_grid.values[k];
  }
  sys.row_norms.assign(n_r, 1.0);
  return sys;
}

AssembledSystem normalize_rows(AssembledSystem sys) {
  const int n_r = sys.reduced_size();
  for (int r = 0; r < n_r; ++r) {
    const double norm = sys.L_reduced.row_norm(r);
    if (norm == 0.0) {
      sys.row_norms[r] = 0.0;
      continue;
    }
    sys.L_reduced.scale_row(r, 1.0 / norm);
    sys.b_reduced[r] /= norm;
    sys.row_norms[r] *= norm;
  }
  return sys;
}

std::vector<double> scatter_solution(const AssembledSystem& sys,
                                     const std::vector<double>& u_reduced) {
  if (static_cast<int>(u_reduced.size()) != sys.reduced_size()) {
    throw InputError("scatter_solution: dimension mismatch");
  }
  std::vector<double> full = sys.u_bd;
  for (int r = 0; r < sys.reduced_size(); ++r) {
    full[sys.map.reduced_to_full[r]] = u_reduced[r];
  }
  return full;
}

namespace {

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void dump_matrix(const SparseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << "# N_r=" << m.rows() << "\n";
  m.for_each([&](int r, int c, double v) {
    out << r << " " << c << " " << fmt_value(v) << "\n";
  });
}

void dump_vector(const std::vector<double>& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << "# N_r=" << v.size() << "\n";
  for (size_t i = 0; i < v.size(); ++i) {
    out << i << " 0 " << fmt_value(v[i]) << "\n";
  }
}

void dump_system(const AssembledSystem& sys, const std::string& dir,
                 const std::string& stem) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / stem;
  dump_matrix(sys.L_reduced, base.string() + "_L.txt");
  dump_vector(sys.b_reduced, base.string() + "_b.txt");
  dump_vector(sys.F_reduced, base.string() + "_F.txt");
}

}  // namespace bsf
