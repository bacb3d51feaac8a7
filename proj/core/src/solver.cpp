#include "bsforecast/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bsforecast/errors.hpp"

namespace bsf {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// (L^T L + beta I) x
std::vector<double> normal_matvec(const AssembledSystem& sys, double beta,
                                  const std::vector<double>& x) {
  std::vector<double> y = sys.L_reduced.multiply_transpose(sys.L_reduced.multiply(x));
  for (size_t i = 0; i < y.size(); ++i) y[i] += beta * x[i];
  return y;
}

// L^T b + beta F
std::vector<double> normal_rhs(const AssembledSystem& sys, double beta) {
  std::vector<double> rhs = sys.L_reduced.multiply_transpose(sys.b_reduced);
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += beta * sys.F_reduced[i];
  return rhs;
}

void check_dim(const AssembledSystem& sys, const std::vector<double>& u,
               const char* who) {
  if (static_cast<int>(u.size()) != sys.reduced_size()) {
    throw InputError(std::string(who) + ": expected vector of length " +
                     std::to_string(sys.reduced_size()) + ", got " +
                     std::to_string(u.size()));
  }
}

}  // namespace

void validate_solver_config(const SolverConfig& cfg) {
  if (!(cfg.beta > 0.0) || !(cfg.beta < 1.0)) {
    throw InputError("beta must lie in (0, 1)");
  }
  if (!(cfg.cg_tol > 0.0)) throw InputError("cg_tol must be positive");
  if (cfg.cg_max_iter < 0) {
    throw InputError("cg_max_iter must be >= 1 (or 0 for the 10*N_r default)");
  }
}

double eval_functional(const AssembledSystem& sys, const std::vector<double>& u,
                       double beta) {
  check_dim(sys, u, "eval_functional");
  std::vector<double> r = sys.L_reduced.multiply(u);
  double residual = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    const double d = r[i] - sys.b_reduced[i];
    residual += d * d;
  }
  double fidelity = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - sys.F_reduced[i];
    fidelity += d * d;
  }
  return residual + beta * fidelity;
}

std::vector<double> eval_gradient(const AssembledSystem& sys,
                                  const std::vector<double>& u, double beta) {
  check_dim(sys, u, "eval_gradient");
  std::vector<double> r = sys.L_reduced.multiply(u);
  for (size_t i = 0; i < r.size(); ++i) r[i] -= sys.b_reduced[i];
  std::vector<double> g = sys.L_reduced.multiply_transpose(r);
  for (size_t i = 0; i < g.size(); ++i) {
    g[i] = 2.0 * g[i] + 2.0 * beta * (u[i] - sys.F_reduced[i]);
  }
  return g;
}

MinimizeResult minimize_cg(const AssembledSystem& sys, const SolverConfig& cfg) {
  const int n = sys.reduced_size();
  const int max_iter = cfg.cg_max_iter > 0 ? cfg.cg_max_iter : 10 * n;
  const double beta = cfg.beta;

  MinimizeResult res;
  res.u_reduced = sys.F_reduced;

  const std::vector<double> rhs = normal_rhs(sys, beta);
  auto residual_at = [&](const std::vector<double>& u) {
    std::vector<double> r = normal_matvec(sys, beta, u);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    return r;
  };

  std::vector<double> r = residual_at(res.u_reduced);
  const double g0 = 2.0 * norm2(r);
  const double target = cfg.cg_tol * (1.0 + g0);

  double grad_norm = g0;
  if (grad_norm <= target) {
    res.converged = true;
  } else {
    std::vector<double> p = r;
    double rs_old = dot(r, r);
    while (res.iterations < max_iter) {
      const std::vector<double> v = normal_matvec(sys, beta, p);
      const double pv = dot(p, v);
      if (!(pv > 0.0)) break;  // numerically exhausted search direction
      const double alpha = rs_old / pv;
      for (int i = 0; i < n; ++i) {
        res.u_reduced[i] += alpha * p[i];
        r[i] -= alpha * v[i];
      }
      ++res.iterations;
      const double rs_new = dot(r, r);
      grad_norm = 2.0 * std::sqrt(rs_new);
      if (grad_norm <= target) {
        // Recursion can drift; trust only the recomputed residual.
        r = residual_at(res.u_reduced);
        grad_norm = 2.0 * norm2(r);
        if (grad_norm <= target) {
          res.converged = true;
          break;
        }
        rs_old = dot(r, r);
        p = r;  // restart from the true residual
        continue;
      }
      for (int i = 0; i < n; ++i) p[i] = r[i] + (rs_new / rs_old) * p[i];
      rs_old = rs_new;
    }
  }

  res.final_gradient_norm = 2.0 * norm2(residual_at(res.u_reduced));
  if (!res.converged) res.converged = res.final_gradient_norm <= target;
  res.functional_value = eval_functional(sys, res.u_reduced, beta);
  return res;
}

std::vector<double> dense_oracle_solve(const AssembledSystem& sys, double beta) {
  const int n = sys.reduced_size();
  if (n > 2000) {
    throw InputError("dense_oracle_solve: N_r = " + std::to_string(n) +
                     " exceeds the 2000 guard");
  }
  // N = L^T L + beta I, assembled row-block by row-block from CSR entries.
  std::vector<std::vector<double>> N(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) N[i][i] = beta;
  {
    std::vector<std::pair<int, double>> row;
    int current = -1;
    auto flush = [&]() {
      for (const auto& [c1, v1] : row) {
        for (const auto& [c2, v2] : row) N[c1][c2] += v1 * v2;
      }
      row.clear();
    };
    sys.L_reduced.for_each([&](int r, int c, double v) {
      if (r != current) {
        flush();
        current = r;
      }
      row.emplace_back(c, v);
    });
    flush();
  }
  std::vector<double> x = normal_rhs(sys, beta);

  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(N[r][col]) > std::fabs(N[pivot][col])) pivot = r;
    }
    if (N[pivot][col] == 0.0) {
      throw NumericError("dense_oracle_solve: singular normal matrix");
    }
    std::swap(N[col], N[pivot]);
    std::swap(x[col], x[pivot]);
    const double inv = 1.0 / N[col][col];
    for (int r = col + 1; r < n; ++r) {
      const double factor = N[r][col] * inv;
      if (factor == 0.0) continue;
      for (int c = col; c < n; ++c) N[r][c] -= factor * N[col][c];
      x[r] -= factor * x[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = x[r];
    for (int c = r + 1; c < n; ++c) acc -= N[r][c] * x[c];
    x[r] = acc / N[r][r];
  }
  return x;
}

void write_minimizer(const std::string& path, const std::string& option_id,
                     double beta, const SolutionGrid& grid) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  char buf[40];
  out << "# option_id=" << option_id << "\n";
  out << "# M=" << grid.spec.M << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", beta);
  out << "# beta=" << buf << "\n";
  for (int j = 0; j < grid.spec.M; ++j) {
    for (int i = 0; i < grid.spec.M; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", grid.at(i, j));
      out << buf << (i + 1 == grid.spec.M ? "\n" : ",");
    }
  }
}

}  // namespace bsf
