#pragma once

#include <string>
#include <vector>

#include "bsforecast/assembly.hpp"
#include "bsforecast/grid.hpp"
#include "bsforecast/market_data.hpp"

namespace bsf {

struct SolverConfig {
  double beta = 0.01;
  double cg_tol = 1e-8;
  int cg_max_iter = 0;  ///< 0 selects 10 * N_r at solve time
  bool row_normalize = true;
};

/// Enforces the production-range invariants (beta in (0,1), positive
/// tolerance, max_iter >= 1 or the 0 sentinel). The library itself accepts
/// any beta >= 0 so oracle and limit tests can run outside the range.
void validate_solver_config(const SolverConfig& cfg);

struct MinimizeResult {
  std::vector<double> u_reduced;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  double functional_value = 0.0;
  bool converged = false;
};

/// ||L u - b||^2 + beta ||u - F||^2 on the reduced system.
double eval_functional(const AssembledSystem& sys, const std::vector<double>& u,
                       double beta);

/// 2 L^T (L u - b) + 2 beta (u - F).
std::vector<double> eval_gradient(const AssembledSystem& sys,
                                  const std::vector<double>& u, double beta);

/// Minimizes the functional by conjugate gradients on its normal equations
///   (L^T L + beta I) u = L^T b + beta F,
/// started from u = F. Converged means the gradient norm fell below
/// cg_tol * (1 + initial gradient norm); otherwise a partial result is
/// returned with converged = false.
MinimizeResult minimize_cg(const AssembledSystem& sys, const SolverConfig& cfg);

/// Dense direct solve of the same normal equations by Gaussian elimination
/// with partial pivoting. Guarded to N_r <= 2000.
std::vector<double> dense_oracle_solve(const AssembledSystem& sys, double beta);

/// Runs the forecast pipeline once per candidate beta over blocks with
/// ground truth and returns the candidate with the smallest median err;
/// ties break toward the larger beta.
double beta_search(const std::vector<DataBlock>& blocks,
                   const std::vector<double>& betas, const SolverConfig& cfg,
                   int M = 21, BoundaryMode mode = BoundaryMode::quadratic,
                   int parallelism = 1);

/// Persists a full minimizer grid: `# option_id=`, `# M=`, `# beta=`
/// header lines, then M CSV rows (row j holds u(s_0..s_{M-1}, t_j)).
void write_minimizer(const std::string& path, const std::string& option_id,
                     double beta, const SolutionGrid& grid);

}  // namespace bsf
