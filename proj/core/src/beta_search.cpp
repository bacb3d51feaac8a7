#include <cmath>

#include "bsforecast/errors.hpp"
#include "bsforecast/pipeline.hpp"
#include "bsforecast/solver.hpp"

namespace bsf {

double beta_search(const std::vector<DataBlock>& blocks,
                   const std::vector<double>& betas, const SolverConfig& cfg,
                   int M, BoundaryMode mode, int parallelism) {
  if (blocks.empty()) throw InputError("beta_search: no data blocks");
  if (betas.empty()) throw InputError("beta_search: no candidate betas");
  for (const DataBlock& b : blocks) {
    if (!b.has_ground_truth()) {
      throw InputError("beta_search: block " + b.option_id +
                       " lacks ground truth");
    }
  }

  PipelineOptions opts;
  opts.M = M;
  opts.boundary_mode = mode;
  opts.parallelism = parallelism;

  bool found = false;
  double best_beta = 0.0;
  double best_median = 0.0;
  for (double beta : betas) {
    SolverConfig candidate = cfg;
    candidate.beta = beta;
    const BatchReport report = run_batch(blocks, candidate, opts);
    if (std::isnan(report.median_err)) continue;  // nothing scored
    if (!found || report.median_err < best_median ||
        (report.median_err == best_median && beta > best_beta)) {
      found = true;
      best_beta = beta;
      best_median = report.median_err;
    }
  }
  if (!found) {
    throw NumericError("beta_search: no candidate produced scored forecasts");
  }
  return best_beta;
}

}  // namespace bsf
