#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bsforecast/grid.hpp"
#include "bsforecast/histogram.hpp"
#include "bsforecast/market_data.hpp"
#include "bsforecast/solver.hpp"

namespace bsf {

/// Point forecasts read off a minimizer at the bid/ask midpoint:
/// est_plus1 = u(s*, tau), est_plus2 = u(s*, 2 tau).
struct Forecast {
  std::string option_id;
  double est_plus1 = 0.0;
  double est_plus2 = 0.0;
  std::optional<double> err;  ///< present only with full ground truth
  double beta_used = 0.0;
  int M_used = 0;
  bool converged = true;
};

/// err = 1/2 (|EST1 - REAL1|/REAL1 + |EST2 - REAL2|/REAL2).
double forecast_err(double est1, double est2, double real1, double real2);

struct BatchFailure {
  std::string option_id;
  std::string message;
};

struct BatchReport {
  std::vector<Forecast> forecasts;  ///< input order, failures removed
  std::vector<BatchFailure> failures;
  std::vector<HistogramBin> err_histogram;
  double median_err = 0.0;  ///< NaN when nothing was scored
};

struct PipelineOptions {
  int M = 21;
  BoundaryMode boundary_mode = BoundaryMode::quadratic;
  double price_floor = 0.01;
  int parallelism = 1;
  double err_bin_width = 0.01;
  std::string minimizer_dir;  ///< persist full grids here when nonempty
  std::string dump_dir;       ///< debug triplet dumps here when nonempty
};

/// Assembles, solves, and extracts the two point forecasts for one block.
/// Throws InputError for invalid blocks and NumericError when CG fails to
/// converge or produces non-finite estimates.
Forecast forecast_one(const DataBlock& block, const SolverConfig& cfg, int M,
                      BoundaryMode mode = BoundaryMode::quadratic,
                      double price_floor = 0.01);

/// forecast_one plus the full scattered minimizer grid.
std::pair<Forecast, SolutionGrid> forecast_one_with_grid(
    const DataBlock& block, const SolverConfig& cfg, int M,
    BoundaryMode mode = BoundaryMode::quadratic, double price_floor = 0.01);

/// Runs every block through forecast_one on a pool of `parallelism`
/// workers. Output order equals input order; per-block failures are
/// collected, never fatal. The report is a pure function of
/// (blocks, cfg, opts) independent of scheduling.
BatchReport run_batch(const std::vector<DataBlock>& blocks,
                      const SolverConfig& cfg, const PipelineOptions& opts);

BatchReport run_batch(const std::vector<DataBlock>& blocks,
                      const SolverConfig& cfg, int M, int parallelism);

/// Lower-of-two median; NaN for an empty list.
double median_err(std::vector<double> errs);

}  // namespace bsf
