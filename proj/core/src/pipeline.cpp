#include "bsforecast/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <limits>
#include <thread>
#include <variant>

#include "bsforecast/errors.hpp"

namespace bsf {

double forecast_err(double est1, double est2, double real1, double real2) {
  return 0.5 * (std::fabs(est1 - real1) / real1 +
                std::fabs(est2 - real2) / real2);
}

double median_err(std::vector<double> errs) {
  if (errs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(errs.begin(), errs.end());
  return errs[(errs.size() - 1) / 2];
}

std::pair<Forecast, SolutionGrid> forecast_one_with_grid(
    const DataBlock& block, const SolverConfig& cfg, int M, BoundaryMode mode,
    double price_floor) {
  const GridSpec spec = build_grid_spec(block, M);
  const BoundaryData bd = extrapolate_boundary(block, mode, price_floor);
  const SparseMatrix L = build_L(spec, bd);
  AssembledSystem sys = reduce_system(L, spec, bd);
  if (cfg.row_normalize) sys = normalize_rows(std::move(sys));

  const MinimizeResult res = minimize_cg(sys, cfg);
  if (!res.converged) {
    throw NumericError("option " + block.option_id + ": CG did not converge (" +
                       std::to_string(res.iterations) +
                       " iterations, gradient norm " +
                       std::to_string(res.final_gradient_norm) + ")");
  }

  SolutionGrid grid;
  grid.spec = spec;
  grid.values = scatter_solution(sys, res.u_reduced);

  const int mid = (M - 1) / 2;
  Forecast fc;
  fc.option_id = block.option_id;
  fc.est_plus1 = grid.at(mid, mid);    // t = tau
  fc.est_plus2 = grid.at(mid, M - 1);  // t = 2 tau
  fc.beta_used = cfg.beta;
  fc.M_used = M;
  fc.converged = res.converged;
  if (!std::isfinite(fc.est_plus1) || !std::isfinite(fc.est_plus2)) {
    throw NumericError("option " + block.option_id +
                       ": non-finite forecast from minimizer");
  }
  if (block.has_ground_truth()) {
    fc.err = forecast_err(fc.est_plus1, fc.est_plus2, *block.real_plus1,
                          *block.real_plus2);
  }
  return {std::move(fc), std::move(grid)};
}

Forecast forecast_one(const DataBlock& block, const SolverConfig& cfg, int M,
                      BoundaryMode mode, double price_floor) {
  return forecast_one_with_grid(block, cfg, M, mode, price_floor).first;
}

namespace {

std::string sanitize_filename(const std::string& id) {
  std::string s = id;
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
          c == '.')) {
      c = '_';
    }
  }
  return s.empty() ? "block" : s;
}

}  // namespace

BatchReport run_batch(const std::vector<DataBlock>& blocks,
                      const SolverConfig& cfg, const PipelineOptions& opts) {
  if (blocks.empty()) throw InputError("run_batch: no data blocks");
  if (!opts.minimizer_dir.empty()) {
    std::filesystem::create_directories(opts.minimizer_dir);
  }

  const int n = static_cast<int>(blocks.size());
  const int workers = std::max(1, std::min(opts.parallelism, n));
  std::vector<std::variant<std::monostate, Forecast, BatchFailure>> slots(n);

  auto process = [&](int idx) {
    const DataBlock& block = blocks[idx];
    try {
      auto [fc, grid] = forecast_one_with_grid(block, cfg, opts.M,
                                               opts.boundary_mode,
                                               opts.price_floor);
      if (!opts.minimizer_dir.empty()) {
        const auto path = std::filesystem::path(opts.minimizer_dir) /
                          (sanitize_filename(block.option_id) + ".csv");
        write_minimizer(path.string(), block.option_id, cfg.beta, grid);
      }
      if (!opts.dump_dir.empty()) {
        const GridSpec spec = build_grid_spec(block, opts.M);
        const BoundaryData bd =
            extrapolate_boundary(block, opts.boundary_mode, opts.price_floor);
        AssembledSystem sys = reduce_system(build_L(spec, bd), spec, bd);
        if (cfg.row_normalize) sys = normalize_rows(std::move(sys));
        dump_system(sys, opts.dump_dir, sanitize_filename(block.option_id));
      }
      slots[idx] = std::move(fc);
    } catch (const std::exception& e) {
      slots[idx] = BatchFailure{block.option_id, e.what()};
    }
  };

  if (workers == 1) {
    for (int i = 0; i < n; ++i) process(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int idx = next.fetch_add(1); idx < n; idx = next.fetch_add(1)) {
          process(idx);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  BatchReport report;
  std::vector<double> errs;
  for (int i = 0; i < n; ++i) {
    if (std::holds_alternative<Forecast>(slots[i])) {
      Forecast& fc = std::get<Forecast>(slots[i]);
      if (fc.err) errs.push_back(*fc.err);
      report.forecasts.push_back(std::move(fc));
    } else {
      report.failures.push_back(std::move(std::get<BatchFailure>(slots[i])));
    }
  }
  report.err_histogram = make_unit_histogram(errs, opts.err_bin_width);
  report.median_err = median_err(std::move(errs));
  return report;
}

BatchReport run_batch(const std::vector<DataBlock>& blocks,
                      const SolverConfig& cfg, int M, int parallelism) {
  PipelineOptions opts;
  opts.M = M;
  opts.parallelism = parallelism;
  return run_batch(blocks, cfg, opts);
}

}  // namespace bsf
