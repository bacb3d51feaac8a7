// bsforecast: batch option-price forecasting over short horizons, plus the
// trading backtest and the ML trade filter that consume the forecasts.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bsforecast/backtest.hpp"
#include "bsforecast/errors.hpp"
#include "bsforecast/io.hpp"
#include "bsforecast/ml.hpp"
#include "bsforecast/pipeline.hpp"
#include "bsforecast/solver.hpp"
#include "bsforecast/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw bsf::InputError(what + ": expected true/false, got '" + text + "'");
}

// One flat-file config key tied to the CLI option that can override it.
struct KeyBinding {
  std::string key;
  CLI::Option* opt = nullptr;
  std::function<void(const std::string&)> apply;
};

// Explicit command-line flags win over config-file values.
void apply_config_file(const std::string& path,
                       const std::vector<KeyBinding>& bindings) {
  if (path.empty()) return;
  const auto kv = bsf::load_key_values(path);
  std::set<std::string> known;
  for (const KeyBinding& b : bindings) known.insert(b.key);
  for (const auto& [key, value] : kv) {
    if (!known.count(key)) {
      throw bsf::InputError("config key '" + key + "' is not recognized");
    }
  }
  for (const KeyBinding& b : bindings) {
    const auto it = kv.find(b.key);
    if (it == kv.end()) continue;
    if (b.opt != nullptr && b.opt->count() > 0) continue;
    try {
      b.apply(it->second);
    } catch (const bsf::InputError& e) {
      throw bsf::InputError("config key '" + b.key + "': " + e.what());
    }
  }
}

void validate_grid_size(int M) {
  if (M < 5) throw bsf::InputError("M must be at least 5 (got " + std::to_string(M) + ")");
  if (M % 2 == 0) throw bsf::InputError("M must be odd (got " + std::to_string(M) + ")");
}

std::vector<bsf::DataBlock> load_blocks(const std::string& path, bool strict) {
  const bsf::BlockParseResult parsed = bsf::read_blocks_csv(path, strict);
  for (const bsf::ParseIssue& issue : parsed.issues) {
    std::cerr << path << " line " << issue.line << ": skipped: "
              << issue.message << "\n";
  }
  if (parsed.blocks.empty()) {
    throw bsf::InputError("'" + path + "': no usable data blocks");
  }
  return parsed.blocks;
}

std::string default_hist_path(const std::string& out_path, const char* name) {
  return (std::filesystem::path(out_path).parent_path() / name).string();
}

void print_backtest_tables(const std::vector<bsf::BacktestReport>& reports) {
  std::printf("Profits and losses\n");
  std::printf("%-28s %10s %18s\n", "Method", "Options", "Total profit/loss");
  for (const auto& r : reports) {
    std::printf("%-28s %10ld %+18.2f\n", r.method.c_str(), r.n_options,
                r.total_pnl);
  }
  std::printf("\nPercentages of traded options with profits/losses\n");
  std::printf("%-28s %8s %8s %8s %10s %10s\n", "Method", "profit", "loss",
              "zero", "traded", "no-trade");
  for (const auto& r : reports) {
    std::printf("%-28s %7.2f%% %7.2f%% %7.2f%% %10ld %10ld\n",
                r.method.c_str(), r.pct_profit, r.pct_loss, r.pct_zero,
                r.n_traded, r.n_no_trade);
  }
}

std::string hist_path_for(const std::string& base, const std::string& method,
                          bool multi) {
  if (!multi) return base;
  std::filesystem::path p(base);
  const std::string stem = p.stem().string() + "_" + method;
  return (p.parent_path() / (stem + p.extension().string())).string();
}

// ---------------------------------------------------------------------------
// forecast

struct ForecastArgs {
  std::string input, out, minimizer_dir, dump_dir, hist, config;
  bsf::SolverConfig solver;
  bsf::PipelineOptions pipeline;
  bool no_row_normalize = false;
  bool strict_parse = false;
  std::string boundary_mode = "quadratic";
};

void setup_forecast(CLI::App& app, ForecastArgs& args) {
  CLI::App* cmd = app.add_subcommand(
      "forecast", "Solve every data block and emit point forecasts");
  cmd->add_option("--input", args.input, "data blocks CSV")->required();
  cmd->add_option("--out", args.out, "forecasts CSV to write")->required();
  cmd->add_option("--minimizer-dir", args.minimizer_dir,
                  "persist one full minimizer grid per block here");
  cmd->add_option("--dump-system", args.dump_dir,
                  "debug triplet dumps of the reduced systems");
  cmd->add_option("--hist", args.hist, "err histogram CSV (default err_hist.csv)");
  auto* beta = cmd->add_option("--beta", args.solver.beta, "regularization parameter");
  auto* grid = cmd->add_option("--grid-size", args.pipeline.M, "grid points per dimension (odd)");
  auto* par = cmd->add_option("--parallelism", args.pipeline.parallelism, "worker threads");
  auto* mode = cmd->add_option("--boundary-mode", args.boundary_mode,
                               "constant or quadratic");
  auto* tol = cmd->add_option("--cg-tol", args.solver.cg_tol, "CG gradient tolerance");
  auto* iters = cmd->add_option("--cg-max-iter", args.solver.cg_max_iter,
                                "CG iteration cap (0 = 10*N_r)");
  auto* bin = cmd->add_option("--err-bin-width", args.pipeline.err_bin_width,
                              "err histogram bin width");
  auto* norm = cmd->add_flag("--no-row-normalize", args.no_row_normalize,
                             "skip row normalization of the reduced system");
  cmd->add_flag("--strict-parse", args.strict_parse,
                "fail on the first malformed CSV row instead of skipping");
  cmd->add_option("--config", args.config, "flat key=value config file");

  cmd->callback([&args, beta, grid, par, mode, tol, iters, bin, norm]() {
    apply_config_file(
        args.config,
        {{"beta", beta, [&](const std::string& v) { args.solver.beta = bsf::parse_double(v, "beta"); }},
         {"grid_size", grid, [&](const std::string& v) { args.pipeline.M = static_cast<int>(bsf::parse_long(v, "grid_size")); }},
         {"parallelism", par, [&](const std::string& v) { args.pipeline.parallelism = static_cast<int>(bsf::parse_long(v, "parallelism")); }},
         {"boundary_mode", mode, [&](const std::string& v) { args.boundary_mode = v; }},
         {"cg_tol", tol, [&](const std::string& v) { args.solver.cg_tol = bsf::parse_double(v, "cg_tol"); }},
         {"cg_max_iter", iters, [&](const std::string& v) { args.solver.cg_max_iter = static_cast<int>(bsf::parse_long(v, "cg_max_iter")); }},
         {"err_bin_width", bin, [&](const std::string& v) { args.pipeline.err_bin_width = bsf::parse_double(v, "err_bin_width"); }},
         {"row_normalize", norm, [&](const std::string& v) { args.no_row_normalize = !parse_bool(v, "row_normalize"); }}});

    args.solver.row_normalize = !args.no_row_normalize;
    validate_grid_size(args.pipeline.M);
    bsf::validate_solver_config(args.solver);
    if (args.pipeline.parallelism < 1) {
      throw bsf::InputError("parallelism must be >= 1");
    }
    args.pipeline.boundary_mode = bsf::parse_boundary_mode(args.boundary_mode);
    args.pipeline.minimizer_dir = args.minimizer_dir;
    args.pipeline.dump_dir = args.dump_dir;

    const auto blocks = load_blocks(args.input, args.strict_parse);
    const bsf::BatchReport report =
        bsf::run_batch(blocks, args.solver, args.pipeline);
    bsf::write_forecasts_csv(args.out, report.forecasts);
    const std::string hist =
        args.hist.empty() ? default_hist_path(args.out, "err_hist.csv") : args.hist;
    bsf::write_histogram_csv(hist, report.err_histogram);

    for (const bsf::BatchFailure& f : report.failures) {
      std::cerr << "failed: " << f.option_id << ": " << f.message << "\n";
    }
    std::printf("forecasts: %zu ok, %zu failed\n", report.forecasts.size(),
                report.failures.size());
    if (!std::isnan(report.median_err)) {
      std::printf("median err: %.6f\n", report.median_err);
    }
  });
}

// ---------------------------------------------------------------------------
// backtest

struct BacktestArgs {
  std::string blocks, forecasts, method = "all", out, hist, features_out, config;
  bsf::BacktestOptions opts;
  bool strict_parse = false;
};

void setup_backtest(CLI::App& app, BacktestArgs& args) {
  CLI::App* cmd = app.add_subcommand(
      "backtest", "Apply the trading strategy and the trivial baselines");
  cmd->add_option("--blocks", args.blocks, "data blocks CSV")->required();
  cmd->add_option("--forecasts", args.forecasts, "forecasts CSV")->required();
  cmd->add_option("--method", args.method, "bs, last, ask, or all");
  auto* size = cmd->add_option("--contract-size", args.opts.contract_size,
                               "units per contract");
  auto* margin = cmd->add_option("--threshold-margin", args.opts.threshold_margin,
                                 "extra margin the predictor must clear");
  auto* bin = cmd->add_option("--pnl-bin-width", args.opts.pnl_bin_width,
                              "P&L histogram bin width");
  cmd->add_option("--out", args.out, "report JSON to write");
  cmd->add_option("--hist", args.hist, "P&L histogram CSV");
  cmd->add_option("--features-out", args.features_out,
                  "write ML feature vectors from the black_scholes trades");
  cmd->add_flag("--strict-parse", args.strict_parse, "fail on malformed rows");
  cmd->add_option("--config", args.config, "flat key=value config file");

  cmd->callback([&args, size, margin, bin]() {
    apply_config_file(
        args.config,
        {{"contract_size", size, [&](const std::string& v) { args.opts.contract_size = bsf::parse_double(v, "contract_size"); }},
         {"threshold_margin", margin, [&](const std::string& v) { args.opts.threshold_margin = bsf::parse_double(v, "threshold_margin"); }},
         {"pnl_bin_width", bin, [&](const std::string& v) { args.opts.pnl_bin_width = bsf::parse_double(v, "pnl_bin_width"); }}});
    if (!(args.opts.contract_size > 0.0)) {
      throw bsf::InputError("contract_size must be positive");
    }

    const auto blocks = load_blocks(args.blocks, args.strict_parse);
    const auto forecasts = bsf::read_forecasts_csv(args.forecasts);

    std::vector<bsf::TradeMethod> methods;
    if (args.method == "all") {
      methods = {bsf::TradeMethod::black_scholes, bsf::TradeMethod::last_price,
                 bsf::TradeMethod::ask_price};
    } else {
      methods = {bsf::parse_trade_method(args.method)};
    }

    std::vector<bsf::BacktestReport> reports;
    for (bsf::TradeMethod m : methods) {
      reports.push_back(bsf::run_backtest(blocks, forecasts, m, args.opts));
    }
    print_backtest_tables(reports);
    for (const auto& r : reports) {
      for (const std::string& s : r.skipped) std::cerr << "skipped: " << s << "\n";
    }
    if (!args.out.empty()) bsf::write_backtest_json(args.out, reports);
    if (!args.hist.empty()) {
      for (size_t i = 0; i < reports.size(); ++i) {
        bsf::write_histogram_csv(
            hist_path_for(args.hist, reports[i].method, methods.size() > 1),
            reports[i].pnl_histogram);
      }
    }
    if (!args.features_out.empty()) {
      const bsf::TradeSet set = bsf::compute_trades(
          blocks, forecasts, bsf::TradeMethod::black_scholes, args.opts);
      const bsf::FeatureBuild built =
          bsf::build_features(blocks, forecasts, set.trades);
      for (const std::string& id : built.skipped) {
        std::cerr << "features skipped: " << id << "\n";
      }
      bsf::write_features_csv(args.features_out, built.features);
      std::printf("features: %zu vectors\n", built.features.size());
    }
  });
}

// ---------------------------------------------------------------------------
// beta-search

struct BetaSearchArgs {
  std::string input, betas, out, config;
  bsf::SolverConfig solver;
  int grid_size = 21;
  int parallelism = 1;
  std::string boundary_mode = "quadratic";
  bool no_row_normalize = false;
  bool strict_parse = false;
};

void setup_beta_search(CLI::App& app, BetaSearchArgs& args) {
  CLI::App* cmd = app.add_subcommand(
      "beta-search", "Pick the beta with the smallest median forecast err");
  cmd->add_option("--input", args.input, "data blocks CSV with ground truth")
      ->required();
  cmd->add_option("--betas", args.betas, "comma-separated candidates")
      ->required();
  auto* grid = cmd->add_option("--grid-size", args.grid_size, "grid points (odd)");
  auto* par = cmd->add_option("--parallelism", args.parallelism, "worker threads");
  auto* mode = cmd->add_option("--boundary-mode", args.boundary_mode,
                               "constant or quadratic");
  auto* tol = cmd->add_option("--cg-tol", args.solver.cg_tol, "CG tolerance");
  auto* norm = cmd->add_flag("--no-row-normalize", args.no_row_normalize,
                             "skip row normalization");
  cmd->add_option("--out", args.out, "write the chosen beta here");
  cmd->add_flag("--strict-parse", args.strict_parse, "fail on malformed rows");
  cmd->add_option("--config", args.config, "flat key=value config file");

  cmd->callback([&args, grid, par, mode, tol, norm]() {
    apply_config_file(
        args.config,
        {{"grid_size", grid, [&](const std::string& v) { args.grid_size = static_cast<int>(bsf::parse_long(v, "grid_size")); }},
         {"parallelism", par, [&](const std::string& v) { args.parallelism = static_cast<int>(bsf::parse_long(v, "parallelism")); }},
         {"boundary_mode", mode, [&](const std::string& v) { args.boundary_mode = v; }},
         {"cg_tol", tol, [&](const std::string& v) { args.solver.cg_tol = bsf::parse_double(v, "cg_tol"); }},
         {"row_normalize", norm, [&](const std::string& v) { args.no_row_normalize = !parse_bool(v, "row_normalize"); }}});
    args.solver.row_normalize = !args.no_row_normalize;
    validate_grid_size(args.grid_size);

    std::vector<double> betas;
    std::string token;
    for (char c : args.betas + ",") {
      if (c == ',') {
        if (!token.empty()) betas.push_back(bsf::parse_double(token, "--betas"));
        token.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        token += c;
      }
    }
    for (double b : betas) {
      if (!(b > 0.0) || !(b < 1.0)) {
        throw bsf::InputError("beta candidates must lie in (0, 1)");
      }
    }

    const auto blocks = load_blocks(args.input, args.strict_parse);
    const double best =
        bsf::beta_search(blocks, betas, args.solver, args.grid_size,
                         bsf::parse_boundary_mode(args.boundary_mode),
                         args.parallelism);
    std::printf("best beta: %s\n", bsf::format_double(best).c_str());
    if (!args.out.empty()) {
      std::ofstream out(args.out);
      if (!out) throw bsf::InputError("cannot open '" + args.out + "' for writing");
      out << "beta=" << bsf::format_double(best) << "\n";
    }
  });
}

// ---------------------------------------------------------------------------
// train-filter

struct TrainFilterArgs {
  std::string features, out, curve, config;
  bsf::TrainConfig cfg;
};

void setup_train_filter(CLI::App& app, TrainFilterArgs& args) {
  CLI::App* cmd = app.add_subcommand(
      "train-filter", "Train the binary trade classifier on feature vectors");
  cmd->add_option("--features", args.features, "features CSV")->required();
  cmd->add_option("--out", args.out, "model JSON to write")->required();
  cmd->add_option("--curve", args.curve,
                  "k-fold learning-curve CSV (skipped when omitted)");
  auto* lr = cmd->add_option("--learning-rate", args.cfg.learning_rate, "GD step size");
  auto* iters = cmd->add_option("--iterations", args.cfg.iterations, "GD iterations");
  auto* lambda = cmd->add_option("--lambda", args.cfg.lambda, "L2 penalty weight");
  auto* folds = cmd->add_option("--k-folds", args.cfg.k_folds, "cross-validation folds");
  auto* seed = cmd->add_option("--seed", args.cfg.seed, "shuffle/init seed");
  auto* tf = cmd->add_option("--train-frac", args.cfg.train_frac, "training fraction");
  auto* vf = cmd->add_option("--validation-frac", args.cfg.validation_frac,
                             "validation fraction");
  auto* sf = cmd->add_option("--test-frac", args.cfg.test_frac, "test fraction");
  cmd->add_option("--config", args.config, "flat key=value config file");

  cmd->callback([&args, lr, iters, lambda, folds, seed, tf, vf, sf]() {
    apply_config_file(
        args.config,
        {{"ml.learning_rate", lr, [&](const std::string& v) { args.cfg.learning_rate = bsf::parse_double(v, "ml.learning_rate"); }},
         {"ml.iterations", iters, [&](const std::string& v) { args.cfg.iterations = static_cast<int>(bsf::parse_long(v, "ml.iterations")); }},
         {"ml.lambda", lambda, [&](const std::string& v) { args.cfg.lambda = bsf::parse_double(v, "ml.lambda"); }},
         {"ml.k_folds", folds, [&](const std::string& v) { args.cfg.k_folds = static_cast<int>(bsf::parse_long(v, "ml.k_folds")); }},
         {"ml.seed", seed, [&](const std::string& v) { args.cfg.seed = static_cast<std::uint64_t>(bsf::parse_long(v, "ml.seed")); }},
         {"ml.train_frac", tf, [&](const std::string& v) { args.cfg.train_frac = bsf::parse_double(v, "ml.train_frac"); }},
         {"ml.validation_frac", vf, [&](const std::string& v) { args.cfg.validation_frac = bsf::parse_double(v, "ml.validation_frac"); }},
         {"ml.test_frac", sf, [&](const std::string& v) { args.cfg.test_frac = bsf::parse_double(v, "ml.test_frac"); }}});
    bsf::validate_train_config(args.cfg);

    const auto features = bsf::read_features_csv(args.features);
    if (features.empty()) {
      throw bsf::InputError("'" + args.features + "': no feature vectors");
    }
    const bsf::TrainOutput out = bsf::train_filter(features, args.cfg);
    bsf::write_model_json(args.out, out.params, out.stats);
    std::printf("trained on %zu vectors (train %zu / val %zu / test %zu)\n",
                features.size(), out.split.train.size(),
                out.split.validation.size(), out.split.test.size());
    std::printf("test accuracy: %.4f\n", out.test_accuracy);
    if (!args.curve.empty()) {
      const bsf::CurveWithBands bands = bsf::k_fold_validate(features, args.cfg);
      bsf::write_curve_csv(args.curve, bands);
      std::printf("k-fold curve: %zu epochs, final mean loss %.6f\n",
                  bands.epochs.size(), bands.mean_eval_loss.back());
    }
  });
}

// ---------------------------------------------------------------------------
// filter-backtest

struct FilterBacktestArgs {
  std::string model, blocks, forecasts, out, hist, config;
  double threshold = 0.5;
  bsf::BacktestOptions opts;
  bool strict_parse = false;
};

void setup_filter_backtest(CLI::App& app, FilterBacktestArgs& args) {
  CLI::App* cmd = app.add_subcommand(
      "filter-backtest", "Backtest only the trades the classifier accepts");
  cmd->add_option("--model", args.model, "model JSON")->required();
  cmd->add_option("--blocks", args.blocks, "data blocks CSV")->required();
  cmd->add_option("--forecasts", args.forecasts, "forecasts CSV")->required();
  auto* thr = cmd->add_option("--threshold", args.threshold,
                              "classifier acceptance threshold");
  auto* size = cmd->add_option("--contract-size", args.opts.contract_size,
                               "units per contract");
  auto* margin = cmd->add_option("--threshold-margin", args.opts.threshold_margin,
                                 "extra margin the predictor must clear");
  auto* bin = cmd->add_option("--pnl-bin-width", args.opts.pnl_bin_width,
                              "P&L histogram bin width");
  cmd->add_option("--out", args.out, "report JSON to write");
  cmd->add_option("--hist", args.hist, "P&L histogram CSV (filtered set)");
  cmd->add_flag("--strict-parse", args.strict_parse, "fail on malformed rows");
  cmd->add_option("--config", args.config, "flat key=value config file");

  cmd->callback([&args, thr, size, margin, bin]() {
    apply_config_file(
        args.config,
        {{"ml.threshold", thr, [&](const std::string& v) { args.threshold = bsf::parse_double(v, "ml.threshold"); }},
         {"contract_size", size, [&](const std::string& v) { args.opts.contract_size = bsf::parse_double(v, "contract_size"); }},
         {"threshold_margin", margin, [&](const std::string& v) { args.opts.threshold_margin = bsf::parse_double(v, "threshold_margin"); }},
         {"pnl_bin_width", bin, [&](const std::string& v) { args.opts.pnl_bin_width = bsf::parse_double(v, "pnl_bin_width"); }}});
    if (args.threshold < 0.0 || args.threshold > 1.0) {
      throw bsf::InputError("threshold must lie in [0, 1]");
    }

    bsf::NetworkParams net;
    bsf::NormStats stats;
    bsf::read_model_json(args.model, net, stats);
    const auto blocks = load_blocks(args.blocks, args.strict_parse);
    const auto forecasts = bsf::read_forecasts_csv(args.forecasts);

    const bsf::BacktestReport unfiltered = bsf::run_backtest(
        blocks, forecasts, bsf::TradeMethod::black_scholes, args.opts);
    const bsf::BacktestReport filtered = bsf::filtered_backtest(
        blocks, forecasts, net, stats, args.threshold, args.opts);
    print_backtest_tables({unfiltered, filtered});
    if (!args.out.empty()) bsf::write_backtest_json(args.out, {unfiltered, filtered});
    if (!args.hist.empty()) bsf::write_histogram_csv(args.hist, filtered.pnl_histogram);
  });
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string out, model = "gbm_drift";
  bsf::SynthOptions opts;
};

void setup_synth(CLI::App& app, SynthArgs& args) {
  CLI::App* cmd = app.add_subcommand(
      "synth", "Generate a deterministic synthetic data-block file");
  cmd->add_option("--out", args.out, "blocks CSV to write")->required();
  cmd->add_option("--n", args.opts.n, "number of blocks");
  cmd->add_option("--model", args.model, "constant, noisy, or gbm_drift");
  cmd->add_option("--seed", args.opts.seed, "generator seed");
  cmd->add_option("--drift", args.opts.drift, "annual stock drift (gbm_drift)");
  cmd->add_option("--stock-vol", args.opts.stock_vol, "annual stock volatility");
  cmd->add_option("--noise", args.opts.noise_level, "relative quote noise");
  cmd->add_option("--option-spread", args.opts.option_spread,
                  "relative option bid/ask spread");
  cmd->add_option("--stock-spread", args.opts.stock_spread,
                  "relative stock bid/ask spread");

  cmd->callback([&args]() {
    args.opts.model = bsf::parse_synth_model(args.model);
    const auto blocks = bsf::generate_blocks(args.opts);
    bsf::write_blocks_csv(args.out, blocks);
    std::printf("wrote %zu blocks to %s\n", blocks.size(), args.out.c_str());
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Short-horizon option price forecasting, backtesting, and the "
               "ML trade filter"};
  app.require_subcommand(1);

  ForecastArgs forecast_args;
  BacktestArgs backtest_args;
  BetaSearchArgs beta_args;
  TrainFilterArgs train_args;
  FilterBacktestArgs filter_args;
  SynthArgs synth_args;

  setup_forecast(app, forecast_args);
  setup_backtest(app, backtest_args);
  setup_beta_search(app, beta_args);
  setup_train_filter(app, train_args);
  setup_filter_backtest(app, filter_args);
  setup_synth(app, synth_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const bsf::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const bsf::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
