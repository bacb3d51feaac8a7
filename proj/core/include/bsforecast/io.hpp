#pragma once

#include <map>
#include <string>
#include <vector>

#include "bsforecast/backtest.hpp"
#include "bsforecast/histogram.hpp"
#include "bsforecast/market_data.hpp"
#include "bsforecast/ml.hpp"
#include "bsforecast/pipeline.hpp"

namespace bsf {

/// Data block CSV header, fixed column order.
extern const char* kBlocksCsvHeader;

struct ParseIssue {
  int line = 0;  ///< 1-based, header is line 1
  std::string message;
};

struct BlockParseResult {
  std::vector<DataBlock> blocks;
  std::vector<ParseIssue> issues;
};

/// Reads data blocks. Malformed rows are recorded with their line number
/// and skipped; with strict=true the first one is fatal (InputError).
BlockParseResult read_blocks_csv(const std::string& path, bool strict);

void write_blocks_csv(const std::string& path,
                      const std::vector<DataBlock>& blocks);

/// forecasts.csv: option_id, est_p1, est_p2, err, beta, M, converged.
/// err is empty without ground truth.
void write_forecasts_csv(const std::string& path,
                         const std::vector<Forecast>& forecasts);
std::vector<Forecast> read_forecasts_csv(const std::string& path);

/// bin_low, bin_high, count. Infinite bin_high is written as "inf".
void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramBin>& bins);

/// option_id, the 13 feature columns, label.
void write_features_csv(const std::string& path,
                        const std::vector<FeatureVector>& features);
std::vector<FeatureVector> read_features_csv(const std::string& path);

/// epoch, mean_eval_loss, std_eval_loss.
void write_curve_csv(const std::string& path, const CurveWithBands& curve);

void write_backtest_json(const std::string& path,
                         const std::vector<BacktestReport>& reports);

/// model.json: layer sizes, row-major weights, biases, and the
/// normalization statistics.
void write_model_json(const std::string& path, const NetworkParams& net,
                      const NormStats& stats);
void read_model_json(const std::string& path, NetworkParams& net,
                     NormStats& stats);

/// Flat `key = value` config file; '#' starts a comment. Unknown keys are
/// the caller's concern.
std::map<std::string, std::string> load_key_values(const std::string& path);

/// Locale-independent helpers shared by the writers.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& what);
long parse_long(const std::string& text, const std::string& what);

}  // namespace bsf
