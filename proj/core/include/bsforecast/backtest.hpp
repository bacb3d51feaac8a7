#pragma once

#include <string>
#include <vector>

#include "bsforecast/histogram.hpp"
#include "bsforecast/market_data.hpp"
#include "bsforecast/pipeline.hpp"

namespace bsf {

enum class TradeMethod { black_scholes, last_price, ask_price };

TradeMethod parse_trade_method(const std::string& name);
const char* to_string(TradeMethod method);

enum class TradeAction { buy, no_trade };
enum class TradeOutcome { profit, loss, zero };

/// |pnl| below this counts as a zero outcome.
inline constexpr double kZeroPnlTolerance = 1e-9;

struct TradeRecord {
  std::string option_id;
  TradeMethod method = TradeMethod::black_scholes;
  TradeAction action = TradeAction::no_trade;
  double entry_price = 0.0;
  double exit_price = 0.0;
  double pnl = 0.0;
  TradeOutcome outcome = TradeOutcome::zero;
};

struct BacktestOptions {
  double contract_size = 100.0;
  double threshold_margin = 0.0;
  double pnl_bin_width = 10.0;
};

/// Buy one contract at today's ask iff the method's predictor exceeds the
/// ask by more than threshold_margin; exit at tomorrow's realized price.
/// Predictors: black_scholes = (EST1+EST2)/2, last_price = today's
/// bid/ask mid, ask_price = today's ask. Requires real_plus1.
TradeRecord decide_trade(const DataBlock& block, const Forecast& forecast,
                         TradeMethod method, const BacktestOptions& opts = {});

struct TradeSet {
  std::vector<TradeRecord> trades;  ///< block order, one per aligned pair
  std::vector<std::string> skipped; ///< ids without forecast or ground truth
};

/// Matches blocks to forecasts by option_id and applies decide_trade to
/// every aligned pair with ground truth; mismatches are listed, not fatal.
TradeSet compute_trades(const std::vector<DataBlock>& blocks,
                        const std::vector<Forecast>& forecasts,
                        TradeMethod method, const BacktestOptions& opts = {});

struct BacktestReport {
  std::string method;
  long n_options = 0;   ///< aligned pairs evaluated
  long n_traded = 0;
  long n_no_trade = 0;
  double total_pnl = 0.0;     ///< in-order sum over all trades
  double gross_profit = 0.0;  ///< sum of positive pnl, nonnegative
  double gross_loss = 0.0;    ///< -sum of negative pnl, nonnegative
  double pct_profit = 0.0;    ///< over traded options; 0 when none traded
  double pct_loss = 0.0;
  double pct_zero = 0.0;
  std::vector<HistogramBin> pnl_histogram;  ///< traded options only
  std::vector<std::string> skipped;
};

BacktestReport aggregate_trades(const std::vector<TradeRecord>& trades,
                                const std::string& method_name,
                                double pnl_bin_width);

BacktestReport run_backtest(const std::vector<DataBlock>& blocks,
                            const std::vector<Forecast>& forecasts,
                            TradeMethod method,
                            const BacktestOptions& opts = {});

}  // namespace bsf
