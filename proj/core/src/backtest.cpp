#include "bsforecast/backtest.hpp"

#include <cmath>
#include <unordered_map>

#include "bsforecast/errors.hpp"

namespace bsf {

TradeMethod parse_trade_method(const std::string& name) {
  if (name == "bs" || name == "black_scholes") return TradeMethod::black_scholes;
  if (name == "last" || name == "last_price") return TradeMethod::last_price;
  if (name == "ask" || name == "ask_price") return TradeMethod::ask_price;
  throw InputError("unknown trade method '" + name +
                   "' (expected bs, last, or ask)");
}

const char* to_string(TradeMethod method) {
  switch (method) {
    case TradeMethod::black_scholes: return "black_scholes";
    case TradeMethod::last_price: return "last_price";
    case TradeMethod::ask_price: return "ask_price";
  }
  return "?";
}

TradeRecord decide_trade(const DataBlock& block, const Forecast& forecast,
                         TradeMethod method, const BacktestOptions& opts) {
  if (!block.real_plus1) {
    throw InputError("decide_trade: block " + block.option_id +
                     " has no realized next-day price");
  }
  double predictor = 0.0;
  switch (method) {
    case TradeMethod::black_scholes:
      predictor = 0.5 * (forecast.est_plus1 + forecast.est_plus2);
      break;
    case TradeMethod::last_price:
      predictor = 0.5 * (block.today().option_bid + block.today().option_ask);
      break;
    case TradeMethod::ask_price:
      predictor = block.today().option_ask;
      break;
  }

  TradeRecord rec;
  rec.option_id = block.option_id;
  rec.method = method;
  const double ask = block.today().option_ask;
  if (predictor > ask + opts.threshold_margin) {
    rec.action = TradeAction::buy;
    rec.entry_price = ask;
    rec.exit_price = *block.real_plus1;
    rec.pnl = (rec.exit_price - rec.entry_price) * opts.contract_size;
    if (std::fabs(rec.pnl) < kZeroPnlTolerance) {
      rec.outcome = TradeOutcome::zero;
    } else {
      rec.outcome = rec.pnl > 0.0 ? TradeOutcome::profit : TradeOutcome::loss;
    }
  }
  return rec;
}

TradeSet compute_trades(const std::vector<DataBlock>& blocks,
                        const std::vector<Forecast>& forecasts,
                        TradeMethod method, const BacktestOptions& opts) {
  std::unordered_map<std::string, const Forecast*> by_id;
  by_id.reserve(forecasts.size());
  for (const Forecast& f : forecasts) by_id[f.option_id] = &f;

  TradeSet set;
  set.trades.reserve(blocks.size());
  for (const DataBlock& block : blocks) {
    const auto it = by_id.find(block.option_id);
    if (it == by_id.end()) {
      set.skipped.push_back(block.option_id + ": no forecast");
      continue;
    }
    if (!block.real_plus1) {
      set.skipped.push_back(block.option_id + ": no ground truth");
      continue;
    }
    set.trades.push_back(decide_trade(block, *it->second, method, opts));
  }
  return set;
}

BacktestReport aggregate_trades(const std::vector<TradeRecord>& trades,
                                const std::string& method_name,
                                double pnl_bin_width) {
  BacktestReport report;
  report.method = method_name;
  report.n_options = static_cast<long>(trades.size());

  long profits = 0, losses = 0, zeros = 0;
  std::vector<double> traded_pnls;
  for (const TradeRecord& rec : trades) {
    if (rec.action == TradeAction::no_trade) {
      ++report.n_no_trade;
      continue;
    }
    ++report.n_traded;
    report.total_pnl += rec.pnl;
    if (rec.pnl > 0.0) report.gross_profit += rec.pnl;
    if (rec.pnl < 0.0) report.gross_loss -= rec.pnl;
    switch (rec.outcome) {
      case TradeOutcome::profit: ++profits; break;
      case TradeOutcome::loss: ++losses; break;
      case TradeOutcome::zero: ++zeros; break;
    }
    traded_pnls.push_back(rec.pnl);
  }
  if (report.n_traded > 0) {
    const double denom = static_cast<double>(report.n_traded);
    report.pct_profit = 100.0 * profits / denom;
    report.pct_loss = 100.0 * losses / denom;
    report.pct_zero = 100.0 * zeros / denom;
  }
  report.pnl_histogram = make_range_histogram(traded_pnls, pnl_bin_width);
  return report;
}

BacktestReport run_backtest(const std::vector<DataBlock>& blocks,
                            const std::vector<Forecast>& forecasts,
                            TradeMethod method, const BacktestOptions& opts) {
  TradeSet set = compute_trades(blocks, forecasts, method, opts);
  BacktestReport report =
      aggregate_trades(set.trades, to_string(method), opts.pnl_bin_width);
  report.skipped = std::move(set.skipped);
  return report;
}

}  // namespace bsf
