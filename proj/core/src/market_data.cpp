#include "bsforecast/market_data.hpp"

#include <cmath>

#include "bsforecast/errors.hpp"

namespace bsf {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void MarketDay::validate(const std::string& context) const {
  if (!finite_positive(option_bid) || !finite_positive(option_ask)) {
    throw InputError(context + ": option bid/ask must be positive");
  }
  if (option_bid > option_ask) {
    throw InputError(context + ": option_bid exceeds option_ask");
  }
  if (!finite_positive(volatility)) {
    throw InputError(context + ": volatility must be positive");
  }
  if (stock_bid.has_value() != stock_ask.has_value()) {
    throw InputError(context + ": stock bid/ask must be given together");
  }
  if (stock_bid) {
    if (!finite_positive(*stock_bid) || !finite_positive(*stock_ask)) {
      throw InputError(context + ": stock bid/ask must be positive");
    }
    if (*stock_bid > *stock_ask) {
      throw InputError(context + ": stock_bid exceeds stock_ask");
    }
  }
}

double DataBlock::stock_bid0() const {
  if (!today().stock_bid) {
    throw InputError("block " + option_id + ": missing stock_bid at t=0");
  }
  return *today().stock_bid;
}

double DataBlock::stock_ask0() const {
  if (!today().stock_ask) {
    throw InputError("block " + option_id + ": missing stock_ask at t=0");
  }
  return *today().stock_ask;
}

void DataBlock::validate() const {
  static const char* kDayName[3] = {"t=-2tau", "t=-tau", "t=0"};
  for (int d = 0; d < 3; ++d) {
    days[d].validate("block " + option_id + " " + kDayName[d]);
  }
  const double sb = stock_bid0();
  const double sa = stock_ask0();
  if (sb == sa) {
    throw InputError("block " + option_id +
                     ": degenerate s-interval (stock_bid(0) == stock_ask(0))");
  }
  if (real_plus1 && !finite_positive(*real_plus1)) {
    throw InputError("block " + option_id + ": real_plus1 must be positive");
  }
  if (real_plus2 && !finite_positive(*real_plus2)) {
    throw InputError("block " + option_id + ": real_plus2 must be positive");
  }
}

}  // namespace bsf
