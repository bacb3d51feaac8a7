#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace bsf {

/// One trading day in years (255 trading days per year).
inline constexpr double kTau = 1.0 / 255.0;

/// End-of-day quote snapshot for one option and, when available, its
/// underlying stock. Stock quotes are only required on the last day of a
/// block, where they define the spatial interval of the solve.
struct MarketDay {
  double option_bid = 0.0;
  double option_ask = 0.0;
  double volatility = 0.0;  ///< annualized implied volatility
  std::optional<double> stock_bid;
  std::optional<double> stock_ask;

  /// Throws InputError naming `context` if any quote invariant is violated.
  void validate(const std::string& context) const;
};

/// Three consecutive trading days of market data for one option
/// (t = -2tau, -tau, 0) plus the realized option prices one and two
/// days ahead when known. Immutable after construction by convention.
struct DataBlock {
  std::string option_id;
  std::array<MarketDay, 3> days;  ///< [0]=t-2tau, [1]=t-tau, [2]=today
  std::optional<double> real_plus1;
  std::optional<double> real_plus2;

  const MarketDay& day_m2() const { return days[0]; }
  const MarketDay& day_m1() const { return days[1]; }
  const MarketDay& today() const { return days[2]; }

  double stock_bid0() const;
  double stock_ask0() const;

  /// True when both realized prices are present.
  bool has_ground_truth() const {
    return real_plus1.has_value() && real_plus2.has_value();
  }

  void validate() const;
};

}  // namespace bsf
