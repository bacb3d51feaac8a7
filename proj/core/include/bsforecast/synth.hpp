#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsforecast/market_data.hpp"

namespace bsf {

enum class SynthModel { constant, noisy, gbm_drift };

SynthModel parse_synth_model(const std::string& name);
const char* to_string(SynthModel model);

/// Knobs for the synthetic block generator. Everything is seeded; the
/// same options always produce the same blocks.
struct SynthOptions {
  SynthModel model = SynthModel::gbm_drift;
  int n = 100;
  std::uint64_t seed = 1;

  double drift = 1.5;          ///< annual stock drift (gbm_drift)
  double stock_vol = 0.15;     ///< annual stock volatility (gbm_drift)
  double noise_level = 0.005;  ///< relative quote noise (noisy, gbm_drift)
  double option_spread = 0.04; ///< full relative option bid/ask spread
  double stock_spread = 0.002; ///< full relative stock bid/ask spread
  double rate = 0.03;          ///< discount rate on intrinsic value
  int maturity_days = 30;      ///< option maturity from the first block day
};

/// constant: three identical days, ground truth = today's mid.
/// noisy: constant base plus seeded relative noise on every quote.
/// gbm_drift: a geometric-Brownian stock path; option quotes are the
/// discounted intrinsic value (floored away from zero) plus noise and a
/// bid/ask spread, ground truth from the same path on days +1 and +2.
std::vector<DataBlock> generate_blocks(const SynthOptions& opts);

}  // namespace bsf
