#include "bsforecast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "bsforecast/errors.hpp"

namespace bsf {

SynthModel parse_synth_model(const std::string& name) {
  if (name == "constant") return SynthModel::constant;
  if (name == "noisy") return SynthModel::noisy;
  if (name == "gbm_drift") return SynthModel::gbm_drift;
  throw InputError("unknown synth model '" + name +
                   "' (expected constant, noisy, or gbm_drift)");
}

const char* to_string(SynthModel model) {
  switch (model) {
    case SynthModel::constant: return "constant";
    case SynthModel::noisy: return "noisy";
    case SynthModel::gbm_drift: return "gbm_drift";
  }
  return "?";
}

namespace {

std::string block_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "SYN%06d", i);
  return buf;
}

MarketDay quote_day(double mid, double vol, double spread) {
  MarketDay day;
  day.option_bid = mid * (1.0 - 0.5 * spread);
  day.option_ask = mid * (1.0 + 0.5 * spread);
  day.volatility = vol;
  return day;
}

void attach_stock(MarketDay& day, double stock_mid, double spread) {
  day.stock_bid = stock_mid * (1.0 - 0.5 * spread);
  day.stock_ask = stock_mid * (1.0 + 0.5 * spread);
}

DataBlock constant_block(int i, std::mt19937_64& rng, const SynthOptions& opts,
                         bool noisy) {
  std::uniform_real_distribution<double> mid_dist(1.5, 6.0);
  std::uniform_real_distribution<double> vol_dist(0.15, 0.45);
  std::uniform_real_distribution<double> stock_dist(20.0, 200.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const double mid = mid_dist(rng);
  const double vol = vol_dist(rng);
  const double stock_mid = stock_dist(rng);

  DataBlock block;
  block.option_id = block_id(i);
  for (int d = 0; d < 3; ++d) {
    MarketDay day = quote_day(mid, vol, opts.option_spread);
    if (noisy) {
      day.option_bid *= 1.0 + opts.noise_level * unit(rng);
      day.option_ask *= 1.0 + opts.noise_level * unit(rng);
      day.volatility *= 1.0 + opts.noise_level * unit(rng);
      day.option_ask = std::max(day.option_ask, day.option_bid);
    }
    block.days[d] = day;
  }
  attach_stock(block.days[2], stock_mid, opts.stock_spread);
  double real1 = mid, real2 = mid;
  if (noisy) {
    real1 *= 1.0 + opts.noise_level * unit(rng);
    real2 *= 1.0 + opts.noise_level * unit(rng);
  }
  block.real_plus1 = real1;
  block.real_plus2 = real2;
  return block;
}

DataBlock gbm_block(int i, std::mt19937_64& rng, const SynthOptions& opts) {
  std::uniform_real_distribution<double> s0_dist(50.0, 150.0);
  std::uniform_real_distribution<double> strike_dist(0.80, 0.98);
  std::uniform_real_distribution<double> vol_dist(0.25, 0.45);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Stock path over the block's five days (-2, -1, 0, +1, +2).
  double path[5];
  path[0] = s0_dist(rng);
  const double step_mean = (opts.drift - 0.5 * opts.stock_vol * opts.stock_vol) * kTau;
  const double step_sd = opts.stock_vol * std::sqrt(kTau);
  for (int d = 1; d < 5; ++d) {
    path[d] = path[d - 1] * std::exp(step_mean + step_sd * gauss(rng));
  }
  const double strike = path[0] * strike_dist(rng);
  const double implied_vol = vol_dist(rng);

  auto option_value = [&](int day_index) {
    const double t_rem = (opts.maturity_days - day_index) * kTau;
    const double intrinsic = std::max(path[day_index] - strike, 0.0);
    return std::max(std::exp(-opts.rate * t_rem) * intrinsic, 0.05);
  };

  DataBlock block;
  block.option_id = block_id(i);
  for (int d = 0; d < 3; ++d) {
    const double mid = option_value(d);
    MarketDay day = quote_day(mid, implied_vol, opts.option_spread);
    day.option_bid *= 1.0 + opts.noise_level * unit(rng);
    day.option_ask *= 1.0 + opts.noise_level * unit(rng);
    day.volatility *= 1.0 + opts.noise_level * unit(rng);
    day.option_ask = std::max(day.option_ask, day.option_bid);
    block.days[d] = day;
  }
  attach_stock(block.days[2], path[2], opts.stock_spread);
  block.real_plus1 = option_value(3);
  block.real_plus2 = option_value(4);
  return block;
}

}  // namespace

std::vector<DataBlock> generate_blocks(const SynthOptions& opts) {
  if (opts.n < 1) throw InputError("synth: n must be >= 1");
  if (!(opts.noise_level >= 0.0) || opts.noise_level >= 1.0) {
    throw InputError("synth: noise level must lie in [0, 1)");
  }
  if (!(opts.option_spread > 0.0) || !(opts.stock_spread > 0.0)) {
    throw InputError("synth: spreads must be positive");
  }
  std::mt19937_64 rng(opts.seed);
  std::vector<DataBlock> blocks;
  blocks.reserve(opts.n);
  for (int i = 0; i < opts.n; ++i) {
    switch (opts.model) {
      case SynthModel::constant:
        blocks.push_back(constant_block(i, rng, opts, false));
        break;
      case SynthModel::noisy:
        blocks.push_back(constant_block(i, rng, opts, true));
        break;
      case SynthModel::gbm_drift:
        blocks.push_back(gbm_block(i, rng, opts));
        break;
    }
    blocks.back().validate();
  }
  return blocks;
}

}  // namespace bsf
