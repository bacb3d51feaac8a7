#include "bsforecast/ml.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "bsforecast/errors.hpp"

namespace bsf {

namespace {

constexpr double kClamp = 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double h) {
  return std::min(1.0 - kClamp, std::max(kClamp, h));
}

// Activations of every layer for one sample; a[0] is the input.
std::vector<std::vector<double>> forward_pass(
    const NetworkParams& net, const std::array<double, kFeatureCount>& x) {
  const int n_layers = static_cast<int>(net.sizes.size());
  std::vector<std::vector<double>> a(n_layers);
  a[0].assign(x.begin(), x.end());
  for (int l = 0; l + 1 < n_layers; ++l) {
    const int in = net.sizes[l];
    const int out = net.sizes[l + 1];
    a[l + 1].resize(out);
    for (int r = 0; r < out; ++r) {
      double z = net.biases[l][r];
      const double* w = &net.weights[l][static_cast<size_t>(r) * in];
      for (int c = 0; c < in; ++c) z += w[c] * a[l][c];
      a[l + 1][r] = sigmoid(z);
    }
  }
  return a;
}

}  // namespace

std::array<double, kFeatureCount> make_features(const DataBlock& block,
                                                const Forecast& forecast) {
  return {forecast.est_plus1,
          forecast.est_plus2,
          block.stock_bid0(),
          block.stock_ask0(),
          block.day_m2().option_bid,
          block.day_m2().option_ask,
          block.day_m2().volatility,
          block.day_m1().option_bid,
          block.day_m1().option_ask,
          block.day_m1().volatility,
          block.today().option_bid,
          block.today().option_ask,
          block.today().volatility};
}

FeatureBuild build_features(const std::vector<DataBlock>& blocks,
                            const std::vector<Forecast>& forecasts,
                            const std::vector<TradeRecord>& trades) {
  std::unordered_map<std::string, const DataBlock*> block_by_id;
  std::unordered_map<std::string, const Forecast*> forecast_by_id;
  for (const DataBlock& b : blocks) block_by_id[b.option_id] = &b;
  for (const Forecast& f : forecasts) forecast_by_id[f.option_id] = &f;

  FeatureBuild out;
  for (const TradeRecord& trade : trades) {
    if (trade.action != TradeAction::buy) continue;
    const auto bit = block_by_id.find(trade.option_id);
    const auto fit = forecast_by_id.find(trade.option_id);
    if (bit == block_by_id.end() || fit == forecast_by_id.end()) {
      out.skipped.push_back(trade.option_id);
      continue;
    }
    FeatureVector fv;
    fv.option_id = trade.option_id;
    fv.x = make_features(*bit->second, *fit->second);
    fv.label = trade.outcome == TradeOutcome::profit ? 1 : 0;
    out.features.push_back(std::move(fv));
  }
  return out;
}

NormStats compute_norm_stats(const std::vector<FeatureVector>& training) {
  if (training.empty()) {
    throw InputError("normalize_features: empty training set");
  }
  NormStats stats;
  const double m = static_cast<double>(training.size());
  for (const FeatureVector& fv : training) {
    for (int k = 0; k < kFeatureCount; ++k) stats.mean[k] += fv.x[k];
  }
  for (int k = 0; k < kFeatureCount; ++k) stats.mean[k] /= m;
  for (const FeatureVector& fv : training) {
    for (int k = 0; k < kFeatureCount; ++k) {
      const double d = fv.x[k] - stats.mean[k];
      stats.stddev[k] += d * d;
    }
  }
  for (int k = 0; k < kFeatureCount; ++k) {
    stats.stddev[k] = std::max(std::sqrt(stats.stddev[k] / m), 1e-12);
  }
  return stats;
}

std::pair<std::vector<FeatureVector>, NormStats> normalize_features(
    const std::vector<FeatureVector>& training) {
  NormStats stats = compute_norm_stats(training);
  return {apply_normalization(training, stats), stats};
}

std::vector<FeatureVector> apply_normalization(
    const std::vector<FeatureVector>& vs, const NormStats& stats) {
  std::vector<FeatureVector> out = vs;
  for (FeatureVector& fv : out) {
    for (int k = 0; k < kFeatureCount; ++k) {
      fv.x[k] = (fv.x[k] - stats.mean[k]) / stats.stddev[k];
    }
  }
  return out;
}

std::vector<int> default_layer_sizes() { return {kFeatureCount, 50, 25, 14, 1}; }

NetworkParams NetworkParams::create(const std::vector<int>& sizes,
                                    std::uint64_t seed) {
  if (sizes.size() < 2) throw InputError("network needs at least two layers");
  NetworkParams net;
  net.sizes = sizes;
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const double r = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-r, r);
    std::vector<double> w(static_cast<size_t>(in) * out);
    for (double& v : w) v = dist(rng);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(out, 0.0);
  }
  return net;
}

int NetworkParams::parameter_count() const {
  int n = 0;
  for (const auto& w : weights) n += static_cast<int>(w.size());
  for (const auto& b : biases) n += static_cast<int>(b.size());
  return n;
}

double forward(const NetworkParams& net,
               const std::array<double, kFeatureCount>& x) {
  return forward_pass(net, x).back()[0];
}

double loss(const NetworkParams& net, const std::vector<FeatureVector>& batch,
            double lambda) {
  if (batch.empty()) throw InputError("loss: empty batch");
  const double m = static_cast<double>(batch.size());
  double data_term = 0.0;
  for (const FeatureVector& fv : batch) {
    const double h = clamp_prob(forward(net, fv.x));
    data_term += fv.label == 1 ? -std::log(h) : -std::log(1.0 - h);
  }
  double penalty = 0.0;
  for (const auto& w : net.weights) {
    for (double v : w) penalty += v * v;
  }
  return data_term / m + lambda / (2.0 * m) * penalty;
}

NetworkGradient loss_gradient(const NetworkParams& net,
                              const std::vector<FeatureVector>& batch,
                              double lambda) {
  if (batch.empty()) throw InputError("loss_gradient: empty batch");
  const int n_links = static_cast<int>(net.weights.size());
  NetworkGradient grad;
  grad.weights.resize(n_links);
  grad.biases.resize(n_links);
  for (int l = 0; l < n_links; ++l) {
    grad.weights[l].assign(net.weights[l].size(), 0.0);
    grad.biases[l].assign(net.biases[l].size(), 0.0);
  }

  const double m = static_cast<double>(batch.size());
  for (const FeatureVector& fv : batch) {
    const auto a = forward_pass(net, fv.x);
    // Output delta of cross-entropy through the sigmoid: (h - y) / m.
    std::vector<double> delta{(a.back()[0] - fv.label) / m};
    for (int l = n_links - 1; l >= 0; --l) {
      const int in = net.sizes[l];
      const int out = net.sizes[l + 1];
      for (int r = 0; r < out; ++r) {
        const double d = delta[r];
        grad.biases[l][r] += d;
        double* gw = &grad.weights[l][static_cast<size_t>(r) * in];
        for (int c = 0; c < in; ++c) gw[c] += d * a[l][c];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      for (int c = 0; c < in; ++c) {
        double acc = 0.0;
        for (int r = 0; r < out; ++r) {
          acc += net.weights[l][static_cast<size_t>(r) * in + c] * delta[r];
        }
        prev[c] = acc * a[l][c] * (1.0 - a[l][c]);
      }
      delta = std::move(prev);
    }
  }
  for (int l = 0; l < n_links; ++l) {
    for (size_t k = 0; k < net.weights[l].size(); ++k) {
      grad.weights[l][k] += lambda / m * net.weights[l][k];
    }
  }
  return grad;
}

void validate_train_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw InputError("ml.learning_rate must be > 0");
  if (cfg.iterations < 1) throw InputError("ml.iterations must be >= 1");
  if (cfg.lambda < 0.0) throw InputError("ml.lambda must be >= 0");
  if (cfg.k_folds < 2) throw InputError("ml.k_folds must be >= 2");
  const double sum = cfg.train_frac + cfg.validation_frac + cfg.test_frac;
  if (cfg.train_frac <= 0.0 || cfg.validation_frac < 0.0 ||
      cfg.test_frac < 0.0 || std::fabs(sum - 1.0) > 1e-9) {
    throw InputError("ml split fractions must be nonnegative and sum to 1");
  }
}

Split make_split(int n, const TrainConfig& cfg) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_train = static_cast<int>(std::floor(cfg.train_frac * n));
  const int n_val = static_cast<int>(std::floor(cfg.validation_frac * n));
  Split split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.validation.assign(order.begin() + n_train,
                          order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  return split;
}

namespace {

double eval_mse(const NetworkParams& net,
                const std::vector<FeatureVector>& eval_set) {
  if (eval_set.empty()) return 0.0;
  double acc = 0.0;
  for (const FeatureVector& fv : eval_set) {
    const double d = forward(net, fv.x) - fv.label;
    acc += d * d;
  }
  return acc / static_cast<double>(eval_set.size());
}

}  // namespace

std::pair<NetworkParams, LearningCurve> train(
    const std::vector<FeatureVector>& train_set,
    const std::vector<FeatureVector>& eval_set, const TrainConfig& cfg) {
  if (train_set.empty()) throw InputError("train: empty training set");
  NetworkParams net = NetworkParams::create(default_layer_sizes(), cfg.seed + 1);
  LearningCurve curve;
  curve.train_loss.reserve(cfg.iterations);
  for (int it = 1; it <= cfg.iterations; ++it) {
    const NetworkGradient grad = loss_gradient(net, train_set, cfg.lambda);
    for (size_t l = 0; l < net.weights.size(); ++l) {
      for (size_t k = 0; k < net.weights[l].size(); ++k) {
        net.weights[l][k] -= cfg.learning_rate * grad.weights[l][k];
      }
      for (size_t k = 0; k < net.biases[l].size(); ++k) {
        net.biases[l][k] -= cfg.learning_rate * grad.biases[l][k];
      }
    }
    const double current = loss(net, train_set, cfg.lambda);
    if (!std::isfinite(current)) {
      throw NumericError("train: loss diverged at iteration " +
                         std::to_string(it));
    }
    curve.train_loss.push_back(current);
    if (it % kIterationsPerEpoch == 0 || it == cfg.iterations) {
      curve.eval_epoch_mse.push_back(eval_mse(net, eval_set));
    }
  }
  return {std::move(net), std::move(curve)};
}

TrainOutput train_filter(const std::vector<FeatureVector>& data,
                         const TrainConfig& cfg) {
  if (data.empty()) throw InputError("train_filter: no feature vectors");
  TrainOutput out;
  out.split = make_split(static_cast<int>(data.size()), cfg);
  if (out.split.train.empty()) {
    throw InputError("train_filter: training split is empty");
  }
  std::vector<FeatureVector> train_raw, val_raw, test_raw;
  for (int idx : out.split.train) train_raw.push_back(data[idx]);
  for (int idx : out.split.validation) val_raw.push_back(data[idx]);
  for (int idx : out.split.test) test_raw.push_back(data[idx]);

  out.stats = compute_norm_stats(train_raw);
  const auto train_set = apply_normalization(train_raw, out.stats);
  const auto val_set = apply_normalization(val_raw, out.stats);
  const auto test_set = apply_normalization(test_raw, out.stats);

  auto [net, curve] = train(train_set, val_set, cfg);
  out.params = std::move(net);
  out.curve = std::move(curve);
  out.test_accuracy = test_set.empty() ? 0.0 : accuracy(out.params, test_set);
  return out;
}

CurveWithBands k_fold_validate(const std::vector<FeatureVector>& data,
                               const TrainConfig& cfg) {
  const int n = static_cast<int>(data.size());
  const int k = cfg.k_folds;
  if (n < 2 * k) {
    throw InputError("k_fold_validate: need at least " + std::to_string(2 * k) +
                     " samples for k = " + std::to_string(k));
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<double>> fold_curves;
  for (int fold = 0; fold < k; ++fold) {
    // Contiguous chunks of the shuffled order; remainders go to early folds.
    const int base = n / k, extra = n % k;
    const int begin = fold * base + std::min(fold, extra);
    const int end = begin + base + (fold < extra ? 1 : 0);
    std::vector<FeatureVector> held_raw, train_raw;
    for (int pos = 0; pos < n; ++pos) {
      if (pos >= begin && pos < end) {
        held_raw.push_back(data[order[pos]]);
      } else {
        train_raw.push_back(data[order[pos]]);
      }
    }
    const NormStats stats = compute_norm_stats(train_raw);
    const auto train_set = apply_normalization(train_raw, stats);
    const auto held_set = apply_normalization(held_raw, stats);
    auto [net, curve] = train(train_set, held_set, cfg);
    (void)net;
    fold_curves.push_back(std::move(curve.eval_epoch_mse));
  }

  CurveWithBands bands;
  const size_t n_epochs = fold_curves.front().size();
  for (size_t e = 0; e < n_epochs; ++e) {
    double mean = 0.0;
    for (const auto& c : fold_curves) mean += c[e];
    mean /= k;
    double var = 0.0;
    for (const auto& c : fold_curves) var += (c[e] - mean) * (c[e] - mean);
    bands.epochs.push_back(static_cast<int>(e) + 1);
    bands.mean_eval_loss.push_back(mean);
    bands.std_eval_loss.push_back(std::sqrt(var / k));
  }
  return bands;
}

double accuracy(const NetworkParams& net,
                const std::vector<FeatureVector>& normalized) {
  if (normalized.empty()) throw InputError("accuracy: empty set");
  long correct = 0;
  for (const FeatureVector& fv : normalized) {
    const int predicted = forward(net, fv.x) >= 0.5 ? 1 : 0;
    if (predicted == fv.label) ++correct;
  }
  return static_cast<double>(correct) / normalized.size();
}

BacktestReport filtered_backtest(const std::vector<DataBlock>& blocks,
                                 const std::vector<Forecast>& forecasts,
                                 const NetworkParams& net,
                                 const NormStats& stats, double threshold,
                                 const BacktestOptions& opts) {
  TradeSet set =
      compute_trades(blocks, forecasts, TradeMethod::black_scholes, opts);
  std::unordered_map<std::string, const DataBlock*> block_by_id;
  std::unordered_map<std::string, const Forecast*> forecast_by_id;
  for (const DataBlock& b : blocks) block_by_id[b.option_id] = &b;
  for (const Forecast& f : forecasts) forecast_by_id[f.option_id] = &f;

  for (TradeRecord& rec : set.trades) {
    if (rec.action != TradeAction::buy) continue;
    FeatureVector fv;
    fv.x = make_features(*block_by_id.at(rec.option_id),
                         *forecast_by_id.at(rec.option_id));
    for (int k = 0; k < kFeatureCount; ++k) {
      fv.x[k] = (fv.x[k] - stats.mean[k]) / stats.stddev[k];
    }
    if (forward(net, fv.x) < threshold) {
      TradeRecord rejected;  // classifier veto: demote to no_trade
      rejected.option_id = rec.option_id;
      rejected.method = rec.method;
      rec = rejected;
    }
  }
  BacktestReport report = aggregate_trades(set.trades, "black_scholes_filtered",
                                           opts.pnl_bin_width);
  report.skipped = std::move(set.skipped);
  return report;
}

}  // namespace bsf
