#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bsforecast/backtest.hpp"
#include "bsforecast/market_data.hpp"
#include "bsforecast/pipeline.hpp"

namespace bsf {

inline constexpr int kFeatureCount = 13;

/// Feature order: [EST+1, EST+2, stock_bid(0), stock_ask(0),
/// option_bid(-2tau), option_ask(-2tau), sigma(-2tau),
/// option_bid(-tau), option_ask(-tau), sigma(-tau),
/// option_bid(0), option_ask(0), sigma(0)].
struct FeatureVector {
  std::string option_id;
  std::array<double, kFeatureCount> x{};
  int label = 0;  ///< 1 iff the unfiltered trade was profitable
};

/// Assembles the 13 features for one aligned block/forecast pair.
std::array<double, kFeatureCount> make_features(const DataBlock& block,
                                                const Forecast& forecast);

struct FeatureBuild {
  std::vector<FeatureVector> features;  ///< one per traded option
  std::vector<std::string> skipped;     ///< alignment failures
};

/// One feature vector per executed trade of the unfiltered backtest,
/// labeled 1 for a profitable outcome and 0 otherwise.
FeatureBuild build_features(const std::vector<DataBlock>& blocks,
                            const std::vector<Forecast>& forecasts,
                            const std::vector<TradeRecord>& trades);

struct NormStats {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> stddev{};  ///< floored at 1e-12
};

/// Per-feature standardization statistics from a training slice.
NormStats compute_norm_stats(const std::vector<FeatureVector>& training);

/// Standardizes the training slice and returns the statistics for reuse
/// on validation/test data.
std::pair<std::vector<FeatureVector>, NormStats> normalize_features(
    const std::vector<FeatureVector>& training);

std::vector<FeatureVector> apply_normalization(
    const std::vector<FeatureVector>& vs, const NormStats& stats);

/// Fully connected sigmoid network, fixed architecture 13-50-25-14-1.
/// weights[l] is sizes[l+1] x sizes[l] row-major.
struct NetworkParams {
  std::vector<int> sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static NetworkParams create(const std::vector<int>& sizes, std::uint64_t seed);
  int parameter_count() const;
};

/// Default layer sizes from the input vector to the scalar output.
std::vector<int> default_layer_sizes();

/// Network output in (0, 1).
double forward(const NetworkParams& net, const std::array<double, kFeatureCount>& x);

/// Mean cross-entropy with L2 weight penalty (biases excluded):
/// (1/m) sum [-y log h - (1-y) log(1-h)] + (lambda/2m) sum w^2,
/// h clamped to [1e-12, 1 - 1e-12].
double loss(const NetworkParams& net, const std::vector<FeatureVector>& batch,
            double lambda);

struct NetworkGradient {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

/// Backpropagated gradient of loss().
NetworkGradient loss_gradient(const NetworkParams& net,
                              const std::vector<FeatureVector>& batch,
                              double lambda);

struct TrainConfig {
  double learning_rate = 0.00005;
  int iterations = 200;
  double lambda = 0.01;
  int k_folds = 10;
  std::uint64_t seed = 0;
  double train_frac = 0.6;
  double validation_frac = 0.2;
  double test_frac = 0.2;
};

void validate_train_config(const TrainConfig& cfg);

struct Split {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
};

/// Seeded shuffle split by the config fractions.
Split make_split(int n, const TrainConfig& cfg);

inline constexpr int kIterationsPerEpoch = 20;

struct LearningCurve {
  std::vector<double> train_loss;      ///< per iteration
  std::vector<double> eval_epoch_mse;  ///< per epoch (20 iterations)
};

/// Full-batch gradient descent on pre-normalized data. The evaluation
/// set's mean-squared error is recorded once per epoch. Throws
/// NumericError if the training loss turns non-finite.
std::pair<NetworkParams, LearningCurve> train(
    const std::vector<FeatureVector>& train_set,
    const std::vector<FeatureVector>& eval_set, const TrainConfig& cfg);

struct TrainOutput {
  NetworkParams params;
  NormStats stats;
  LearningCurve curve;
  Split split;
  double test_accuracy = 0.0;
};

/// Split, normalize on the training slice, train, score the test slice.
TrainOutput train_filter(const std::vector<FeatureVector>& data,
                         const TrainConfig& cfg);

struct CurveWithBands {
  std::vector<int> epochs;
  std::vector<double> mean_eval_loss;
  std::vector<double> std_eval_loss;
};

/// k trainings on rotating folds, per-epoch mean and standard deviation
/// of the held-out MSE. Every fold starts from the same seeded
/// initialization so bands reflect data variation only.
CurveWithBands k_fold_validate(const std::vector<FeatureVector>& data,
                               const TrainConfig& cfg);

/// Fraction of samples where (h >= 0.5) matches the label.
double accuracy(const NetworkParams& net,
                const std::vector<FeatureVector>& normalized);

/// Re-runs the black_scholes backtest keeping only trades the classifier
/// scores at or above threshold; rejected trades become no_trade.
BacktestReport filtered_backtest(const std::vector<DataBlock>& blocks,
                                 const std::vector<Forecast>& forecasts,
                                 const NetworkParams& net,
                                 const NormStats& stats, double threshold,
                                 const BacktestOptions& opts = {});

}  // namespace bsf
