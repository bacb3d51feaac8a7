#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bsforecast/assembly.hpp"
#include "bsforecast/grid.hpp"
#include "bsforecast/market_data.hpp"

namespace testutil {

/// A well-formed block with mildly sloped quotes, scaled so unnormalized
/// systems stay numerically tame in oracle tests.
inline bsf::DataBlock make_block(const std::string& id = "TST0001") {
  bsf::DataBlock block;
  block.option_id = id;
  const double bids[3] = {2.00, 2.05, 2.10};
  const double asks[3] = {2.20, 2.26, 2.30};
  const double vols[3] = {0.30, 0.31, 0.32};
  for (int d = 0; d < 3; ++d) {
    block.days[d].option_bid = bids[d];
    block.days[d].option_ask = asks[d];
    block.days[d].volatility = vols[d];
  }
  block.days[2].stock_bid = 1.00;
  block.days[2].stock_ask = 1.50;
  block.real_plus1 = 2.22;
  block.real_plus2 = 2.28;
  return block;
}

/// Random positive boundary curves over a random price interval.
inline std::pair<bsf::GridSpec, bsf::BoundaryData> make_random_problem(
    int M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> base(1.0, 3.0);
  std::uniform_real_distribution<double> slope(-0.5, 0.5);
  std::uniform_real_distribution<double> curve(-20.0, 20.0);
  std::uniform_real_distribution<double> s_lo(0.8, 1.2);
  std::uniform_real_distribution<double> width(0.3, 1.0);

  bsf::GridSpec spec;
  spec.M = M;
  spec.s_b = s_lo(rng);
  spec.s_a = spec.s_b + width(rng);
  spec.tau = bsf::kTau;
  spec.ds = (spec.s_a - spec.s_b) / (M - 1);
  spec.dt = 2.0 * spec.tau / (M - 1);

  bsf::BoundaryData bd;
  bd.s_b = spec.s_b;
  bd.s_a = spec.s_a;
  bd.price_floor = 0.0;  // keep curves unclamped for smooth oracles
  const double b0 = base(rng);
  bd.bid_curve = {curve(rng), slope(rng), b0};
  bd.ask_curve = {curve(rng), slope(rng), b0 + 0.5 + base(rng) * 0.2};
  bd.vol_curve = {0.0, slope(rng) * 0.1, 0.3 + 0.1 * base(rng)};
  return {spec, bd};
}

inline std::vector<double> random_vector(int n, std::mt19937_64& rng,
                                         double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

/// Scoped temporary directory under the system temp path.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("bsf_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
