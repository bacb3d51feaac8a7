#include "bsforecast/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsforecast/errors.hpp"

namespace bsf {

std::vector<HistogramBin> make_unit_histogram(const std::vector<double>& values,
                                              double bin_width) {
  if (!(bin_width > 0.0) || bin_width > 1.0) {
    throw InputError("histogram bin width must lie in (0, 1]");
  }
  const int n_bins = static_cast<int>(std::ceil(1.0 / bin_width - 1e-12));
  std::vector<HistogramBin> bins(n_bins + 1);
  for (int b = 0; b < n_bins; ++b) {
    bins[b].low = b * bin_width;
    bins[b].high = std::min((b + 1) * bin_width, 1.0);
  }
  bins[n_bins].low = 1.0;
  bins[n_bins].high = std::numeric_limits<double>::infinity();
  for (double v : values) {
    int b;
    if (v >= 1.0) {
      b = n_bins;
    } else {
      b = std::max(0, std::min(n_bins - 1, static_cast<int>(v / bin_width)));
    }
    ++bins[b].count;
  }
  return bins;
}

std::vector<HistogramBin> make_range_histogram(const std::vector<double>& values,
                                               double bin_width) {
  if (!(bin_width > 0.0)) throw InputError("histogram bin width must be positive");
  if (values.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const long first = static_cast<long>(std::floor(*lo_it / bin_width));
  long last = static_cast<long>(std::floor(*hi_it / bin_width));
  std::vector<HistogramBin> bins(last - first + 1);
  for (size_t b = 0; b < bins.size(); ++b) {
    bins[b].low = (first + static_cast<long>(b)) * bin_width;
    bins[b].high = (first + static_cast<long>(b) + 1) * bin_width;
  }
  for (double v : values) {
    long b = static_cast<long>(std::floor(v / bin_width)) - first;
    b = std::max(0L, std::min(static_cast<long>(bins.size()) - 1, b));
    ++bins[b].count;
  }
  return bins;
}

}  // namespace bsf
