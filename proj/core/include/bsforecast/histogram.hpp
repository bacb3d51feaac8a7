#pragma once

#include <vector>

namespace bsf {

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;  ///< +inf for an overflow bin
  long count = 0;
};

/// Fixed-range histogram over [0, 1) with the given bin width plus one
/// overflow bin for values >= 1. Bins are half-open [low, high).
std::vector<HistogramBin> make_unit_histogram(const std::vector<double>& values,
                                              double bin_width);

/// Histogram over bins aligned to multiples of bin_width spanning the data
/// range; empty input gives no bins. Bins are half-open [low, high).
std::vector<HistogramBin> make_range_histogram(const std::vector<double>& values,
                                               double bin_width);

}  // namespace bsf
