#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "bsforecast/market_data.hpp"

namespace bsf {

/// Uniform M x M grid over the space-time rectangle
/// [s_b, s_a] x [0, 2*tau]. Grid points are s_i = s_b + i*ds and
/// t_j = j*dt with i, j in {0, ..., M-1}; M is odd so that t = tau and
/// the s-midpoint land exactly on grid lines.
struct GridSpec {
  int M = 21;
  double s_b = 0.0;
  double s_a = 0.0;
  double tau = kTau;
  double ds = 0.0;
  double dt = 0.0;

  /// Endpoints are pinned so s(M-1) == s_a and t(M-1) == 2*tau exactly.
  double s(int i) const { return i == M - 1 ? s_a : s_b + i * ds; }
  double t(int j) const { return j == M - 1 ? 2.0 * tau : j * dt; }

  int size() const { return M * M; }
  /// Serialized index of grid point (i, j).
  int index(int i, int j) const { return j * M + i; }
};

/// Builds the grid over today's stock bid/ask interval and the two-day
/// forecast window. Throws InputError on even or too-small M and on a
/// degenerate s-interval.
GridSpec build_grid_spec(const DataBlock& block, int M, double tau = kTau);

enum class BoundaryMode { constant, quadratic };

BoundaryMode parse_boundary_mode(const std::string& name);
const char* to_string(BoundaryMode mode);

/// p(t) = a*t^2 + b*t + c.
struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double operator()(double t) const { return (a * t + b) * t + c; }
};

/// Boundary curves u_b(t), u_a(t) and volatility sigma(t) on [0, 2*tau],
/// plus the initial profile f(s) on [s_b, s_a]. The curves are quadratics
/// extrapolated from the three historical days; evaluation clamps them
/// below at price_floor and caps the bid curve at the ask curve, so the
/// invariants u_b, u_a > 0 and u_b <= u_a hold pointwise.
struct BoundaryData {
  Quadratic bid_curve;
  Quadratic ask_curve;
  Quadratic vol_curve;
  double price_floor = 0.01;
  double s_b = 0.0;
  double s_a = 0.0;

  double u_a(double t) const { return std::max(ask_curve(t), price_floor); }
  double u_b(double t) const {
    return std::min(std::max(bid_curve(t), price_floor), u_a(t));
  }
  double sigma(double t) const { return std::max(vol_curve(t), price_floor); }

  /// Initial condition f(s) = F(s, 0); exact at both endpoints.
  double f(double s) const;
};

/// Extrapolates today's window from the block's three historical days.
/// constant holds the t=0 quotes; quadratic fits the unique degree-<=2
/// polynomial through the values at t = -2tau, -tau, 0.
BoundaryData extrapolate_boundary(const DataBlock& block, BoundaryMode mode,
                                  double price_floor = 0.01);

/// F(s,t) = x*(u_a(t) - u_b(t)) + u_b(t) with x = (s - s_b)/(s_a - s_b).
/// Returns the boundary values bitwise at s = s_b and s = s_a. Throws
/// InputError for (s, t) outside the closed domain.
double eval_F(const GridSpec& spec, const BoundaryData& bd, double s, double t);

/// An M x M grid function stored as a length M*M vector with the
/// serialization k = j*M + i.
struct SolutionGrid {
  GridSpec spec;
  std::vector<double> values;

  double at(int i, int j) const { return values[spec.index(i, j)]; }
  double& at(int i, int j) { return values[spec.index(i, j)]; }
};

/// Tabulates F on every grid point.
SolutionGrid tabulate_F(const GridSpec& spec, const BoundaryData& bd);

}  // namespace bsf
