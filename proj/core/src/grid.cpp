#include "bsforecast/grid.hpp"

#include <cmath>

#include "bsforecast/errors.hpp"

namespace bsf {

GridSpec build_grid_spec(const DataBlock& block, int M, double tau) {
  if (M < 5) {
    throw InputError("M must be at least 5 (got " + std::to_string(M) + ")");
  }
  if (M % 2 == 0) {
    throw InputError("M must be odd (got " + std::to_string(M) + ")");
  }
  block.validate();
  GridSpec spec;
  spec.M = M;
  spec.s_b = block.stock_bid0();
  spec.s_a = block.stock_ask0();
  spec.tau = tau;
  spec.ds = (spec.s_a - spec.s_b) / (M - 1);
  spec.dt = 2.0 * tau / (M - 1);
  return spec;
}

BoundaryMode parse_boundary_mode(const std::string& name) {
  if (name == "constant") return BoundaryMode::constant;
  if (name == "quadratic") return BoundaryMode::quadratic;
  throw InputError("unknown boundary mode '" + name +
                   "' (expected constant or quadratic)");
}

const char* to_string(BoundaryMode mode) {
  return mode == BoundaryMode::constant ? "constant" : "quadratic";
}

namespace {

// Unique parabola through (-2tau, y0), (-tau, y1), (0, y2).
Quadratic fit_three_days(double y0, double y1, double y2, double tau) {
  Quadratic q;
  q.a = (y0 - 2.0 * y1 + y2) / (2.0 * tau * tau);
  q.b = q.a * tau - (y1 - y2) / tau;
  q.c = y2;
  return q;
}

}  // namespace

double BoundaryData::f(double s) const {
  if (s <= s_b) return u_b(0.0);
  if (s >= s_a) return u_a(0.0);
  const double x = (s - s_b) / (s_a - s_b);
  return x * (u_a(0.0) - u_b(0.0)) + u_b(0.0);
}

BoundaryData extrapolate_boundary(const DataBlock& block, BoundaryMode mode,
                                  double price_floor) {
  block.validate();
  BoundaryData bd;
  bd.price_floor = price_floor;
  bd.s_b = block.stock_bid0();
  bd.s_a = block.stock_ask0();
  const MarketDay& d0 = block.day_m2();
  const MarketDay& d1 = block.day_m1();
  const MarketDay& d2 = block.today();
  if (mode == BoundaryMode::constant) {
    bd.bid_curve = {0.0, 0.0, d2.option_bid};
    bd.ask_curve = {0.0, 0.0, d2.option_ask};
    bd.vol_curve = {0.0, 0.0, d2.volatility};
  } else {
    const double tau = kTau;
    bd.bid_curve = fit_three_days(d0.option_bid, d1.option_bid, d2.option_bid, tau);
    bd.ask_curve = fit_three_days(d0.option_ask, d1.option_ask, d2.option_ask, tau);
    bd.vol_curve = fit_three_days(d0.volatility, d1.volatility, d2.volatility, tau);
  }
  return bd;
}

double eval_F(const GridSpec& spec, const BoundaryData& bd, double s, double t) {
  if (spec.s_b != bd.s_b || spec.s_a != bd.s_a) {
    throw InputError("eval_F: grid and boundary data disagree on the s-interval");
  }
  const double s_slack = 1e-9 * (spec.s_a - spec.s_b);
  const double t_slack = 1e-9 * 2.0 * spec.tau;
  if (s < spec.s_b - s_slack || s > spec.s_a + s_slack) {
    throw InputError("eval_F: s outside [s_b, s_a]");
  }
  if (t < -t_slack || t > 2.0 * spec.tau + t_slack) {
    throw InputError("eval_F: t outside [0, 2*tau]");
  }
  if (s <= spec.s_b) return bd.u_b(t);
  if (s >= spec.s_a) return bd.u_a(t);
  const double x = (s - spec.s_b) / (spec.s_a - spec.s_b);
  return x * (bd.u_a(t) - bd.u_b(t)) + bd.u_b(t);
}

SolutionGrid tabulate_F(const GridSpec& spec, const BoundaryData& bd) {
  SolutionGrid grid;
  grid.spec = spec;
  grid.values.resize(spec.size());
  for (int j = 0; j < spec.M; ++j) {
    const double t = spec.t(j);
    for (int i = 0; i < spec.M; ++i) {
      grid.values[spec.index(i, j)] = eval_F(spec, bd, spec.s(i), t);
    }
  }
  return grid;
}

}  // namespace bsf
