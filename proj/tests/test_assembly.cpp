#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "bsforecast/assembly.hpp"
#include "bsforecast/errors.hpp"
#include "helpers.hpp"

using namespace bsf;

namespace {

// Pointwise T-shape residual, written directly from the difference formulas
// and independent of the matrix assembly.
double stencil_oracle(const GridSpec& spec, const BoundaryData& bd,
                      const std::vector<double>& u, int i, int j) {
  const int M = spec.M;
  const double dt_term =
      (u[j * M + i] - u[(j - 1) * M + i]) / spec.dt;
  const double ss_term = (u[j * M + i + 1] - 2.0 * u[j * M + i] +
                          u[j * M + i - 1]) /
                         (spec.ds * spec.ds);
  const double sig = bd.sigma(spec.t(j));
  return dt_term + 0.5 * sig * sig * spec.s(i) * spec.s(i) * ss_term;
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("build_Dt matches the backward-difference matrix") {
  const auto d = build_Dt(3, 1.0).to_dense();
  const double expect[3][3] = {{0, 0, 0}, {-1, 1, 0}, {0, -1, 1}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(d[r][c] == expect[r][c]);
}

TEST_CASE("build_Dt annihilates constants and scales slopes") {
  for (int M : {3, 5, 9}) {
    const SparseMatrix dt = build_Dt(M, 0.25);
    const auto y = dt.multiply(std::vector<double>(M, 1.0));
    for (double v : y) CHECK(v == 0.0);
  }
  const auto y = build_Dt(4, 0.5).multiply({0.0, 1.0, 2.0, 3.0});
  CHECK(y[0] == 0.0);
  CHECK(y[1] == doctest::Approx(2.0));
  CHECK(y[2] == doctest::Approx(2.0));
  CHECK(y[3] == doctest::Approx(2.0));
}

TEST_CASE("build_Dss matches the central-difference matrix") {
  const auto d = build_Dss(4, 1.0).to_dense();
  const double expect[4][4] = {
      {0, 0, 0, 0}, {1, -2, 1, 0}, {0, 1, -2, 1}, {0, 0, 0, 0}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(d[r][c] == expect[r][c]);
}

TEST_CASE("build_Dss annihilates affine data and is exact on quadratics") {
  std::vector<double> affine(6);
  for (int i = 0; i < 6; ++i) affine[i] = 1.7 + 0.3 * i;
  const auto y = build_Dss(6, 0.2).multiply(affine);
  for (double v : y) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<double> quad(5);
  for (int i = 0; i < 5; ++i) quad[i] = static_cast<double>(i) * i;
  const auto z = build_Dss(5, 0.5).multiply(quad);
  CHECK(z[0] == 0.0);
  for (int r = 1; r < 4; ++r) CHECK(z[r] == doctest::Approx(8.0));
  CHECK(z[4] == 0.0);
}

TEST_CASE("build_R holds sigma^2/2 s^2 on the diagonal") {
  GridSpec spec;
  spec.M = 3;
  spec.s_b = 1.0;
  spec.s_a = 3.0;
  spec.ds = 1.0;
  spec.dt = kTau;
  spec.tau = kTau;
  BoundaryData bd;
  bd.s_b = 1.0;
  bd.s_a = 3.0;
  bd.price_floor = 0.0;
  bd.bid_curve = {0.0, 0.0, 1.0};
  bd.ask_curve = {0.0, 0.0, 2.0};

  SUBCASE("zero volatility gives the zero matrix") {
    bd.vol_curve = {0.0, 0.0, 0.0};
    const auto d = build_R(spec, bd).to_dense();
    for (int r = 0; r < 9; ++r)
      for (int c = 0; c < 9; ++c) CHECK(d[r][c] == 0.0);
  }
  SUBCASE("unit volatility repeats (0.5, 2, 4.5) per time block") {
    bd.vol_curve = {0.0, 0.0, 1.0};
    const auto d = build_R(spec, bd).to_dense();
    for (int j = 0; j < 3; ++j) {
      CHECK(d[j * 3 + 0][j * 3 + 0] == doctest::Approx(0.5));
      CHECK(d[j * 3 + 1][j * 3 + 1] == doctest::Approx(2.0));
      CHECK(d[j * 3 + 2][j * 3 + 2] == doctest::Approx(4.5));
    }
  }
}

TEST_CASE("build_R spot checks with index recovery") {
  std::mt19937_64 rng(11);
  auto [spec, bd] = testutil::make_random_problem(9, rng);
  const SparseMatrix r = build_R(spec, bd);
  const auto dense = r.to_dense();
  std::uniform_int_distribution<int> pick(0, spec.size() - 1);
  for (int rep = 0; rep < 20; ++rep) {
    const int k = pick(rng);
    const int i = k % spec.M;
    const int j = k / spec.M;
    const double sig = bd.sigma(spec.t(j));
    CHECK(dense[k][k] ==
          doctest::Approx(0.5 * sig * sig * spec.s(i) * spec.s(i))
              .epsilon(1e-14));
  }
}

TEST_CASE("build_L zeroes every boundary row") {
  std::mt19937_64 rng(3);
  for (int M : {5, 9}) {
    auto [spec, bd] = testutil::make_random_problem(M, rng);
    const SparseMatrix L = build_L(spec, bd);
    for (int j = 0; j < M; ++j) {
      for (int i = 0; i < M; ++i) {
        if (is_boundary_point(i, j, M)) {
          CHECK(L.row_norm(spec.index(i, j)) == 0.0);
        } else {
          CHECK(L.row_norm(spec.index(i, j)) > 0.0);
        }
      }
    }
  }
}

TEST_CASE("build_L matvec equals the pointwise stencil") {
  std::mt19937_64 rng(5);
  for (int M : {5, 9, 21}) {
    for (int rep = 0; rep < 3; ++rep) {
      auto [spec, bd] = testutil::make_random_problem(M, rng);
      const SparseMatrix L = build_L(spec, bd);
      const auto u = testutil::random_vector(spec.size(), rng);
      const auto Lu = L.multiply(u);
      for (int j = 0; j < M; ++j) {
        for (int i = 0; i < M; ++i) {
          const int k = spec.index(i, j);
          if (is_boundary_point(i, j, M)) {
            CHECK(Lu[k] == 0.0);
          } else {
            const double expect = stencil_oracle(spec, bd, u, i, j);
            CHECK(std::fabs(Lu[k] - expect) <=
                  1e-10 * std::max(1.0, std::fabs(expect)));
          }
        }
      }
    }
  }
}

TEST_CASE("build_L annihilates functions affine in s and constant in t") {
  std::mt19937_64 rng(9);
  auto [spec, bd] = testutil::make_random_problem(9, rng);
  std::vector<double> u(spec.size());
  for (int j = 0; j < spec.M; ++j) {
    for (int i = 0; i < spec.M; ++i) {
      u[spec.index(i, j)] = 0.7 * spec.s(i) + 1.3;
    }
  }
  const auto y = build_L(spec, bd).multiply(u);
  for (double v : y) CHECK(v == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("IndexMap covers exactly the interior") {
  for (int M : {3, 5, 9, 21}) {
    const IndexMap map = IndexMap::interior(M);
    CHECK(map.reduced_size() == (M - 1) * (M - 2));
    for (int r = 0; r < map.reduced_size(); ++r) {
      const int k = map.reduced_to_full[r];
      CHECK(map.full_to_reduced[k] == r);
      const int i = k % M;
      const int j = k / M;
      CHECK(!is_boundary_point(i, j, M));
    }
    for (int k = 0; k < M * M; ++k) {
      if (map.full_to_reduced[k] >= 0) continue;
      CHECK(is_boundary_point(k % M, k / M, M));
    }
  }
}

TEST_CASE("reduce_system dimensions and zero boundary data") {
  std::mt19937_64 rng(13);
  auto [spec, bd] = testutil::make_random_problem(5, rng);
  SUBCASE("N_r = (M-1)(M-2)") {
    const AssembledSystem sys = reduce_system(build_L(spec, bd), spec, bd);
    CHECK(sys.reduced_size() == 12);
    CHECK(sys.L_reduced.rows() == 12);
    CHECK(sys.L_reduced.cols() == 12);
    CHECK(static_cast<int>(sys.u_bd.size()) == 25);
  }
  SUBCASE("zero boundary data gives a zero right-hand side") {
    bd.bid_curve = bd.ask_curve = {0.0, 0.0, 0.0};
    bd.price_floor = 0.0;
    const AssembledSystem sys = reduce_system(build_L(spec, bd), spec, bd);
    for (double v : sys.b_reduced) CHECK(v == 0.0);
  }
}

TEST_CASE("reduced residuals match the full operator applied to the scatter") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    auto [spec, bd] = testutil::make_random_problem(5, rng);
    const SparseMatrix L = build_L(spec, bd);
    const AssembledSystem sys = reduce_system(L, spec, bd);
    const auto u = testutil::random_vector(sys.reduced_size(), rng);

    const auto full = scatter_solution(sys, u);
    const auto lhs_full = L.multiply(full);
    const auto lhs_reduced = sys.L_reduced.multiply(u);
    for (int r = 0; r < sys.reduced_size(); ++r) {
      const int k = sys.map.reduced_to_full[r];
      // L u_red - b = (L_full scatter)|interior
      CHECK(lhs_reduced[r] - sys.b_reduced[r] ==
            doctest::Approx(lhs_full[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("scatter restores the boundary data bitwise") {
  std::mt19937_64 rng(19);
  auto [spec, bd] = testutil::make_random_problem(9, rng);
  const AssembledSystem sys = reduce_system(build_L(spec, bd), spec, bd);
  const auto full = scatter_solution(
      sys, std::vector<double>(sys.reduced_size(), 123.0));
  for (int j = 0; j < spec.M; ++j) {
    CHECK(full[spec.index(0, j)] == bd.u_b(spec.t(j)));
    CHECK(full[spec.index(spec.M - 1, j)] == bd.u_a(spec.t(j)));
  }
  for (int i = 0; i < spec.M; ++i) {
    CHECK(full[spec.index(i, 0)] == bd.f(spec.s(i)));
  }
}

TEST_CASE("F matches the prescribed data on the boundary") {
  // u_bd - F_bd = 0: elimination leaves the fidelity term untouched.
  std::mt19937_64 rng(23);
  auto [spec, bd] = testutil::make_random_problem(7, rng);
  const AssembledSystem sys = reduce_system(build_L(spec, bd), spec, bd);
  const SolutionGrid f = tabulate_F(spec, bd);
  for (int k = 0; k < spec.size(); ++k) {
    if (sys.map.full_to_reduced[k] >= 0) continue;
    CHECK(sys.u_bd[k] == f.values[k]);
  }
}

TEST_CASE("normalize_rows makes unit rows and divides b alike") {
  SUBCASE("hand-built row") {
    AssembledSystem sys;
    sys.map.M = 0;
    sys.map.reduced_to_full = {0};
    sys.map.full_to_reduced = {0};
    sys.L_reduced = SparseMatrix::from_triplets(1, 2, {{0, 0, 3.0}, {0, 1, 4.0}});
    sys.b_reduced = {10.0};
    sys.F_reduced = {0.0};
    sys.row_norms = {1.0};
    const AssembledSystem out = normalize_rows(std::move(sys));
    const auto d = out.L_reduced.to_dense();
    CHECK(d[0][0] == doctest::Approx(0.6));
    CHECK(d[0][1] == doctest::Approx(0.8));
    CHECK(out.b_reduced[0] == doctest::Approx(2.0));
    CHECK(out.row_norms[0] == doctest::Approx(5.0));
  }
  SUBCASE("assembled system") {
    std::mt19937_64 rng(29);
    auto [spec, bd] = testutil::make_random_problem(9, rng);
    AssembledSystem sys = reduce_system(build_L(spec, bd), spec, bd);
    sys = normalize_rows(std::move(sys));
    for (int r = 0; r < sys.reduced_size(); ++r) {
      CHECK(std::fabs(sys.L_reduced.row_norm(r) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("normalize_rows is idempotent") {
  std::mt19937_64 rng(31);
  auto [spec, bd] = testutil::make_random_problem(7, rng);
  AssembledSystem once = normalize_rows(reduce_system(build_L(spec, bd), spec, bd));
  AssembledSystem twice = normalize_rows(once);
  for (int r = 0; r < once.reduced_size(); ++r) {
    CHECK(std::fabs(twice.row_norms[r] - once.row_norms[r]) <=
          1e-12 * std::fabs(once.row_norms[r]));
    CHECK(twice.b_reduced[r] == doctest::Approx(once.b_reduced[r]).epsilon(1e-12));
  }
  const auto d1 = once.L_reduced.to_dense();
  const auto d2 = twice.L_reduced.to_dense();
  for (int r = 0; r < once.reduced_size(); ++r) {
    for (int c = 0; c < once.reduced_size(); ++c) {
      CHECK(std::fabs(d2[r][c] - d1[r][c]) <= 1e-12);
    }
  }
}

TEST_CASE("normalization preserves exact solutions") {
  std::mt19937_64 rng(37);
  auto [spec, bd] = testutil::make_random_problem(7, rng);
  AssembledSystem sys = reduce_system(build_L(spec, bd), spec, bd);
  // Build a consistent right-hand side from a known solution.
  const auto u_star = testutil::random_vector(sys.reduced_size(), rng);
  sys.b_reduced = sys.L_reduced.multiply(u_star);
  sys = normalize_rows(std::move(sys));
  const auto lhs = sys.L_reduced.multiply(u_star);
  for (int r = 0; r < sys.reduced_size(); ++r) {
    CHECK(std::fabs(lhs[r] - sys.b_reduced[r]) <= 1e-10);
  }
}

TEST_CASE("system dump writes parseable triplets") {
  std::mt19937_64 rng(41);
  auto [spec, bd] = testutil::make_random_problem(5, rng);
  const AssembledSystem sys = reduce_system(build_L(spec, bd), spec, bd);
  testutil::TempDir dir("dump");
  dump_system(sys, dir.path().string(), "case");

  std::ifstream in(dir.file("case_L.txt"));
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "# N_r=12");
  const auto dense = sys.L_reduced.to_dense();
  int r, c;
  double v;
  int count = 0;
  while (in >> r >> c >> v) {
    CHECK(dense[r][c] == v);  // %.17g round-trips doubles exactly
    ++count;
  }
  CHECK(count == sys.L_reduced.nnz());

  std::ifstream bin(dir.file("case_b.txt"));
  REQUIRE(bin.good());
  std::getline(bin, header);
  CHECK(header == "# N_r=12");
  count = 0;
  while (bin >> r >> c >> v) {
    CHECK(c == 0);
    CHECK(sys.b_reduced[r] == v);
    ++count;
  }
  CHECK(count == 12);
}

}  // TEST_SUITE
