#include <cmath>
#include <numbers>

#include "clid/benchmark.hpp"
#include "clid/metrics.hpp"
#include "doctest.h"

using namespace clid;

TEST_CASE("frequency grid is open at both circle crossings") {
  const FreqGrid g = freq_grid(1023);
  REQUIRE(g.size() == 512);
  CHECK(g.omega.front() == doctest::Approx(std::numbers::pi / 513.0));
  CHECK(g.omega.back() == doctest::Approx(512.0 * std::numbers::pi / 513.0));
  CHECK(g.omega.back() < std::numbers::pi);

  const FreqGrid s = freq_grid(9);
  REQUIRE(s.size() == 5);
  for (int i = 1; i <= 5; ++i)
    CHECK(s.omega[static_cast<size_t>(i - 1)] == doctest::Approx(i * std::numbers::pi / 6.0));

  CHECK_THROWS_AS(freq_grid(1024), std::invalid_argument);
  CHECK_THROWS_AS(freq_grid(-3), std::invalid_argument);
  CHECK_THROWS_AS(freq_grid_points(0), std::invalid_argument);

  const FreqGrid p = freq_grid_points(3);
  CHECK(p.omega[1] == doctest::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("error report for an exact and a scaled estimate") {
  const FreqGrid grid = freq_grid_points(64);
  const TfMatrix g0 = TfMatrix::from_scalar(benchmark_g0());

  const ErrReport zero = err(g0, g0, grid);
  CHECK(zero.err_sum == doctest::Approx(0.0));
  CHECK(zero.err_mean == doctest::Approx(0.0));
  CHECK(zero.err_ratio == doctest::Approx(0.0));

  // a 10 percent multiplicative error is 10 percent at every frequency under
  // every normalization
  const ErrReport scaled = err(g0, TfMatrix::from_scalar(1.1 * benchmark_g0()), grid);
  CHECK(scaled.err_sum == doctest::Approx(10.0 * 64).epsilon(1e-9));
  CHECK(scaled.err_mean == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(scaled.err_ratio == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("matrix errors use spectral norms") {
  const FreqGrid grid = freq_grid_points(8);
  TfMatrix g0 = TfMatrix::zero(2, 2);
  g0(0, 0) = RationalTf::constant(1.0);
  g0(1, 1) = RationalTf::constant(2.0);
  TfMatrix gh = g0;
  gh(0, 1) = RationalTf::constant(0.1);  // rank-one perturbation of norm 0.1

  const ErrReport rep = err(g0, gh, grid);
  CHECK(rep.err_mean == doctest::Approx(100.0 * 0.1 / 2.0).epsilon(1e-9));
  CHECK(rep.err_sum == doctest::Approx(8 * 5.0).epsilon(1e-9));
  CHECK(rep.err_ratio == doctest::Approx(5.0).epsilon(1e-9));

  CHECK_THROWS_AS(err(g0, TfMatrix::identity(1), grid), DimensionMismatch);
  CHECK_THROWS_AS(err(TfMatrix::zero(1, 1), TfMatrix::identity(1), grid),
                  std::invalid_argument);
}

TEST_CASE("magnitude tables in decibels") {
  const FreqGrid grid = freq_grid_points(16);
  const auto tables = bode_data(TfMatrix::from_scalar(RationalTf::constant(2.0)), grid);
  REQUIRE(tables.size() == 1);
  REQUIRE(tables[0].mag_db.size() == 16);
  for (double m : tables[0].mag_db) CHECK(m == doctest::Approx(20.0 * std::log10(2.0)));
  for (double p : tables[0].phase_deg) CHECK(p == doctest::Approx(0.0));
}

TEST_CASE("phase unwraps across the wrap-around") {
  // a double delay sweeps -2 omega of phase, crossing -180 degrees mid-grid
  const FreqGrid grid = freq_grid_points(64);
  const auto tables = bode_data(TfMatrix::from_scalar(RationalTf::fir({0.0, 0.0, 1.0})), grid);
  REQUIRE(tables.size() == 1);
  for (int i = 0; i < 64; ++i) {
    const double want = -2.0 * grid.omega[static_cast<size_t>(i)] * 180.0 / std::numbers::pi;
    CHECK(tables[0].phase_deg[static_cast<size_t>(i)] == doctest::Approx(want).epsilon(1e-9));
    CHECK(tables[0].mag_db[static_cast<size_t>(i)] == doctest::Approx(0.0));
  }
  // the tail of the sweep has passed the wrap point
  CHECK(tables[0].phase_deg.back() < -300.0);
}

TEST_CASE("tables cover every entry of a transfer matrix") {
  const FreqGrid grid = freq_grid_points(4);
  TfMatrix m = TfMatrix::identity(2);
  m(0, 1) = RationalTf::fir({0.0, 1.0});
  const auto tables = bode_data(m, grid);
  CHECK(tables.size() == 4);
  for (const BodeTable& t : tables) {
    CHECK(t.omega.size() == 4);
    CHECK(t.mag_db.size() == 4);
    CHECK(t.phase_deg.size() == 4);
  }
}
