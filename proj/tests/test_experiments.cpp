#include <doctest.h>

#include <cmath>
#include <sstream>

#include "popre/experiments.hpp"

using namespace popre;

TEST_SUITE_BEGIN("experiments");

TEST_CASE("fit_power_law recovers exact relationships") {
  {
    std::vector<double> xs, ys;
    for (double x : {1.0, 2.0, 4.0, 9.0, 16.0}) {
      xs.push_back(x);
      ys.push_back(2.0 * std::log(x));
    }
    const FitResult fit = fit_power_law(xs, ys, FitMode::PowerLaw);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  }
  {
    std::vector<double> xs{1.0, 2.0, 3.0, 5.0}, ys;
    for (double x : xs) ys.push_back(3.0 * x + 1.0);
    const FitResult fit = fit_power_law(xs, ys, FitMode::Exponent);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("fit_power_law rejects degenerate input") {
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2}, std::vector<double>{1, 2}, FitMode::PowerLaw),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      fit_power_law(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}, FitMode::PowerLaw),
      std::invalid_argument);
  CHECK_THROWS_AS(
      fit_power_law(std::vector<double>{-1, 2, 3}, std::vector<double>{1, 2, 3}, FitMode::PowerLaw),
      std::invalid_argument);
}

TEST_CASE("scaling_sweep single cell reproduces the eta oracle example") {
  SweepGrid grid;
  grid.model = NoiseKind::BitFlip;
  grid.n_values = {4};
  grid.eps_values = {0.1};
  grid.nu_values = {1.0};
  const std::vector<SweepRow> rows = scaling_sweep(grid);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].eta == doctest::Approx(0.4).epsilon(1e-9));
  CHECK_FALSE(rows[0].failed);
  CHECK(rows[0].flag != "ok");  // nu = 1 sits outside the theorem windows
}

TEST_CASE("scaling_sweep eta column is nondecreasing in eps") {
  SweepGrid grid;
  grid.model = NoiseKind::Erasure;
  grid.n_values = {8};
  grid.eps_values = {0.05, 0.1};
  grid.nu_values = {0.5};
  const std::vector<SweepRow> rows = scaling_sweep(grid);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].eps < rows[1].eps);
  CHECK(rows[0].eta <= rows[1].eta + 1e-12);
}

TEST_CASE("sweep output is deterministic and parallel-invariant") {
  SweepGrid grid;
  grid.model = NoiseKind::Erasure;
  grid.n_values = {4, 8};
  grid.eps_values = {0.1, 0.05};
  grid.nu_values = {0.3, 0.7};
  grid.seed = 42;
  const std::vector<SweepRow> serial = scaling_sweep(grid, 1);
  const std::vector<SweepRow> parallel = scaling_sweep(grid, 2);
  std::ostringstream a, b, c;
  write_sweep_csv(a, serial);
  write_sweep_csv(b, parallel);
  write_sweep_csv(c, scaling_sweep(grid, 1));
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
  CHECK(a.str().starts_with(
      "model,nu,eps,n,eta,circle_sup,exponent_bitflip_lo,exponent_bitflip_hi,exponent_erasure,flag\n"));
}

TEST_CASE("erasure sweep: log(1/eta) grows in log(1/eps) with positive slope") {
  SweepGrid grid;
  grid.model = NoiseKind::Erasure;
  grid.n_values = {24};
  grid.eps_values = {0.1, 0.05, 0.025};
  grid.nu_values = {0.3};
  const std::vector<SweepRow> rows = scaling_sweep(grid);
  std::vector<double> xs, ys;
  for (const SweepRow& r : rows) {
    xs.push_back(1.0 / r.eps);
    ys.push_back(std::log(1.0 / r.eta));
  }
  const FitResult fit = fit_power_law(xs, ys, FitMode::PowerLaw, "inv_eps");
  CHECK(fit.slope > 0.0);
}

TEST_SUITE_END();
