#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "popre/channel.hpp"
#include "popre/extremal.hpp"

namespace popre {

struct SweepGrid {
  NoiseKind model = NoiseKind::BitFlip;
  std::vector<int> n_values;
  std::vector<double> eps_values;
  std::vector<double> nu_values;
  std::uint64_t seed = 0;
};

struct SweepRow {
  NoiseKind model = NoiseKind::BitFlip;
  double nu = 0.0;
  double eps = 0.0;
  int n = 0;
  double eta = 0.0;
  double circle_sup = 0.0;
  double exponent_bitflip_lo = 0.0;
  double exponent_bitflip_hi = 0.0;
  double exponent_erasure = 0.0;
  std::string flag;  // "ok" or semicolon-joined unmet hypothesis names
  bool failed = false;
  std::string error;
};

// One row per grid cell via eta_exact + theory_bounds; cells run on up to
// `jobs` threads, output sorted by (nu, eps, n) so results are
// order-independent. A failed cell is recorded, never fatal.
std::vector<SweepRow> scaling_sweep(const SweepGrid& grid, int jobs = 1);

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

enum class FitMode { PowerLaw, Exponent };

struct FitResult {
  std::string predictor;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
};

// OLS of ys against log(xs) (PowerLaw) or xs (Exponent).
FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys, FitMode mode,
                        std::string predictor_name = "x");

}  // namespace popre
