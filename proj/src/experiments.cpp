#include "popre/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>

#include "popre/format.hpp"
#include <ostream>
#include <stdexcept>
#include <thread>

namespace popre {

namespace {

std::string hypothesis_flag(const TheoryBounds& tb) {
  std::string flag;
  const auto add = [&flag](const char* name) {
    if (!flag.empty()) flag += ';';
    flag += name;
  };
  if (tb.model == NoiseKind::BitFlip) {
    if (!tb.bitflip_window_ok) add("bitflip_lower_window");
    if (!tb.bitflip_upper_ok) add("bitflip_upper_window");
  } else {
    if (!tb.erasure_lower_ok) add("erasure_lower_window");
    if (!tb.erasure_upper_ok) add("erasure_upper_window");
  }
  return flag.empty() ? "ok" : flag;
}

}  // namespace

std::vector<SweepRow> scaling_sweep(const SweepGrid& grid, int jobs) {
  if (grid.n_values.empty() || grid.eps_values.empty() || grid.nu_values.empty())
    throw std::invalid_argument("sweep grid has an empty axis");
  struct Cell {
    double nu, eps;
    int n;
  };
  std::vector<Cell> cells;
  for (double nu : grid.nu_values)
    for (double eps : grid.eps_values)
      for (int n : grid.n_values) cells.push_back({nu, eps, n});

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> cursor{0};
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));

  const auto work = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= cells.size()) return;
      const Cell& cell = cells[k];
      SweepRow& row = rows[k];
      row.model = grid.model;
      row.nu = cell.nu;
      row.eps = cell.eps;
      row.n = cell.n;
      try {
        const NoiseModel model(grid.model, cell.nu);
        const EtaReport report = eta_exact(model, cell.n, cell.eps);
        const TheoryBounds tb = theory_bounds(model, cell.n, cell.eps);
        row.eta = report.eta;
        row.circle_sup = report.circle_sup;
        row.exponent_bitflip_lo = tb.exponent_bitflip_lo;
        row.exponent_bitflip_hi = tb.exponent_bitflip_hi;
        row.exponent_erasure = tb.exponent_erasure;
        row.flag = hypothesis_flag(tb);
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
        row.flag = "failed";
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.nu != b.nu) return a.nu < b.nu;
    if (a.eps != b.eps) return a.eps < b.eps;
    return a.n < b.n;
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "model,nu,eps,n,eta,circle_sup,exponent_bitflip_lo,exponent_bitflip_hi,exponent_erasure,flag\n";
  for (const SweepRow& r : rows) {
    os << to_string(r.model) << ',' << format_double(r.nu) << ',' << format_double(r.eps) << ','
       << r.n << ',';
    if (r.failed) {
      os << "nan,nan,nan,nan,nan," << r.flag << '\n';
    } else {
      os << format_double(r.eta) << ',' << format_double(r.circle_sup) << ','
         << format_double(r.exponent_bitflip_lo) << ',' << format_double(r.exponent_bitflip_hi) << ','
         << format_double(r.exponent_erasure) << ',' << r.flag << '\n';
    }
  }
}

FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys, FitMode mode,
                        std::string predictor_name) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit: xs and ys sizes differ");
  if (xs.size() < 3) throw std::invalid_argument("fit needs at least 3 points");
  std::vector<double> t(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (mode == FitMode::PowerLaw) {
      if (!(xs[i] > 0.0)) throw std::invalid_argument("power-law fit needs positive predictors");
      t[i] = std::log(xs[i]);
    } else {
      t[i] = xs[i];
    }
  }
  const double n = static_cast<double>(t.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sx += t[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxx += (t[i] - mx) * (t[i] - mx);
    sxy += (t[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit predictor has zero variance");

  FitResult fit;
  fit.predictor = std::move(predictor_name);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  fit.residuals.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * t[i]);
    fit.residuals[i] = r;
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace popre
