#include "popre/estimate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "popre/extremal.hpp"
#include "popre/lp.hpp"

namespace popre {

namespace {

int statistic_weight(const NoisyString& y, const BitString& u) {
  const auto yb = y.bit_words();
  const auto yv = y.visible_words();
  const auto uw = u.words();
  int w = 0;
  for (std::size_t k = 0; k < yb.size(); ++k) w += std::popcount((yb[k] ^ uw[k]) & yv[k]);
  return w;
}

}  // namespace

std::vector<double> project_and_symmetrize(const SampleBatch& batch, const BitString& u) {
  if (u.size() != batch.n) throw std::invalid_argument("target string length does not match batch");
  if (batch.items.empty()) throw std::invalid_argument("empty sample batch");
  std::vector<double> qhat(static_cast<std::size_t>(batch.n) + 1, 0.0);
  for (const NoisyString& y : batch.items) {
    if (y.size() != batch.n) throw std::invalid_argument("sample length does not match batch");
    qhat[static_cast<std::size_t>(statistic_weight(y, u))] += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(batch.items.size());
  for (double& v : qhat) v *= inv;
  return qhat;
}

std::int64_t required_samples(int n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  const double m = std::ceil(16.0 * (static_cast<double>(n) + 1.0) / (delta * delta));
  if (m > 9e18) throw std::invalid_argument("required sample count overflows");
  return static_cast<std::int64_t>(m);
}

int boost_repetitions(int n, double eps) {
  return 2 * static_cast<int>(std::ceil(std::log(3.0 * std::max(1, n) / eps))) + 1;
}

double estimate_from_qhat(std::span<const double> qhat, const ChannelMatrix& a) {
  const lp::LpProblem problem = lp::build_l1_fit_lp(a, qhat);
  const lp::LpSolution sol = lp::solve_lp(problem);
  if (sol.status != lp::LpStatus::Optimal) throw std::runtime_error("l1-fit LP did not solve to optimality");
  return sol.x[0];
}

EstimateReport estimate_point_mass(const SampleBatch& batch, const BitString& u, double eps,
                                   DeltaMode mode, double manual_delta, bool amplified) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (u.size() != batch.n) throw std::invalid_argument("target string length does not match batch");

  double delta;
  if (mode == DeltaMode::Oracle) {
    delta = eta_exact(batch.model, batch.n, eps / 2.0).eta;
  } else {
    if (!(manual_delta > 0.0 && manual_delta < 1.0))
      throw std::invalid_argument("manual delta must lie in (0, 1)");
    delta = manual_delta;
  }

  const int r = amplified ? boost_repetitions(batch.n, eps) : 1;
  const std::int64_t need = required_samples(batch.n, delta);
  const std::int64_t total = static_cast<std::int64_t>(batch.items.size());
  if (total < need * r)
    throw InsufficientSamplesError("batch holds " + std::to_string(total) + " samples but " +
                                   std::to_string(need * r) + " are required for delta = " +
                                   std::to_string(delta));

  const ChannelMatrix a = build_channel_matrix(batch.model, batch.n);
  const std::int64_t sub = total / r;
  std::vector<double> estimates;
  estimates.reserve(static_cast<std::size_t>(r));
  for (int rep = 0; rep < r; ++rep) {
    SampleBatch view{{}, batch.model, batch.n};
    view.items.assign(batch.items.begin() + rep * sub, batch.items.begin() + (rep + 1) * sub);
    const std::vector<double> qhat = project_and_symmetrize(view, u);
    estimates.push_back(estimate_from_qhat(qhat, a));
  }
  std::sort(estimates.begin(), estimates.end());
  const double raw = estimates[estimates.size() / 2];

  EstimateReport report;
  report.target = u;
  report.eps = eps;
  report.samples_used = sub * r;
  report.delta_used = delta;
  report.repetitions = r;
  report.estimate = std::clamp(raw, 0.0, 1.0);
  report.clamped = report.estimate != raw;
  return report;
}

}  // namespace popre
