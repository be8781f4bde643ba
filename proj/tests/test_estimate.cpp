#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "popre/estimate.hpp"
#include "popre/extremal.hpp"
#include "popre/lp.hpp"

using namespace popre;

namespace {

SampleBatch batch_of(std::initializer_list<const char*> samples, NoiseKind kind, double nu) {
  SampleBatch b{{}, NoiseModel(kind, nu), 0};
  for (const char* s : samples) b.items.emplace_back(s);
  b.n = b.items.front().size();
  return b;
}

}  // namespace

TEST_SUITE_BEGIN("estimate");

TEST_CASE("project_and_symmetrize: bitflip XOR then count") {
  // 01^01 = 00 (twice), 11^01 = 10, so weights are {0, 0, 1}.
  const SampleBatch b = batch_of({"01", "01", "11"}, NoiseKind::BitFlip, 0.5);
  const std::vector<double> q = project_and_symmetrize(b, BitString("01"));
  CHECK(q[0] == doctest::Approx(2.0 / 3.0));
  CHECK(q[1] == doctest::Approx(1.0 / 3.0));
  CHECK(q[2] == doctest::Approx(0.0));
}

TEST_CASE("project_and_symmetrize: erasure counts visible ones") {
  const SampleBatch b = batch_of({"0?", "1?"}, NoiseKind::Erasure, 0.5);
  const std::vector<double> q = project_and_symmetrize(b, BitString("00"));
  CHECK(q[0] == doctest::Approx(0.5));
  CHECK(q[1] == doctest::Approx(0.5));
  CHECK(q[2] == doctest::Approx(0.0));
}

TEST_CASE("project_and_symmetrize: erasure XORs only visible coordinates") {
  const SampleBatch b = batch_of({"0?"}, NoiseKind::Erasure, 0.5);
  const std::vector<double> q = project_and_symmetrize(b, BitString("01"));
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(0.0));
  CHECK(q[2] == doctest::Approx(0.0));
}

TEST_CASE("project_and_symmetrize: sums to one and is permutation invariant") {
  Rng rng(99);
  const int n = 9;
  const NoiseModel model(NoiseKind::Erasure, 0.6);
  SampleBatch b{{}, model, n};
  BitString x("101010101");
  for (int s = 0; s < 500; ++s) b.items.push_back(apply_noise(model, x, rng));
  BitString u("110011001");
  const std::vector<double> q = project_and_symmetrize(b, u);
  double sum = 0.0;
  for (double v : q) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  // Apply the same coordinate permutation (reversal) to samples and u.
  SampleBatch rb{{}, model, n};
  for (const NoisyString& y : b.items) {
    std::string s = y.str();
    std::reverse(s.begin(), s.end());
    rb.items.emplace_back(s);
  }
  std::string us = u.str();
  std::reverse(us.begin(), us.end());
  const std::vector<double> rq = project_and_symmetrize(rb, BitString(us));
  for (int w = 0; w <= n; ++w)
    CHECK(q[static_cast<std::size_t>(w)] == doctest::Approx(rq[static_cast<std::size_t>(w)]));
}

TEST_CASE("required_samples formula") {
  CHECK(required_samples(0, 0.5) == 64);
  CHECK(required_samples(15, 0.1) == 25600);
  CHECK(required_samples(15, 0.05) == 102400);
  CHECK_THROWS_AS(required_samples(4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(required_samples(4, 1.0), std::invalid_argument);
}

TEST_CASE("noiseless estimate equals the empirical frequency") {
  const int n = 4;
  SampleBatch b{{}, NoiseModel(NoiseKind::BitFlip, 1.0), n};
  for (int s = 0; s < 8000; ++s) b.items.push_back(NoisyString::from_bits(BitString("1010")));
  const EstimateReport rep = estimate_point_mass(b, BitString("1010"), 0.2, DeltaMode::Manual, 0.1);
  CHECK(rep.estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(rep.clamped);
  CHECK(rep.repetitions == 1);
}

TEST_CASE("bitflip end-to-end estimate within 2 eps") {
  const int n = 8;
  const double eps = 0.1;
  const NoiseModel model(NoiseKind::BitFlip, 0.6);
  Rng rng(123);
  SampleBatch b{{}, model, n};
  const EtaReport eta = eta_exact(model, n, eps / 2.0);
  const std::int64_t m = required_samples(n, eta.eta);
  const BitString x = BitString::zeros(n);
  for (std::int64_t s = 0; s < m; ++s) b.items.push_back(apply_noise(model, x, rng));
  const EstimateReport rep = estimate_point_mass(b, BitString::zeros(n), eps);
  CHECK(rep.delta_used == doctest::Approx(eta.eta));
  CHECK(std::abs(rep.estimate - 1.0) <= 2.0 * eps);
}

TEST_CASE("erasure end-to-end estimate on a two-point distribution") {
  const int n = 6;
  const double eps = 0.1;
  const NoiseModel model(NoiseKind::Erasure, 0.5);
  Rng rng(321);
  SampleBatch b{{}, model, n};
  const double delta = eta_exact(model, n, eps / 2.0).eta;
  const std::int64_t m = required_samples(n, delta);
  BitString ones = BitString::zeros(n);
  for (int i = 0; i < n; ++i) ones.set_bit(i, true);
  for (std::int64_t s = 0; s < m; ++s)
    b.items.push_back(apply_noise(model, rng.bernoulli(0.5) ? ones : BitString::zeros(n), rng));
  const EstimateReport rep = estimate_point_mass(b, BitString::zeros(n), eps);
  CHECK(std::abs(rep.estimate - 0.5) <= 0.2);
}

TEST_CASE("insufficient samples are rejected") {
  SampleBatch b = batch_of({"00", "01"}, NoiseKind::BitFlip, 0.8);
  CHECK_THROWS_AS(estimate_point_mass(b, BitString("00"), 0.05), InsufficientSamplesError);
}

TEST_CASE("soundness: adversarial qhat within delta of pA stays 2-eps accurate") {
  // Checked on the LP directly: whenever ||qhat - pA||_1 <
  // delta <= eta(eps/2, nu) for the true p, the fit has |p'_0 - p_0| <= 2 eps.
  Rng rng(5150);
  for (int trial = 0; trial < 25; ++trial) {
    const NoiseKind kind = trial % 2 ? NoiseKind::BitFlip : NoiseKind::Erasure;
    const double nu = 0.3 + 0.5 * rng.next_double();
    const double eps = 0.05 + 0.1 * rng.next_double();
    const int n = 4 + static_cast<int>(rng.index(5));
    const NoiseModel model(kind, nu);
    const ChannelMatrix a = build_channel_matrix(model, n);
    const double delta = eta_exact(model, n, eps / 2.0).eta;

    std::vector<double> p(static_cast<std::size_t>(n) + 1, 0.0);
    double sum = 0.0;
    for (double& v : p) sum += (v = rng.next_double());
    for (double& v : p) v /= sum;
    std::vector<double> qhat = push_forward(p, a);
    // Adversarial l1 perturbation of total size just under delta.
    double budget = 0.9 * delta;
    for (int j = 0; j <= n && budget > 0.0; ++j) {
      const double step = std::min(budget, delta / 3.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      qhat[static_cast<std::size_t>(j)] += step;
      budget -= std::abs(step);
    }
    const lp::LpSolution sol = lp::solve_lp(lp::build_l1_fit_lp(a, qhat));
    REQUIRE(sol.status == lp::LpStatus::Optimal);
    CHECK(std::abs(sol.x[0] - p[0]) <= 2.0 * eps + 1e-9);
  }
}

TEST_CASE("boosted estimation splits the batch into odd repetitions") {
  const int n = 3;
  SampleBatch b{{}, NoiseModel(NoiseKind::BitFlip, 1.0), n};
  const int r = boost_repetitions(n, 0.2);
  CHECK(r % 2 == 1);
  const std::int64_t need = required_samples(n, 0.5) * r;
  for (std::int64_t s = 0; s < need; ++s) b.items.push_back(NoisyString::from_bits(BitString("101")));
  const EstimateReport rep = estimate_point_mass(b, BitString("101"), 0.2, DeltaMode::Manual, 0.5, true);
  CHECK(rep.repetitions == r);
  CHECK(rep.estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.estimate >= 0.0);
  CHECK(rep.estimate <= 1.0);
}

TEST_SUITE_END();
