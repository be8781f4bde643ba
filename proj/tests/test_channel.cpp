#include <doctest.h>

#include <cmath>
#include <sstream>

#include "popre/channel.hpp"
#include "popre/config.hpp"
#include "popre/rng.hpp"

using namespace popre;

namespace {

double row_sum(const ChannelMatrix& a, int i) {
  double s = 0.0;
  for (int j = 0; j < a.dim(); ++j) s += a.at(i, j);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("noise model validates nu") {
  CHECK_THROWS_AS(NoiseModel(NoiseKind::BitFlip, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel(NoiseKind::Erasure, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel(NoiseKind::BitFlip, 1.2), std::invalid_argument);
  CHECK(NoiseModel(NoiseKind::BitFlip, 1.0).noiseless());
  CHECK_FALSE(NoiseModel(NoiseKind::Erasure, 0.5).noiseless());
}

TEST_CASE("erasure matrix at nu=0.5, n=1") {
  const ChannelMatrix a = build_channel_matrix(NoiseModel(NoiseKind::Erasure, 0.5), 1);
  CHECK(a.at(0, 0) == doctest::Approx(1.0));
  CHECK(a.at(0, 1) == doctest::Approx(0.0));
  CHECK(a.at(1, 0) == doctest::Approx(0.5));
  CHECK(a.at(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("bitflip matrix at nu=0.5, n=1") {
  const ChannelMatrix a = build_channel_matrix(NoiseModel(NoiseKind::BitFlip, 0.5), 1);
  CHECK(a.at(0, 0) == doctest::Approx(0.75));
  CHECK(a.at(0, 1) == doctest::Approx(0.25));
  CHECK(a.at(1, 0) == doctest::Approx(0.25));
  CHECK(a.at(1, 1) == doctest::Approx(0.75));
}

TEST_CASE("noiseless bitflip channel is the identity") {
  for (int n : {1, 3, 7}) {
    const ChannelMatrix a = build_channel_matrix(NoiseModel(NoiseKind::BitFlip, 1.0), n);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) CHECK(a.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("rows are stochastic and structure invariants hold") {
  for (NoiseKind kind : {NoiseKind::BitFlip, NoiseKind::Erasure}) {
    for (double nu : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (int n : {1, 2, 5, 16, 33, 64}) {
        const ChannelMatrix a = build_channel_matrix(NoiseModel(kind, nu), n);
        for (int i = 0; i <= n; ++i) {
          CHECK(std::abs(row_sum(a, i) - 1.0) < 1e-10);
          for (int j = 0; j <= n; ++j) CHECK(a.at(i, j) >= 0.0);
        }
        if (kind == NoiseKind::Erasure) {
          for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) CHECK(a.at(i, j) == 0.0);
        } else {
          for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) CHECK(std::abs(a.at(i, j) - a.at(n - i, n - j)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("double matrix matches the exact-rational oracle") {
  struct Case {
    NoiseKind kind;
    std::int64_t num, den;
  };
  for (const Case& c : {Case{NoiseKind::Erasure, 1, 2}, Case{NoiseKind::Erasure, 3, 10},
                        Case{NoiseKind::BitFlip, 1, 2}, Case{NoiseKind::BitFlip, 7, 10}}) {
    const int n = 24;
    const double nu = static_cast<double>(c.num) / static_cast<double>(c.den);
    const ChannelMatrix a = build_channel_matrix(NoiseModel(c.kind, nu), n);
    const auto exact = build_channel_matrix_exact(c.kind, c.num, c.den, n);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        CHECK(a.at(i, j) == doctest::Approx(exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                                .epsilon(1e-12));
  }
}

TEST_CASE("exact mode rejects overflowing inputs") {
  CHECK_THROWS_AS(build_channel_matrix_exact(NoiseKind::BitFlip, 123456789, 1000000000, 40),
                  std::overflow_error);
  CHECK_THROWS_AS(build_channel_matrix_exact(NoiseKind::Erasure, 1, 2, 64), std::invalid_argument);
}

TEST_CASE("apply_noise is the identity at nu=1") {
  Rng rng(7);
  const BitString x("0110");
  CHECK(apply_noise(NoiseModel(NoiseKind::Erasure, 1.0), x, rng).str() == "0110");
  CHECK(apply_noise(NoiseModel(NoiseKind::BitFlip, 1.0), x, rng).str() == "0110");
}

TEST_CASE("erasure rate concentrates at 1-nu") {
  const int old_max = max_dimension();
  set_max_dimension(10000);
  const int n = 10000;
  Rng rng(20240817);
  const NoisyString y = apply_noise(NoiseModel(NoiseKind::Erasure, 0.5), BitString::zeros(n), rng);
  int erased = 0;
  for (int i = 0; i < n; ++i) erased += y.visible(i) ? 0 : 1;
  CHECK(std::abs(erased / static_cast<double>(n) - 0.5) < 0.02);
  set_max_dimension(old_max);
}

TEST_CASE("empirical weight histograms match matrix rows (TV 0.02)") {
  const int n = 12;
  const int samples = 100000;
  for (NoiseKind kind : {NoiseKind::BitFlip, NoiseKind::Erasure}) {
    const NoiseModel model(kind, 0.6);
    const ChannelMatrix a = build_channel_matrix(model, n);
    for (int i : {0, n / 2, n}) {
      BitString x = BitString::zeros(n);
      for (int b = 0; b < i; ++b) x.set_bit(b, true);
      Rng rng(1000 + i);
      std::vector<double> hist(static_cast<std::size_t>(n) + 1, 0.0);
      const BitString zero = BitString::zeros(n);
      for (int s = 0; s < samples; ++s) {
        const NoisyString y = apply_noise(model, x, rng);
        int w = 0;
        for (int b = 0; b < n; ++b) w += (y.visible(b) && y.bit(b)) ? 1 : 0;
        hist[static_cast<std::size_t>(w)] += 1.0;
      }
      double tv = 0.0;
      for (int j = 0; j <= n; ++j)
        tv += std::abs(hist[static_cast<std::size_t>(j)] / samples - a.at(i, j));
      CHECK(tv / 2.0 < 0.02);
    }
  }
}

TEST_CASE("push_forward examples and invariants") {
  const ChannelMatrix er = build_channel_matrix(NoiseModel(NoiseKind::Erasure, 0.5), 1);
  {
    const std::vector<double> q = push_forward(std::vector<double>{1.0, 0.0}, er);
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(q[1] == doctest::Approx(0.0));
  }
  {
    const std::vector<double> q = push_forward(std::vector<double>{0.0, 1.0}, er);
    CHECK(q[0] == doctest::Approx(0.5));
    CHECK(q[1] == doctest::Approx(0.5));
  }
  {
    const ChannelMatrix bf = build_channel_matrix(NoiseModel(NoiseKind::BitFlip, 0.5), 1);
    const std::vector<double> q = push_forward(std::vector<double>{0.5, 0.5}, bf);
    CHECK(q[0] == doctest::Approx(0.5));
    CHECK(q[1] == doctest::Approx(0.5));
  }
  {
    // Mass preserved to 1e-10, nonnegativity exact.
    Rng rng(5);
    const int n = 17;
    const ChannelMatrix a = build_channel_matrix(NoiseModel(NoiseKind::BitFlip, 0.3), n);
    std::vector<double> p(static_cast<std::size_t>(n) + 1, 0.0);
    double sum = 0.0;
    for (double& v : p) sum += (v = rng.next_double());
    for (double& v : p) v /= sum;
    const std::vector<double> q = push_forward(p, a);
    double qs = 0.0;
    for (double v : q) {
      CHECK(v >= 0.0);
      qs += v;
    }
    CHECK(std::abs(qs - 1.0) < 1e-10);
  }
  CHECK_THROWS_AS(push_forward(std::vector<double>{1.0}, er), std::invalid_argument);
}

TEST_CASE("channel csv layout") {
  const ChannelMatrix a = build_channel_matrix(NoiseModel(NoiseKind::Erasure, 0.5), 1);
  std::ostringstream os;
  write_channel_csv(os, a);
  CHECK(os.str() == "n,model,nu\n1,erasure,0.5\n1,0\n0.5,0.5\n");
}

TEST_SUITE_END();
