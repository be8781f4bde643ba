#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "popre/channel.hpp"

namespace popre {

struct SampleBatch {
  std::vector<NoisyString> items;
  NoiseModel model;
  int n = 0;
};

enum class DeltaMode { Oracle, Manual };

struct EstimateReport {
  BitString target;
  double estimate = 0.0;
  double eps = 0.0;
  std::int64_t samples_used = 0;
  double delta_used = 0.0;
  bool clamped = false;
  int repetitions = 1;
};

class InsufficientSamplesError : public std::runtime_error {
 public:
  explicit InsufficientSamplesError(const std::string& what) : std::runtime_error(what) {}
};

// XOR-shift by u, then reduce each sample to the symmetric weight statistic:
// Hamming weight of y^u for bit-flip, count of visible ones of y^u for
// erasure. Returns the normalized histogram over weights 0..n.
std::vector<double> project_and_symmetrize(const SampleBatch& batch, const BitString& u);

// m = ceil(16 (n+1) / delta^2), making E||qhat - q||_1 <= delta/4.
std::int64_t required_samples(int n, double delta);

// Repetition count for amplified confidence: 2 ceil(ln(3n/eps)) + 1.
int boost_repetitions(int n, double eps);

// L1-fit estimate of p_0 from an empirical weight histogram (LP solve).
double estimate_from_qhat(std::span<const double> qhat, const ChannelMatrix& a);

// Estimates D(u) to accuracy 2*eps. Oracle mode picks
// delta = eta(eps/2, nu) by LP; Manual mode takes the caller's delta. With
// `amplified` the batch is split into boost_repetitions(n, eps) sub-batches
// and the median is returned; the batch must then hold r * required samples.
EstimateReport estimate_point_mass(const SampleBatch& batch, const BitString& u, double eps,
                                   DeltaMode mode = DeltaMode::Oracle, double manual_delta = 0.0,
                                   bool amplified = false);

}  // namespace popre
