#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "popre/channel.hpp"
#include "popre/rng.hpp"

namespace popre {

// Sparse distribution over n-bit strings.
struct Distribution {
  int n = 0;
  std::vector<std::pair<BitString, double>> entries;

  void validate() const;  // masses >= 0 summing to 1, strings of length n, no duplicates
};

// Source of i.i.d. noisy samples. next_packed() writes ceil(n/64) words each
// of bits and visibility, valid for one sample.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual NoiseModel model() const = 0;
  virtual int dimension() const = 0;
  virtual void next_packed(std::uint64_t* bits, std::uint64_t* vis) = 0;
  NoisyString next();
};

// Draws x ~ D then pushes it through the channel. Noise masks are generated
// as Binomial(n, p) counts with uniformly placed positions, which matches
// per-coordinate independent corruption exactly.
class ChannelSampler : public SampleSource {
 public:
  ChannelSampler(Distribution dist, NoiseModel model, Rng rng);

  NoiseModel model() const override { return model_; }
  int dimension() const override { return dist_.n; }
  void next_packed(std::uint64_t* bits, std::uint64_t* vis) override;

 private:
  Distribution dist_;
  NoiseModel model_;
  Rng rng_;
  std::vector<double> cdf_;
  std::vector<double> mask_count_cdf_;  // Binomial(n, corruption p) CDF
  int words_ = 0;
};

struct PrefixSet {
  std::vector<BitString> prefixes;
  int stage = 0;
};

struct RecoveryResult {
  std::vector<std::pair<BitString, double>> entries;
  double eps = 0.0;
};

class EnumerationOverflowError : public std::runtime_error {
 public:
  explicit EnumerationOverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Branch-and-prune enumeration of candidate heavy hitters: stage i extends
// every prefix by one bit and keeps those whose estimated marginal mass on
// the first i coordinates is at least 3 eps / 4 (estimates to accuracy
// eps/4). Aborts if the set ever exceeds 2 * ceil(2/eps).
PrefixSet enumerate_heavy_hitters(SampleSource& source, const NoiseModel& model, int n, double eps);

// Full NPR: enumeration followed by per-string estimation at accuracy eps/2;
// returns the entries whose estimate is at least eps.
RecoveryResult recover_distribution(SampleSource& source, const NoiseModel& model, int n, double eps);

}  // namespace popre
