#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "popre/rng.hpp"

namespace popre {

enum class NoiseKind { BitFlip, Erasure };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view s);

// Product noise channel with correlation/retention parameter nu.
// nu must lie in (0, 1); nu == 1 is admitted as an explicit noiseless mode.
struct NoiseModel {
  NoiseKind kind;
  double nu;

  NoiseModel(NoiseKind kind, double nu);
  bool noiseless() const { return nu == 1.0; }
};

// Fixed-length string over {0,1}, bit-packed.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::string_view bits);  // e.g. "0101"
  static BitString zeros(int n);

  int size() const { return n_; }
  bool bit(int i) const { return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u; }
  void set_bit(int i, bool v);
  int weight() const;

  BitString prefix(int len) const;
  BitString append(bool b) const;

  std::string str() const;
  std::span<const std::uint64_t> words() const { return words_; }

  bool operator==(const BitString& o) const { return n_ == o.n_ && words_ == o.words_; }
  bool operator<(const BitString& o) const;

 private:
  std::vector<std::uint64_t> words_;
  std::int32_t n_ = 0;
};

// Fixed-length string over {0,1,?}; '?' only arises from erasure noise.
class NoisyString {
 public:
  NoisyString() = default;
  explicit NoisyString(std::string_view symbols);
  static NoisyString from_bits(const BitString& x);

  int size() const { return n_; }
  bool visible(int i) const { return (vis_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u; }
  bool bit(int i) const { return (bits_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u; }
  char symbol(int i) const { return visible(i) ? (bit(i) ? '1' : '0') : '?'; }
  bool has_erasures() const;

  std::string str() const;
  std::span<const std::uint64_t> bit_words() const { return bits_; }
  std::span<const std::uint64_t> visible_words() const { return vis_; }

 private:
  friend NoisyString apply_noise(const NoiseModel&, const BitString&, Rng&);
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> vis_;
  std::int32_t n_ = 0;
};

// Probability vectors over Hamming weights 0..n are plain vectors; these
// helpers enforce the invariant where one is required.
bool is_probability_vector(std::span<const double> p, double tol = 1e-12);
void require_probability_vector(std::span<const double> p, double tol = 1e-12);

// (n+1)x(n+1) weight-to-weight transition matrix, row-stochastic.
class ChannelMatrix {
 public:
  ChannelMatrix(NoiseModel model, int n, std::vector<double> entries);

  const NoiseModel& model() const { return model_; }
  int n() const { return n_; }
  int dim() const { return n_ + 1; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim() + j]; }
  std::span<const double> row(int i) const {
    return {a_.data() + static_cast<std::size_t>(i) * dim(), static_cast<std::size_t>(dim())};
  }

 private:
  NoiseModel model_;
  int n_;
  std::vector<double> a_;
};

// Row i = coefficients of the noise generating polynomial:
// bit-flip ((1-nu)/2 + (1+nu)/2 z)^i ((1+nu)/2 + (1-nu)/2 z)^(n-i),
// erasure ((1-nu) + nu z)^i.
ChannelMatrix build_channel_matrix(const NoiseModel& model, int n);

// Independent per-coordinate corruption: erasure replaces with '?' w.p. 1-nu,
// bit-flip flips w.p. (1-nu)/2.
NoisyString apply_noise(const NoiseModel& model, const BitString& x, Rng& rng);

// q = pA.
std::vector<double> push_forward(std::span<const double> p, const ChannelMatrix& a);

// Exact-rational channel matrix for nu = nu_num/nu_den, usable as a test
// oracle for n <= 40 (throws if the integer convolution would overflow).
std::vector<std::vector<double>> build_channel_matrix_exact(NoiseKind kind, std::int64_t nu_num,
                                                            std::int64_t nu_den, int n);

void write_channel_csv(std::ostream& os, const ChannelMatrix& a);

}  // namespace popre
