#include "popre/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "popre/config.hpp"
#include "popre/format.hpp"

namespace popre {

namespace {

int env_max_dimension() {
  if (const char* s = std::getenv("POPRE_MAX_N")) {
    const long v = std::strtol(s, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  return 128;
}

int g_max_dimension = env_max_dimension();

std::size_t word_count(int n) { return (static_cast<std::size_t>(n) + 63) / 64; }

}  // namespace

int max_dimension() { return g_max_dimension; }
void set_max_dimension(int n) {
  if (n < 1) throw std::invalid_argument("max dimension must be positive");
  g_max_dimension = n;
}

std::string to_string(NoiseKind kind) { return kind == NoiseKind::BitFlip ? "bitflip" : "erasure"; }

NoiseKind noise_kind_from_string(std::string_view s) {
  if (s == "bitflip") return NoiseKind::BitFlip;
  if (s == "erasure") return NoiseKind::Erasure;
  throw std::invalid_argument("unknown noise model '" + std::string(s) + "' (expected bitflip or erasure)");
}

NoiseModel::NoiseModel(NoiseKind kind_, double nu_) : kind(kind_), nu(nu_) {
  if (!(nu > 0.0 && nu < 1.0) && nu != 1.0)
    throw std::invalid_argument("nu must lie in (0,1), or equal 1 for the noiseless mode");
}

BitString::BitString(std::string_view bits) {
  n_ = static_cast<std::int32_t>(bits.size());
  if (n_ > max_dimension()) throw std::invalid_argument("bit string longer than configured maximum");
  words_.assign(word_count(n_), 0);
  for (int i = 0; i < n_; ++i) {
    const char c = bits[static_cast<std::size_t>(i)];
    if (c == '1')
      words_[static_cast<std::size_t>(i) >> 6] |= (1ULL << (i & 63));
    else if (c != '0')
      throw std::invalid_argument("bit string may contain only '0' and '1'");
  }
}

BitString BitString::zeros(int n) {
  if (n < 0 || n > max_dimension()) throw std::invalid_argument("bit string length out of range");
  BitString x;
  x.n_ = n;
  x.words_.assign(word_count(n), 0);
  return x;
}

void BitString::set_bit(int i, bool v) {
  if (v)
    words_[static_cast<std::size_t>(i) >> 6] |= (1ULL << (i & 63));
  else
    words_[static_cast<std::size_t>(i) >> 6] &= ~(1ULL << (i & 63));
}

int BitString::weight() const {
  int w = 0;
  for (auto word : words_) w += std::popcount(word);
  return w;
}

BitString BitString::prefix(int len) const {
  BitString x = zeros(len);
  for (int i = 0; i < len; ++i) x.set_bit(i, bit(i));
  return x;
}

BitString BitString::append(bool b) const {
  BitString x = zeros(n_ + 1);
  x.words_ = words_;
  x.words_.resize(word_count(n_ + 1), 0);
  x.n_ = n_ + 1;
  x.set_bit(n_, b);
  return x;
}

std::string BitString::str() const {
  std::string s(static_cast<std::size_t>(n_), '0');
  for (int i = 0; i < n_; ++i)
    if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

bool BitString::operator<(const BitString& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return str() < o.str();
}

NoisyString::NoisyString(std::string_view symbols) {
  n_ = static_cast<std::int32_t>(symbols.size());
  if (n_ > max_dimension()) throw std::invalid_argument("noisy string longer than configured maximum");
  bits_.assign(word_count(n_), 0);
  vis_.assign(word_count(n_), 0);
  for (int i = 0; i < n_; ++i) {
    const char c = symbols[static_cast<std::size_t>(i)];
    if (c == '?') continue;
    if (c != '0' && c != '1')
      throw std::invalid_argument("noisy string may contain only '0', '1' and '?'");
    vis_[static_cast<std::size_t>(i) >> 6] |= (1ULL << (i & 63));
    if (c == '1') bits_[static_cast<std::size_t>(i) >> 6] |= (1ULL << (i & 63));
  }
}

NoisyString NoisyString::from_bits(const BitString& x) {
  NoisyString y;
  y.n_ = x.size();
  y.bits_.assign(x.words().begin(), x.words().end());
  y.vis_.assign(word_count(y.n_), ~0ULL);
  if (y.n_ & 63) y.vis_.back() = (1ULL << (y.n_ & 63)) - 1;
  if (y.n_ == 0) y.vis_.clear();
  return y;
}

bool NoisyString::has_erasures() const {
  int visible_count = 0;
  for (auto w : vis_) visible_count += std::popcount(w);
  return visible_count != n_;
}

std::string NoisyString::str() const {
  std::string s(static_cast<std::size_t>(n_), '?');
  for (int i = 0; i < n_; ++i)
    if (visible(i)) s[static_cast<std::size_t>(i)] = bit(i) ? '1' : '0';
  return s;
}

bool is_probability_vector(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

void require_probability_vector(std::span<const double> p, double tol) {
  if (!is_probability_vector(p, tol))
    throw std::invalid_argument("vector is not a probability vector (nonnegative, sum 1)");
}

ChannelMatrix::ChannelMatrix(NoiseModel model, int n, std::vector<double> entries)
    : model_(model), n_(n), a_(std::move(entries)) {
  const std::size_t d = static_cast<std::size_t>(n) + 1;
  if (n < 1 || a_.size() != d * d) throw std::invalid_argument("channel matrix dimension mismatch");
}

namespace {

// Multiplies the polynomial held in `coeffs[0..len-1]` by (c0 + c1 z) in place.
// All factors are nonnegative, so no cancellation occurs.
void convolve_linear_factor(std::vector<double>& coeffs, int& len, double c0, double c1) {
  coeffs[static_cast<std::size_t>(len)] = c1 * coeffs[static_cast<std::size_t>(len - 1)];
  for (int k = len - 1; k >= 1; --k)
    coeffs[static_cast<std::size_t>(k)] = c0 * coeffs[static_cast<std::size_t>(k)] + c1 * coeffs[static_cast<std::size_t>(k - 1)];
  coeffs[0] *= c0;
  ++len;
}

}  // namespace

ChannelMatrix build_channel_matrix(const NoiseModel& model, int n) {
  if (n < 1 || n > max_dimension()) throw std::invalid_argument("channel matrix size out of range");
  const int d = n + 1;
  std::vector<double> a(static_cast<std::size_t>(d) * d, 0.0);
  std::vector<double> row(static_cast<std::size_t>(d), 0.0);
  const double nu = model.nu;
  for (int i = 0; i <= n; ++i) {
    row.assign(row.size(), 0.0);
    row[0] = 1.0;
    int len = 1;
    if (model.kind == NoiseKind::Erasure) {
      for (int k = 0; k < i; ++k) convolve_linear_factor(row, len, 1.0 - nu, nu);
    } else {
      for (int k = 0; k < i; ++k) convolve_linear_factor(row, len, (1.0 - nu) / 2.0, (1.0 + nu) / 2.0);
      for (int k = 0; k < n - i; ++k) convolve_linear_factor(row, len, (1.0 + nu) / 2.0, (1.0 - nu) / 2.0);
    }
    std::copy(row.begin(), row.end(), a.begin() + static_cast<std::size_t>(i) * d);
  }
  return ChannelMatrix(model, n, std::move(a));
}

NoisyString apply_noise(const NoiseModel& model, const BitString& x, Rng& rng) {
  NoisyString y = NoisyString::from_bits(x);
  const int n = x.size();
  if (model.kind == NoiseKind::Erasure) {
    const double erase_p = 1.0 - model.nu;
    for (int i = 0; i < n; ++i)
      if (rng.bernoulli(erase_p)) y.vis_[static_cast<std::size_t>(i) >> 6] &= ~(1ULL << (i & 63));
    for (std::size_t w = 0; w < y.bits_.size(); ++w) y.bits_[w] &= y.vis_[w];
  } else {
    const double flip_p = (1.0 - model.nu) / 2.0;
    for (int i = 0; i < n; ++i)
      if (rng.bernoulli(flip_p)) y.bits_[static_cast<std::size_t>(i) >> 6] ^= (1ULL << (i & 63));
  }
  return y;
}

std::vector<double> push_forward(std::span<const double> p, const ChannelMatrix& a) {
  const int d = a.dim();
  if (static_cast<int>(p.size()) != d) throw std::invalid_argument("push_forward dimension mismatch");
  require_probability_vector(p);
  std::vector<double> q(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    const double pi = p[static_cast<std::size_t>(i)];
    if (pi == 0.0) continue;
    const auto row = a.row(i);
    for (int j = 0; j < d; ++j) q[static_cast<std::size_t>(j)] += pi * row[static_cast<std::size_t>(j)];
  }
  return q;
}

namespace {

using i128 = __int128;

i128 checked_mul(i128 a, i128 b) {
  if (a == 0 || b == 0) return 0;
  const i128 r = a * b;
  if (r / b != a) throw std::overflow_error("exact channel matrix: integer overflow (reduce n or the denominator)");
  return r;
}

i128 checked_add(i128 a, i128 b) {
  const i128 r = a + b;
  if ((b > 0 && r < a) || (b < 0 && r > a)) throw std::overflow_error("exact channel matrix: integer overflow");
  return r;
}

// In-place multiply of integer coefficients by (c0 + c1 z).
void convolve_int_factor(std::vector<i128>& coeffs, int& len, i128 c0, i128 c1) {
  coeffs[static_cast<std::size_t>(len)] = checked_mul(c1, coeffs[static_cast<std::size_t>(len - 1)]);
  for (int k = len - 1; k >= 1; --k)
    coeffs[static_cast<std::size_t>(k)] =
        checked_add(checked_mul(c0, coeffs[static_cast<std::size_t>(k)]), checked_mul(c1, coeffs[static_cast<std::size_t>(k - 1)]));
  coeffs[0] = checked_mul(coeffs[0], c0);
  ++len;
}

double ratio_to_double(i128 num, i128 den) {
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

}  // namespace

std::vector<std::vector<double>> build_channel_matrix_exact(NoiseKind kind, std::int64_t nu_num,
                                                            std::int64_t nu_den, int n) {
  if (n < 1 || n > 40) throw std::invalid_argument("exact mode supports 1 <= n <= 40");
  if (nu_den <= 0 || nu_num <= 0 || nu_num > nu_den) throw std::invalid_argument("nu must be a fraction in (0,1]");
  const int d = n + 1;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<i128> row(static_cast<std::size_t>(d), 0);
  for (int i = 0; i <= n; ++i) {
    row.assign(row.size(), 0);
    row[0] = 1;
    int len = 1;
    i128 scale = 1;
    if (kind == NoiseKind::Erasure) {
      // Common denominator nu_den^i; factors ((den-num) + num z).
      for (int k = 0; k < i; ++k) {
        convolve_int_factor(row, len, nu_den - nu_num, nu_num);
        scale = checked_mul(scale, nu_den);
      }
    } else {
      // Common denominator (2 nu_den)^n; factors ((den-num) + (den+num) z)
      // for the first i coordinates and the complement for the rest.
      for (int k = 0; k < i; ++k) convolve_int_factor(row, len, nu_den - nu_num, nu_den + nu_num);
      for (int k = 0; k < n - i; ++k) convolve_int_factor(row, len, nu_den + nu_num, nu_den - nu_num);
      for (int k = 0; k < n; ++k) scale = checked_mul(scale, 2 * nu_den);
    }
    for (int j = 0; j < len; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ratio_to_double(row[static_cast<std::size_t>(j)], scale);
  }
  return a;
}

void write_channel_csv(std::ostream& os, const ChannelMatrix& a) {
  os << "n,model,nu\n";
  os << a.n() << ',' << to_string(a.model().kind) << ',' << format_double(a.model().nu) << '\n';
  for (int i = 0; i < a.dim(); ++i) {
    const auto row = a.row(i);
    for (int j = 0; j < a.dim(); ++j) os << (j ? "," : "") << format_double(row[static_cast<std::size_t>(j)]);
    os << '\n';
  }
}

}  // namespace popre
