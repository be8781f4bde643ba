#include "popre/recover.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "popre/config.hpp"
#include "popre/estimate.hpp"
#include "popre/extremal.hpp"

namespace popre {

void Distribution::validate() const {
  if (n < 1) throw std::invalid_argument("distribution needs n >= 1");
  double sum = 0.0;
  std::vector<std::string> seen;
  for (const auto& [x, p] : entries) {
    if (x.size() != n) throw std::invalid_argument("distribution entry length mismatch");
    if (!(p >= 0.0)) throw std::invalid_argument("distribution mass must be nonnegative");
    seen.push_back(x.str());
    sum += p;
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("distribution has duplicate support strings");
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("distribution masses must sum to 1");
}

NoisyString SampleSource::next() {
  const int n = dimension();
  const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
  std::vector<std::uint64_t> bits(words, 0), vis(words, 0);
  next_packed(bits.data(), vis.data());
  std::string s(static_cast<std::size_t>(n), '?');
  for (int i = 0; i < n; ++i) {
    if ((vis[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u)
      s[static_cast<std::size_t>(i)] = ((bits[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u) ? '1' : '0';
  }
  return NoisyString(s);
}

namespace {

std::vector<double> binomial_cdf(int n, double p) {
  std::vector<double> cdf(static_cast<std::size_t>(n) + 1, 0.0);
  // pmf by the stable multiplicative recurrence.
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
  } else if (p >= 1.0) {
    pmf[static_cast<std::size_t>(n)] = 1.0;
  } else {
    const double ratio = p / (1.0 - p);
    pmf[0] = std::pow(1.0 - p, n);
    for (int k = 1; k <= n; ++k)
      pmf[static_cast<std::size_t>(k)] =
          pmf[static_cast<std::size_t>(k - 1)] * ratio * (static_cast<double>(n - k + 1) / k);
  }
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    acc += pmf[static_cast<std::size_t>(k)];
    cdf[static_cast<std::size_t>(k)] = acc;
  }
  cdf[static_cast<std::size_t>(n)] = 1.0;
  return cdf;
}

int sample_from_cdf(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.next_double();
  return static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

// Sets `count` distinct random bit positions of an n-bit mask.
void random_mask(std::uint64_t* mask, int n, int count, int words, Rng& rng) {
  std::fill(mask, mask + words, 0ULL);
  const bool invert = count > n / 2;
  int target = invert ? n - count : count;
  if (invert) {
    for (int w = 0; w < words; ++w) mask[w] = ~0ULL;
    if (n & 63) mask[words - 1] = (1ULL << (n & 63)) - 1;
  }
  int placed = 0;
  while (placed < target) {
    const int pos = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    std::uint64_t& w = mask[pos >> 6];
    const std::uint64_t bit = 1ULL << (pos & 63);
    if (invert) {
      if (w & bit) {
        w &= ~bit;
        ++placed;
      }
    } else {
      if (!(w & bit)) {
        w |= bit;
        ++placed;
      }
    }
  }
}

}  // namespace

ChannelSampler::ChannelSampler(Distribution dist, NoiseModel model, Rng rng)
    : dist_(std::move(dist)), model_(model), rng_(rng) {
  dist_.validate();
  words_ = static_cast<int>((static_cast<std::size_t>(dist_.n) + 63) / 64);
  double acc = 0.0;
  for (const auto& [x, p] : dist_.entries) {
    acc += p;
    cdf_.push_back(acc);
  }
  if (!cdf_.empty()) cdf_.back() = 1.0;
  const double corrupt_p = model_.kind == NoiseKind::Erasure ? 1.0 - model_.nu : (1.0 - model_.nu) / 2.0;
  mask_count_cdf_ = binomial_cdf(dist_.n, corrupt_p);
}

void ChannelSampler::next_packed(std::uint64_t* bits, std::uint64_t* vis) {
  const int n = dist_.n;
  const int idx = sample_from_cdf(cdf_, rng_);
  const auto xw = dist_.entries[static_cast<std::size_t>(idx)].first.words();
  for (int w = 0; w < words_; ++w) bits[w] = xw[static_cast<std::size_t>(w)];
  for (int w = 0; w < words_; ++w) vis[w] = ~0ULL;
  if (n & 63) vis[words_ - 1] = (1ULL << (n & 63)) - 1;

  const int count = sample_from_cdf(mask_count_cdf_, rng_);
  if (count == 0) return;
  std::uint64_t mask[2];
  std::vector<std::uint64_t> big;
  std::uint64_t* m = words_ <= 2 ? mask : (big.assign(static_cast<std::size_t>(words_), 0), big.data());
  random_mask(m, n, count, words_, rng_);
  if (model_.kind == NoiseKind::Erasure) {
    for (int w = 0; w < words_; ++w) {
      vis[w] &= ~m[w];
      bits[w] &= vis[w];
    }
  } else {
    for (int w = 0; w < words_; ++w) bits[w] ^= m[w];
  }
}

namespace {

struct StageEstimator {
  // Shared machinery for one (dimension, accuracy) estimation round.
  const NoiseModel model;
  const int dim;
  const int words;
  const ChannelMatrix a;
  const double delta;
  const std::int64_t samples;

  StageEstimator(const NoiseModel& model_, int dim_, double est_eps)
      : model(model_),
        dim(dim_),
        words(static_cast<int>((static_cast<std::size_t>(dim_) + 63) / 64)),
        a(build_channel_matrix(model_, dim_)),
        delta(eta_exact(model_, dim_, est_eps / 2.0).eta),
        samples(required_samples(dim_, delta)) {}

  // One repetition: draw a fresh batch, tally every candidate, LP-estimate.
  std::vector<double> run_rep(SampleSource& source, const std::vector<BitString>& candidates) const {
    const std::size_t nc = candidates.size();
    std::vector<std::vector<std::int64_t>> hist(nc, std::vector<std::int64_t>(static_cast<std::size_t>(dim) + 1, 0));
    const int src_words = static_cast<int>((static_cast<std::size_t>(source.dimension()) + 63) / 64);
    std::vector<std::uint64_t> buf(static_cast<std::size_t>(src_words) * 2, 0);
    std::uint64_t* bits = buf.data();
    std::uint64_t* vis = buf.data() + src_words;

    std::vector<std::uint64_t> cand_words;
    for (const BitString& c : candidates) {
      const auto w = c.words();
      for (int k = 0; k < words; ++k)
        cand_words.push_back(k < static_cast<int>(w.size()) ? w[static_cast<std::size_t>(k)] : 0ULL);
    }
    const std::uint64_t prefix_mask_hi = (dim & 63) ? (1ULL << (dim & 63)) - 1 : ~0ULL;

    for (std::int64_t s = 0; s < samples; ++s) {
      source.next_packed(bits, vis);
      // Project to the first `dim` coordinates.
      bits[words - 1] &= prefix_mask_hi;
      vis[words - 1] &= prefix_mask_hi;
      for (std::size_t ci = 0; ci < nc; ++ci) {
        int wgt = 0;
        const std::uint64_t* cw = cand_words.data() + ci * static_cast<std::size_t>(words);
        for (int k = 0; k < words; ++k) wgt += std::popcount((bits[k] ^ cw[k]) & vis[k]);
        ++hist[ci][static_cast<std::size_t>(wgt)];
      }
    }

    std::vector<double> est(nc, 0.0);
    std::vector<double> qhat(static_cast<std::size_t>(dim) + 1, 0.0);
    for (std::size_t ci = 0; ci < nc; ++ci) {
      for (int w = 0; w <= dim; ++w)
        qhat[static_cast<std::size_t>(w)] =
            static_cast<double>(hist[ci][static_cast<std::size_t>(w)]) / static_cast<double>(samples);
      est[ci] = estimate_from_qhat(qhat, a);
    }
    return est;
  }

  std::vector<double> run(SampleSource& source, const std::vector<BitString>& candidates, int reps) const {
    std::vector<std::vector<double>> all;
    for (int r = 0; r < reps; ++r) all.push_back(run_rep(source, candidates));
    std::vector<double> med(candidates.size());
    std::vector<double> tmp(static_cast<std::size_t>(reps));
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      for (int r = 0; r < reps; ++r) tmp[static_cast<std::size_t>(r)] = all[static_cast<std::size_t>(r)][ci];
      std::sort(tmp.begin(), tmp.end());
      med[ci] = tmp[tmp.size() / 2];
    }
    return med;
  }
};

constexpr int kStageReps = 3;
constexpr int kFinalReps = 5;

}  // namespace

PrefixSet enumerate_heavy_hitters(SampleSource& source, const NoiseModel& model, int n, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (n < 1 || n > max_dimension()) throw std::invalid_argument("n out of range");
  if (source.dimension() != n) throw std::invalid_argument("sample source dimension mismatch");

  const std::size_t cap = 2 * static_cast<std::size_t>(std::ceil(2.0 / eps));
  std::vector<BitString> prefixes{BitString::zeros(0)};
  for (int stage = 1; stage <= n; ++stage) {
    std::vector<BitString> candidates;
    candidates.reserve(prefixes.size() * 2);
    for (const BitString& p : prefixes) {
      candidates.push_back(p.append(false));
      candidates.push_back(p.append(true));
    }
    const StageEstimator est(model, stage, eps / 8.0);
    const std::vector<double> masses = est.run(source, candidates, kStageReps);
    std::vector<BitString> kept;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (masses[i] >= 0.75 * eps) kept.push_back(candidates[i]);
    if (kept.size() > cap)
      throw EnumerationOverflowError("stage " + std::to_string(stage) + " kept " +
                                     std::to_string(kept.size()) + " prefixes, above the bound " +
                                     std::to_string(cap) + " (estimator failure)");
    prefixes = std::move(kept);
    if (prefixes.empty()) break;
  }
  return PrefixSet{std::move(prefixes), n};
}

RecoveryResult recover_distribution(SampleSource& source, const NoiseModel& model, int n, double eps) {
  const PrefixSet survivors = enumerate_heavy_hitters(source, model, n, eps);
  RecoveryResult result;
  result.eps = eps;
  if (survivors.prefixes.empty()) return result;

  const StageEstimator est(model, n, eps / 4.0);
  const std::vector<double> masses = est.run(source, survivors.prefixes, kFinalReps);
  for (std::size_t i = 0; i < survivors.prefixes.size(); ++i) {
    const double p = std::clamp(masses[i], 0.0, 1.0);
    if (p >= eps) result.entries.emplace_back(survivors.prefixes[i], p);
  }
  std::sort(result.entries.begin(), result.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return result;
}

}  // namespace popre
