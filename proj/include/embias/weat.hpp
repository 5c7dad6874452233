#pragma once

// Word Embedding Association Test: per-word association with two attribute
// sets, the differential statistic over two target sets, its effect size,
// and one-sided permutation p-values (exact enumeration, seeded Monte Carlo,
// and a normal-tail approximation fitted to the sampled null).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "embias/embedding_store.hpp"
#include "embias/error.hpp"
#include "embias/stimuli.hpp"

namespace embias {

enum class PMethod { exact, montecarlo, normal, automatic };
enum class TieSemantics { geq, strict };
enum class SdConvention { population, sample };

inline std::string_view to_string(PMethod m) {
  switch (m) {
    case PMethod::exact: return "exact";
    case PMethod::montecarlo: return "montecarlo";
    case PMethod::normal: return "normal";
    case PMethod::automatic: return "auto";
  }
  return "?";
}

inline std::string_view to_string(TieSemantics t) { return t == TieSemantics::geq ? "geq" : "strict"; }
inline std::string_view to_string(SdConvention s) {
  return s == SdConvention::population ? "population" : "sample";
}

inline PMethod parse_p_method(std::string_view s) {
  if (s == "exact") return PMethod::exact;
  if (s == "montecarlo") return PMethod::montecarlo;
  if (s == "normal") return PMethod::normal;
  if (s == "auto") return PMethod::automatic;
  throw UsageError("unknown p-method '" + std::string(s) + "' (expected exact, montecarlo, normal, auto)");
}

inline TieSemantics parse_tie(std::string_view s) {
  if (s == "geq") return TieSemantics::geq;
  if (s == "strict") return TieSemantics::strict;
  throw UsageError("unknown tie semantics '" + std::string(s) + "' (expected geq, strict)");
}

struct WeatConfig {
  PMethod p_method = PMethod::automatic;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  std::uint64_t exact_threshold = 200'000;
  TieSemantics tie = TieSemantics::geq;
  SdConvention sd = SdConvention::population;
  FallbackChain fallback_chain{Fallback::exact};
  unsigned threads = 0;  // 0 = hardware concurrency; never affects results

  void validate() const {
    if ((p_method == PMethod::montecarlo || p_method == PMethod::automatic) && samples < 1'000) {
      throw UsageError("Monte Carlo needs at least 1000 samples");
    }
    if (p_method == PMethod::normal && samples < 10'000) {
      throw UsageError("the normal-tail approximation needs at least 10000 samples");
    }
  }
};

// ---------------------------------------------------------------------------
// Association primitives

template <class T>
double association(const BasicWordVector<T>& w, std::span<const BasicWordVector<T>> A,
                   std::span<const BasicWordVector<T>> B) {
  if (A.empty() || B.empty()) throw UsageError("association needs non-empty attribute sets");
  double sa = 0.0;
  for (const auto& a : A) sa += cosine(w, a);
  double sb = 0.0;
  for (const auto& b : B) sb += cosine(w, b);
  return sa / static_cast<double>(A.size()) - sb / static_cast<double>(B.size());
}

namespace detail {

template <class T>
std::vector<BasicWordVector<T>> vectors_for(const BasicEmbeddingStore<T>& store,
                                            std::span<const std::string> words,
                                            std::vector<std::string>& misses) {
  std::vector<BasicWordVector<T>> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    if (auto v = store.find(w)) {
      out.push_back(*v);
    } else {
      misses.push_back(w);
    }
  }
  return out;
}

inline void throw_if_missing(const std::vector<std::string>& misses) {
  if (misses.empty()) return;
  std::string msg = "words not in embedding:";
  for (const auto& m : misses) msg += " " + m;
  throw ResolutionError(msg);
}

template <class T>
std::vector<BasicWordVector<T>> vectors_for(const BasicEmbeddingStore<T>& store, const ResolvedSet& set) {
  std::vector<BasicWordVector<T>> out;
  out.reserve(set.size());
  for (const auto& w : set.words) out.push_back(store.at(w.index));
  return out;
}

// Sum of values[i] for i selected (or not) by mask, in index order.
inline double masked_sum(std::span<const double> values, std::span<const char> in_x, char want) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (in_x[i] == want) s += values[i];
  }
  return s;
}

// Mean/deviation of the union of two parts, accumulated per part and then
// combined, so the result does not depend on which part comes first.
inline std::optional<double> pooled_sd(std::span<const double> a, std::span<const double> b,
                                       SdConvention sd) {
  const double n = static_cast<double>(a.size() + b.size());
  double sa = 0.0, sb = 0.0;
  for (double v : a) sa += v;
  for (double v : b) sb += v;
  const double mean = (sa + sb) / n;
  double qa = 0.0, qb = 0.0;
  for (double v : a) qa += (v - mean) * (v - mean);
  for (double v : b) qb += (v - mean) * (v - mean);
  const double denom = sd == SdConvention::population ? n : n - 1.0;
  if (denom <= 0.0) return std::nullopt;
  const double dev = std::sqrt((qa + qb) / denom);
  if (!(dev > 0.0)) return std::nullopt;
  return dev;
}

inline double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// C(n, k), saturating at uint64 max.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n-k+i) is divisible by i; split i across both factors first.
    const std::uint64_t g = std::gcd(r, i);
    const std::uint64_t factor = (n - k + i) / (i / g);
    r /= g;
    if (r > kMax / factor) return kMax;
    r *= factor;
  }
  return r;
}

}  // namespace detail

// Per-word associations of the two target sets: the first n_x values belong
// to X, the rest to Y. Every test statistic is a function of this alone.
struct TargetAssociations {
  std::vector<double> values;
  std::size_t n_x = 0;

  std::size_t n_y() const { return values.size() - n_x; }
  std::span<const double> x() const { return std::span<const double>(values).first(n_x); }
  std::span<const double> y() const { return std::span<const double>(values).subspan(n_x); }
};

template <class T>
TargetAssociations target_associations(std::span<const BasicWordVector<T>> X,
                                       std::span<const BasicWordVector<T>> Y,
                                       std::span<const BasicWordVector<T>> A,
                                       std::span<const BasicWordVector<T>> B) {
  TargetAssociations t;
  t.n_x = X.size();
  t.values.reserve(X.size() + Y.size());
  for (const auto& w : X) t.values.push_back(association(w, A, B));
  for (const auto& w : Y) t.values.push_back(association(w, A, B));
  return t;
}

template <class T>
TargetAssociations target_associations(const BasicEmbeddingStore<T>& store,
                                       std::span<const std::string> X, std::span<const std::string> Y,
                                       std::span<const std::string> A, std::span<const std::string> B) {
  std::vector<std::string> misses;
  auto vx = detail::vectors_for(store, X, misses);
  auto vy = detail::vectors_for(store, Y, misses);
  auto va = detail::vectors_for(store, A, misses);
  auto vb = detail::vectors_for(store, B, misses);
  detail::throw_if_missing(misses);
  return target_associations<T>(vx, vy, va, vb);
}

template <class T>
double association(const BasicEmbeddingStore<T>& store, std::string_view w, std::span<const std::string> A,
                   std::span<const std::string> B) {
  std::vector<std::string> misses;
  auto va = detail::vectors_for(store, A, misses);
  auto vb = detail::vectors_for(store, B, misses);
  auto vw = store.find(w);
  if (!vw) misses.emplace_back(w);
  detail::throw_if_missing(misses);
  return association<T>(*vw, va, vb);
}

// sum_{x in X} s(x,A,B) - sum_{y in Y} s(y,A,B)
inline double differential(const TargetAssociations& t) {
  double sx = 0.0, sy = 0.0;
  for (double v : t.x()) sx += v;
  for (double v : t.y()) sy += v;
  return sx - sy;
}

// Nullopt when every association is identical (zero deviation).
inline std::optional<double> effect_size(const TargetAssociations& t,
                                         SdConvention sd = SdConvention::population) {
  if (t.n_x == 0 || t.n_y() == 0) throw UsageError("effect size needs non-empty target sets");
  auto dev = detail::pooled_sd(t.x(), t.y(), sd);
  if (!dev) return std::nullopt;
  return (detail::mean_of(t.x()) - detail::mean_of(t.y())) / *dev;
}

template <class T>
double differential(const BasicEmbeddingStore<T>& store, std::span<const std::string> X,
                    std::span<const std::string> Y, std::span<const std::string> A,
                    std::span<const std::string> B) {
  if (X.size() != Y.size()) throw UsageError("differential needs |X| = |Y|");
  return differential(target_associations(store, X, Y, A, B));
}

template <class T>
std::optional<double> effect_size(const BasicEmbeddingStore<T>& store, std::span<const std::string> X,
                                  std::span<const std::string> Y, std::span<const std::string> A,
                                  std::span<const std::string> B, SdConvention sd = SdConvention::population) {
  if (X.size() != Y.size()) throw UsageError("effect size needs |X| = |Y|");
  if (X.size() + Y.size() < 4) throw UsageError("effect size needs |X u Y| >= 4");
  return effect_size(target_associations(store, X, Y, A, B), sd);
}

// ---------------------------------------------------------------------------
// Permutation null
//
// A partition assigns n of the 2n target words to the X role. Its statistic
// is evaluated by the same summation as the observed one, so the identity
// partition reproduces the observed value bit-for-bit. Partitions within a
// relative 1e-12 of the observed value count as ties, which absorbs rounding
// differences between mathematically equal sums taken in different orders.

inline constexpr double kTieRelativeTolerance = 1e-12;

namespace detail {

inline double tie_tolerance(std::span<const double> values) {
  double scale = 0.0;
  for (double v : values) scale += std::abs(v);
  return kTieRelativeTolerance * scale;
}

inline bool meets(double s, double observed, double tol, TieSemantics tie) {
  return tie == TieSemantics::geq ? s >= observed - tol : s > observed + tol;
}

inline void check_balanced(const TargetAssociations& t) {
  if (t.n_x != t.n_y()) throw UsageError("permutation test needs |X| = |Y|");
  if (t.n_x == 0) throw UsageError("permutation test needs non-empty target sets");
}

}  // namespace detail

inline std::uint64_t partition_count(std::size_t n) { return detail::binomial(2 * n, n); }

struct ExactPValue {
  double p = 0.0;
  std::uint64_t meeting = 0;     // partitions whose statistic meets the observed one
  std::uint64_t partitions = 0;  // C(2n, n)
};

inline ExactPValue p_exact(const TargetAssociations& t, TieSemantics tie = TieSemantics::geq,
                           std::uint64_t exact_threshold = 200'000) {
  detail::check_balanced(t);
  const std::size_t n = t.n_x;
  const std::size_t total = 2 * n;
  const std::uint64_t count = partition_count(n);
  if (count > exact_threshold || total > 62) {
    throw UsageError("exact permutation test would enumerate " + std::to_string(count) +
                     " partitions (threshold " + std::to_string(exact_threshold) +
                     "); use the montecarlo p-method");
  }
  const double observed = differential(t);
  const double tol = detail::tie_tolerance(t.values);
  std::vector<char> in_x(total);
  ExactPValue r;
  r.partitions = count;
  // Gosper's hack: every total-bit word with exactly n bits set.
  const std::uint64_t last = ((std::uint64_t{1} << n) - 1) << n;
  for (std::uint64_t mask = (std::uint64_t{1} << n) - 1;;) {
    for (std::size_t i = 0; i < total; ++i) in_x[i] = static_cast<char>((mask >> i) & 1u);
    const double s = detail::masked_sum(t.values, in_x, 1) - detail::masked_sum(t.values, in_x, 0);
    if (detail::meets(s, observed, tol, tie)) ++r.meeting;
    if (mask == last) break;
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t rr = mask + c;
    mask = (((rr ^ mask) >> 2) / c) | rr;
  }
  r.p = static_cast<double>(r.meeting) / static_cast<double>(r.partitions);
  return r;
}

// Summary of sampled partitions: tail count plus running moments of the
// sampled null statistics.
struct NullTally {
  std::uint64_t samples = 0;
  std::uint64_t meeting = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations from the mean

  void add(double s) {
    ++samples;
    const double d = s - mean;
    mean += d / static_cast<double>(samples);
    m2 += d * (s - mean);
  }

  void merge(const NullTally& o) {
    if (o.samples == 0) return;
    if (samples == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(samples), nb = static_cast<double>(o.samples);
    const double d = o.mean - mean;
    const double n = na + nb;
    mean += d * nb / n;
    m2 += o.m2 + d * d * na * nb / n;
    samples += o.samples;
    meeting += o.meeting;
  }

  double variance() const { return samples == 0 ? 0.0 : m2 / static_cast<double>(samples); }
};

inline constexpr std::uint64_t kMonteCarloChunk = 16'384;

// Draws `samples` uniform equal-size partitions. The index space is cut into
// fixed chunks; chunk c draws from a generator seeded by (seed, c), and the
// chunk tallies are merged in chunk order, so the result is independent of
// the number of worker threads.
inline NullTally sample_null(const TargetAssociations& t, std::uint64_t samples, std::uint64_t seed,
                             TieSemantics tie = TieSemantics::geq, unsigned threads = 0) {
  detail::check_balanced(t);
  const std::size_t total = t.values.size();
  const std::size_t n = t.n_x;
  const double observed = differential(t);
  const double tol = detail::tie_tolerance(t.values);
  const std::uint64_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<NullTally> tallies(chunks);

  auto run_chunk = [&](std::uint64_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> perm(total);
    for (std::size_t i = 0; i < total; ++i) perm[i] = i;
    std::vector<char> in_x(total);
    const std::uint64_t begin = c * kMonteCarloChunk;
    const std::uint64_t end = std::min(samples, begin + kMonteCarloChunk);
    NullTally tally;
    for (std::uint64_t k = begin; k < end; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, total - 1);
        std::swap(perm[i], perm[pick(rng)]);
      }
      std::fill(in_x.begin(), in_x.end(), char{0});
      for (std::size_t i = 0; i < n; ++i) in_x[perm[i]] = 1;
      const double s = detail::masked_sum(t.values, in_x, 1) - detail::masked_sum(t.values, in_x, 0);
      tally.add(s);
      if (detail::meets(s, observed, tol, tie)) ++tally.meeting;
    }
    tallies[c] = tally;
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
  }

  NullTally out;
  for (const auto& tl : tallies) out.merge(tl);
  return out;
}

struct MonteCarloPValue {
  double p = 0.0;       // (k + 1) / (m + 1)
  double std_error = 0.0;  // sqrt(p (1 - p) / m)
  double raw = 0.0;     // k / m
  std::uint64_t samples = 0;
  std::uint64_t meeting = 0;
};

inline MonteCarloPValue p_montecarlo_from(const NullTally& tally) {
  MonteCarloPValue r;
  r.samples = tally.samples;
  r.meeting = tally.meeting;
  const double m = static_cast<double>(tally.samples);
  r.p = (static_cast<double>(tally.meeting) + 1.0) / (m + 1.0);
  r.raw = static_cast<double>(tally.meeting) / m;
  r.std_error = std::sqrt(r.p * (1.0 - r.p) / m);
  return r;
}

inline MonteCarloPValue p_montecarlo(const TargetAssociations& t, std::uint64_t samples, std::uint64_t seed,
                                     TieSemantics tie = TieSemantics::geq, unsigned threads = 0) {
  if (samples < 1'000) throw UsageError("Monte Carlo needs at least 1000 samples");
  return p_montecarlo_from(sample_null(t, samples, seed, tie, threads));
}

struct NormalTailPValue {
  double p = 0.0;
  double null_mean = 0.0;
  double null_sd = 0.0;
  double z = 0.0;
  std::uint64_t samples = 0;
};

// Upper-tail normal probability of the observed statistic under a normal fit
// to the sampled null. Nullopt when the sampled null has zero variance.
inline std::optional<NormalTailPValue> p_normal_from(const NullTally& tally, double observed) {
  NormalTailPValue r;
  r.samples = tally.samples;
  r.null_mean = tally.mean;
  r.null_sd = std::sqrt(tally.variance());
  if (!(r.null_sd > 0.0)) return std::nullopt;
  r.z = (observed - r.null_mean) / r.null_sd;
  r.p = 0.5 * std::erfc(r.z / std::sqrt(2.0));
  return r;
}

inline std::optional<NormalTailPValue> p_normal(const TargetAssociations& t, std::uint64_t samples,
                                                std::uint64_t seed, unsigned threads = 0) {
  if (samples < 10'000) throw UsageError("the normal-tail approximation needs at least 10000 samples");
  return p_normal_from(sample_null(t, samples, seed, TieSemantics::geq, threads), differential(t));
}

// ---------------------------------------------------------------------------
// Full test

struct PerWordAssociation {
  std::string word;
  std::string token;
  std::string set;
  double association = 0.0;
};

struct WeatResult {
  std::string test_id;
  double statistic = 0.0;
  std::optional<double> effect_size;  // nullopt: degenerate (zero deviation)
  double p_value = 1.0;
  std::optional<double> p_stderr;
  std::optional<double> p_raw;         // k / m for Monte Carlo
  std::optional<double> p_normal;      // normal-tail annotation
  std::optional<double> null_mean, null_sd;
  PMethod p_method = PMethod::exact;   // method actually used
  PMethod p_method_requested = PMethod::automatic;
  std::uint64_t samples = 0;           // Monte Carlo draws (0 for exact)
  std::uint64_t partitions = 0;        // C(2n, n)
  std::uint64_t seed = 0;
  TieSemantics tie = TieSemantics::geq;
  SdConvention sd = SdConvention::population;
  std::vector<PerWordAssociation> per_word;
  ResolvedSpec resolution;
};

template <class T>
TargetAssociations target_associations(const BasicEmbeddingStore<T>& store, const ResolvedSpec& r) {
  auto vx = detail::vectors_for(store, r.X);
  auto vy = detail::vectors_for(store, r.Y);
  auto va = detail::vectors_for(store, r.A);
  auto vb = detail::vectors_for(store, r.B);
  return target_associations<T>(vx, vy, va, vb);
}

// Runs the test on an already-resolved spec.
template <class T>
WeatResult run_weat(const ResolvedSpec& resolved, const BasicEmbeddingStore<T>& store, const WeatConfig& config) {
  config.validate();
  WeatResult r;
  r.test_id = resolved.test_id;
  r.seed = config.seed;
  r.tie = config.tie;
  r.sd = config.sd;
  r.p_method_requested = config.p_method;
  r.resolution = resolved;

  const TargetAssociations t = target_associations(store, resolved);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const bool in_x = i < t.n_x;
    const ResolvedWord& w = in_x ? resolved.X.words[i] : resolved.Y.words[i - t.n_x];
    r.per_word.push_back({w.word, w.token, in_x ? resolved.X.label : resolved.Y.label, t.values[i]});
  }
  r.statistic = differential(t);
  r.effect_size = effect_size(t, config.sd);
  r.partitions = partition_count(t.n_x);

  PMethod method = config.p_method;
  if (method == PMethod::automatic) {
    method = r.partitions <= config.exact_threshold ? PMethod::exact : PMethod::montecarlo;
  }
  r.p_method = method;

  if (method == PMethod::exact) {
    r.p_value = p_exact(t, config.tie, config.exact_threshold).p;
    return r;
  }

  const NullTally tally = sample_null(t, config.samples, config.seed, config.tie, config.threads);
  r.samples = tally.samples;
  const auto normal = p_normal_from(tally, r.statistic);
  if (normal) {
    r.p_normal = normal->p;
    r.null_mean = normal->null_mean;
    r.null_sd = normal->null_sd;
  }
  if (method == PMethod::montecarlo) {
    const auto mc = p_montecarlo_from(tally);
    r.p_value = mc.p;
    r.p_stderr = mc.std_error;
    r.p_raw = mc.raw;
  } else {
    if (!normal) throw DegenerateError("sampled null distribution has zero variance");
    r.p_value = normal->p;
  }
  return r;
}

template <class T>
WeatResult run_weat(const WeatSpec& spec, const BasicEmbeddingStore<T>& store, const WeatConfig& config = {}) {
  config.validate();
  const ResolvedSpec resolved = resolve(spec, store, ResolvePolicy{config.fallback_chain, config.seed});
  return run_weat(resolved, store, config);
}

}  // namespace embias
