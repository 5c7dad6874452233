#pragma once

// Word Embedding Factual Association Test: normalized per-word association
// scores, name-likeness filtering, and regression of real-world properties
// on the scores.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "embias/embedding_store.hpp"
#include "embias/error.hpp"
#include "embias/stimuli.hpp"
#include "embias/weat.hpp"

namespace embias {

// (mean_a cos(w,a) - mean_b cos(w,b)) / sd_{x in A u B} cos(w,x).
// Nullopt when the attribute cosines have zero deviation.
template <class T>
std::optional<double> wefat_score(const BasicWordVector<T>& w, std::span<const BasicWordVector<T>> A,
                                  std::span<const BasicWordVector<T>> B,
                                  SdConvention sd = SdConvention::population) {
  if (A.empty() || B.empty() || A.size() + B.size() < 2) {
    throw UsageError("wefat score needs non-empty attribute sets");
  }
  std::vector<double> ca, cb;
  ca.reserve(A.size());
  cb.reserve(B.size());
  for (const auto& a : A) ca.push_back(cosine(w, a));
  for (const auto& b : B) cb.push_back(cosine(w, b));
  auto dev = detail::pooled_sd(ca, cb, sd);
  if (!dev) return std::nullopt;
  return (detail::mean_of(ca) - detail::mean_of(cb)) / *dev;
}

template <class T>
std::optional<double> wefat_score(const BasicEmbeddingStore<T>& store, std::string_view w,
                                  std::span<const std::string> A, std::span<const std::string> B) {
  std::vector<std::string> misses;
  auto va = detail::vectors_for(store, A, misses);
  auto vb = detail::vectors_for(store, B, misses);
  auto vw = store.find(w);
  if (!vw) misses.emplace_back(w);
  detail::throw_if_missing(misses);
  return wefat_score<T>(*vw, va, vb);
}

// ---------------------------------------------------------------------------
// Name-likeness filter

enum class DistanceMetric { cosine, euclidean };

struct NameDistance {
  std::string token;
  double distance = 0.0;
};

struct NameFilterResult {
  std::vector<NameDistance> kept;     // ascending distance
  std::vector<NameDistance> dropped;  // descending distance
};

// Drops the ceil(drop_fraction * n) names farthest from the centroid of all
// name vectors. The centroid is accumulated in lexicographic token order and
// ties rank by token, so the outcome does not depend on input order.
template <class T>
NameFilterResult name_likeness_filter(const BasicEmbeddingStore<T>& store, std::span<const std::string> names,
                                      double drop_fraction = 0.2,
                                      DistanceMetric metric = DistanceMetric::cosine) {
  if (!(drop_fraction >= 0.0 && drop_fraction <= 0.9)) {
    throw UsageError("drop fraction must lie in [0, 0.9]");
  }
  if (names.size() < 5) throw UsageError("name-likeness filtering needs at least 5 names");
  std::vector<std::string> sorted(names.begin(), names.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<std::string> misses;
  auto vectors = detail::vectors_for(store, std::span<const std::string>(sorted), misses);
  detail::throw_if_missing(misses);
  const std::vector<double> center = centroid(std::span<const BasicWordVector<T>>(vectors));

  std::vector<NameDistance> ranked;
  ranked.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    double d = 0.0;
    if (metric == DistanceMetric::cosine) {
      d = 1.0 - cosine(vectors[i].components, std::span<const double>(center));
    } else {
      for (std::size_t j = 0; j < center.size(); ++j) {
        const double diff = static_cast<double>(vectors[i].components[j]) - center[j];
        d += diff * diff;
      }
      d = std::sqrt(d);
    }
    ranked.push_back({sorted[i], d});
  }
  std::sort(ranked.begin(), ranked.end(), [](const NameDistance& a, const NameDistance& b) {
    if (a.distance != b.distance) return a.distance > b.distance;
    return a.token < b.token;
  });
  // 1e-9 guards against products like 0.2 * 50 landing just above an integer.
  const auto drop = static_cast<std::size_t>(
      std::ceil(drop_fraction * static_cast<double>(ranked.size()) - 1e-9));
  NameFilterResult r;
  r.dropped.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(drop));
  r.kept.assign(ranked.rbegin(), ranked.rend() - static_cast<std::ptrdiff_t>(drop));
  return r;
}

// ---------------------------------------------------------------------------
// Regression

struct RegressionSummary {
  std::size_t n = 0;
  double pearson_rho = 0.0;
  double pearson_p = 1.0;  // two-sided, t distribution with n-2 dof
  double spearman_rho = 0.0;
  double slope = 0.0;  // ordinary least squares, ys on xs
  double intercept = 0.0;
};

namespace detail {

inline std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
  const double mx = mean_of(xs), my = mean_of(ys);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

// Ranks starting at 1; tied values share the mean of their ranks.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson_p_value(double rho, std::size_t n) {
  if (n < 3) throw UsageError("pearson p-value needs n >= 3");
  if (std::abs(rho) >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = std::abs(rho) * std::sqrt(dof / (1.0 - rho * rho));
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

inline RegressionSummary regression_suite(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw UsageError("regression needs equal-length inputs");
  if (xs.size() < 3) throw UsageError("regression needs at least 3 points");
  RegressionSummary r;
  r.n = xs.size();
  auto rho = detail::pearson(xs, ys);
  if (!rho) throw DegenerateError("regression inputs have zero variance");
  r.pearson_rho = *rho;
  r.pearson_p = pearson_p_value(r.pearson_rho, r.n);
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  r.spearman_rho = detail::pearson(rx, ry).value_or(0.0);

  const double mx = detail::mean_of(xs), my = detail::mean_of(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  return r;
}

inline RegressionSummary regression_suite(const std::vector<double>& xs, const std::vector<double>& ys) {
  return regression_suite(std::span<const double>(xs), std::span<const double>(ys));
}

// ---------------------------------------------------------------------------
// Full test

struct PropertyRecord {
  std::string word;
  double property = 0.0;
};

struct WefatPoint {
  std::string word;
  std::string token;
  double score = 0.0;
  double property = 0.0;
};

struct DroppedWord {
  std::string word;
  std::string reason;
};

struct WefatOptions {
  bool name_filter = false;
  double drop_fraction = 0.2;
  DistanceMetric filter_metric = DistanceMetric::cosine;
  FallbackChain fallback_chain{Fallback::exact};
  SdConvention sd = SdConvention::population;
};

struct WefatResult {
  std::string test_id;
  std::vector<WefatPoint> points;  // ordered by property, then word
  RegressionSummary regression;    // property regressed on score
  std::vector<DroppedWord> dropped;
  std::vector<NameDistance> filtered;  // names removed by the name-likeness filter
  std::vector<MissingWord> missing;
  std::vector<Substitution> substitutions;
  std::size_t n_a = 0, n_b = 0;
  WefatOptions options;
};

// Targets missing from the store or lacking a property are dropped and
// recorded. With name_filter on, the filter runs over every resolved target
// before the join with properties.
template <class T>
WefatResult run_wefat(const WordSet& targets, std::span<const PropertyRecord> properties, const WordSet& A,
                      const WordSet& B, const BasicEmbeddingStore<T>& store, const WefatOptions& options = {},
                      std::string test_id = "custom") {
  validate(targets);
  WefatResult r;
  r.test_id = std::move(test_id);
  r.options = options;

  const ResolvedSet ra = resolve_word_set(A, store, options.fallback_chain, r.missing, r.substitutions, 1);
  const ResolvedSet rb = resolve_word_set(B, store, options.fallback_chain, r.missing, r.substitutions, 1);
  r.n_a = ra.size();
  r.n_b = rb.size();
  const std::size_t missing_before = r.missing.size();
  ResolvedSet rt = detail::resolve_set(targets, store, options.fallback_chain, r.missing, r.substitutions);
  for (std::size_t i = missing_before; i < r.missing.size(); ++i) {
    r.dropped.push_back({r.missing[i].word, "not in embedding"});
  }

  if (options.name_filter) {
    std::vector<std::string> tokens;
    for (const auto& w : rt.words) tokens.push_back(w.token);
    auto filtered = name_likeness_filter(store, std::span<const std::string>(tokens), options.drop_fraction,
                                         options.filter_metric);
    r.filtered = filtered.dropped;
    std::vector<ResolvedWord> kept;
    for (const auto& w : rt.words) {
      const bool gone = std::any_of(filtered.dropped.begin(), filtered.dropped.end(),
                                    [&](const NameDistance& d) { return d.token == w.token; });
      if (gone) {
        r.dropped.push_back({w.word, "name-likeness filter"});
      } else {
        kept.push_back(w);
      }
    }
    rt.words = std::move(kept);
  }

  const auto va = detail::vectors_for(store, ra);
  const auto vb = detail::vectors_for(store, rb);
  for (const auto& w : rt.words) {
    auto prop = std::find_if(properties.begin(), properties.end(), [&](const PropertyRecord& p) {
      return p.word == w.word || p.word == w.token;
    });
    if (prop == properties.end()) {
      const std::string folded = detail::ascii_lower(w.word);
      prop = std::find_if(properties.begin(), properties.end(),
                          [&](const PropertyRecord& p) { return detail::ascii_lower(p.word) == folded; });
    }
    if (prop == properties.end()) {
      r.dropped.push_back({w.word, "no property value"});
      continue;
    }
    auto score = wefat_score<T>(store.at(w.index), va, vb, options.sd);
    if (!score) {
      r.dropped.push_back({w.word, "degenerate attribute cosines"});
      continue;
    }
    r.points.push_back({w.word, w.token, *score, prop->property});
  }
  if (r.points.size() < 3) {
    throw ResolutionError("only " + std::to_string(r.points.size()) +
                          " usable point(s) for regression; at least 3 required");
  }
  std::sort(r.points.begin(), r.points.end(), [](const WefatPoint& a, const WefatPoint& b) {
    if (a.property != b.property) return a.property < b.property;
    return a.word < b.word;
  });
  std::vector<double> xs, ys;
  for (const auto& p : r.points) {
    xs.push_back(p.score);
    ys.push_back(p.property);
  }
  r.regression = regression_suite(xs, ys);
  return r;
}

// ---------------------------------------------------------------------------
// Cross-embedding agreement

struct EmbeddingComparison {
  std::size_t n = 0;
  double pearson_rho = 0.0;
  double spearman_rho = 0.0;
  std::vector<std::string> words;
  std::vector<double> scores1, scores2;
  std::vector<DroppedWord> dropped;
};

template <class T1, class T2>
EmbeddingComparison compare_embeddings(std::span<const std::string> words, const WordSet& A, const WordSet& B,
                                       const BasicEmbeddingStore<T1>& store1,
                                       const BasicEmbeddingStore<T2>& store2,
                                       const FallbackChain& chain = {Fallback::exact}) {
  std::vector<MissingWord> missing;
  std::vector<Substitution> subs;
  const auto a1 = detail::vectors_for(store1, resolve_word_set(A, store1, chain, missing, subs, 1));
  const auto b1 = detail::vectors_for(store1, resolve_word_set(B, store1, chain, missing, subs, 1));
  const auto a2 = detail::vectors_for(store2, resolve_word_set(A, store2, chain, missing, subs, 1));
  const auto b2 = detail::vectors_for(store2, resolve_word_set(B, store2, chain, missing, subs, 1));

  EmbeddingComparison r;
  for (const auto& w : words) {
    auto h1 = lookup(store1, w, chain);
    auto h2 = lookup(store2, w, chain);
    if (!h1 || !h2) {
      r.dropped.push_back({w, !h1 && !h2 ? "missing in both embeddings"
                              : !h1      ? "missing in first embedding"
                                         : "missing in second embedding"});
      continue;
    }
    auto s1 = wefat_score<T1>(store1.at(*h1.index), a1, b1);
    auto s2 = wefat_score<T2>(store2.at(*h2.index), a2, b2);
    if (!s1 || !s2) {
      r.dropped.push_back({w, "degenerate attribute cosines"});
      continue;
    }
    r.words.push_back(w);
    r.scores1.push_back(*s1);
    r.scores2.push_back(*s2);
  }
  r.n = r.words.size();
  if (r.n < 3) {
    throw ResolutionError("only " + std::to_string(r.n) + " word(s) common to both embeddings; need 3");
  }
  auto rho = detail::pearson(r.scores1, r.scores2);
  if (!rho) throw DegenerateError("association scores have zero variance");
  r.pearson_rho = *rho;
  r.spearman_rho = detail::pearson(average_ranks(r.scores1), average_ranks(r.scores2)).value_or(0.0);
  return r;
}

}  // namespace embias
