#include <gtest/gtest.h>

#include "support.hpp"

using namespace embias;
using namespace embias::testing;

namespace {

using Strings = std::vector<std::string>;

std::span<const std::string> sp(const Strings& s) { return std::span<const std::string>(s); }

// Targets t0..t{n-1} placed so that their score against A = {a}, B = {b}
// increases with the index; property i*10 + noise.
struct WefatWorld {
  std::vector<std::pair<std::string, Vec>> entries;
  WordSet targets{"targets", {}, {}};
  WordSet A{"A", {"a0", "a1"}, {}};
  WordSet B{"B", {"b0", "b1"}, {}};
  std::vector<PropertyRecord> properties;
};

WefatWorld world(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  WefatWorld w;
  w.entries = {{"a0", {1, 0, 0.1}}, {"a1", {1, 0.1, 0}}, {"b0", {0, 1, 0.1}}, {"b1", {0.1, 1, 0}}};
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 1.5 * static_cast<double>(i) / static_cast<double>(n);
    const std::string tok = "t" + std::to_string(i);
    w.entries.emplace_back(tok, Vec{std::sin(angle) + noise(rng), std::cos(angle) + noise(rng), 0.3 + noise(rng)});
    w.targets.words.push_back(tok);
    w.properties.push_back({tok, 10.0 * static_cast<double>(i) / static_cast<double>(n) * 10.0});
  }
  return w;
}

}  // namespace

TEST(WefatScore, HandValue) {
  auto store = make_store({{"w", {1, 0}}, {"a", {1, 0}}, {"b", {0, 1}}});
  Strings A{"a"}, B{"b"};
  EXPECT_EQ(*wefat_score(store, "w", sp(A), sp(B)), 2.0);
}

TEST(WefatScore, AntisymmetricExactly) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = random_fixture(rng, 1, 3, 4);
    auto store = make_store(f.entries);
    auto ab = wefat_score(store, "x0", sp(f.spec.A.words), sp(f.spec.B.words));
    auto ba = wefat_score(store, "x0", sp(f.spec.B.words), sp(f.spec.A.words));
    ASSERT_TRUE(ab && ba);
    EXPECT_EQ(*ab, -*ba);
  }
}

TEST(WefatScore, DegenerateWhenCosinesEqual) {
  // w is equidistant from a and b, so both cosines are equal.
  auto store = make_store({{"w", {1, 1}}, {"a", {1, 0}}, {"b", {0, 1}}});
  Strings A{"a"}, B{"b"};
  EXPECT_FALSE(wefat_score(store, "w", sp(A), sp(B)).has_value());
}

// ---------------------------------------------------------------------------
// Name-likeness filter

TEST(NameFilter, ZeroFractionKeepsAll) {
  auto w = world(8);
  auto store = make_store(w.entries);
  auto r = name_likeness_filter(store, sp(w.targets.words), 0.0);
  EXPECT_EQ(r.kept.size(), 8u);
  EXPECT_TRUE(r.dropped.empty());
}

TEST(NameFilter, OrthogonalOutlierDropped) {
  auto store = make_store({{"n1", {1, 0}}, {"n2", {1, 0}}, {"n3", {1, 0}}, {"n4", {1, 0}}, {"odd", {0, 1}}});
  Strings names{"n1", "n2", "odd", "n3", "n4"};
  auto r = name_likeness_filter(store, sp(names), 0.2);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].token, "odd");
  EXPECT_EQ(r.kept.size(), 4u);
}

TEST(NameFilter, FiftyNamesDropTen) {
  auto w = world(50);
  auto store = make_store(w.entries);
  auto r = name_likeness_filter(store, sp(w.targets.words), 0.2);
  EXPECT_EQ(r.kept.size(), 40u);
  EXPECT_EQ(r.dropped.size(), 10u);
  for (std::size_t i = 1; i < r.dropped.size(); ++i) EXPECT_GE(r.dropped[i - 1].distance, r.dropped[i].distance);
  EXPECT_GE(r.dropped.back().distance, r.kept.back().distance);
}

TEST(NameFilter, TiesBrokenByToken) {
  auto store = make_store({{"c", {1, 0}}, {"d", {1, 0}}, {"e", {1, 0}}, {"a", {0, 1}}, {"b", {0, 1}}});
  Strings names{"e", "d", "c", "b", "a"};
  auto r = name_likeness_filter(store, sp(names), 0.2);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].token, "a");
}

TEST(NameFilter, OrderIndependent) {
  auto w = world(20, 4);
  auto store = make_store(w.entries);
  Strings shuffled = w.targets.words;
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto a = name_likeness_filter(store, sp(w.targets.words), 0.3);
    auto b = name_likeness_filter(store, sp(shuffled), 0.3);
    ASSERT_EQ(a.dropped.size(), b.dropped.size());
    for (std::size_t i = 0; i < a.dropped.size(); ++i) {
      EXPECT_EQ(a.dropped[i].token, b.dropped[i].token);
      EXPECT_EQ(a.dropped[i].distance, b.dropped[i].distance);
    }
  }
}

TEST(NameFilter, EuclideanMetric) {
  auto store = make_store({{"n1", {1, 0}}, {"n2", {1, 0}}, {"n3", {1, 0}}, {"n4", {1, 0}}, {"far", {9, 0}}});
  Strings names{"n1", "n2", "n3", "n4", "far"};
  // Cosine sees no outlier (all parallel); Euclidean does.
  auto e = name_likeness_filter(store, sp(names), 0.2, DistanceMetric::euclidean);
  EXPECT_EQ(e.dropped.at(0).token, "far");
}

TEST(NameFilter, Errors) {
  auto w = world(8);
  auto store = make_store(w.entries);
  EXPECT_THROW(name_likeness_filter(store, sp(w.targets.words), 0.95), UsageError);
  EXPECT_THROW(name_likeness_filter(store, sp(w.targets.words), -0.1), UsageError);
  Strings four{"t0", "t1", "t2", "t3"};
  EXPECT_THROW(name_likeness_filter(store, sp(four), 0.2), UsageError);
  Strings missing{"t0", "t1", "t2", "t3", "zz"};
  EXPECT_THROW(name_likeness_filter(store, sp(missing), 0.2), ResolutionError);
}

// ---------------------------------------------------------------------------
// Regression

TEST(Regression, ExactLine) {
  Vec xs{1, 2, 3, 4, 5}, ys;
  for (double x : xs) ys.push_back(2 * x + 1);
  auto r = regression_suite(xs, ys);
  EXPECT_DOUBLE_EQ(r.pearson_rho, 1.0);
  EXPECT_DOUBLE_EQ(r.spearman_rho, 1.0);
  EXPECT_DOUBLE_EQ(r.slope, 2.0);
  EXPECT_DOUBLE_EQ(r.intercept, 1.0);
  EXPECT_EQ(r.pearson_p, 0.0);
}

TEST(Regression, ThreePointHandValues) {
  auto r = regression_suite(Vec{1, 2, 3}, Vec{6, 4, 5});
  EXPECT_NEAR(r.pearson_rho, -0.5, 1e-15);
  EXPECT_NEAR(r.spearman_rho, -0.5, 1e-15);
  EXPECT_NEAR(r.slope, -0.5, 1e-15);
  EXPECT_NEAR(r.intercept, 6.0, 1e-15);
}

TEST(Regression, PValueMatchesFrozenReference) {
  // Two-sided Pearson p-values computed once with scipy.stats.pearsonr.
  EXPECT_NEAR(regression_suite(Vec{1, 2, 3, 4, 5}, Vec{2, 1, 4, 3, 5}).pearson_p, 0.10408803866182799, 1e-12);
  EXPECT_NEAR(regression_suite(Vec{1, 2, 3, 4, 5, 6, 7}, Vec{2, 1, 4, 3, 7, 5, 6}).pearson_p, 0.023448808345691522,
              1e-12);
}

TEST(Regression, SpearmanAveragesTies) {
  // scipy.stats.spearmanr([1,2,2,3,4],[5,6,7,7,9])
  auto r = regression_suite(Vec{1, 2, 2, 3, 4}, Vec{5, 6, 7, 7, 9});
  EXPECT_NEAR(r.spearman_rho, 0.9210526315789475, 1e-12);
  EXPECT_EQ(average_ranks(Vec{10, 20, 20, 30}), (Vec{1, 2.5, 2.5, 4}));
}

TEST(Regression, Errors) {
  EXPECT_THROW(regression_suite(Vec{1, 2}, Vec{1, 2}), UsageError);
  EXPECT_THROW(regression_suite(Vec{1, 2, 3}, Vec{1, 2}), UsageError);
  EXPECT_THROW(regression_suite(Vec{1, 1, 1}, Vec{1, 2, 3}), DegenerateError);
  EXPECT_THROW(regression_suite(Vec{1, 2, 3}, Vec{4, 4, 4}), DegenerateError);
}

// ---------------------------------------------------------------------------
// Full run

TEST(RunWefat, RecoversPlantedCorrelation) {
  auto w = world(30);
  auto store = make_store(w.entries);
  auto r = run_wefat(w.targets, std::span<const PropertyRecord>(w.properties), w.A, w.B, store);
  EXPECT_EQ(r.points.size(), 30u);
  // the score is monotone but not linear in the planted angle
  EXPECT_GT(r.regression.pearson_rho, 0.85);
  EXPECT_GT(r.regression.spearman_rho, 0.9);
  EXPECT_LT(r.regression.pearson_p, 1e-6);
  for (std::size_t i = 1; i < r.points.size(); ++i) EXPECT_LE(r.points[i - 1].property, r.points[i].property);
  EXPECT_EQ(r.n_a, 2u);
}

TEST(RunWefat, MissesAndUnmatchedPropertiesDropped) {
  auto w = world(10);
  w.targets.words.push_back("ghost");
  w.properties.erase(w.properties.begin() + 3);  // t3 has no property
  auto store = make_store(w.entries);
  auto r = run_wefat(w.targets, std::span<const PropertyRecord>(w.properties), w.A, w.B, store);
  EXPECT_EQ(r.points.size(), 9u);
  ASSERT_EQ(r.dropped.size(), 2u);
  EXPECT_EQ(r.dropped[0].word, "ghost");
  EXPECT_EQ(r.dropped[1].word, "t3");
  EXPECT_EQ(r.missing.size(), 1u);
}

TEST(RunWefat, PropertyJoinFallsBackToCaseInsensitive) {
  auto w = world(6);
  for (auto& p : w.properties) p.word[0] = 'T';
  auto store = make_store(w.entries);
  auto r = run_wefat(w.targets, std::span<const PropertyRecord>(w.properties), w.A, w.B, store);
  EXPECT_EQ(r.points.size(), 6u);
}

TEST(RunWefat, NameFilterRunsBeforeJoin) {
  auto w = world(20);
  auto store = make_store(w.entries);
  WefatOptions opts;
  opts.name_filter = true;
  auto r = run_wefat(w.targets, std::span<const PropertyRecord>(w.properties), w.A, w.B, store, opts);
  EXPECT_EQ(r.filtered.size(), 4u);
  EXPECT_EQ(r.points.size(), 16u);
  EXPECT_EQ(r.dropped.size(), 4u);
}

TEST(RunWefat, ConstantPropertiesAreDegenerate) {
  auto w = world(8);
  for (auto& p : w.properties) p.property = 42.0;
  auto store = make_store(w.entries);
  EXPECT_THROW(run_wefat(w.targets, std::span<const PropertyRecord>(w.properties), w.A, w.B, store),
               DegenerateError);
}

TEST(RunWefat, TooFewPoints) {
  auto w = world(8);
  w.properties.resize(2);
  auto store = make_store(w.entries);
  EXPECT_THROW(run_wefat(w.targets, std::span<const PropertyRecord>(w.properties), w.A, w.B, store),
               ResolutionError);
}

// ---------------------------------------------------------------------------
// Cross-embedding comparison

TEST(CompareEmbeddings, IdentityAndScaling) {
  auto w = world(25);
  auto store = make_store<double>(w.entries);
  auto same = compare_embeddings(sp(w.targets.words), w.A, w.B, store, store);
  EXPECT_EQ(same.pearson_rho, 1.0);
  EXPECT_EQ(same.spearman_rho, 1.0);
  EXPECT_EQ(same.n, 25u);

  auto scaled_entries = w.entries;
  for (auto& [tok, v] : scaled_entries) {
    for (double& c : v) c *= 3.0;
  }
  auto scaled = make_store<double>(scaled_entries);
  auto r = compare_embeddings(sp(w.targets.words), w.A, w.B, store, scaled);
  EXPECT_NEAR(r.pearson_rho, 1.0, 1e-9);
  EXPECT_NEAR(r.spearman_rho, 1.0, 1e-9);
}

TEST(CompareEmbeddings, PairwiseDropsAndMinimum) {
  auto w = world(6);
  auto store1 = make_store(w.entries);
  auto partial = w.entries;
  partial.erase(partial.end() - 2, partial.end());  // t4, t5 absent from store2
  auto store2 = make_store(partial);
  auto r = compare_embeddings(sp(w.targets.words), w.A, w.B, store1, store2);
  EXPECT_EQ(r.n, 4u);
  EXPECT_EQ(r.dropped.size(), 2u);
  auto tiny = w.entries;
  tiny.erase(tiny.end() - 4, tiny.end());
  EXPECT_THROW(compare_embeddings(sp(w.targets.words), w.A, w.B, store1, make_store(tiny)), ResolutionError);
}
