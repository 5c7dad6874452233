#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "support.hpp"

using namespace embias;
using namespace embias::testing;

namespace {

double pearson_of(const std::vector<FigurePoint>& pts) {
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    xs.push_back(p.y);
    ys.push_back(p.x);
  }
  return regression_suite(xs, ys).pearson_rho;
}

}  // namespace

TEST(Csv, QuotedFieldsAndMultiline) {
  std::istringstream in("a,\"b, c\",\"d \"\"q\"\"\"\n\"multi\nline\",2,3\n");
  std::size_t line = 0;
  auto r1 = csv::read_record(in, line);
  ASSERT_TRUE(r1);
  EXPECT_EQ(*r1, (std::vector<std::string>{"a", "b, c", "d \"q\""}));
  auto r2 = csv::read_record(in, line);
  ASSERT_TRUE(r2);
  EXPECT_EQ((*r2)[0], "multi\nline");
  EXPECT_FALSE(csv::read_record(in, line));
}

TEST(Occupations, LoadsAndDropsMissing) {
  std::istringstream in(
      "occupation,pct_women,workers\n"
      "registered nurse,90.0,2900\n"
      "\"chemical engineer\",n/a,100\n"
      "carpenter,1.5,\n"
      "Chief Executive,27.9,1200\n");
  auto t = load_occupations_csv(in);
  ASSERT_EQ(t.records.size(), 3u);
  EXPECT_EQ(t.records[0].raw_name, "registered nurse");
  EXPECT_EQ(t.records[0].pct_women, 90.0);
  EXPECT_EQ(t.records[0].workers, 2900u);
  EXPECT_FALSE(t.records[1].workers);
  EXPECT_EQ(t.dropped_missing, 1u);
}

TEST(Occupations, OutOfRangeIsHardError) {
  std::istringstream in("occupation,pct_women\nnurse,104\n");
  EXPECT_THROW(load_occupations_csv(in), ParseError);
}

TEST(Occupations, MissingColumnIsHardError) {
  std::istringstream in("job,pct_women\nnurse,90\n");
  try {
    load_occupations_csv(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("occupation"), std::string::npos);
  }
}

TEST(Occupations, HeaderIsCaseInsensitiveAndBomTolerant) {
  std::istringstream in("\xEF\xBB\xBFOccupation,PCT_WOMEN\nnurse,90\n");
  EXPECT_EQ(load_occupations_csv(in).records.size(), 1u);
}

TEST(ReduceOccupation, PolicyExamples) {
  auto m = builtin_occupation_mapping();
  EXPECT_EQ(reduce_occupation("chemical engineer", m), "engineer");
  EXPECT_EQ(reduce_occupation("nurse", m), "nurse");
  EXPECT_EQ(reduce_occupation("chief executive", m), std::nullopt);
  EXPECT_EQ(reduce_occupation("  Registered   Nurse ", m), "nurse");
  m.exact["chief executive"] = "executive";
  EXPECT_EQ(reduce_occupation("Chief Executive", m), "executive");
}

TEST(ReduceOccupation, IdempotentOnMappedTokens) {
  auto m = builtin_occupation_mapping();
  for (const auto& head : m.heads) {
    auto once = reduce_occupation(head, m);
    ASSERT_TRUE(once);
    EXPECT_EQ(reduce_occupation(*once, m), once);
  }
}

TEST(OccupationMapping, ShippedFileMatchesBuiltin) {
  auto file = load_occupation_mapping(source_path("data/occupation_mapping.json"));
  auto builtin = builtin_occupation_mapping();
  EXPECT_EQ(file.heads, builtin.heads);
  EXPECT_EQ(file.heads.size(), 50u);
  auto occ = builtin_wefat("occupations");
  for (const auto& w : occ.targets.words) EXPECT_TRUE(file.heads.contains(w)) << w;
  auto round = occupation_mapping_from_json(to_json(file));
  EXPECT_EQ(round.heads, file.heads);
  EXPECT_THROW(occupation_mapping_from_json(nlohmann::json::array()), ParseError);
}

TEST(AggregateOccupations, WeightedWhenAllRowsHaveWorkers) {
  std::vector<OccupationRecord> recs{
      {"chemical engineer", 20.0, 100}, {"civil engineer", 10.0, 300}, {"nurse", 90.0, 50},
      {"registered nurse", 80.0, std::nullopt}, {"chief executive", 27.0, 10}};
  auto out = aggregate_occupations(recs, builtin_occupation_mapping());
  ASSERT_EQ(out.properties.size(), 2u);
  EXPECT_EQ(out.properties[0].word, "engineer");
  EXPECT_DOUBLE_EQ(out.properties[0].property, (20.0 * 100 + 10.0 * 300) / 400.0);
  EXPECT_EQ(out.properties[1].word, "nurse");
  EXPECT_DOUBLE_EQ(out.properties[1].property, 85.0);  // plain mean, one row lacks workers
  EXPECT_EQ(out.unmappable, std::vector<std::string>{"chief executive"});
}

// ---------------------------------------------------------------------------
// Census names

TEST(CensusNames, LoadAndValidate) {
  std::istringstream in("name,pct_women,popularity\nKelly,80.5,1000\nJordan,30,800\n");
  auto recs = load_census_names_csv(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[1].popularity, 800u);
  std::istringstream bad("name,pct_women,popularity\nKelly,101,10\n");
  EXPECT_THROW(load_census_names_csv(bad), ParseError);
  std::istringstream missing("name,pct_women\nKelly,50\n");
  EXPECT_THROW(load_census_names_csv(missing), ParseError);
}

TEST(SelectAndrogynous, SingleWindow) {
  std::vector<NameRecord> recs{{"A", 5, 3}, {"B", 5, 9}, {"C", 5, 1}};
  auto sel = select_androgynous(recs, 10, 5);
  ASSERT_EQ(sel.names.size(), 3u);
  EXPECT_EQ(sel.names[0].name, "B");
  EXPECT_EQ(sel.empty_windows.size(), 9u);
  EXPECT_EQ(sel.empty_windows.front(), 1u);
}

TEST(SelectAndrogynous, TieRule) {
  std::vector<NameRecord> recs{{"Zed", 45, 7}, {"Max", 41, 9}, {"Abe", 49, 7}};
  auto sel = select_androgynous(recs, 10, 2);
  ASSERT_EQ(sel.names.size(), 2u);
  EXPECT_EQ(sel.names[0].name, "Max");
  EXPECT_EQ(sel.names[1].name, "Abe");
}

TEST(SelectAndrogynous, WindowEdges) {
  std::vector<NameRecord> recs{{"lo", 0, 1}, {"edge", 10, 1}, {"top", 100, 1}, {"ninety", 90, 1}};
  auto sel = select_androgynous(recs, 10, 5);
  // [0,10) holds lo; [10,20) holds edge; [90,100] holds ninety and top.
  std::vector<std::string> order;
  for (const auto& r : sel.names) order.push_back(r.name);
  EXPECT_EQ(order, (std::vector<std::string>{"lo", "edge", "ninety", "top"}));
  EXPECT_THROW(select_androgynous(recs, 0, 5), UsageError);
}

TEST(SelectAndrogynous, SizeBoundAndDeterminism) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pct(0, 100);
  std::uniform_int_distribution<int> pop(0, 50);
  std::vector<NameRecord> recs;
  for (int i = 0; i < 300; ++i) recs.push_back({"n" + std::to_string(i), pct(rng), static_cast<std::uint64_t>(pop(rng))});
  auto a = select_androgynous(recs, 10, 5);
  EXPECT_LE(a.names.size(), 50u);
  auto shuffled = recs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto b = select_androgynous(shuffled, 10, 5);
  ASSERT_EQ(a.names.size(), b.names.size());
  for (std::size_t i = 0; i < a.names.size(); ++i) EXPECT_EQ(a.names[i].name, b.names[i].name);
}

TEST(PropertiesCsv, Generic) {
  std::istringstream in("word,property\nnurse,90\ncarpenter,1.5\n");
  auto p = load_properties_csv(in);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1].property, 1.5);
  std::istringstream bad("word,property\nnurse,lots\n");
  EXPECT_THROW(load_properties_csv(bad), ParseError);
}

// ---------------------------------------------------------------------------
// Figure data

TEST(FigureData, FiftyPointsAndTranscribedValues) {
  auto fig1 = builtin_figure_data("fig1_occupations");
  auto fig2 = builtin_figure_data("fig2_names");
  EXPECT_EQ(fig1.size(), 50u);
  EXPECT_EQ(fig2.size(), 50u);
  auto contains = [](const std::vector<FigurePoint>& v, double x, double y) {
    return std::any_of(v.begin(), v.end(), [&](const FigurePoint& p) { return p.x == x && p.y == y; });
  };
  EXPECT_TRUE(contains(fig1, 98.6000001430511, 0.201198396292573));
  EXPECT_TRUE(contains(fig2, 97.4522292613983, 1.05393881410809));
  for (const auto& p : fig1) {
    EXPECT_GE(p.x, 0.0);
    EXPECT_LE(p.x, 100.0);
  }
  EXPECT_THROW(builtin_figure_data("fig3"), UsageError);
}

TEST(FigureData, RegressionMatchesReferenceValues) {
  // Property (x) regressed on association (y); reference values computed once
  // with scipy.stats (pearsonr, spearmanr, linregress).
  auto check = [](const std::vector<FigurePoint>& pts, double rho, double p, double spearman, double slope,
                  double intercept) {
    std::vector<double> xs, ys;
    for (const auto& q : pts) {
      xs.push_back(q.y);
      ys.push_back(q.x);
    }
    auto r = regression_suite(xs, ys);
    EXPECT_NEAR(r.pearson_rho, rho, 1e-12);
    EXPECT_NEAR(r.pearson_p / p, 1.0, 1e-6);
    EXPECT_NEAR(r.spearman_rho, spearman, 1e-12);
    EXPECT_NEAR(r.slope, slope, 1e-9);
    EXPECT_NEAR(r.intercept, intercept, 1e-9);
  };
  check(builtin_figure_data("fig1_occupations"), 0.9028895260058374, 3.175313326274569e-19, 0.9007827924179062,
        26.595404344693097, 51.14899021596418);
  check(builtin_figure_data("fig2_names"), 0.839196269167879, 2.7151738503083568e-14, 0.8386275783348411,
        30.09844996784237, 50.269164866416304);

  EXPECT_NEAR(pearson_of(builtin_figure_data("fig1_occupations")), 0.90, 0.005);
  EXPECT_NEAR(pearson_of(builtin_figure_data("fig2_names")), 0.84, 0.005);
  EXPECT_LT(regression_suite(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}).pearson_p, 1.0);
}

TEST(FigureData, PValueBounds) {
  std::vector<double> xs, ys;
  for (const auto& q : builtin_figure_data("fig1_occupations")) {
    xs.push_back(q.y);
    ys.push_back(q.x);
  }
  EXPECT_LT(regression_suite(xs, ys).pearson_p, 1e-18);
  xs.clear();
  ys.clear();
  for (const auto& q : builtin_figure_data("fig2_names")) {
    xs.push_back(q.y);
    ys.push_back(q.x);
  }
  EXPECT_LT(regression_suite(xs, ys).pearson_p, 1e-13);
}
