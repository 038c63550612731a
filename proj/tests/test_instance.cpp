#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "capcov/error.hpp"
#include "capcov/instance.hpp"
#include "test_util.hpp"

namespace {

using namespace capcov;
using capcov::testing::make_coverage;

Instance two_by_two() {
  return make_coverage({{1.0, 0.5}, {0.2, 0.9}}, {{1, 0}, {0, 1}}, {{0, 0}, {0, 1}, {1, 1}},
                       {1, 2}, {1, 1}, {1.0, 1.0}, 2);
}

bool contains_text(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(Validate, WellFormedInstanceIsClean) { EXPECT_TRUE(validate(two_by_two()).empty()); }

TEST(Validate, RateSumMismatchReportedOnce) {
  Instance inst = two_by_two();
  for (auto& w : inst.workers) w.arrival_rate = 0.5;  // sums to T/2
  const auto v = validate(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("arrival rates sum"), std::string::npos);
}

TEST(Validate, DuplicateEdgeReportedOnce) {
  Instance inst = two_by_two();
  inst.edges.push_back({0, 1});
  const auto v = validate(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("duplicate edge (0, 1)"), std::string::npos);
}

TEST(Validate, EachCorruptionReportsExactlyItself) {
  struct Case {
    const char* needle;
    void (*corrupt)(Instance&);
  };
  const Case cases[] = {
      {"task 1 has capacity below 1", [](Instance& x) { x.tasks[1].capacity = 0; }},
      {"worker 0 has capacity below 1", [](Instance& x) { x.workers[0].capacity = 0; }},
      {"feature weight outside", [](Instance& x) { x.tasks[0].feature_weights[1] = 1.5; }},
      {"feature weights, expected", [](Instance& x) { x.tasks[0].feature_weights.push_back(0); }},
      {"features, expected", [](Instance& x) { x.workers[1].features.pop_back(); }},
      {"non-binary", [](Instance& x) { x.workers[1].features[0] = 2; }},
      {"invalid node", [](Instance& x) { x.edges.push_back({5, 0}); }},
      {"non-positive arrival rate",
       [](Instance& x) {
         x.workers[0].arrival_rate = 0.0;
         x.workers[1].arrival_rate = 2.0;
       }},
  };
  for (const Case& c : cases) {
    Instance inst = two_by_two();
    c.corrupt(inst);
    const auto v = validate(inst);
    ASSERT_EQ(v.size(), 1u) << c.needle;
    EXPECT_TRUE(contains_text(v, c.needle)) << v[0];
  }
}

TEST(Utility, CoverageExamples) {
  // w = (1, 0.5); one worker covering feature 0 only.
  Instance inst = make_coverage({{1.0, 0.5}}, {{1, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {2}, {1, 1});
  const int one[] = {0};
  const int both[] = {0, 1};
  EXPECT_DOUBLE_EQ(utility_value(inst, 0, one), 1.0);
  EXPECT_DOUBLE_EQ(utility_value(inst, 0, both), 1.0);
  EXPECT_DOUBLE_EQ(utility_value(inst, 0, {}), 0.0);
  const int dup[] = {0, 0};
  EXPECT_DOUBLE_EQ(utility_value(inst, 0, dup), 1.0);
}

TEST(Utility, SqrtDiversityTwoWorkersSameFeature) {
  Instance inst = make_coverage({{1.0}}, {{1}, {1}}, {{0, 0}, {0, 1}}, {2}, {1, 1});
  inst.tasks[0].utility = UtilityKind::kSqrtDiversity;
  const int both[] = {0, 1};
  EXPECT_DOUBLE_EQ(utility_value(inst, 0, both), std::sqrt(2.0));
}

TEST(Utility, ErrorsOnUnknownWorkerAndOracleMiss) {
  Instance inst = make_coverage({{1.0}}, {{1}, {1}}, {{0, 0}}, {1}, {1, 1});
  const int bad[] = {7};
  EXPECT_THROW(utility_value(inst, 0, bad), Error);

  Instance o = inst;
  o.tasks[0].utility = UtilityKind::kExplicitOracle;
  o.tasks[0].feature_weights.clear();
  o.edges = {{0, 0}, {0, 1}};
  o.tasks[0].oracle = tabulate(2, 1, [](std::uint32_t m) { return 1.0 * std::popcount(m); });
  const int both[] = {0, 1};
  try {
    utility_value(o, 0, both);
    FAIL() << "expected an oracle miss";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOracleMiss);
  }
  const int not_neighbor[] = {0};
  o.edges = {{0, 1}};
  o.tasks[0].oracle = tabulate(1, 1, [](std::uint32_t m) { return 1.0 * std::popcount(m); });
  EXPECT_THROW(utility_value(o, 0, not_neighbor), Error);
}

// Independent exhaustive check written from the definition.
bool brute_submodular(const std::function<double(std::uint32_t)>& g, int n) {
  if (g(0) != 0.0) return false;
  for (std::uint32_t t = 0; t < (1u << n); ++t) {
    for (std::uint32_t s = t;; s = (s - 1) & t) {
      for (int a = 0; a < n; ++a) {
        const std::uint32_t bit = 1u << a;
        if (t & bit) continue;
        if (g(s | bit) - g(s) < g(t | bit) - g(t) - 1e-12) return false;
        if (g(t | bit) < g(t) - 1e-12) return false;
      }
      if (s == 0) break;
    }
  }
  return true;
}

TEST(MonotoneSubmodular, ExamplesAndSquaredCardinality) {
  const auto sq = tabulate(3, 3, [](std::uint32_t m) {
    const double c = std::popcount(m);
    return c * c;
  });
  EXPECT_FALSE(is_monotone_submodular(sq, 3));

  const std::uint32_t covers[4] = {0b0011, 0b0110, 0b1000, 0b1111};
  const double w[4] = {0.3, 0.9, 0.1, 0.5};
  auto cov = [&](std::uint32_t m) {
    std::uint32_t c = 0;
    for (int j = 0; j < 4; ++j) {
      if ((m >> j) & 1u) c |= covers[j];
    }
    double v = 0;
    for (int k = 0; k < 4; ++k) {
      if ((c >> k) & 1u) v += w[k];
    }
    return v;
  };
  EXPECT_TRUE(is_monotone_submodular(tabulate(4, 4, cov), 4));
  EXPECT_TRUE(brute_submodular(cov, 4));

  EXPECT_THROW(is_monotone_submodular(OracleTable::undefined(13), 13), Error);
}

TEST(MonotoneSubmodular, SqrtDiversityGroundFour) {
  // Built through the instance so utility_value is the function under test.
  Instance inst = make_coverage({{0.7, 0.2, 1.0}}, {{1, 0, 1}, {1, 1, 0}, {0, 1, 1}, {1, 1, 1}},
                                {{0, 0}, {0, 1}, {0, 2}, {0, 3}}, {4}, {1, 1, 1, 1});
  inst.tasks[0].utility = UtilityKind::kSqrtDiversity;
  const std::vector<int> ids{0, 1, 2, 3};
  auto g = [&](std::uint32_t m) {
    const auto s = capcov::testing::members(m, ids);
    return utility_value(inst, 0, s);
  };
  EXPECT_TRUE(brute_submodular(g, 4));
  EXPECT_TRUE(is_monotone_submodular(tabulate(4, 4, g), 4));
}

TEST(UtilityProperties, MonotoneSubmodularForAllKindsOnRandomInstances) {
  for (auto kind : {UtilityKind::kWeightedCoverage, UtilityKind::kSqrtDiversity,
                    UtilityKind::kExplicitOracle}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      RandomInstanceParams p;
      p.num_tasks = 2;
      p.num_workers = 8;
      p.edge_prob = 0.8;
      p.utility = kind;
      p.task_capacity_min = p.task_capacity_max = 8;
      p.seed = seed;
      const Instance inst = gen_random(p);
      const Adjacency adj(inst);
      for (int i = 0; i < inst.num_tasks(); ++i) {
        const auto& ids = adj.task_neighbors[i];
        const int n = static_cast<int>(ids.size());
        auto g = [&](std::uint32_t m) {
          const auto s = capcov::testing::members(m, ids);
          return utility_value(inst, i, s);
        };
        EXPECT_TRUE(brute_submodular(g, n)) << to_string(kind) << " seed " << seed;
      }
    }
  }
}

TEST(TaskValueTracker, MatchesUtilityValueBitForBit) {
  for (auto kind : {UtilityKind::kWeightedCoverage, UtilityKind::kSqrtDiversity,
                    UtilityKind::kExplicitOracle}) {
    RandomInstanceParams p;
    p.num_tasks = 3;
    p.num_workers = 7;
    p.utility = kind;
    p.task_capacity_min = 2;
    p.task_capacity_max = 4;
    p.seed = 42;
    const Instance inst = gen_random(p);
    const Adjacency adj(inst);
    for (int i = 0; i < inst.num_tasks(); ++i) {
      TaskValueTracker tr(inst, adj, i);
      std::vector<int> added;
      for (int j : adj.task_neighbors[i]) {
        if (static_cast<int>(added.size()) == inst.tasks[i].capacity) break;
        std::vector<int> with = added;
        with.push_back(j);
        const double before = utility_value(inst, i, added);
        EXPECT_NEAR(tr.gain(j), utility_value(inst, i, with) - before, 1e-12);
        tr.add(j);
        added.push_back(j);
        EXPECT_EQ(tr.value(), utility_value(inst, i, added));
        EXPECT_EQ(tr.gain(j), 0.0);
      }
    }
  }
}

TEST(GenRandom, DeterministicAndValid) {
  RandomInstanceParams p;
  p.num_tasks = 3;
  p.num_workers = 5;
  p.num_features = 4;
  p.edge_prob = 0.5;
  p.seed = 7;
  EXPECT_EQ(gen_random(p), gen_random(p));
  for (auto kind : {UtilityKind::kWeightedCoverage, UtilityKind::kSqrtDiversity,
                    UtilityKind::kExplicitOracle}) {
    for (int horizon : {0, 6}) {
      for (std::uint64_t s = 0; s < 20; ++s) {
        p.utility = kind;
        p.horizon = horizon;
        p.seed = s;
        EXPECT_TRUE(validate(gen_random(p)).empty());
      }
    }
  }
  RandomInstanceParams single;
  single.num_tasks = 1;
  single.num_workers = 1;
  single.edge_prob = 1.0;
  const Instance one = gen_random(single);
  ASSERT_EQ(one.edges.size(), 1u);
  EXPECT_EQ(one.edges[0], (Edge{0, 0}));
}

TEST(GenRandom, EmptyEdgeSetAfterRetriesIsAnError) {
  RandomInstanceParams p;
  p.num_tasks = 1;
  p.num_workers = 1;
  p.edge_prob = 1e-12;
  EXPECT_THROW(gen_random(p), Error);
}

TEST(StarExample, MatchesFigureFieldByField) {
  const Instance inst = gen_star_example(3, 0.1);
  ASSERT_EQ(inst.num_tasks(), 1);
  ASSERT_EQ(inst.num_workers(), 3);
  EXPECT_EQ(inst.num_features, 3);
  EXPECT_EQ(inst.horizon, 3);
  EXPECT_EQ(inst.tasks[0].feature_weights, (std::vector<double>{1.0, 0.1, 0.1}));
  EXPECT_EQ(inst.tasks[0].capacity, 1);
  double rates = 0.0;
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(inst.workers[j].capacity, 1);
    EXPECT_EQ(inst.workers[j].arrival_rate, 1.0);
    rates += inst.workers[j].arrival_rate;
    for (int k = 0; k < 3; ++k) EXPECT_EQ(inst.workers[j].features[k], j == k ? 1 : 0);
  }
  EXPECT_EQ(rates, 3.0);
  EXPECT_EQ(inst.edges, (std::vector<Edge>{{0, 0}, {0, 1}, {0, 2}}));
  EXPECT_TRUE(validate(inst).empty());
}

TEST(SplitHighRate, CopiesAndRatePreservation) {
  Instance inst = make_coverage({{1.0}}, {{1}}, {{0, 0}}, {1}, {2}, {1.0}, 1);
  const Instance split = split_high_rate_types(inst, 0.5);
  ASSERT_EQ(split.num_workers(), 2);
  EXPECT_EQ(split.workers[0].arrival_rate, 0.5);
  EXPECT_EQ(split.workers[1].arrival_rate, 0.5);
  EXPECT_EQ(split.workers[1].capacity, 2);
  EXPECT_EQ(split.edges, (std::vector<Edge>{{0, 0}, {0, 1}}));

  const Instance same = split_high_rate_types(inst, 1.0);
  EXPECT_EQ(same, inst);

  EXPECT_THROW(split_high_rate_types(inst, 0.0), Error);

  RandomInstanceParams p;
  p.num_workers = 6;
  p.horizon = 9;
  p.seed = 3;
  const Instance r = gen_random(p);
  const Instance rs = split_high_rate_types(r, 0.4);
  double before = 0.0;
  double after = 0.0;
  for (const auto& w : r.workers) before += w.arrival_rate;
  for (const auto& w : rs.workers) {
    after += w.arrival_rate;
    EXPECT_LE(w.arrival_rate, 0.4 + 1e-12);
  }
  EXPECT_NEAR(before, after, 1e-9 * before);
  EXPECT_TRUE(validate(rs).empty());
}

TEST(SplitHighRate, OracleLiftedThroughCopies) {
  RandomInstanceParams p;
  p.num_tasks = 1;
  p.num_workers = 3;
  p.edge_prob = 1.0;
  p.utility = UtilityKind::kExplicitOracle;
  p.task_capacity_min = p.task_capacity_max = 2;
  p.horizon = 3;
  p.seed = 5;
  const Instance inst = gen_random(p);
  const Instance split = split_high_rate_types(inst, 0.6);
  EXPECT_TRUE(validate(split).empty());
  // Copies of the same original add nothing beyond the original.
  std::vector<int> origin;
  for (int j = 0; j < inst.num_workers(); ++j) {
    const int count = inst.workers[j].arrival_rate > 0.6
                          ? static_cast<int>(std::ceil(inst.workers[j].arrival_rate / 0.6))
                          : 1;
    origin.insert(origin.end(), count, j);
  }
  ASSERT_EQ(static_cast<int>(origin.size()), split.num_workers());
  for (int a = 0; a < split.num_workers(); ++a) {
    for (int b = 0; b < split.num_workers(); ++b) {
      const int s[] = {a, b};
      std::vector<int> o{origin[a], origin[b]};
      EXPECT_EQ(utility_value(split, 0, s), utility_value(inst, 0, o));
    }
  }
}

TEST(Json, RoundTripStarAndRandom) {
  const Instance star = gen_star_example(5, 0.01);
  EXPECT_EQ(from_json_string(to_json_string(star)), star);

  for (auto kind : {UtilityKind::kWeightedCoverage, UtilityKind::kSqrtDiversity,
                    UtilityKind::kExplicitOracle}) {
    RandomInstanceParams p;
    p.utility = kind;
    p.horizon = 7;
    p.seed = 99;
    const Instance r = gen_random(p);
    const Instance back = from_json_string(to_json_string(r));
    EXPECT_EQ(back, r);
    // Serialized forms agree, so every double survived bit-exactly.
    EXPECT_EQ(to_json_string(back), to_json_string(r));
    for (int j = 0; j < r.num_workers(); ++j) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(back.workers[j].arrival_rate),
                std::bit_cast<std::uint64_t>(r.workers[j].arrival_rate));
    }
  }
}

TEST(Json, FileRoundTripAndSchemaErrors) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "capcov_roundtrip.json";
  const Instance star = gen_star_example(4, 0.2);
  save_json(star, path);
  EXPECT_EQ(load_json(path), star);
  std::filesystem::remove(path);

  auto kind_of = [](const std::string& text) {
    try {
      from_json_string(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInvalidArgument;
  };
  std::string text = to_json_string(star);
  std::string extra = text;
  extra.insert(1, "\"colour\": 3,");
  EXPECT_EQ(kind_of(extra), ErrorKind::kSchema);
  std::string v2 = text;
  v2.replace(v2.find("\"version\": 1"), 12, "\"version\": 2");
  EXPECT_EQ(kind_of(v2), ErrorKind::kSchema);
  EXPECT_EQ(kind_of("{not json"), ErrorKind::kSchema);
  EXPECT_THROW(load_json(dir / "capcov_no_such_file.json"), Error);
}

}  // namespace
