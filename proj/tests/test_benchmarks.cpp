#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <set>

#include "capcov/benchmarks.hpp"
#include "capcov/error.hpp"
#include "test_util.hpp"

namespace {

using namespace capcov;
using capcov::testing::make_coverage;

double solve(const LinearProgram& lp) {
  const auto sol = solve_max(lp);
  EXPECT_EQ(sol.status, LpStatus::kOptimal);
  return sol.objective;
}

Instance two_worker_oracle() {
  Instance inst;
  inst.horizon = 2;
  TaskSpec task;
  task.capacity = 1;
  task.utility = UtilityKind::kExplicitOracle;
  task.oracle = tabulate(2, 1, [](std::uint32_t m) {
    return m == 0 ? 0.0 : (m == 1 ? 2.0 : 1.0);
  });
  inst.tasks.push_back(task);
  for (int j = 0; j < 2; ++j) {
    WorkerSpec w;
    w.arrival_rate = 1.0;
    inst.workers.push_back(w);
  }
  inst.edges = {{0, 0}, {0, 1}};
  return inst;
}

TEST(OfflineLp, StarExampleIsOne) {
  const Instance star = gen_star_example(3, 0.1);
  const CoverageLp model = build_offline_lp(star);
  EXPECT_NEAR(solve(model.lp), 1.0, 1e-9);
  std::vector<int> all(model.lp.num_vars());
  for (int j = 0; j < model.lp.num_vars(); ++j) all[j] = j;
  EXPECT_NEAR(solve_ip_bruteforce(model.lp, all).objective, 1.0, 1e-9);
}

TEST(OfflineLp, SingleEdgeAndNoEdges) {
  const Instance one = make_coverage({{1.0}}, {{1}}, {{0, 0}}, {1}, {1});
  EXPECT_NEAR(solve(build_offline_lp(one).lp), 1.0, 1e-12);
  const Instance none = make_coverage({{1.0}}, {{1}}, {}, {1}, {1});
  EXPECT_NEAR(solve(build_offline_lp(none).lp), 0.0, 1e-12);
}

TEST(OfflineLp, RejectsNonCoverage) {
  Instance inst = make_coverage({{1.0}}, {{1}}, {{0, 0}}, {1}, {1});
  inst.tasks[0].utility = UtilityKind::kSqrtDiversity;
  EXPECT_THROW(build_offline_lp(inst), Error);
}

TEST(OfflineLp, FeatureEdgeSetsExhaustive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomInstanceParams p;
    p.num_tasks = 3;
    p.num_workers = 6;
    p.num_features = 5;
    p.seed = seed;
    const Instance inst = gen_random(p);
    const CoverageLp model = build_offline_lp(inst);
    ASSERT_EQ(static_cast<int>(model.features.size()), inst.num_tasks() * inst.num_features);
    for (const FeaturePair& f : model.features) {
      const std::set<int> listed(f.edges.begin(), f.edges.end());
      EXPECT_EQ(listed.size(), f.edges.size());
      for (int e = 0; e < inst.num_edges(); ++e) {
        const Edge& edge = inst.edges[e];
        const bool expected =
            edge.task == f.task && inst.workers[edge.worker].features[f.feature] == 1;
        EXPECT_EQ(listed.count(e) == 1, expected);
      }
      EXPECT_EQ(f.weight, inst.tasks[f.task].feature_weights[f.feature]);
      EXPECT_EQ(model.lp.upper[f.var], 1.0);
    }
  }
}

TEST(OfflineLp, UpperBoundsExactOptimum) {
  // Exact optimum by enumerating every feasible 0/1 edge selection.
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    RandomInstanceParams p;
    p.num_tasks = 2;
    p.num_workers = 4;
    p.num_features = 3;
    p.task_capacity_max = 2;
    p.worker_capacity_max = 2;
    p.seed = seed;
    const Instance inst = gen_random(p);
    const int m = inst.num_edges();
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> tl(inst.num_tasks()), wl(inst.num_workers());
      std::vector<std::vector<int>> sets(inst.num_tasks());
      for (int e = 0; e < m; ++e) {
        if (!((mask >> e) & 1u)) continue;
        ++tl[inst.edges[e].task];
        ++wl[inst.edges[e].worker];
        sets[inst.edges[e].task].push_back(inst.edges[e].worker);
      }
      bool ok = true;
      for (int i = 0; i < inst.num_tasks(); ++i) ok &= tl[i] <= inst.tasks[i].capacity;
      for (int j = 0; j < inst.num_workers(); ++j) ok &= wl[j] <= inst.workers[j].capacity;
      if (!ok) continue;
      double v = 0.0;
      for (int i = 0; i < inst.num_tasks(); ++i) v += utility_value(inst, i, sets[i]);
      best = std::max(best, v);
    }
    const CoverageLp model = build_offline_lp(inst);
    EXPECT_GE(solve(model.lp) + 1e-8, best) << seed;
    EXPECT_NEAR(solve_ip_bruteforce(model.lp, model.edge_var).objective, best, 1e-8) << seed;
  }
}

TEST(OnlineLp, StarExampleIsOneForAnyN) {
  for (int n : {2, 3, 10, 20}) {
    EXPECT_NEAR(solve(build_online_coverage_lp(gen_star_example(n, 0.05)).lp), 1.0, 1e-9);
  }
}

TEST(OnlineLp, RateCapBinds) {
  const Instance inst = make_coverage({{1.0}, {0.0}}, {{1}, {1}}, {{0, 0}}, {1, 1}, {1, 1},
                                      {0.2, 1.8}, 2);
  EXPECT_NEAR(solve(build_online_coverage_lp(inst).lp), 0.2, 1e-12);
}

TEST(OnlineLp, RequiresRates) {
  const Instance offline = make_coverage({{1.0}}, {{1}}, {{0, 0}}, {1}, {1});
  EXPECT_THROW(build_online_coverage_lp(offline), Error);
}

TEST(OnlineLp, BoundedByOfflineWhenRatesAreOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomInstanceParams p;
    p.num_tasks = 3;
    p.num_workers = 5;
    p.worker_capacity_max = 2;
    p.horizon = 5;
    p.seed = seed;
    Instance inst = gen_random(p);
    for (auto& w : inst.workers) w.arrival_rate = 1.0;
    Instance offline = inst;
    offline.horizon = 0;
    EXPECT_LE(solve(build_online_coverage_lp(inst).lp),
              solve(build_offline_lp(offline).lp) + 1e-8);
  }
}

TEST(ConfigLp, TwoWorkerExampleIsTwo) {
  const Instance inst = two_worker_oracle();
  ASSERT_TRUE(validate(inst).empty());
  const ConfigLp model = build_config_lp(inst);
  ASSERT_EQ(model.configs.size(), 3u);  // {}, {a}, {b}
  const auto sol = solve_max(model.lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 2.0, 1e-12);
  for (const auto& c : model.configs) {
    if (c.workers == std::vector<int>{0}) { EXPECT_NEAR(sol.values[c.var], 1.0, 1e-12); }
  }
}

TEST(ConfigLp, EmptyNeighborhoodIsZero) {
  const Instance inst = make_coverage({{1.0}, {1.0}}, {{1}, {1}}, {{0, 0}}, {1, 1}, {1, 1},
                                      {1.0, 1.0}, 2);
  const ConfigLp model = build_config_lp(inst);
  EXPECT_NEAR(solve(model.lp), 1.0, 1e-12);
  const Instance lonely = make_coverage({{1.0}}, {{1}}, {}, {1}, {1}, {1.0}, 1);
  EXPECT_NEAR(solve(build_config_lp(lonely).lp), 0.0, 1e-12);
}

std::int64_t choose(int n, int k) {
  std::int64_t r = 1;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

TEST(ConfigLp, EnumerationCompleteUniqueAndColex) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomInstanceParams p;
    p.num_tasks = 3;
    p.num_workers = 8;
    p.task_capacity_min = 1;
    p.task_capacity_max = 4;
    p.horizon = 8;
    p.seed = seed;
    p.utility = seed % 2 ? UtilityKind::kSqrtDiversity : UtilityKind::kWeightedCoverage;
    const Instance inst = gen_random(p);
    const Adjacency adj(inst);
    const ConfigLp model = build_config_lp(inst);
    std::int64_t expected = 0;
    for (int i = 0; i < inst.num_tasks(); ++i) {
      const int n = static_cast<int>(adj.task_neighbors[i].size());
      std::int64_t lam = 0;
      for (int k = 0; k <= std::min(n, inst.tasks[i].capacity); ++k) lam += choose(n, k);
      expected += lam;
      std::set<std::vector<int>> seen;
      std::vector<std::uint64_t> masks;
      for (const auto& c : model.configs) {
        if (c.task != i) continue;
        EXPECT_TRUE(seen.insert(c.workers).second);
        EXPECT_LE(static_cast<int>(c.workers.size()), inst.tasks[i].capacity);
        EXPECT_TRUE(std::is_sorted(c.workers.begin(), c.workers.end()));
        EXPECT_EQ(c.value, utility_value(inst, i, c.workers));
        std::uint64_t mask = 0;
        for (std::size_t s = 0; s < c.workers.size(); ++s) {
          const int j = c.workers[s];
          const auto pos = std::find(adj.task_neighbors[i].begin(), adj.task_neighbors[i].end(), j);
          mask |= std::uint64_t{1} << (pos - adj.task_neighbors[i].begin());
          EXPECT_EQ(inst.edges[c.edges[s]], (Edge{i, j}));
        }
        masks.push_back(mask);
      }
      EXPECT_EQ(static_cast<std::int64_t>(seen.size()), lam);
      EXPECT_TRUE(seen.count({}) == 1);
      EXPECT_TRUE(std::is_sorted(masks.begin(), masks.end()));
    }
    EXPECT_EQ(config_variable_count(inst), expected);
    EXPECT_EQ(static_cast<std::int64_t>(model.configs.size()), expected);
  }
}

TEST(ConfigLp, DominatesFeasibleIntegralAllocation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomInstanceParams p;
    p.num_tasks = 2;
    p.num_workers = 4;
    p.num_features = 3;
    p.task_capacity_max = 2;
    p.horizon = 4;
    p.seed = seed;
    Instance inst = gen_random(p);
    for (auto& w : inst.workers) w.arrival_rate = 1.0;
    Instance offline = inst;
    offline.horizon = 0;
    const CoverageLp cov = build_offline_lp(offline);
    const double ip = solve_ip_bruteforce(cov.lp, cov.edge_var).objective;
    EXPECT_GE(solve(build_config_lp(inst).lp) + 1e-8, ip) << seed;
  }
}

TEST(ConfigLp, CapacityAndSizeErrors) {
  RandomInstanceParams p;
  p.num_tasks = 1;
  p.num_workers = 6;
  p.edge_prob = 1.0;
  p.task_capacity_min = p.task_capacity_max = 5;
  p.horizon = 6;
  try {
    build_config_lp(gen_random(p));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapacityCap);
  }
  p.task_capacity_min = p.task_capacity_max = 2;
  const Instance ok = gen_random(p);
  EXPECT_EQ(config_variable_count(ok), 1 + 6 + 15);
  try {
    build_config_lp(ok, 21);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLpSize);
  }
  EXPECT_NO_THROW(build_config_lp(ok, 22));
}

TEST(Marginals, DirectSums) {
  ConfigLp model;
  model.configs.push_back({0, {}, {}, 0.0, 0});
  model.configs.push_back({0, {0}, {0}, 1.0, 1});
  model.configs.push_back({0, {0, 1}, {0, 1}, 1.5, 2});
  LpSolution sol;
  sol.values = {0.1, 0.6, 0.3};
  const auto y = marginals_from_config(model, sol, 2);
  EXPECT_DOUBLE_EQ(y[0], 0.9);
  EXPECT_DOUBLE_EQ(y[1], 0.3);
  sol.values = {0.0, 0.0, 0.0};
  EXPECT_EQ(marginals_from_config(model, sol, 2), (std::vector<double>{0.0, 0.0}));
}

TEST(Marginals, LoadIdentityAndFeasibilityOnOptimalSolutions) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomInstanceParams p;
    p.num_tasks = 3;
    p.num_workers = 6;
    p.task_capacity_max = 3;
    p.worker_capacity_max = 2;
    p.horizon = 4;
    p.seed = seed;
    const Instance inst = gen_random(p);
    const Adjacency adj(inst);
    const ConfigLp model = build_config_lp(inst);
    const auto sol = solve_max(model.lp);
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    const auto y = marginals_from_config(model, sol, inst.num_edges());
    EXPECT_TRUE(verify_marginal_feasibility(inst, y).empty()) << seed;
    for (int i = 0; i < inst.num_tasks(); ++i) {
      double lhs = 0.0;
      for (int e : adj.task_edges[i]) lhs += y[e];
      double rhs = 0.0;
      for (const auto& c : model.configs) {
        if (c.task == i) rhs += c.workers.size() * sol.values[c.var];
      }
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

TEST(Marginals, ViolationsReported) {
  const Instance inst = make_coverage({{1.0}}, {{1}, {1}}, {{0, 0}, {0, 1}}, {1}, {1, 1},
                                      {0.5, 1.5}, 2);
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_TRUE(verify_marginal_feasibility(inst, zero).empty());
  const std::vector<double> over{1.0, 0.0};
  const auto v = verify_marginal_feasibility(inst, over);
  ASSERT_EQ(v.size(), 2u);  // (1) and (2) for worker 0
  EXPECT_EQ(v[0].rfind("(1)", 0), 0u);
  EXPECT_EQ(v[1].rfind("(2)", 0), 0u);
  const std::vector<double> task{0.5, 1.0};
  const auto t = verify_marginal_feasibility(inst, task);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].rfind("(3)", 0), 0u);
}

}  // namespace
