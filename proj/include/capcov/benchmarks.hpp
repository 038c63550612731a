#pragma once

// Benchmark LPs that upper-bound the optimum of each model:
//  * offline coverage LP   (x_e, z_f with task and worker capacity rows),
//  * online coverage LP    (adds x_e <= r_j and scales worker rows by r_j),
//  * configuration LP      (one variable per task and feasible worker subset).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "capcov/instance.hpp"
#include "capcov/lpsolver.hpp"

namespace capcov {

// Task-feature pair f = (i, k) with weight w_ik and the edges E_f of task i
// whose worker covers feature k.
struct FeaturePair {
  int task = 0;
  int feature = 0;
  double weight = 0.0;
  std::vector<int> edges;
  int var = -1;  // z_f column
};

struct CoverageLp {
  LinearProgram lp;
  std::vector<int> edge_var;  // x_e column per edge
  std::vector<FeaturePair> features;
};

CoverageLp build_offline_lp(const Instance& instance);
CoverageLp build_online_coverage_lp(const Instance& instance);

// Edge-indexed x_e values of a solved coverage LP.
std::vector<double> edge_values(const CoverageLp& model, const LpSolution& solution);

struct ConfigurationSet {
  int task = 0;
  std::vector<int> workers;  // ascending
  std::vector<int> edges;    // edge index of (task, worker) per member
  double value = 0.0;        // g_i(S)
  int var = -1;
};

struct ConfigLp {
  LinearProgram lp;
  std::vector<ConfigurationSet> configs;
};

inline constexpr int kMaxConfigTaskCapacity = 4;
inline constexpr std::int64_t kDefaultConfigMaxVars = 100000;

// Number of (task, subset) columns the configuration LP would have.
std::int64_t config_variable_count(const Instance& instance);

// Throws Error(kCapacityCap) when some b_i exceeds kMaxConfigTaskCapacity and
// Error(kLpSize) when the column count exceeds max_vars.
ConfigLp build_config_lp(const Instance& instance,
                         std::int64_t max_vars = kDefaultConfigMaxVars);

// y*_e = sum of x*_{i,S} over configurations of task i containing j.
std::vector<double> marginals_from_config(const ConfigLp& model, const LpSolution& solution,
                                          int num_edges);

// Checks y_e <= r_j, sum_{E_j} y_e <= r_j b_j and sum_{E_i} y_e <= b_i.
std::vector<std::string> verify_marginal_feasibility(const Instance& instance,
                                                     std::span<const double> y,
                                                     double tolerance = 1e-7);

}  // namespace capcov
