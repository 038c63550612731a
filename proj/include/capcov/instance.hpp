#pragma once

// Problem data for capacitated coverage / submodular task-worker assignment.
//
// A bipartite graph connects tasks I to worker types J. Each task carries a
// capacity and a monotone submodular utility over the workers assigned to
// it; each worker type carries a capacity, a binary feature vector and, for
// online instances, an arrival rate r_j with sum_j r_j = T (the horizon).
// Indices are 0-based everywhere.

#include <bit>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace capcov {

enum class UtilityKind {
  kWeightedCoverage,  // sum_k w_k * min(1, sum_{j in S} chi_jk)
  kSqrtDiversity,     // sum_k sqrt(w_k * sum_{j in S} chi_jk)
  kExplicitOracle,    // lookup table over subsets of the task's neighbors
};

std::string to_string(UtilityKind kind);
UtilityKind utility_kind_from_string(const std::string& name);

inline constexpr int kMaxOracleGround = 12;

// Set function on a ground set of at most kMaxOracleGround elements, indexed
// by bitmask. Entries that are not part of the table hold NaN.
struct OracleTable {
  int ground_size = 0;
  std::vector<double> values;

  static OracleTable undefined(int ground_size);
  bool defined(std::uint32_t mask) const;
  // Throws Error(kOracleMiss) for undefined entries.
  double at(std::uint32_t mask) const;

  bool operator==(const OracleTable& other) const;
};

struct TaskSpec {
  int capacity = 1;
  UtilityKind utility = UtilityKind::kWeightedCoverage;
  std::vector<double> feature_weights;  // length K for coverage/sqrt kinds
  // For kExplicitOracle: bit b refers to the b-th neighbor of the task in
  // ascending worker order (see Adjacency::task_neighbors).
  OracleTable oracle;

  bool operator==(const TaskSpec&) const = default;
};

struct WorkerSpec {
  int capacity = 1;
  std::vector<std::uint8_t> features;  // chi_j, length K
  double arrival_rate = 0.0;           // online instances only

  bool operator==(const WorkerSpec&) const = default;
};

struct Edge {
  int task = 0;
  int worker = 0;

  auto operator<=>(const Edge&) const = default;
};

struct Instance {
  std::vector<TaskSpec> tasks;
  std::vector<WorkerSpec> workers;
  std::vector<Edge> edges;
  int num_features = 0;
  int horizon = 0;  // 0 for offline instances

  bool online() const { return horizon > 0; }
  int num_tasks() const { return static_cast<int>(tasks.size()); }
  int num_workers() const { return static_cast<int>(workers.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  bool operator==(const Instance&) const = default;
};

// Incidence lists derived from the edge list. Edge lists are in ascending
// edge index; neighbor lists in ascending worker index.
struct Adjacency {
  std::vector<std::vector<int>> task_edges;
  std::vector<std::vector<int>> worker_edges;
  std::vector<std::vector<int>> task_neighbors;
  std::vector<int> edge_slot;  // position of edge's worker in task_neighbors

  explicit Adjacency(const Instance& instance);
};

// Every invariant violation as a human-readable line; empty means valid.
std::vector<std::string> validate(const Instance& instance);

// g_i on the set of distinct workers in `assigned`. Duplicates contribute
// nothing. Throws Error(kInvalidArgument) on unknown workers and
// Error(kOracleMiss) when an explicit table lacks the subset.
double utility_value(const Instance& instance, int task,
                     std::span<const int> assigned);

// Exhaustive check of g(empty) = 0, monotonicity and diminishing returns over
// every defined entry of the table.
bool is_monotone_submodular(const OracleTable& table, int ground_size);

// Tabulates a set function on all subsets of [0, n) with at most max_card
// elements.
template <typename F>
OracleTable tabulate(int n, int max_card, F&& f) {
  OracleTable table = OracleTable::undefined(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) <= max_card) table.values[mask] = f(mask);
  }
  return table;
}

// Incremental distinct-set utility of a single task. value() is recomputed
// from the aggregated state, so it matches utility_value() bit-for-bit.
class TaskValueTracker {
 public:
  TaskValueTracker(const Instance& instance, const Adjacency& adjacency,
                   int task);

  double value() const;
  double gain(int worker) const;  // 0 for workers already present
  void add(int worker);
  bool contains(int worker) const;
  const std::vector<int>& members() const { return members_; }

 private:
  double value_with(std::span<const double> sums) const;
  int slot_of(int worker) const;

  const Instance* instance_;
  const Adjacency* adjacency_;
  int task_;
  std::vector<int> members_;
  std::vector<double> feature_sums_;
  std::uint32_t mask_ = 0;
};

struct RandomInstanceParams {
  int num_tasks = 3;
  int num_workers = 5;
  int num_features = 4;
  double edge_prob = 0.5;
  double feature_prob = 0.5;
  int task_capacity_min = 1;
  int task_capacity_max = 2;
  int worker_capacity_min = 1;
  int worker_capacity_max = 1;
  UtilityKind utility = UtilityKind::kWeightedCoverage;
  int horizon = 0;  // 0 generates an offline instance
  std::uint64_t seed = 0;
};

Instance gen_random(const RandomInstanceParams& params);

// One task, n single-feature workers; feature 0 weighs 1 and the rest eps.
// All capacities 1, T = n, r_j = 1.
Instance gen_star_example(int n, double eps);

// Replaces every worker type with r_j > rate_cap by ceil(r_j / rate_cap)
// identical copies sharing its rate. Explicit utility tables are lifted to
// the copies through the map copy -> original.
Instance split_high_rate_types(const Instance& instance, double rate_cap);

std::string to_json_string(const Instance& instance);
Instance from_json_string(const std::string& text);
void save_json(const Instance& instance, const std::filesystem::path& path);
Instance load_json(const std::filesystem::path& path);

}  // namespace capcov
