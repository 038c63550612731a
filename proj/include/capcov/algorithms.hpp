#pragma once

// LP-guided assignment algorithms and the greedy baseline.
//
//   Alg1        offline: solve the coverage LP, dependent-round x*, match.
//   alg2_policy online coverage: star-round x*_e / r_j on each arrival.
//   alg3_policy online submodular: star-round y*_e / r_j from the
//               configuration LP marginals.
//   greedy      match each arrival to its best safe tasks by marginal gain.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capcov/benchmarks.hpp"
#include "capcov/instance.hpp"
#include "capcov/rng.hpp"

namespace capcov {

// Matched-edge multiplicities. worker_arrivals[j] is the number of times
// type j arrived; an empty vector means an offline allocation, where each
// worker is available once.
struct Allocation {
  std::vector<int> edge_count;
  std::vector<int> worker_arrivals;
};

std::vector<std::string> allocation_violations(const Instance& instance,
                                               const Allocation& allocation);

// Sum over tasks of g_i on the distinct workers matched to i. Throws
// Error(kFeasibility) for an infeasible allocation.
double allocation_utility(const Instance& instance, const Allocation& allocation);

class MatchState {
 public:
  MatchState(const Instance& instance, const Adjacency& adjacency);

  const Instance& instance() const { return *instance_; }
  const Adjacency& adjacency() const { return *adjacency_; }

  int task_remaining(int task) const { return task_remaining_[task]; }
  // Matches at the task, duplicates included.
  int task_load(int task) const { return instance_->tasks[task].capacity - task_remaining_[task]; }
  int edge_count(int edge) const { return edge_count_[edge]; }
  const TaskValueTracker& tracker(int task) const { return trackers_[task]; }
  double utility() const;

  void record_arrival(int worker) { ++worker_arrivals_[worker]; }
  // Throws Error(kFeasibility) if the task is full.
  void match(int edge);

  Allocation allocation() const { return {edge_count_, worker_arrivals_}; }

 private:
  const Instance* instance_;
  const Adjacency* adjacency_;
  std::vector<int> task_remaining_;
  std::vector<int> edge_count_;
  std::vector<int> worker_arrivals_;
  std::vector<TaskValueTracker> trackers_;
};

// Decision rule for one arriving worker. Implementations are immutable after
// construction, so one policy object serves any number of concurrent trials;
// all per-trial state lives in MatchState and the trial's generator.
class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;
  virtual std::string_view name() const = 0;
  // Edges incident to `worker` to match now.
  virtual std::vector<int> on_arrival(int round, int worker, const MatchState& state,
                                      Rng& rng) const = 0;
};

class Alg1 {
 public:
  explicit Alg1(const Instance& instance);
  // Uses a precomputed x* (edge-indexed).
  Alg1(const Instance& instance, std::vector<double> x_star, double lp_value);

  double lp_value() const { return lp_value_; }
  const std::vector<double>& x_star() const { return x_star_; }
  Allocation round(Rng& rng) const;

 private:
  const Instance* instance_;
  std::vector<double> x_star_;
  double lp_value_ = 0.0;
};

Allocation alg1_offline(const Instance& instance, Rng& rng);

// Shared shape of ALG2 and ALG3: star-round v_e / r_j over E_j.
class StarRoundingPolicy : public OnlinePolicy {
 public:
  StarRoundingPolicy(const Instance& instance, std::vector<double> edge_values,
                     double lp_value, bool skip_matched_edges, std::string name);

  std::string_view name() const override { return name_; }
  std::vector<int> on_arrival(int round, int worker, const MatchState& state,
                              Rng& rng) const override;

  double lp_value() const { return lp_value_; }
  const std::vector<double>& edge_values() const { return edge_values_; }
  // Rounding probabilities v_e / r_j of worker j, in E_j order.
  const std::vector<double>& worker_probabilities(int worker) const { return probs_[worker]; }

 private:
  std::vector<double> edge_values_;
  std::vector<std::vector<int>> worker_edges_;
  std::vector<std::vector<double>> probs_;
  std::vector<int> edge_task_;
  double lp_value_;
  bool skip_matched_edges_;
  std::string name_;
};

// Solves the online coverage LP.
std::unique_ptr<StarRoundingPolicy> alg2_policy(const Instance& instance);
// Solves the configuration LP (honours its capacity and size limits).
std::unique_ptr<StarRoundingPolicy> alg3_policy(
    const Instance& instance, std::int64_t max_vars = kDefaultConfigMaxVars);

class GreedyPolicy : public OnlinePolicy {
 public:
  explicit GreedyPolicy(bool take_zero_gain = true) : take_zero_gain_(take_zero_gain) {}

  std::string_view name() const override { return "greedy"; }
  std::vector<int> on_arrival(int round, int worker, const MatchState& state,
                              Rng& rng) const override;

 private:
  bool take_zero_gain_;
};

std::unique_ptr<GreedyPolicy> greedy_policy(bool take_zero_gain = true);

}  // namespace capcov
