#include "capcov/algorithms.hpp"

#include <algorithm>
#include <numeric>

#include "capcov/error.hpp"
#include "capcov/lpsolver.hpp"
#include "capcov/rounding.hpp"

namespace capcov {

std::vector<std::string> allocation_violations(const Instance& instance,
                                               const Allocation& allocation) {
  std::vector<std::string> out;
  if (static_cast<int>(allocation.edge_count.size()) != instance.num_edges()) {
    out.push_back("edge count vector has the wrong length");
    return out;
  }
  const bool online = !allocation.worker_arrivals.empty();
  if (online && static_cast<int>(allocation.worker_arrivals.size()) != instance.num_workers()) {
    out.push_back("arrival vector has the wrong length");
    return out;
  }
  std::vector<long> task_load(instance.num_tasks(), 0);
  std::vector<long> worker_load(instance.num_workers(), 0);
  for (int e = 0; e < instance.num_edges(); ++e) {
    const int c = allocation.edge_count[e];
    if (c < 0) out.push_back("negative multiplicity on edge " + std::to_string(e));
    task_load[instance.edges[e].task] += c;
    worker_load[instance.edges[e].worker] += c;
  }
  for (int i = 0; i < instance.num_tasks(); ++i) {
    if (task_load[i] > instance.tasks[i].capacity) {
      out.push_back("task " + std::to_string(i) + " matched " + std::to_string(task_load[i]) +
                    " times, capacity " + std::to_string(instance.tasks[i].capacity));
    }
  }
  for (int j = 0; j < instance.num_workers(); ++j) {
    const long uses = online ? allocation.worker_arrivals[j] : 1;
    const long cap = static_cast<long>(instance.workers[j].capacity) * uses;
    if (worker_load[j] > cap) {
      out.push_back("worker " + std::to_string(j) + " matched " +
                    std::to_string(worker_load[j]) + " times, limit " + std::to_string(cap));
    }
  }
  return out;
}

double allocation_utility(const Instance& instance, const Allocation& allocation) {
  const auto violations = allocation_violations(instance, allocation);
  if (!violations.empty()) throw Error(ErrorKind::kFeasibility, violations.front());
  const Adjacency adjacency(instance);
  double total = 0.0;
  for (int i = 0; i < instance.num_tasks(); ++i) {
    std::vector<int> workers;
    for (int e : adjacency.task_edges[i]) {
      if (allocation.edge_count[e] > 0) workers.push_back(instance.edges[e].worker);
    }
    total += utility_value(instance, i, workers);
  }
  return total;
}

MatchState::MatchState(const Instance& instance, const Adjacency& adjacency)
    : instance_(&instance),
      adjacency_(&adjacency),
      task_remaining_(instance.num_tasks()),
      edge_count_(instance.num_edges(), 0),
      worker_arrivals_(instance.num_workers(), 0) {
  trackers_.reserve(instance.num_tasks());
  for (int i = 0; i < instance.num_tasks(); ++i) {
    task_remaining_[i] = instance.tasks[i].capacity;
    trackers_.emplace_back(instance, adjacency, i);
  }
}

double MatchState::utility() const {
  double total = 0.0;
  for (const auto& t : trackers_) total += t.value();
  return total;
}

void MatchState::match(int edge) {
  const Edge& e = instance_->edges.at(edge);
  if (task_remaining_[e.task] <= 0) {
    throw Error(ErrorKind::kFeasibility,
                "task " + std::to_string(e.task) + " has no capacity left");
  }
  --task_remaining_[e.task];
  ++edge_count_[edge];
  trackers_[e.task].add(e.worker);
}

Alg1::Alg1(const Instance& instance) : instance_(&instance) {
  const CoverageLp model = build_offline_lp(instance);
  const LpSolution solution = solve_max(model.lp);
  if (solution.status != LpStatus::kOptimal) {
    throw Error(ErrorKind::kLpFailure, "offline LP: " + to_string(solution.status));
  }
  x_star_ = edge_values(model, solution);
  lp_value_ = solution.objective;
}

Alg1::Alg1(const Instance& instance, std::vector<double> x_star, double lp_value)
    : instance_(&instance), x_star_(std::move(x_star)), lp_value_(lp_value) {
  if (static_cast<int>(x_star_.size()) != instance.num_edges()) {
    throw Error(ErrorKind::kInvalidArgument, "x* length differs from the edge count");
  }
}

Allocation Alg1::round(Rng& rng) const {
  const Instance& instance = *instance_;
  std::vector<int> left(instance.num_edges());
  std::vector<int> right(instance.num_edges());
  for (int e = 0; e < instance.num_edges(); ++e) {
    left[e] = instance.edges[e].task;
    right[e] = instance.edges[e].worker;
  }
  const FractionalAssignment fa(instance.num_tasks(), instance.num_workers(), std::move(left),
                                std::move(right), x_star_);
  const auto bits = dependent_round(fa, rng);
  Allocation allocation;
  allocation.edge_count.assign(bits.begin(), bits.end());
  return allocation;
}

Allocation alg1_offline(const Instance& instance, Rng& rng) {
  return Alg1(instance).round(rng);
}

StarRoundingPolicy::StarRoundingPolicy(const Instance& instance, std::vector<double> values,
                                       double lp_value, bool skip_matched_edges,
                                       std::string name)
    : edge_values_(std::move(values)),
      lp_value_(lp_value),
      skip_matched_edges_(skip_matched_edges),
      name_(std::move(name)) {
  if (static_cast<int>(edge_values_.size()) != instance.num_edges()) {
    throw Error(ErrorKind::kInvalidArgument, "edge value length differs from the edge count");
  }
  const Adjacency adjacency(instance);
  worker_edges_ = adjacency.worker_edges;
  probs_.resize(instance.num_workers());
  for (int j = 0; j < instance.num_workers(); ++j) {
    const double r = instance.workers[j].arrival_rate;
    for (int e : worker_edges_[j]) {
      probs_[j].push_back(r > 0.0 ? std::clamp(edge_values_[e] / r, 0.0, 1.0) : 0.0);
    }
  }
  for (const Edge& e : instance.edges) edge_task_.push_back(e.task);
}

std::vector<int> StarRoundingPolicy::on_arrival(int /*round*/, int worker,
                                                const MatchState& state, Rng& rng) const {
  const auto bits = dependent_round_star(probs_[worker], rng);
  std::vector<int> out;
  const auto& edges = worker_edges_[worker];
  for (std::size_t s = 0; s < edges.size(); ++s) {
    if (!bits[s]) continue;
    const int e = edges[s];
    if (skip_matched_edges_ && state.edge_count(e) > 0) continue;
    if (state.task_remaining(edge_task_[e]) <= 0) continue;
    out.push_back(e);
  }
  return out;
}

std::unique_ptr<StarRoundingPolicy> alg2_policy(const Instance& instance) {
  const CoverageLp model = build_online_coverage_lp(instance);
  const LpSolution solution = solve_max(model.lp);
  if (solution.status != LpStatus::kOptimal) {
    throw Error(ErrorKind::kLpFailure, "online coverage LP: " + to_string(solution.status));
  }
  return std::make_unique<StarRoundingPolicy>(instance, edge_values(model, solution),
                                              solution.objective, true, "alg2");
}

std::unique_ptr<StarRoundingPolicy> alg3_policy(const Instance& instance,
                                                std::int64_t max_vars) {
  const ConfigLp model = build_config_lp(instance, max_vars);
  const LpSolution solution = solve_max(model.lp);
  if (solution.status != LpStatus::kOptimal) {
    throw Error(ErrorKind::kLpFailure, "configuration LP: " + to_string(solution.status));
  }
  return std::make_unique<StarRoundingPolicy>(
      instance, marginals_from_config(model, solution, instance.num_edges()),
      solution.objective, false, "alg3");
}

std::vector<int> GreedyPolicy::on_arrival(int /*round*/, int worker, const MatchState& state,
                                          Rng& /*rng*/) const {
  const Instance& instance = state.instance();
  struct Candidate {
    double gain;
    int task;
    int edge;
  };
  std::vector<Candidate> candidates;
  for (int e : state.adjacency().worker_edges[worker]) {
    const int i = instance.edges[e].task;
    if (state.task_remaining(i) <= 0) continue;
    const double g = state.tracker(i).gain(worker);
    if (g <= 0.0 && !take_zero_gain_) continue;
    candidates.push_back({g, i, e});
  }
  // Picks land on distinct tasks, so one pick never changes another's gain.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.task < b.task;
  });
  const auto take = std::min<std::size_t>(candidates.size(), instance.workers[worker].capacity);
  std::vector<int> out;
  for (std::size_t s = 0; s < take; ++s) out.push_back(candidates[s].edge);
  return out;
}

std::unique_ptr<GreedyPolicy> greedy_policy(bool take_zero_gain) {
  return std::make_unique<GreedyPolicy>(take_zero_gain);
}

}  // namespace capcov
