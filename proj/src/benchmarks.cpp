#include "capcov/benchmarks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "capcov/error.hpp"

namespace capcov {

namespace {

bool is_coverage(const Instance& instance) {
  return std::all_of(instance.tasks.begin(), instance.tasks.end(), [](const TaskSpec& t) {
    return t.utility == UtilityKind::kWeightedCoverage;
  });
}

// Shared skeleton of the two coverage LPs. `online` switches the worker rows
// to b_j * r_j and caps x_e at r_j.
CoverageLp build_coverage_lp(const Instance& instance, bool online) {
  if (!is_coverage(instance)) {
    throw Error(ErrorKind::kInvalidArgument,
                "coverage LPs need every task to use a weighted coverage utility");
  }
  if (online && !instance.online()) {
    throw Error(ErrorKind::kInvalidArgument,
                "the online coverage LP needs arrival rates and a horizon");
  }
  const Adjacency adjacency(instance);
  CoverageLp model;
  LinearProgram& lp = model.lp;

  for (int e = 0; e < instance.num_edges(); ++e) {
    const Edge& edge = instance.edges[e];
    double hi = 1.0;
    if (online) hi = std::min(1.0, instance.workers[edge.worker].arrival_rate);
    model.edge_var.push_back(lp.add_variable(
        "x_" + std::to_string(edge.task) + "_" + std::to_string(edge.worker), 0.0, hi, 0.0));
  }
  for (int i = 0; i < instance.num_tasks(); ++i) {
    for (int k = 0; k < instance.num_features; ++k) {
      FeaturePair f;
      f.task = i;
      f.feature = k;
      f.weight = instance.tasks[i].feature_weights[k];
      for (int e : adjacency.task_edges[i]) {
        if (instance.workers[instance.edges[e].worker].features[k] != 0) f.edges.push_back(e);
      }
      f.var = lp.add_variable("z_" + std::to_string(i) + "_" + std::to_string(k), 0.0, 1.0,
                              f.weight);
      model.features.push_back(std::move(f));
    }
  }

  const int n = lp.num_vars();
  for (const FeaturePair& f : model.features) {
    std::vector<double> row(n, 0.0);
    row[f.var] = 1.0;
    for (int e : f.edges) row[model.edge_var[e]] = -1.0;
    lp.add_dense_row(std::move(row), 0.0,
                     "cover_" + std::to_string(f.task) + "_" + std::to_string(f.feature));
  }
  for (int i = 0; i < instance.num_tasks(); ++i) {
    std::vector<double> row(n, 0.0);
    for (int e : adjacency.task_edges[i]) row[model.edge_var[e]] = 1.0;
    lp.add_dense_row(std::move(row), instance.tasks[i].capacity, "task_" + std::to_string(i));
  }
  for (int j = 0; j < instance.num_workers(); ++j) {
    std::vector<double> row(n, 0.0);
    for (int e : adjacency.worker_edges[j]) row[model.edge_var[e]] = 1.0;
    double rhs = instance.workers[j].capacity;
    if (online) rhs *= instance.workers[j].arrival_rate;
    lp.add_dense_row(std::move(row), rhs, "worker_" + std::to_string(j));
  }
  return model;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

}  // namespace

CoverageLp build_offline_lp(const Instance& instance) {
  return build_coverage_lp(instance, /*online=*/false);
}

CoverageLp build_online_coverage_lp(const Instance& instance) {
  return build_coverage_lp(instance, /*online=*/true);
}

std::vector<double> edge_values(const CoverageLp& model, const LpSolution& solution) {
  std::vector<double> x(model.edge_var.size());
  for (std::size_t e = 0; e < x.size(); ++e) x[e] = solution.values.at(model.edge_var[e]);
  return x;
}

std::int64_t config_variable_count(const Instance& instance) {
  const Adjacency adjacency(instance);
  std::int64_t total = 0;
  for (int i = 0; i < instance.num_tasks(); ++i) {
    const int n = static_cast<int>(adjacency.task_neighbors[i].size());
    const int cap = std::min(instance.tasks[i].capacity, n);
    for (int k = 0; k <= cap; ++k) total += binomial(n, k);
  }
  return total;
}

ConfigLp build_config_lp(const Instance& instance, std::int64_t max_vars) {
  if (!instance.online()) {
    throw Error(ErrorKind::kInvalidArgument,
                "the configuration LP needs arrival rates and a horizon");
  }
  for (int i = 0; i < instance.num_tasks(); ++i) {
    if (instance.tasks[i].capacity > kMaxConfigTaskCapacity) {
      throw Error(ErrorKind::kCapacityCap,
                  "task " + std::to_string(i) + " has capacity " +
                      std::to_string(instance.tasks[i].capacity) +
                      "; the configuration LP supports at most " +
                      std::to_string(kMaxConfigTaskCapacity));
    }
  }
  const std::int64_t count = config_variable_count(instance);
  if (count > max_vars) {
    throw Error(ErrorKind::kLpSize, "configuration LP needs " + std::to_string(count) +
                                        " variables, above the limit of " +
                                        std::to_string(max_vars));
  }

  const Adjacency adjacency(instance);
  ConfigLp model;
  LinearProgram& lp = model.lp;
  std::vector<std::vector<int>> task_configs(instance.num_tasks());
  for (int i = 0; i < instance.num_tasks(); ++i) {
    const auto& neighbors = adjacency.task_neighbors[i];
    const int n = static_cast<int>(neighbors.size());
    if (n > 63) {
      throw Error(ErrorKind::kLpSize, "task " + std::to_string(i) +
                                          " has too many neighbors for subset enumeration");
    }
    // Edge index of (i, neighbors[s]).
    std::vector<int> slot_edge(n, -1);
    for (int e : adjacency.task_edges[i]) slot_edge[adjacency.edge_slot[e]] = e;

    const int cap = instance.tasks[i].capacity;
    const std::uint64_t end = n == 0 ? 1 : (std::uint64_t{1} << n);
    // Masks in increasing numeric (colex) order, skipping over masks with
    // more than `cap` bits by carrying their lowest set bit.
    for (std::uint64_t mask = 0; mask < end;) {
      if (std::popcount(mask) > cap) {
        mask += mask & (~mask + 1);
        continue;
      }
      ConfigurationSet config;
      config.task = i;
      for (int s = 0; s < n; ++s) {
        if ((mask >> s) & 1u) {
          config.workers.push_back(neighbors[s]);
          config.edges.push_back(slot_edge[s]);
        }
      }
      config.value = utility_value(instance, i, config.workers);
      std::ostringstream name;
      name << "x_" << i << "_{";
      for (std::size_t t = 0; t < config.workers.size(); ++t) {
        name << (t ? "," : "") << config.workers[t];
      }
      name << "}";
      config.var = lp.add_variable(name.str(), 0.0, 1.0, config.value);
      task_configs[i].push_back(static_cast<int>(model.configs.size()));
      model.configs.push_back(std::move(config));
      ++mask;
    }
  }

  const int n = lp.num_vars();
  for (int i = 0; i < instance.num_tasks(); ++i) {
    std::vector<double> row(n, 0.0);
    for (int c : task_configs[i]) row[model.configs[c].var] = 1.0;
    lp.add_dense_row(std::move(row), 1.0, "task_" + std::to_string(i));
  }
  // Edge rows and worker rows from the configurations that contain each edge.
  std::vector<std::vector<double>> edge_rows(instance.num_edges(), std::vector<double>(n, 0.0));
  for (const ConfigurationSet& config : model.configs) {
    for (int e : config.edges) edge_rows[e][config.var] = 1.0;
  }
  for (int j = 0; j < instance.num_workers(); ++j) {
    std::vector<double> worker_row(n, 0.0);
    for (int e : adjacency.worker_edges[j]) {
      for (int v = 0; v < n; ++v) worker_row[v] += edge_rows[e][v];
    }
    const double r = instance.workers[j].arrival_rate;
    for (int e : adjacency.worker_edges[j]) {
      lp.add_dense_row(std::move(edge_rows[e]), r,
                       "edge_" + std::to_string(instance.edges[e].task) + "_" +
                           std::to_string(j));
    }
    lp.add_dense_row(std::move(worker_row), r * instance.workers[j].capacity,
                     "worker_" + std::to_string(j));
  }
  return model;
}

std::vector<double> marginals_from_config(const ConfigLp& model, const LpSolution& solution,
                                          int num_edges) {
  std::vector<double> y(num_edges, 0.0);
  for (const ConfigurationSet& config : model.configs) {
    const double x = solution.values.at(config.var);
    if (x == 0.0) continue;
    for (int e : config.edges) y.at(e) += x;
  }
  return y;
}

std::vector<std::string> verify_marginal_feasibility(const Instance& instance,
                                                     std::span<const double> y,
                                                     double tolerance) {
  std::vector<std::string> out;
  if (static_cast<int>(y.size()) != instance.num_edges()) {
    out.push_back("marginal vector length differs from the edge count");
    return out;
  }
  const Adjacency adjacency(instance);
  for (int e = 0; e < instance.num_edges(); ++e) {
    const Edge& edge = instance.edges[e];
    const double r = instance.workers[edge.worker].arrival_rate;
    if (y[e] > r + tolerance) {
      out.push_back("(1) y_e > r_j on edge (" + std::to_string(edge.task) + ", " +
                    std::to_string(edge.worker) + ")");
    }
  }
  for (int j = 0; j < instance.num_workers(); ++j) {
    double sum = 0.0;
    for (int e : adjacency.worker_edges[j]) sum += y[e];
    const auto& w = instance.workers[j];
    if (sum > w.arrival_rate * w.capacity + tolerance) {
      out.push_back("(2) sum of y_e over worker " + std::to_string(j) + " exceeds r_j * b_j");
    }
  }
  for (int i = 0; i < instance.num_tasks(); ++i) {
    double sum = 0.0;
    for (int e : adjacency.task_edges[i]) sum += y[e];
    if (sum > instance.tasks[i].capacity + tolerance) {
      out.push_back("(3) sum of y_e over task " + std::to_string(i) + " exceeds b_i");
    }
  }
  return out;
}

}  // namespace capcov
