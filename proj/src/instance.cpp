#include "capcov/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "capcov/error.hpp"
#include "capcov/rng.hpp"
#include "json.hpp"

namespace capcov {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRateTolerance = 1e-9;
constexpr int kInstanceSchemaVersion = 1;

double coverage_term(UtilityKind kind, double weight, double covered) {
  if (kind == UtilityKind::kWeightedCoverage) {
    return weight * std::min(1.0, covered);
  }
  return std::sqrt(weight * covered);
}

}  // namespace

std::string to_string(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::kWeightedCoverage:
      return "coverage";
    case UtilityKind::kSqrtDiversity:
      return "sqrt_diversity";
    case UtilityKind::kExplicitOracle:
      return "oracle";
  }
  return "unknown";
}

UtilityKind utility_kind_from_string(const std::string& name) {
  if (name == "coverage") return UtilityKind::kWeightedCoverage;
  if (name == "sqrt_diversity" || name == "sqrt") return UtilityKind::kSqrtDiversity;
  if (name == "oracle") return UtilityKind::kExplicitOracle;
  throw Error(ErrorKind::kInvalidArgument, "unknown utility kind '" + name + "'");
}

OracleTable OracleTable::undefined(int ground_size) {
  if (ground_size < 0 || ground_size > kMaxOracleGround) {
    throw Error(ErrorKind::kInvalidArgument,
                "oracle ground set of size " + std::to_string(ground_size) +
                    " exceeds the limit of " + std::to_string(kMaxOracleGround));
  }
  OracleTable table;
  table.ground_size = ground_size;
  table.values.assign(std::size_t{1} << ground_size, kNaN);
  return table;
}

bool OracleTable::defined(std::uint32_t mask) const {
  return mask < values.size() && !std::isnan(values[mask]);
}

double OracleTable::at(std::uint32_t mask) const {
  if (!defined(mask)) {
    throw Error(ErrorKind::kOracleMiss,
                "oracle table has no entry for subset mask " + std::to_string(mask));
  }
  return values[mask];
}

bool OracleTable::operator==(const OracleTable& other) const {
  if (ground_size != other.ground_size || values.size() != other.values.size()) {
    return false;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool a = std::isnan(values[i]);
    const bool b = std::isnan(other.values[i]);
    if (a != b || (!a && values[i] != other.values[i])) return false;
  }
  return true;
}

Adjacency::Adjacency(const Instance& instance)
    : task_edges(instance.tasks.size()),
      worker_edges(instance.workers.size()),
      task_neighbors(instance.tasks.size()),
      edge_slot(instance.edges.size(), -1) {
  for (int e = 0; e < instance.num_edges(); ++e) {
    const Edge& edge = instance.edges[e];
    task_edges.at(edge.task).push_back(e);
    worker_edges.at(edge.worker).push_back(e);
    task_neighbors[edge.task].push_back(edge.worker);
  }
  for (auto& neighbors : task_neighbors) {
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
  }
  for (int e = 0; e < instance.num_edges(); ++e) {
    const auto& neighbors = task_neighbors[instance.edges[e].task];
    edge_slot[e] = static_cast<int>(
        std::lower_bound(neighbors.begin(), neighbors.end(), instance.edges[e].worker) -
        neighbors.begin());
  }
}

std::vector<std::string> validate(const Instance& instance) {
  std::vector<std::string> out;
  const int num_tasks = instance.num_tasks();
  const int num_workers = instance.num_workers();
  const int k = instance.num_features;

  if (k < 0) out.push_back("num_features is negative");
  if (instance.horizon < 0) out.push_back("horizon is negative");

  bool edges_ok = true;
  std::set<Edge> seen;
  for (std::size_t e = 0; e < instance.edges.size(); ++e) {
    const Edge& edge = instance.edges[e];
    if (edge.task < 0 || edge.task >= num_tasks || edge.worker < 0 ||
        edge.worker >= num_workers) {
      out.push_back("edge " + std::to_string(e) + " references an invalid node (" +
                    std::to_string(edge.task) + ", " + std::to_string(edge.worker) + ")");
      edges_ok = false;
      continue;
    }
    if (!seen.insert(edge).second) {
      out.push_back("duplicate edge (" + std::to_string(edge.task) + ", " +
                    std::to_string(edge.worker) + ")");
    }
  }

  for (int i = 0; i < num_tasks; ++i) {
    const TaskSpec& task = instance.tasks[i];
    const std::string who = "task " + std::to_string(i);
    if (task.capacity < 1) out.push_back(who + " has capacity below 1");
    if (task.utility != UtilityKind::kExplicitOracle) {
      if (static_cast<int>(task.feature_weights.size()) != k) {
        out.push_back(who + " has " + std::to_string(task.feature_weights.size()) +
                      " feature weights, expected " + std::to_string(k));
      }
      for (double w : task.feature_weights) {
        if (!(w >= 0.0 && w <= 1.0)) {
          out.push_back(who + " has a feature weight outside [0, 1]");
          break;
        }
      }
    }
  }

  for (int j = 0; j < num_workers; ++j) {
    const WorkerSpec& worker = instance.workers[j];
    const std::string who = "worker " + std::to_string(j);
    if (worker.capacity < 1) out.push_back(who + " has capacity below 1");
    if (static_cast<int>(worker.features.size()) != k) {
      out.push_back(who + " has " + std::to_string(worker.features.size()) +
                    " features, expected " + std::to_string(k));
    }
    for (auto bit : worker.features) {
      if (bit > 1) {
        out.push_back(who + " has a non-binary feature entry");
        break;
      }
    }
  }

  if (instance.online()) {
    double total = 0.0;
    for (int j = 0; j < num_workers; ++j) {
      const double r = instance.workers[j].arrival_rate;
      if (!(r > 0.0)) {
        out.push_back("worker " + std::to_string(j) + " has non-positive arrival rate");
      }
      total += r;
    }
    const double horizon = instance.horizon;
    if (std::abs(total - horizon) > kRateTolerance * horizon) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "arrival rates sum to " << total << " but the horizon is " << horizon;
      out.push_back(msg.str());
    }
  }

  if (edges_ok) {
    const Adjacency adjacency(instance);
    for (int i = 0; i < num_tasks; ++i) {
      const TaskSpec& task = instance.tasks[i];
      if (task.utility != UtilityKind::kExplicitOracle) continue;
      const std::string who = "task " + std::to_string(i);
      const int ground = static_cast<int>(adjacency.task_neighbors[i].size());
      if (ground > kMaxOracleGround) {
        out.push_back(who + " has " + std::to_string(ground) +
                      " neighbors, above the oracle limit");
        continue;
      }
      if (task.oracle.ground_size != ground ||
          task.oracle.values.size() != (std::size_t{1} << ground)) {
        out.push_back(who + " oracle table does not match its neighbor count");
        continue;
      }
      for (std::uint32_t mask = 0; mask < task.oracle.values.size(); ++mask) {
        if (std::popcount(mask) <= task.capacity && !task.oracle.defined(mask)) {
          out.push_back(who + " oracle table is missing subsets up to its capacity");
          break;
        }
      }
      if (!is_monotone_submodular(task.oracle, ground)) {
        out.push_back(who + " oracle table is not monotone submodular with g(empty)=0");
      }
    }
  }
  return out;
}

double utility_value(const Instance& instance, int task, std::span<const int> assigned) {
  if (task < 0 || task >= instance.num_tasks()) {
    throw Error(ErrorKind::kInvalidArgument, "unknown task index " + std::to_string(task));
  }
  for (int j : assigned) {
    if (j < 0 || j >= instance.num_workers()) {
      throw Error(ErrorKind::kInvalidArgument, "unknown worker index " + std::to_string(j));
    }
  }
  std::vector<int> distinct(assigned.begin(), assigned.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const TaskSpec& spec = instance.tasks[task];
  if (spec.utility == UtilityKind::kExplicitOracle) {
    const Adjacency adjacency(instance);
    const auto& neighbors = adjacency.task_neighbors[task];
    std::uint32_t mask = 0;
    for (int j : distinct) {
      auto it = std::lower_bound(neighbors.begin(), neighbors.end(), j);
      if (it == neighbors.end() || *it != j) {
        throw Error(ErrorKind::kInvalidArgument,
                    "worker " + std::to_string(j) + " is not a neighbor of task " +
                        std::to_string(task));
      }
      mask |= 1u << (it - neighbors.begin());
    }
    return spec.oracle.at(mask);
  }

  double value = 0.0;
  for (int k = 0; k < instance.num_features; ++k) {
    double covered = 0.0;
    for (int j : distinct) covered += instance.workers[j].features[k];
    value += coverage_term(spec.utility, spec.feature_weights[k], covered);
  }
  return value;
}

bool is_monotone_submodular(const OracleTable& table, int ground_size) {
  if (ground_size > kMaxOracleGround || ground_size < 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "ground set too large for an exhaustive submodularity check");
  }
  if (table.values.size() != (std::size_t{1} << ground_size)) return false;
  constexpr double kTol = 1e-12;
  if (!table.defined(0) || std::abs(table.values[0]) > kTol) return false;

  const std::uint32_t full = (1u << ground_size) - 1;
  for (std::uint32_t big = 0; big <= full; ++big) {
    if (!table.defined(big)) continue;
    for (int a = 0; a < ground_size; ++a) {
      const std::uint32_t bit = 1u << a;
      if ((big & bit) != 0 || !table.defined(big | bit)) continue;
      const double big_gain = table.values[big | bit] - table.values[big];
      if (big_gain < -kTol) return false;
      // Every subset of `big`, including `big` itself.
      for (std::uint32_t small = big;; small = (small - 1) & big) {
        if (table.defined(small) && table.defined(small | bit)) {
          const double small_gain = table.values[small | bit] - table.values[small];
          if (small_gain < big_gain - kTol) return false;
        }
        if (small == 0) break;
      }
    }
  }
  return true;
}

TaskValueTracker::TaskValueTracker(const Instance& instance, const Adjacency& adjacency,
                                   int task)
    : instance_(&instance), adjacency_(&adjacency), task_(task) {
  if (instance.tasks[task].utility != UtilityKind::kExplicitOracle) {
    feature_sums_.assign(instance.num_features, 0.0);
  }
}

int TaskValueTracker::slot_of(int worker) const {
  const auto& neighbors = adjacency_->task_neighbors[task_];
  auto it = std::lower_bound(neighbors.begin(), neighbors.end(), worker);
  if (it == neighbors.end() || *it != worker) {
    throw Error(ErrorKind::kInvalidArgument,
                "worker " + std::to_string(worker) + " is not a neighbor of task " +
                    std::to_string(task_));
  }
  return static_cast<int>(it - neighbors.begin());
}

double TaskValueTracker::value_with(std::span<const double> sums) const {
  const TaskSpec& spec = instance_->tasks[task_];
  double value = 0.0;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    value += coverage_term(spec.utility, spec.feature_weights[k], sums[k]);
  }
  return value;
}

double TaskValueTracker::value() const {
  const TaskSpec& spec = instance_->tasks[task_];
  if (spec.utility == UtilityKind::kExplicitOracle) return spec.oracle.at(mask_);
  return value_with(feature_sums_);
}

double TaskValueTracker::gain(int worker) const {
  if (contains(worker)) return 0.0;
  const TaskSpec& spec = instance_->tasks[task_];
  if (spec.utility == UtilityKind::kExplicitOracle) {
    return spec.oracle.at(mask_ | (1u << slot_of(worker))) - spec.oracle.at(mask_);
  }
  const auto& features = instance_->workers[worker].features;
  double delta = 0.0;
  for (std::size_t k = 0; k < feature_sums_.size(); ++k) {
    if (features[k] == 0) continue;
    const double w = spec.feature_weights[k];
    delta += coverage_term(spec.utility, w, feature_sums_[k] + 1.0) -
             coverage_term(spec.utility, w, feature_sums_[k]);
  }
  return delta;
}

void TaskValueTracker::add(int worker) {
  if (contains(worker)) return;
  const TaskSpec& spec = instance_->tasks[task_];
  if (spec.utility == UtilityKind::kExplicitOracle) {
    mask_ |= 1u << slot_of(worker);
  } else {
    const auto& features = instance_->workers[worker].features;
    for (std::size_t k = 0; k < feature_sums_.size(); ++k) feature_sums_[k] += features[k];
  }
  members_.insert(std::lower_bound(members_.begin(), members_.end(), worker), worker);
}

bool TaskValueTracker::contains(int worker) const {
  return std::binary_search(members_.begin(), members_.end(), worker);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

// Random monotone submodular table: weighted coverage of a hidden universe
// plus a concave function of a modular score.
OracleTable random_oracle(int ground, int max_card, Rng& rng) {
  constexpr int kUniverse = 6;
  std::vector<double> universe_weight(kUniverse);
  for (double& w : universe_weight) w = uniform01(rng);
  std::vector<std::uint32_t> covers(ground);
  std::vector<double> score(ground);
  for (int j = 0; j < ground; ++j) {
    for (int u = 0; u < kUniverse; ++u) {
      if (uniform01(rng) < 0.4) covers[j] |= 1u << u;
    }
    score[j] = uniform01(rng);
  }
  return tabulate(ground, max_card, [&](std::uint32_t mask) {
    std::uint32_t covered = 0;
    double modular = 0.0;
    for (int j = 0; j < ground; ++j) {
      if ((mask >> j) & 1u) {
        covered |= covers[j];
        modular += score[j];
      }
    }
    double value = 0.0;
    for (int u = 0; u < kUniverse; ++u) {
      if ((covered >> u) & 1u) value += universe_weight[u];
    }
    return value + std::sqrt(modular);
  });
}

}  // namespace

Instance gen_random(const RandomInstanceParams& p) {
  if (p.num_tasks < 1 || p.num_workers < 1 || p.num_features < 0 ||
      !(p.edge_prob > 0.0 && p.edge_prob <= 1.0) || p.task_capacity_min < 1 ||
      p.task_capacity_max < p.task_capacity_min || p.worker_capacity_min < 1 ||
      p.worker_capacity_max < p.worker_capacity_min || p.horizon < 0) {
    throw Error(ErrorKind::kInvalidArgument, "invalid random instance parameters");
  }
  Rng rng(p.seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Instance inst;
    inst.num_features = p.num_features;
    inst.horizon = p.horizon;
    for (int j = 0; j < p.num_workers; ++j) {
      WorkerSpec worker;
      worker.capacity = uniform_int(rng, p.worker_capacity_min, p.worker_capacity_max);
      worker.features.resize(p.num_features);
      for (auto& bit : worker.features) bit = uniform01(rng) < p.feature_prob ? 1 : 0;
      if (p.horizon > 0) worker.arrival_rate = 0.1 + 0.9 * uniform01(rng);
      inst.workers.push_back(std::move(worker));
    }
    for (int i = 0; i < p.num_tasks; ++i) {
      TaskSpec task;
      task.capacity = uniform_int(rng, p.task_capacity_min, p.task_capacity_max);
      task.utility = p.utility;
      if (p.utility != UtilityKind::kExplicitOracle) {
        task.feature_weights.resize(p.num_features);
        for (double& w : task.feature_weights) w = uniform01(rng);
      }
      inst.tasks.push_back(std::move(task));
    }
    for (int i = 0; i < p.num_tasks; ++i) {
      for (int j = 0; j < p.num_workers; ++j) {
        if (uniform01(rng) < p.edge_prob) inst.edges.push_back({i, j});
      }
    }
    if (inst.edges.empty()) continue;

    if (p.horizon > 0) {
      double total = 0.0;
      for (const auto& w : inst.workers) total += w.arrival_rate;
      const double factor = p.horizon / total;
      for (auto& w : inst.workers) w.arrival_rate *= factor;
    }
    if (p.utility == UtilityKind::kExplicitOracle) {
      const Adjacency adjacency(inst);
      for (int i = 0; i < p.num_tasks; ++i) {
        const int ground = static_cast<int>(adjacency.task_neighbors[i].size());
        inst.tasks[i].oracle = random_oracle(ground, inst.tasks[i].capacity, rng);
      }
    }
    return inst;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "random instance parameters produced no edges after 100 attempts");
}

Instance gen_star_example(int n, double eps) {
  if (n < 2 || !(eps > 0.0 && eps < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "star example needs n >= 2 and eps in (0, 1)");
  }
  Instance inst;
  inst.num_features = n;
  inst.horizon = n;
  TaskSpec task;
  task.capacity = 1;
  task.feature_weights.assign(n, eps);
  task.feature_weights[0] = 1.0;
  inst.tasks.push_back(std::move(task));
  for (int j = 0; j < n; ++j) {
    WorkerSpec worker;
    worker.capacity = 1;
    worker.features.assign(n, 0);
    worker.features[j] = 1;
    worker.arrival_rate = 1.0;
    inst.workers.push_back(std::move(worker));
    inst.edges.push_back({0, j});
  }
  return inst;
}

Instance split_high_rate_types(const Instance& instance, double rate_cap) {
  if (!(rate_cap > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "rate_cap must be positive");
  }
  if (!instance.online()) {
    throw Error(ErrorKind::kInvalidArgument, "split_high_rate_types needs an online instance");
  }
  Instance out;
  out.num_features = instance.num_features;
  out.horizon = instance.horizon;
  out.tasks = instance.tasks;

  std::vector<std::vector<int>> copies(instance.workers.size());
  std::vector<int> origin;
  for (int j = 0; j < instance.num_workers(); ++j) {
    const WorkerSpec& worker = instance.workers[j];
    int count = 1;
    if (worker.arrival_rate > rate_cap) {
      count = static_cast<int>(std::ceil(worker.arrival_rate / rate_cap));
    }
    for (int c = 0; c < count; ++c) {
      WorkerSpec copy = worker;
      copy.arrival_rate = worker.arrival_rate / count;
      copies[j].push_back(out.num_workers());
      origin.push_back(j);
      out.workers.push_back(std::move(copy));
    }
  }
  for (const Edge& edge : instance.edges) {
    for (int copy : copies[edge.worker]) out.edges.push_back({edge.task, copy});
  }

  const Adjacency old_adj(instance);
  const Adjacency new_adj(out);
  for (int i = 0; i < out.num_tasks(); ++i) {
    TaskSpec& task = out.tasks[i];
    if (task.utility != UtilityKind::kExplicitOracle) continue;
    const auto& old_neighbors = old_adj.task_neighbors[i];
    const auto& new_neighbors = new_adj.task_neighbors[i];
    const int ground = static_cast<int>(new_neighbors.size());
    if (ground > kMaxOracleGround) {
      throw Error(ErrorKind::kInvalidArgument,
                  "splitting gives task " + std::to_string(i) + " " + std::to_string(ground) +
                      " neighbors, above the oracle limit");
    }
    std::vector<int> old_slot(ground);
    for (int s = 0; s < ground; ++s) {
      const int original = origin[new_neighbors[s]];
      old_slot[s] = static_cast<int>(
          std::lower_bound(old_neighbors.begin(), old_neighbors.end(), original) -
          old_neighbors.begin());
    }
    const OracleTable& old_table = instance.tasks[i].oracle;
    OracleTable table = OracleTable::undefined(ground);
    for (std::uint32_t mask = 0; mask < table.values.size(); ++mask) {
      if (std::popcount(mask) > task.capacity) continue;
      std::uint32_t old_mask = 0;
      for (int s = 0; s < ground; ++s) {
        if ((mask >> s) & 1u) old_mask |= 1u << old_slot[s];
      }
      if (old_table.defined(old_mask)) table.values[mask] = old_table.values[old_mask];
    }
    task.oracle = std::move(table);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

void require_keys(const json& object, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!object.is_object()) throw Error(ErrorKind::kSchema, where + " must be an object");
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw Error(ErrorKind::kSchema, "unknown field '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
T field(const json& object, const char* key, const std::string& where) {
  if (!object.contains(key)) {
    throw Error(ErrorKind::kSchema, "missing field '" + std::string(key) + "' in " + where);
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema,
                "bad field '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

}  // namespace

std::string to_json_string(const Instance& instance) {
  const Adjacency adjacency(instance);
  json doc;
  doc["version"] = kInstanceSchemaVersion;
  doc["num_features"] = instance.num_features;
  doc["horizon"] = instance.horizon;
  json tasks = json::array();
  for (int i = 0; i < instance.num_tasks(); ++i) {
    const TaskSpec& spec = instance.tasks[i];
    json task;
    task["capacity"] = spec.capacity;
    task["utility"] = to_string(spec.utility);
    if (spec.utility == UtilityKind::kExplicitOracle) {
      const auto& neighbors = adjacency.task_neighbors[i];
      json entries = json::array();
      for (std::uint32_t mask = 0; mask < spec.oracle.values.size(); ++mask) {
        if (!spec.oracle.defined(mask)) continue;
        json set = json::array();
        for (int s = 0; s < spec.oracle.ground_size; ++s) {
          if ((mask >> s) & 1u) set.push_back(neighbors.at(s));
        }
        entries.push_back({{"set", set}, {"value", spec.oracle.values[mask]}});
      }
      task["oracle"] = entries;
    } else {
      task["weights"] = spec.feature_weights;
    }
    tasks.push_back(task);
  }
  doc["tasks"] = tasks;
  json workers = json::array();
  for (const WorkerSpec& spec : instance.workers) {
    json worker;
    worker["capacity"] = spec.capacity;
    std::vector<int> features(spec.features.begin(), spec.features.end());
    worker["features"] = features;
    if (instance.online()) worker["rate"] = spec.arrival_rate;
    workers.push_back(worker);
  }
  doc["workers"] = workers;
  json edges = json::array();
  for (const Edge& edge : instance.edges) edges.push_back({edge.task, edge.worker});
  doc["edges"] = edges;
  return doc.dump(1);
}

Instance from_json_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSchema, std::string("malformed instance JSON: ") + e.what());
  }
  require_keys(doc, {"version", "num_features", "horizon", "tasks", "workers", "edges"},
               "instance");
  const int version = field<int>(doc, "version", "instance");
  if (version != kInstanceSchemaVersion) {
    throw Error(ErrorKind::kSchema,
                "unsupported instance schema version " + std::to_string(version));
  }
  Instance inst;
  inst.num_features = field<int>(doc, "num_features", "instance");
  inst.horizon = field<int>(doc, "horizon", "instance");

  for (const auto& item : field<json>(doc, "edges", "instance")) {
    if (!item.is_array() || item.size() != 2) {
      throw Error(ErrorKind::kSchema, "edges must be [task, worker] pairs");
    }
    inst.edges.push_back({item[0].get<int>(), item[1].get<int>()});
  }
  for (const auto& item : field<json>(doc, "workers", "instance")) {
    require_keys(item, {"capacity", "features", "rate"}, "worker");
    WorkerSpec worker;
    worker.capacity = field<int>(item, "capacity", "worker");
    for (int bit : field<std::vector<int>>(item, "features", "worker")) {
      worker.features.push_back(static_cast<std::uint8_t>(bit));
    }
    if (item.contains("rate")) worker.arrival_rate = field<double>(item, "rate", "worker");
    inst.workers.push_back(std::move(worker));
  }
  std::vector<json> oracle_entries;
  for (const auto& item : field<json>(doc, "tasks", "instance")) {
    require_keys(item, {"capacity", "utility", "weights", "oracle"}, "task");
    TaskSpec task;
    task.capacity = field<int>(item, "capacity", "task");
    try {
      task.utility = utility_kind_from_string(field<std::string>(item, "utility", "task"));
    } catch (const Error& e) {
      throw Error(ErrorKind::kSchema, e.what());
    }
    if (task.utility == UtilityKind::kExplicitOracle) {
      oracle_entries.push_back(field<json>(item, "oracle", "task"));
    } else {
      task.feature_weights = field<std::vector<double>>(item, "weights", "task");
      oracle_entries.emplace_back();
    }
    inst.tasks.push_back(std::move(task));
  }

  for (const Edge& edge : inst.edges) {
    if (edge.task < 0 || edge.task >= inst.num_tasks() || edge.worker < 0 ||
        edge.worker >= inst.num_workers()) {
      throw Error(ErrorKind::kSchema, "edge references an unknown node");
    }
  }
  const Adjacency adjacency(inst);
  for (int i = 0; i < inst.num_tasks(); ++i) {
    TaskSpec& task = inst.tasks[i];
    if (task.utility != UtilityKind::kExplicitOracle) continue;
    const auto& neighbors = adjacency.task_neighbors[i];
    const int ground = static_cast<int>(neighbors.size());
    if (ground > kMaxOracleGround) {
      throw Error(ErrorKind::kSchema, "oracle task has too many neighbors");
    }
    task.oracle = OracleTable::undefined(ground);
    for (const auto& entry : oracle_entries[i]) {
      require_keys(entry, {"set", "value"}, "oracle entry");
      std::uint32_t mask = 0;
      for (int j : field<std::vector<int>>(entry, "set", "oracle entry")) {
        auto it = std::lower_bound(neighbors.begin(), neighbors.end(), j);
        if (it == neighbors.end() || *it != j) {
          throw Error(ErrorKind::kSchema, "oracle entry names a non-neighbor worker");
        }
        mask |= 1u << (it - neighbors.begin());
      }
      task.oracle.values[mask] = field<double>(entry, "value", "oracle entry");
    }
  }
  return inst;
}

void save_json(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path.string());
  out << to_json_string(instance) << '\n';
}

Instance load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kSchema, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_string(buffer.str());
}

}  // namespace capcov
