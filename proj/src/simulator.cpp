#include "capcov/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "capcov/benchmarks.hpp"
#include "capcov/error.hpp"
#include "capcov/lpsolver.hpp"

namespace capcov {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate summarize(std::span<const double> values, std::uint64_t seed) {
  Estimate est;
  est.trials = static_cast<long>(values.size());
  est.seed = seed;
  if (values.empty()) return est;
  const double n = static_cast<double>(values.size());
  est.mean = pairwise_sum(values) / n;
  if (values.size() < 2) return est;
  std::vector<double> sq(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double d = values[k] - est.mean;
    sq[k] = d * d;
  }
  est.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return est;
}

Estimate estimate_mean(long trials, std::uint64_t seed, int threads,
                       const std::function<double(long, Rng&)>& sample) {
  std::vector<double> values(std::max(trials, 0L));
  parallel_for(trials, threads, [&](long k) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(k)));
    values[k] = sample(k, rng);
  });
  return summarize(values, seed);
}

ArrivalSequence sample_arrivals(const Instance& instance, Rng& rng) {
  if (!instance.online()) {
    throw Error(ErrorKind::kInvalidArgument, "arrivals need an online instance");
  }
  std::vector<double> cumulative(instance.num_workers());
  double total = 0.0;
  for (int j = 0; j < instance.num_workers(); ++j) {
    total += instance.workers[j].arrival_rate;
    cumulative[j] = total;
  }
  ArrivalSequence seq(instance.horizon);
  for (int& a : seq) {
    const double u = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    a = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                  instance.num_workers() - 1));
  }
  return seq;
}

TrialResult run_trial(const OnlinePolicy& policy, const Instance& instance,
                      const Adjacency& adjacency, std::span<const int> sequence, Rng& rng) {
  MatchState state(instance, adjacency);
  std::vector<int> seen_task(instance.num_tasks(), -1);
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const int j = sequence[t];
    state.record_arrival(j);
    const auto action = policy.on_arrival(static_cast<int>(t), j, state, rng);
    if (static_cast<int>(action.size()) > instance.workers[j].capacity) {
      throw Error(ErrorKind::kFeasibility, std::string(policy.name()) + " matched worker " +
                                               std::to_string(j) + " beyond its capacity");
    }
    for (int e : action) {
      if (e < 0 || e >= instance.num_edges() || instance.edges[e].worker != j) {
        throw Error(ErrorKind::kFeasibility,
                    std::string(policy.name()) + " returned an edge not incident to the arrival");
      }
      const int i = instance.edges[e].task;
      if (seen_task[i] == static_cast<int>(t)) {
        throw Error(ErrorKind::kFeasibility,
                    std::string(policy.name()) + " returned a repeated edge");
      }
      seen_task[i] = static_cast<int>(t);
      state.match(e);
    }
  }
  return {state.allocation(), state.utility()};
}

TrialResult run_trial(const OnlinePolicy& policy, const Instance& instance,
                      std::span<const int> sequence, Rng& rng) {
  const Adjacency adjacency(instance);
  return run_trial(policy, instance, adjacency, sequence, rng);
}

Estimate estimate_performance(const OnlinePolicy& policy, const Instance& instance,
                              long trials, std::uint64_t seed, int threads) {
  const Adjacency adjacency(instance);
  return estimate_mean(trials, seed, threads, [&](long, Rng& rng) {
    const auto seq = sample_arrivals(instance, rng);
    return run_trial(policy, instance, adjacency, seq, rng).utility;
  });
}

namespace {

double binomial_double(int n, int k) {
  double r = 1.0;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

class SequenceSearch {
 public:
  SequenceSearch(const Instance& instance, std::span<const int> sequence)
      : instance_(instance), adjacency_(instance), seq_(sequence.begin(), sequence.end()) {
    double space = 1.0;
    for (int j : seq_) {
      if (j < 0 || j >= instance.num_workers()) {
        throw Error(ErrorKind::kInvalidArgument, "arrival refers to unknown worker");
      }
      const int deg = static_cast<int>(adjacency_.worker_edges[j].size());
      double actions = 0.0;
      for (int k = 0; k <= std::min(deg, instance.workers[j].capacity); ++k) {
        actions += binomial_double(deg, k);
      }
      space *= actions;
    }
    if (space > kMaxSearchSpace) {
      throw Error(ErrorKind::kSearchOverflow,
                  "clairvoyant search space " + std::to_string(space) + " exceeds the limit");
    }
    const std::size_t T = seq_.size();
    future_.assign(T + 1, std::vector<std::uint8_t>(instance.num_workers(), 0));
    for (std::size_t t = T; t-- > 0;) {
      future_[t] = future_[t + 1];
      future_[t][seq_[t]] = 1;
    }
    for (int i = 0; i < instance.num_tasks(); ++i) {
      trackers_.emplace_back(instance_, adjacency_, i);
      remaining_.push_back(instance.tasks[i].capacity);
    }
  }

  double run() {
    best_ = 0.0;
    dfs(0);
    return best_;
  }

 private:
  double current() const {
    double s = 0.0;
    for (const auto& tr : trackers_) s += tr.value();
    return s;
  }

  // Current value plus, per task, the smaller of the gain from adding every
  // future neighbor and the best `remaining` single-worker gains.
  double bound(std::size_t t) const {
    double total = 0.0;
    std::vector<double> gains;
    std::vector<int> extra;
    for (int i = 0; i < instance_.num_tasks(); ++i) {
      const TaskValueTracker& tr = trackers_[i];
      const double v = tr.value();
      total += v;
      const int c = remaining_[i];
      if (c == 0) continue;
      gains.clear();
      extra.clear();
      for (int j : adjacency_.task_neighbors[i]) {
        if (!future_[t][j] || tr.contains(j)) continue;
        gains.push_back(tr.gain(j));
        extra.push_back(j);
      }
      if (gains.empty()) continue;
      const std::size_t take = std::min<std::size_t>(gains.size(), c);
      std::partial_sort(gains.begin(), gains.begin() + take, gains.end(), std::greater<>());
      double top = 0.0;
      for (std::size_t s = 0; s < take; ++s) top += gains[s];
      if (instance_.tasks[i].utility != UtilityKind::kExplicitOracle) {
        TaskValueTracker all = tr;
        for (int j : extra) all.add(j);
        top = std::min(top, all.value() - v);
      }
      total += top;
    }
    return total;
  }

  void dfs(std::size_t t) {
    if (t == seq_.size()) {
      best_ = std::max(best_, current());
      return;
    }
    if (bound(t) <= best_ + 1e-12) return;
    const int j = seq_[t];
    std::vector<int> candidates;
    for (int e : adjacency_.worker_edges[j]) {
      const int i = instance_.edges[e].task;
      if (remaining_[i] > 0 && !trackers_[i].contains(j)) candidates.push_back(i);
    }
    choose(t, j, candidates, 0, instance_.workers[j].capacity);
  }

  void choose(std::size_t t, int j, const std::vector<int>& tasks, std::size_t k, int slots) {
    if (k == tasks.size() || slots == 0) {
      dfs(t + 1);
      return;
    }
    const int i = tasks[k];
    const TaskValueTracker saved = trackers_[i];
    trackers_[i].add(j);
    --remaining_[i];
    choose(t, j, tasks, k + 1, slots - 1);
    ++remaining_[i];
    trackers_[i] = saved;
    choose(t, j, tasks, k + 1, slots);
  }

  const Instance& instance_;
  Adjacency adjacency_;
  std::vector<int> seq_;
  std::vector<std::vector<std::uint8_t>> future_;
  std::vector<TaskValueTracker> trackers_;
  std::vector<int> remaining_;
  double best_ = 0.0;
};

}  // namespace

double per_sequence_optimum(const Instance& instance, std::span<const int> sequence) {
  return SequenceSearch(instance, sequence).run();
}

double offline_optimum(const Instance& instance) {
  std::vector<int> seq(instance.num_workers());
  std::iota(seq.begin(), seq.end(), 0);
  return per_sequence_optimum(instance, seq);
}

std::string to_string(OptMode mode) {
  switch (mode) {
    case OptMode::kNone: return "none";
    case OptMode::kExact: return "exact";
    case OptMode::kMonteCarlo: return "mc";
  }
  return "none";
}

OptMode opt_mode_from_string(const std::string& name) {
  if (name == "none") return OptMode::kNone;
  if (name == "exact") return OptMode::kExact;
  if (name == "mc" || name == "monte_carlo") return OptMode::kMonteCarlo;
  throw Error(ErrorKind::kInvalidArgument, "unknown oracle mode '" + name + "'");
}

Estimate clairvoyant_opt(const Instance& instance, OptMode mode, long trials,
                         std::uint64_t seed, int threads) {
  if (!instance.online()) {
    throw Error(ErrorKind::kInvalidArgument, "clairvoyant optimum needs an online instance");
  }
  const int T = instance.horizon;
  const int n = instance.num_workers();
  if (mode == OptMode::kMonteCarlo) {
    return estimate_mean(trials, seed, threads, [&](long, Rng& rng) {
      return per_sequence_optimum(instance, sample_arrivals(instance, rng));
    });
  }
  if (mode != OptMode::kExact) {
    throw Error(ErrorKind::kInvalidArgument, "clairvoyant_opt needs exact or mc mode");
  }
  if (T * std::log10(static_cast<double>(n)) > std::log10(kMaxExactSequences) + 1e-12) {
    throw Error(ErrorKind::kSearchOverflow,
                "exact oracle needs |J|^T <= 1e6 sequences; got " + std::to_string(n) + "^" +
                    std::to_string(T));
  }
  std::vector<double> log_p(n);
  for (int j = 0; j < n; ++j) log_p[j] = std::log(instance.workers[j].arrival_rate / T);

  // Multisets of size T as count vectors; each stands for T!/prod(c_j!)
  // sequences with the same optimum.
  std::vector<std::vector<int>> multisets;
  std::vector<int> counts(n, 0);
  std::function<void(int, int)> rec = [&](int j, int left) {
    if (j == n - 1) {
      counts[j] = left;
      multisets.push_back(counts);
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[j] = c;
      rec(j + 1, left - c);
    }
  };
  if (n > 0) rec(0, T);

  std::vector<double> terms(multisets.size());
  parallel_for(static_cast<long>(multisets.size()), threads, [&](long k) {
    const auto& c = multisets[k];
    double log_w = std::lgamma(T + 1.0);
    std::vector<int> seq;
    for (int j = 0; j < n; ++j) {
      log_w += c[j] * log_p[j] - std::lgamma(c[j] + 1.0);
      seq.insert(seq.end(), c[j], j);
    }
    terms[k] = std::exp(log_w) * per_sequence_optimum(instance, seq);
  });
  Estimate est;
  est.mean = pairwise_sum(terms);
  est.trials = static_cast<long>(multisets.size());
  return est;
}

std::string to_string(Model model) {
  switch (model) {
    case Model::kOffCcm: return "off-ccm";
    case Model::kOnCcm: return "on-ccm";
    case Model::kOnCsm: return "on-csm";
  }
  return "on-ccm";
}

Model model_from_string(const std::string& name) {
  if (name == "off-ccm") return Model::kOffCcm;
  if (name == "on-ccm") return Model::kOnCcm;
  if (name == "on-csm") return Model::kOnCsm;
  throw Error(ErrorKind::kInvalidArgument, "unknown model '" + name + "'");
}

namespace {

double solve_bound(const Instance& instance, const ReportConfig& config) {
  LpSolution sol;
  switch (config.model) {
    case Model::kOffCcm: sol = solve_max(build_offline_lp(instance).lp); break;
    case Model::kOnCcm: sol = solve_max(build_online_coverage_lp(instance).lp); break;
    case Model::kOnCsm: sol = solve_max(build_config_lp(instance, config.config_max_vars).lp); break;
  }
  if (sol.status != LpStatus::kOptimal) {
    throw Error(ErrorKind::kLpFailure, "benchmark LP: " + to_string(sol.status));
  }
  return sol.objective;
}

double ratio(double num, double den) {
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

RatioReport competitive_ratio_report(const Instance& instance, const ReportConfig& config) {
  const bool offline = config.model == Model::kOffCcm;
  if (offline == instance.online()) {
    throw Error(ErrorKind::kInvalidArgument,
                "model " + to_string(config.model) + " does not match the instance");
  }
  RatioReport report;
  report.model = config.model;
  report.horizon = instance.horizon;
  report.seed = config.seed;
  report.opt = config.opt;

  const double lp = solve_bound(instance, config);
  if (config.opt != OptMode::kNone) {
    if (offline) {
      Estimate e;
      e.mean = offline_optimum(instance);
      e.trials = 1;
      report.opt_value = e;
    } else {
      const long opt_trials = config.opt_trials > 0 ? config.opt_trials : config.trials;
      report.opt_value = clairvoyant_opt(instance, config.opt, opt_trials,
                                         split_seed(config.seed, 0x6f7074), config.threads);
    }
  }

  for (const std::string& name : config.policies) {
    Estimate est;
    if (name == "alg1") {
      if (!offline) throw Error(ErrorKind::kInvalidArgument, "alg1 runs on off-ccm only");
      const Alg1 alg(instance);
      est = estimate_mean(config.trials, config.seed, config.threads, [&](long, Rng& rng) {
        return allocation_utility(instance, alg.round(rng));
      });
    } else {
      if (offline) {
        throw Error(ErrorKind::kInvalidArgument, "policy " + name + " needs an online model");
      }
      std::unique_ptr<OnlinePolicy> policy;
      if (name == "alg2") {
        policy = alg2_policy(instance);
      } else if (name == "alg3") {
        policy = alg3_policy(instance, config.config_max_vars);
      } else if (name == "greedy") {
        policy = greedy_policy(config.greedy_take_zero_gain);
      } else {
        throw Error(ErrorKind::kInvalidArgument, "unknown policy '" + name + "'");
      }
      est = estimate_performance(*policy, instance, config.trials, config.seed, config.threads);
    }
    ReportRow row;
    row.policy = name;
    row.instance_id = config.instance_id;
    row.trials = est.trials;
    row.mean = est.mean;
    row.se = est.se;
    row.lp_bound = lp;
    row.ratio_lp = ratio(est.mean, lp);
    if (report.opt_value) {
      row.opt_estimate = report.opt_value->mean;
      row.ratio_opt = ratio(est.mean, report.opt_value->mean);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string report_csv(const RatioReport& report) {
  std::string out = "policy,instance_id,trials,mean,se,lp_bound,ratio_lp,opt_estimate,ratio_opt\n";
  for (const ReportRow& r : report.rows) {
    out += r.policy + "," + r.instance_id + "," + std::to_string(r.trials) + "," +
           fmt_double(r.mean) + "," + fmt_double(r.se) + "," + fmt_double(r.lp_bound) + "," +
           fmt_double(r.ratio_lp) + "," +
           (r.opt_estimate ? fmt_double(*r.opt_estimate) : std::string()) + "," +
           (r.ratio_opt ? fmt_double(*r.ratio_opt) : std::string()) + "\n";
  }
  return out;
}

std::string report_json(const RatioReport& report) {
  nlohmann::json j;
  j["version"] = kReportVersion;
  j["model"] = to_string(report.model);
  j["horizon"] = report.horizon;
  j["seed"] = report.seed;
  j["opt_mode"] = to_string(report.opt);
  if (report.opt_value) {
    j["opt"] = {{"mean", report.opt_value->mean},
                {"se", report.opt_value->se},
                {"trials", report.opt_value->trials}};
  } else {
    j["opt"] = nullptr;
  }
  j["rows"] = nlohmann::json::array();
  for (const ReportRow& r : report.rows) {
    j["rows"].push_back({{"policy", r.policy},
                         {"instance_id", r.instance_id},
                         {"trials", r.trials},
                         {"mean", json_number(r.mean)},
                         {"se", json_number(r.se)},
                         {"lp_bound", json_number(r.lp_bound)},
                         {"ratio_lp", json_number(r.ratio_lp)},
                         {"opt_estimate", r.opt_estimate ? json_number(*r.opt_estimate) : nullptr},
                         {"ratio_opt", r.ratio_opt ? json_number(*r.ratio_opt) : nullptr}});
  }
  return j.dump(2) + "\n";
}

}  // namespace capcov
