#pragma once

// Known-IID arrival simulation, clairvoyant optima for tiny instances and
// competitive-ratio estimation.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "capcov/algorithms.hpp"
#include "capcov/instance.hpp"
#include "capcov/rng.hpp"

namespace capcov {

using ArrivalSequence = std::vector<int>;

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
};

// Pairwise (cascade) summation; the result depends only on the order of the
// input, not on how it was produced.
double pairwise_sum(std::span<const double> values);

// Mean and standard error (sample stddev / sqrt(n)) of per-trial values.
Estimate summarize(std::span<const double> values, std::uint64_t seed);

// Runs fn(index) for index in [0, n) on up to `threads` threads. The first
// exception thrown by any call is rethrown on the caller's thread.
template <typename F>
void parallel_for(long n, int threads, F&& fn) {
  const long workers = std::clamp<long>(threads, 1, std::max<long>(n, 1));
  if (workers == 1) {
    for (long k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    constexpr long kChunk = 64;
    for (;;) {
      const long begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      const long end = std::min(n, begin + kChunk);
      try {
        for (long k = begin; k < end; ++k) fn(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (long w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Trial k draws from Rng(split_seed(seed, k)); the result does not depend on
// the thread count.
Estimate estimate_mean(long trials, std::uint64_t seed, int threads,
                       const std::function<double(long trial, Rng& rng)>& sample);

// T independent draws with Pr[type j] = r_j / T.
ArrivalSequence sample_arrivals(const Instance& instance, Rng& rng);

struct TrialResult {
  Allocation allocation;
  double utility = 0.0;
};

// Feeds the sequence to the policy. Any action that is not a set of distinct
// edges incident to the arriving worker, of size at most b_j, on tasks with
// remaining capacity, throws Error(kFeasibility).
TrialResult run_trial(const OnlinePolicy& policy, const Instance& instance,
                      const Adjacency& adjacency, std::span<const int> sequence, Rng& rng);
TrialResult run_trial(const OnlinePolicy& policy, const Instance& instance,
                      std::span<const int> sequence, Rng& rng);

// Each trial samples its own arrival sequence, then runs the policy with the
// same generator.
Estimate estimate_performance(const OnlinePolicy& policy, const Instance& instance,
                              long trials, std::uint64_t seed, int threads = 1);

inline constexpr double kMaxSearchSpace = 1e7;
inline constexpr double kMaxExactSequences = 1e6;

// Best utility over all feasible assignments of the realized arrivals: each
// arrival of j joins at most b_j distinct tasks. Depth-first search over
// per-arrival actions with a submodular upper bound. Throws
// Error(kSearchOverflow) when the action space exceeds kMaxSearchSpace.
double per_sequence_optimum(const Instance& instance, std::span<const int> sequence);

// Offline optimum: every worker available exactly once.
double offline_optimum(const Instance& instance);

enum class OptMode { kNone, kExact, kMonteCarlo };

std::string to_string(OptMode mode);
OptMode opt_mode_from_string(const std::string& name);

// Exact mode sums over arrival multisets with multinomial weights (the
// optimum depends only on the multiset) and needs |J|^T <= 1e6; Monte Carlo
// mode averages per_sequence_optimum over sampled sequences.
Estimate clairvoyant_opt(const Instance& instance, OptMode mode, long trials = 0,
                         std::uint64_t seed = 0, int threads = 1);

enum class Model { kOffCcm, kOnCcm, kOnCsm };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

struct ReportConfig {
  Model model = Model::kOnCcm;
  std::vector<std::string> policies;
  long trials = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
  OptMode opt = OptMode::kNone;
  long opt_trials = 0;  // Monte Carlo mode; 0 reuses `trials`
  std::string instance_id;
  bool greedy_take_zero_gain = true;
  std::int64_t config_max_vars = kDefaultConfigMaxVars;
};

struct ReportRow {
  std::string policy;
  std::string instance_id;
  long trials = 0;
  double mean = 0.0;
  double se = 0.0;
  double lp_bound = 0.0;
  double ratio_lp = 0.0;
  std::optional<double> opt_estimate;
  std::optional<double> ratio_opt;
};

struct RatioReport {
  Model model = Model::kOnCcm;
  int horizon = 0;
  std::uint64_t seed = 0;
  OptMode opt = OptMode::kNone;
  std::optional<Estimate> opt_value;
  std::vector<ReportRow> rows;
};

inline constexpr int kReportVersion = 1;

// Policies: "alg1" (off-ccm), "alg2" (coverage instances), "alg3" (on-csm),
// "greedy" (online models). The LP bound is LP(1), LP(6) or LP(12) by model.
RatioReport competitive_ratio_report(const Instance& instance, const ReportConfig& config);

std::string report_csv(const RatioReport& report);
std::string report_json(const RatioReport& report);

}  // namespace capcov
