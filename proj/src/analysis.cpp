#include "capcov/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "json.hpp"

#include "capcov/benchmarks.hpp"
#include "capcov/error.hpp"
#include "capcov/lpsolver.hpp"

namespace capcov {

namespace {

constexpr double kMaxLambda = 1e4;
constexpr double kTermCutoff = 1e-18;

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || lambda > kMaxLambda) {
    throw Error(ErrorKind::kInvalidArgument,
                "Poisson mean must lie in [0, 1e4], got " + std::to_string(lambda));
  }
}

// sum_{j <= k} pmf(j) for k < lambda, walking down from k.
double poisson_sum_down(double lambda, long k) {
  double term = poisson_pmf(lambda, k);
  double sum = term;
  for (long j = k; j > 0; --j) {
    term *= static_cast<double>(j) / lambda;
    sum += term;
    if (term < sum * kTermCutoff) break;
  }
  return sum;
}

// sum_{j >= k} pmf(j) for k > lambda, walking up from k.
double poisson_sum_up(double lambda, long k) {
  double term = poisson_pmf(lambda, k);
  double sum = term;
  for (long j = k;; ++j) {
    term *= lambda / static_cast<double>(j + 1);
    sum += term;
    if (term < sum * kTermCutoff || term == 0.0) break;
  }
  return sum;
}

}  // namespace

double poisson_log_pmf(double lambda, long k) {
  check_lambda(lambda);
  if (k < 0) return -std::numeric_limits<double>::infinity();
  if (lambda == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const double kd = static_cast<double>(k);
  return -lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0);
}

double poisson_pmf(double lambda, long k) { return std::exp(poisson_log_pmf(lambda, k)); }

double poisson_cdf(double lambda, long k) {
  check_lambda(lambda);
  if (k < 0) return 0.0;
  if (lambda == 0.0) return 1.0;
  if (static_cast<double>(k) < lambda) return poisson_sum_down(lambda, k);
  return 1.0 - poisson_sum_up(lambda, k + 1);
}

double poisson_sf(double lambda, long k) {
  check_lambda(lambda);
  if (k <= 0) return 1.0;
  if (lambda == 0.0) return 0.0;
  if (static_cast<double>(k) > lambda) return poisson_sum_up(lambda, k);
  return 1.0 - poisson_sum_down(lambda, k - 1);
}

double binomial_cdf(long n, double p, long k) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "binomial parameters out of range");
  }
  if (k < 0) return 0.0;
  if (k >= n || p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double lg_n = std::lgamma(n + 1.0);
  double sum = 0.0;
  for (long j = 0; j <= k; ++j) {
    sum += std::exp(lg_n - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * log_p +
                    (n - j) * log_q);
  }
  return std::min(sum, 1.0);
}

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  long max_nodes;
  long nodes = 0;
  double error = 0.0;

  double eval(double x) {
    if (++nodes > max_nodes) {
      throw Error(ErrorKind::kNonConvergence, "quadrature exceeded its node budget");
    }
    return f(x);
  }

  double step(double a, double b, double fa, double fm, double fb, double whole, double tol,
              int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= 4 && (std::abs(delta) <= 15.0 * tol || depth >= 60)) {
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return step(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           step(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tolerance, long max_nodes) {
  Simpson s{f, max_nodes};
  const double fa = s.eval(a);
  const double fb = s.eval(b);
  const double fm = s.eval(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  QuadratureResult r;
  r.value = s.step(a, b, fa, fm, fb, whole, tolerance, 0);
  r.error = s.error;
  r.nodes = s.nodes;
  return r;
}

QuadratureResult H(int q) {
  if (q < 0 || q > 10000) throw Error(ErrorKind::kInvalidArgument, "H(q) needs 0 <= q <= 1e4");
  return integrate(
      [q](double z) { return std::exp(-z) * poisson_cdf(z * q, q); }, 0.0, 1.0);
}

QuadratureResult H_L(double q) {
  if (!(q > 0.0)) throw Error(ErrorKind::kInvalidArgument, "H_L(q) needs q > 0");
  return integrate(
      [q](double z) {
        const double d = 1.0 - z;
        return std::exp(-z) * -std::expm1(-q * d * d / 2.0);
      },
      0.0, 1.0);
}

double phi(int b, int ell) {
  if (b < 1 || ell < 0) throw Error(ErrorKind::kInvalidArgument, "phi needs b >= 1, l >= 0");
  return -std::expm1(-1.0 + std::pow(1.0 - 1.0 / b, ell));
}

double Phi(int b) {
  if (b < 2) throw Error(ErrorKind::kInvalidArgument, "Phi needs b >= 2");
  const double lambda = b;
  double total = poisson_pmf(lambda, 1) / b;
  for (int ell = 2; ell < b; ++ell) total += poisson_pmf(lambda, ell) * phi(b, ell);
  total += poisson_sf(lambda, b) * phi(b, b);
  return total;
}

double tau(int b) {
  if (b < 3) throw Error(ErrorKind::kInvalidArgument, "tau needs b >= 3");
  const double e = std::numbers::e;
  const double c = std::exp(-2.0 + 1.0 / b);
  return 0.5 * (1.0 - std::exp(-1.0 + 1.0 / e)) + 0.25 * (1.0 - c) -
         (1.0 + c) / std::sqrt(2.0 * std::numbers::pi * (b - 2)) - b * std::exp(-b);
}

double kappa(int b, int ell) {
  if (b < 1 || ell < 0) throw Error(ErrorKind::kInvalidArgument, "kappa needs b >= 1, l >= 0");
  return 1.0 - std::pow(1.0 - 1.0 / b, ell);
}

namespace {

void check_bbm(double p, double q, int b, int T) {
  if (!(p >= 0.0) || !(q >= 0.0) || b < 1 || p + q > b + 1e-12 || b > T || T > 10000 ||
      p >= T) {
    throw Error(ErrorKind::kInvalidArgument,
                "balls-and-bins parameters need 0 <= p, q; p + q <= b <= T <= 1e4");
  }
}

// Failures before the first success of a Bernoulli(s) sequence.
long geometric_skip(double s, Rng& rng) {
  if (s >= 1.0) return 0;
  const double u = 1.0 - uniform01(rng);  // (0, 1]
  const double g = std::floor(std::log(u) / std::log1p(-s));
  return g > 1e15 ? static_cast<long>(1e15) : static_cast<long>(g);
}

}  // namespace

double bbm1_exact(double p, double q, int b, int T) {
  check_bbm(p, q, b, T);
  if (p == 0.0) return 0.0;
  const double first = p / T;
  const double type2 = q / (T - p);  // type-II law given no type-I ball
  double total = 0.0;
  double survive = 1.0;  // (1 - p/T)^{t-1}
  for (int t = 1; t <= T; ++t) {
    total += first * survive * binomial_cdf(t - 1, std::min(type2, 1.0), b - 1);
    survive *= 1.0 - first;
  }
  return total;
}

Estimate bbm1_simulate(double p, double q, int b, int T, long trials, std::uint64_t seed,
                       int threads) {
  check_bbm(p, q, b, T);
  const double s = (p + q) / T;
  return estimate_mean(trials, seed, threads, [&](long, Rng& rng) {
    if (s <= 0.0) return 0.0;
    long t = 0;
    int balls = 0;
    for (;;) {
      t += geometric_skip(s, rng) + 1;
      if (t > T) return 0.0;
      if (uniform01(rng) * (p + q) < p) return 1.0;
      if (++balls == b) return 0.0;
    }
  });
}

std::vector<long> bbm2_truncated_arrivals(int b, long trials, std::uint64_t seed, int T,
                                          int threads) {
  if (b < 1 || T < b) throw Error(ErrorKind::kInvalidArgument, "BBM-2 needs 1 <= b <= T");
  const double s = static_cast<double>(b) / T;
  std::vector<int> outcome(trials);
  parallel_for(trials, threads, [&](long k) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(k)));
    long t = 0;
    int a = 0;
    while (a < b) {
      t += geometric_skip(s, rng) + 1;
      if (t > T) break;
      ++a;
    }
    outcome[k] = a;
  });
  std::vector<long> hist(b + 1, 0);
  for (int a : outcome) ++hist[a];
  return hist;
}

std::vector<double> truncated_poisson_law(int b) {
  std::vector<double> law(b + 1);
  for (int k = 0; k < b; ++k) law[k] = poisson_pmf(b, k);
  law[b] = poisson_sf(b, b);
  return law;
}

ChiSquareResult chi_square_test(std::span<const long> observed,
                                std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "chi-square inputs differ in length");
  }
  double n = 0.0;
  for (long o : observed) n += static_cast<double>(o);
  // Pool low-expectation categories left to right.
  std::vector<double> obs;
  std::vector<double> expd;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o_acc += static_cast<double>(observed[k]);
    e_acc += probabilities[k] * n;
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      expd.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (expd.empty()) {
      obs.push_back(o_acc);
      expd.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      expd.back() += e_acc;
    }
  }
  ChiSquareResult r;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const double d = obs[k] - expd[k];
    r.statistic += d * d / expd[k];
  }
  r.dof = static_cast<int>(obs.size()) - 1;
  if (r.dof < 1) return r;
  const boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

OracleTable random_coverage_oracle(int n, int universe, Rng& rng) {
  if (n < 0 || n > kMaxOracleGround || universe < 1) {
    throw Error(ErrorKind::kInvalidArgument, "coverage oracle size out of range");
  }
  std::vector<double> weight(universe);
  for (double& w : weight) w = uniform01(rng);
  std::vector<std::uint32_t> covers(n, 0);
  for (int j = 0; j < n; ++j) {
    while (covers[j] == 0) {
      for (int u = 0; u < universe; ++u) {
        if (uniform01(rng) < 0.5) covers[j] |= 1u << u;
      }
    }
  }
  return tabulate(n, n, [&](std::uint32_t mask) {
    std::uint32_t covered = 0;
    for (int j = 0; j < n; ++j) {
      if ((mask >> j) & 1u) covered |= covers[j];
    }
    double v = 0.0;
    for (int u = 0; u < universe; ++u) {
      if ((covered >> u) & 1u) v += weight[u];
    }
    return v;
  });
}

OracleTable modular_oracle(std::span<const double> weights) {
  const int n = static_cast<int>(weights.size());
  return tabulate(n, n, [&](std::uint32_t mask) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) {
      if ((mask >> j) & 1u) v += weights[j];
    }
    return v;
  });
}

namespace {

void require_full(const OracleTable& g, std::size_t n, int max_n) {
  if (static_cast<int>(n) != g.ground_size || g.ground_size > max_n) {
    throw Error(ErrorKind::kInvalidArgument, "vector length must match a ground set of at most " +
                                                 std::to_string(max_n));
  }
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!g.defined(mask)) throw Error(ErrorKind::kOracleMiss, "set function table is partial");
  }
}

}  // namespace

SwapRoundingResult swap_rounding_check(const OracleTable& g, std::span<const double> x,
                                       int ell, long trials, std::uint64_t seed) {
  const int n = static_cast<int>(x.size());
  require_full(g, x.size(), 10);
  if (ell < 1) throw Error(ErrorKind::kInvalidArgument, "l must be at least 1");
  double total = 0.0;
  for (double v : x) {
    if (v < 0.0 || v > 1.0) throw Error(ErrorKind::kInvalidArgument, "x must lie in [0,1]");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidArgument, "x must be a probability vector");
  }

  SwapRoundingResult out;
  if (n <= 6 && ell <= 3) {
    out.exact = true;
    // lhs: all n^l draw tuples.
    long tuples = 1;
    for (int t = 0; t < ell; ++t) tuples *= n;
    double lhs = 0.0;
    for (long code = 0; code < tuples; ++code) {
      long c = code;
      double prob = 1.0;
      std::uint32_t mask = 0;
      for (int t = 0; t < ell; ++t) {
        const int j = static_cast<int>(c % n);
        c /= n;
        prob *= x[j];
        mask |= 1u << j;
      }
      if (prob > 0.0) lhs += prob * g.at(mask);
    }
    // rhs: element j present with probability 1 - (1 - x_j)^l, independently.
    std::vector<double> incl(n);
    for (int j = 0; j < n; ++j) incl[j] = 1.0 - std::pow(1.0 - x[j], ell);
    double rhs = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      double prob = 1.0;
      for (int j = 0; j < n; ++j) prob *= ((mask >> j) & 1u) ? incl[j] : 1.0 - incl[j];
      if (prob > 0.0) rhs += prob * g.at(mask);
    }
    out.lhs.mean = lhs;
    out.rhs.mean = rhs;
    return out;
  }

  if (trials < 2) throw Error(ErrorKind::kInvalidArgument, "Monte Carlo mode needs trials >= 2");
  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) cumulative[j] = acc += x[j];
  out.lhs = estimate_mean(trials, seed, 1, [&](long, Rng& rng) {
    std::uint32_t mask = 0;
    for (int t = 0; t < ell; ++t) {
      const double u = uniform01(rng) * acc;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      mask |= 1u << std::min<std::ptrdiff_t>(it - cumulative.begin(), n - 1);
    }
    return g.at(mask);
  });
  out.rhs = estimate_mean(trials, split_seed(seed, 0x726873), 1, [&](long, Rng& rng) {
    std::uint32_t mask = 0;
    for (int t = 0; t < ell; ++t) {
      for (int j = 0; j < n; ++j) {
        if (uniform01(rng) < x[j]) mask |= 1u << j;
      }
    }
    return g.at(mask);
  });
  return out;
}

ExtensionBounds extension_bounds_check(const OracleTable& g, std::span<const double> x,
                                       double b) {
  const int n = static_cast<int>(x.size());
  require_full(g, x.size(), 8);
  if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "b must lie in [0,1]");
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "x must lie in [0,1]");
  }
  const std::uint32_t full = 1u << n;
  ExtensionBounds out;

  for (std::uint32_t mask = 0; mask < full; ++mask) {
    double prob = 1.0;
    for (int j = 0; j < n; ++j) {
      const double p = b * x[j];
      prob *= ((mask >> j) & 1u) ? p : 1.0 - p;
    }
    out.multilinear += prob * g.at(mask);
  }

  // Concave closure: best distribution over subsets with marginals x.
  LinearProgram lp;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    lp.add_variable("p_" + std::to_string(mask), 0.0, 1.0, g.at(mask));
  }
  std::vector<double> ones(full, 1.0);
  std::vector<double> neg_ones(full, -1.0);
  lp.add_dense_row(ones, 1.0, "mass_le");
  lp.add_dense_row(neg_ones, -1.0, "mass_ge");
  for (int j = 0; j < n; ++j) {
    std::vector<double> row(full, 0.0);
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      if ((mask >> j) & 1u) row[mask] = 1.0;
    }
    std::vector<double> neg(row);
    for (double& v : neg) v = -v;
    lp.add_dense_row(std::move(row), x[j], "marg_le_" + std::to_string(j));
    lp.add_dense_row(std::move(neg), -x[j], "marg_ge_" + std::to_string(j));
  }
  const LpSolution sol = solve_max(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw Error(ErrorKind::kLpFailure, "concave closure LP: " + to_string(sol.status));
  }
  out.concave_closure = sol.objective;

  out.g_star = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    const double base = g.at(mask);
    double v = base;
    for (int j = 0; j < n; ++j) {
      if (!((mask >> j) & 1u)) v += x[j] * (g.at(mask | (1u << j)) - base);
    }
    out.g_star = std::min(out.g_star, v);
  }

  out.multilinear_ok = out.multilinear >= -std::expm1(-b) * out.concave_closure - 1e-9;
  out.g_star_ok = out.g_star >= out.concave_closure - 1e-9;
  return out;
}

ConditionalReport alg3_conditional_check(const Instance& instance, long trials,
                                         std::uint64_t seed, int threads) {
  const ConfigLp model = build_config_lp(instance);
  const LpSolution sol = solve_max(model.lp);
  if (sol.status != LpStatus::kOptimal) {
    throw Error(ErrorKind::kLpFailure, "configuration LP: " + to_string(sol.status));
  }
  ConditionalReport report;
  const int m = instance.num_tasks();
  report.opt_task.assign(m, 0.0);
  for (const ConfigurationSet& c : model.configs) {
    report.opt_task[c.task] += c.value * sol.values[c.var];
  }
  const StarRoundingPolicy policy(
      instance, marginals_from_config(model, sol, instance.num_edges()), sol.objective,
      /*skip_matched_edges=*/false, "alg3");
  const Adjacency adjacency(instance);

  std::vector<int> balls(static_cast<std::size_t>(trials) * m);
  std::vector<double> value(static_cast<std::size_t>(trials) * m);
  parallel_for(trials, threads, [&](long k) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(k)));
    const auto seq = sample_arrivals(instance, rng);
    const TrialResult r = run_trial(policy, instance, adjacency, seq, rng);
    for (int i = 0; i < m; ++i) {
      int load = 0;
      std::vector<int> members;
      for (int e : adjacency.task_edges[i]) {
        load += r.allocation.edge_count[e];
        if (r.allocation.edge_count[e] > 0) members.push_back(instance.edges[e].worker);
      }
      balls[k * m + i] = load;
      value[k * m + i] = utility_value(instance, i, members);
    }
  });

  for (int i = 0; i < m; ++i) {
    const int b = instance.tasks[i].capacity;
    for (int ell = 1; ell <= b; ++ell) {
      std::vector<double> bucket;
      for (long k = 0; k < trials; ++k) {
        if (balls[k * m + i] == ell) bucket.push_back(value[k * m + i]);
      }
      const Estimate est = summarize(bucket, seed);
      ConditionalBucket cb;
      cb.task = i;
      cb.ell = ell;
      cb.count = est.trials;
      cb.mean = est.mean;
      cb.se = est.se;
      cb.bound = ell == 1 ? report.opt_task[i] / b : report.opt_task[i] * phi(b, ell);
      cb.pass = cb.count == 0 || cb.mean >= cb.bound - 4.0 * cb.se;
      report.buckets.push_back(cb);
    }
  }
  return report;
}

bool AnalysisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const AnalysisCheck& c) { return c.pass; });
}

namespace {

double floor3(double v) { return std::floor(v * 1000.0) / 1000.0; }

}  // namespace

AnalysisReport run_analysis(const AnalysisOptions& options) {
  AnalysisReport rep;
  auto add = [&](std::string name, double value, double bound, bool pass, std::string detail = {}) {
    rep.checks.push_back({std::move(name), value, bound, pass, std::move(detail)});
  };

  for (int q = 0; q <= 100; ++q) rep.h_values.push_back(H(q).value);
  const double h2_closed = (19.0 - 67.0 / std::exp(3.0)) / 27.0;
  add("H(2) closed form", rep.h_values[2], h2_closed, std::abs(rep.h_values[2] - h2_closed) <= 1e-9,
      "|H(2) - (19 - 67/e^3)/27| <= 1e-9");
  const auto h_min = std::min_element(rep.h_values.begin(), rep.h_values.end());
  add("argmin H(q), q in 0..100", static_cast<double>(h_min - rep.h_values.begin()), 2.0,
      h_min - rep.h_values.begin() == 2);

  const double hl100 = H_L(100).value;
  add("H_L(100)", hl100, 0.582, hl100 >= 0.582);
  bool hl_increasing = true;
  bool h_ge_hl = true;
  double prev = -1.0;
  for (int q = 1; q <= 200; ++q) {
    const double hl = H_L(q).value;
    if (hl <= prev) hl_increasing = false;
    prev = hl;
    const double h = q <= 100 ? rep.h_values[q] : H(q).value;
    if (h < hl - 1e-10) h_ge_hl = false;
  }
  add("H_L increasing on 1..200", hl_increasing ? 1 : 0, 1, hl_increasing);
  add("H(q) >= H_L(q) on 1..200", h_ge_hl ? 1 : 0, 1, h_ge_hl);

  for (int b = 2; b <= 1000; ++b) rep.phi_values.push_back(Phi(b));
  const auto p_min = std::min_element(rep.phi_values.begin(), rep.phi_values.end());
  const int p_arg = static_cast<int>(p_min - rep.phi_values.begin()) + 2;
  add("argmin Phi(b), b in 2..1000", p_arg, 4, p_arg == 4);
  add("min Phi(b) to 3 decimals", floor3(*p_min), 0.436, floor3(*p_min) == 0.436,
      "truncated to 3 decimals");
  add("Phi(b) >= 0.436 on 2..1000", *p_min, 0.436, *p_min >= 0.436);

  const double t1000 = tau(1000);
  add("tau(1000) to 3 decimals", floor3(t1000), 0.436, floor3(t1000) == 0.436,
      "truncated to 3 decimals");
  bool tau_inc = true;
  for (int b = 4; b <= 2000; ++b) {
    if (tau(b) <= tau(b - 1)) tau_inc = false;
  }
  add("tau increasing on 3..2000", tau_inc ? 1 : 0, 1, tau_inc);
  bool phi_ge_tau = true;
  for (int b = 10; b <= 1000; ++b) {
    if (rep.phi_values[b - 2] < tau(b)) phi_ge_tau = false;
  }
  add("Phi(b) >= tau(b) on 10..1000", phi_ge_tau ? 1 : 0, 1, phi_ge_tau);
  const double half_limit = 0.5 * (1.0 - std::exp(-1.0 + 1.0 / std::numbers::e));
  add("(1 - e^{-1+1/e})/2", half_limit, 0.234, half_limit >= 0.234);

  bool median_ok = true;
  for (int b = 1; b <= 1000; ++b) {
    if (poisson_cdf(b, b) < 0.5) median_ok = false;
  }
  add("Pr[Pois(b) <= b] >= 1/2 on 1..1000", median_ok ? 1 : 0, 1, median_ok);

  bool mode_median_ok = true;
  for (int b = 3; b <= 1000; ++b) {
    const double mu = b * (1.0 - 1.0 / b) * (1.0 - 1.0 / b);
    long mode = 0;
    for (long k = 1; k <= 2L * b; ++k) {
      if (poisson_log_pmf(mu, k) > poisson_log_pmf(mu, mode)) mode = k;
    }
    long median = 0;
    while (poisson_cdf(mu, median) < 0.5) ++median;
    if (mode != b - 2 || median != b - 2) mode_median_ok = false;
  }
  add("mode and median of Pois(b(1-1/b)^2) equal b-2 on 3..1000", mode_median_ok ? 1 : 0, 1,
      mode_median_ok);

  bool tail_ok = true;
  for (int q = 1; q <= 200; ++q) {
    for (int s = 1; s < 20; ++s) {
      const double z = s / 20.0;
      const double lhs = poisson_sf(z * q, q + 1);
      const double rhs = std::exp(-q * (1.0 - z) * (1.0 - z) / 2.0);
      if (lhs > rhs + 1e-15) tail_ok = false;
    }
  }
  add("Pr[Pois(zq) > q] <= exp(-q(1-z)^2/2) grid", tail_ok ? 1 : 0, 1, tail_ok);

  const struct {
    double p, q;
    int b;
  } grid[] = {{1, 0, 1},   {1, 1, 2},   {0.5, 1.5, 2}, {1, 2, 3},   {1.5, 1.5, 3},
              {2, 1, 3},   {0.3, 2.7, 3}, {1, 3, 4},   {2.5, 2.5, 5}, {0.8, 4, 5},
              {1, 4, 5},   {3, 0, 3}};
  constexpr int kGridT = 1000;
  int grid_index = 0;
  for (const auto& g : grid) {
    const double exact = bbm1_exact(g.p, g.q, g.b, kGridT);
    const Estimate sim = bbm1_simulate(g.p, g.q, g.b, kGridT, options.mc_trials,
                                       split_seed(options.seed, 100 + grid_index++),
                                       options.threads);
    const double dev = std::abs(sim.mean - exact);
    add("BBM exact vs simulated p=" + std::to_string(g.p) + " q=" + std::to_string(g.q) +
            " b=" + std::to_string(g.b),
        sim.mean, exact, dev <= 4.0 * sim.se + 1e-12, "within 4 SE, T=1000");
  }
  for (int b = 2; b <= 4; ++b) {
    const double exact = bbm1_exact(1.0, b - 1.0, b, 2000);
    const double h = rep.h_values[b - 1];
    add("BBM exact(1, b-1, b, 2000) vs H(b-1), b=" + std::to_string(b), exact, h,
        std::abs(exact - h) <= 2e-3, "within 2e-3");
  }

  for (int b : {1, 2, 3, 5}) {
    const auto hist = bbm2_truncated_arrivals(b, options.mc_trials,
                                              split_seed(options.seed, 200 + b), 10000,
                                              options.threads);
    const auto law = truncated_poisson_law(b);
    const ChiSquareResult chi = chi_square_test(hist, law);
    add("BBM-2 arrivals vs min(b, Pois(b)), b=" + std::to_string(b), chi.p_value, 0.001,
        chi.p_value >= 0.001, "chi-square p-value");
  }
  return rep;
}

std::string analysis_json(const AnalysisReport& report) {
  nlohmann::json j;
  j["version"] = kAnalysisReportVersion;
  j["H"] = report.h_values;
  nlohmann::json phi_obj = nlohmann::json::object();
  for (std::size_t k = 0; k < report.phi_values.size(); ++k) {
    phi_obj[std::to_string(k + 2)] = report.phi_values[k];
  }
  j["Phi"] = phi_obj;
  j["checks"] = nlohmann::json::array();
  for (const AnalysisCheck& c : report.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"bound", c.bound},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  }
  j["all_pass"] = report.all_pass();
  return j.dump(2) + "\n";
}

}  // namespace capcov
