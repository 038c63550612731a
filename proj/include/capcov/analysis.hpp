#pragma once

// Numerical evaluation of the constants behind the competitive-ratio bounds
// and Monte Carlo cross-checks of the balls-and-bins processes.
//
//   H(q)     = int_0^1 e^{-z} Pr[Pois(z q) <= q] dz
//   H_L(q)   = int_0^1 e^{-z} (1 - exp(-q (1-z)^2 / 2)) dz
//   phi(b,l) = 1 - exp(-1 + (1 - 1/b)^l)
//   Phi(b)   = Pr[Pois(b)=1]/b + sum_{2<=l<b} Pr[Pois(b)=l] phi(b,l)
//              + Pr[Pois(b)>=b] phi(b,b)
//   tau(b)   = (1 - e^{-1+1/e})/2 + (1 - e^{-2+1/b})/4
//              - (1 + e^{-2+1/b}) / sqrt(2 pi (b-2)) - b e^{-b}
//   kappa    = 1 - (1 - 1/b)^l

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "capcov/instance.hpp"
#include "capcov/simulator.hpp"

namespace capcov {

// Poisson law, evaluated in log space. lambda in [0, 1e4].
double poisson_log_pmf(double lambda, long k);
double poisson_pmf(double lambda, long k);
double poisson_cdf(double lambda, long k);  // Pr[X <= k]
double poisson_sf(double lambda, long k);   // Pr[X >= k]

double binomial_cdf(long n, double p, long k);  // Pr[Bin(n, p) <= k]

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of local Richardson error estimates
  long nodes = 0;
};

inline constexpr double kQuadratureTolerance = 1e-11;
inline constexpr long kQuadratureMaxNodes = 1000000;

// Adaptive Simpson on [a, b]. Throws Error(kNonConvergence) past max_nodes.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tolerance = kQuadratureTolerance,
                           long max_nodes = kQuadratureMaxNodes);

QuadratureResult H(int q);
QuadratureResult H_L(double q);
double phi(int b, int ell);
double Phi(int b);
double tau(int b);
double kappa(int b, int ell);

// E[Z] of the two-type balls-and-bins process: each of T rounds draws a
// type-I ball w.p. p/T, a type-II ball w.p. q/T; the bin stops at b balls.
// Z = 1 iff a type-I ball is drawn before the stop.
double bbm1_exact(double p, double q, int b, int T);
Estimate bbm1_simulate(double p, double q, int b, int T, long trials, std::uint64_t seed,
                       int threads = 1);

// Histogram (index 0..b) of A = number of arrivals before the stop when one
// ball arrives per round w.p. b/T and the bin holds b balls.
std::vector<long> bbm2_truncated_arrivals(int b, long trials, std::uint64_t seed,
                                          int T = 10000, int threads = 1);
// Law of min(b, Pois(b)).
std::vector<double> truncated_poisson_law(int b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson goodness of fit; categories with expected count below 5 are
// pooled with their neighbour.
ChiSquareResult chi_square_test(std::span<const long> observed,
                                std::span<const double> probabilities);

// Set-function helpers over full tables (every subset defined).
OracleTable random_coverage_oracle(int n, int universe, Rng& rng);
OracleTable modular_oracle(std::span<const double> weights);

struct SwapRoundingResult {
  Estimate lhs;  // E g(union of l categorical draws from x)
  Estimate rhs;  // E g(union of l independent Bernoulli(x) sets)
  bool exact = false;
};

// Exact enumeration when the ground set has at most 6 elements and l <= 3;
// Monte Carlo otherwise (ground set up to 10).
SwapRoundingResult swap_rounding_check(const OracleTable& g, std::span<const double> x,
                                       int ell, long trials = 0, std::uint64_t seed = 0);

struct ExtensionBounds {
  double multilinear = 0.0;      // G(b x)
  double concave_closure = 0.0;  // g+(x)
  double g_star = 0.0;           // g*(x)
  bool multilinear_ok = false;   // G(b x) >= (1 - e^{-b}) g+(x) - 1e-9
  bool g_star_ok = false;        // g*(x) >= g+(x) - 1e-9
};

ExtensionBounds extension_bounds_check(const OracleTable& g, std::span<const double> x,
                                       double b);

// Utility of each task grouped by A_i, the number of balls (duplicates
// included) matched to it by ALG3, against the conditional lower bounds
// OPT_i phi(b_i, l) (l >= 2) and OPT_i / b_i (l = 1).
struct ConditionalBucket {
  int task = 0;
  int ell = 0;
  long count = 0;
  double mean = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool pass = false;  // mean >= bound - 4 se
};

struct ConditionalReport {
  std::vector<double> opt_task;  // OPT_i = sum_S g_i(S) x*_{i,S}
  std::vector<ConditionalBucket> buckets;
};

ConditionalReport alg3_conditional_check(const Instance& instance, long trials,
                                         std::uint64_t seed, int threads = 1);

struct AnalysisCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
};

struct AnalysisOptions {
  long mc_trials = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct AnalysisReport {
  std::vector<double> h_values;    // H(0..100)
  std::vector<double> phi_values;  // Phi(2..1000), index b - 2
  std::vector<AnalysisCheck> checks;
  bool all_pass() const;
};

inline constexpr int kAnalysisReportVersion = 1;

AnalysisReport run_analysis(const AnalysisOptions& options);
std::string analysis_json(const AnalysisReport& report);

}  // namespace capcov
