#pragma once

// Dense maximization LPs:  max c.x  s.t.  A x <= b,  lo <= x <= hi,
// with every bound finite. Solved by a two-phase bounded-variable primal
// simplex on a dense tableau.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "capcov/kernels.hpp"

namespace capcov {

struct LinearProgram {
  std::vector<std::string> names;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> objective;

  struct Row {
    std::vector<double> coeffs;  // dense, one entry per variable
    double rhs = 0.0;
    std::string name;
  };
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(names.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_variable(std::string name, double lo, double hi, double obj);
  // Row with the given sparse entries; other coefficients are zero.
  void add_row(std::span<const int> vars, std::span<const double> coeffs, double rhs,
               std::string name = {});
  void add_dense_row(std::vector<double> coeffs, double rhs, std::string name = {});
};

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  std::vector<double> values;
  double objective = 0.0;
  long iterations = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-9;
  double feasibility_tolerance = 1e-9;
  int degenerate_pivots_before_bland = 30;
  long max_iterations = 0;  // 0 picks a size-based default
  // Kernel table for the tableau updates; nullptr uses kernels::active().
  const kernels::KernelTable* kernels = nullptr;
};

// Throws Error(kInvalidArgument) on non-finite bounds or mismatched row width.
LpSolution solve_max(const LinearProgram& lp, const SimplexOptions& options = {});

// Exact optimum with the listed variables restricted to {0, 1}; remaining
// variables are continuous. Depth-first branch and bound over LP relaxations.
LpSolution solve_ip_bruteforce(const LinearProgram& lp, std::span<const int> integral_vars);

inline constexpr std::size_t kMaxBruteForceIntegralVars = 25;

// Largest violation of any row or bound by `values`.
double max_violation(const LinearProgram& lp, std::span<const double> values);

// Fixed-width text dump for debugging; format documented in the README.
std::string dump_text(const LinearProgram& lp);

}  // namespace capcov
