#include "capcov/lpsolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "capcov/error.hpp"
#include "capcov/kernels.hpp"

namespace capcov {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

int LinearProgram::add_variable(std::string name, double lo, double hi, double obj) {
  names.push_back(std::move(name));
  lower.push_back(lo);
  upper.push_back(hi);
  objective.push_back(obj);
  for (Row& row : rows) row.coeffs.push_back(0.0);
  return num_vars() - 1;
}

void LinearProgram::add_row(std::span<const int> vars, std::span<const double> coeffs,
                            double rhs, std::string name) {
  if (vars.size() != coeffs.size()) {
    throw Error(ErrorKind::kInvalidArgument, "row index/coefficient length mismatch");
  }
  Row row;
  row.coeffs.assign(num_vars(), 0.0);
  for (std::size_t k = 0; k < vars.size(); ++k) row.coeffs.at(vars[k]) += coeffs[k];
  row.rhs = rhs;
  row.name = std::move(name);
  rows.push_back(std::move(row));
}

void LinearProgram::add_dense_row(std::vector<double> coeffs, double rhs, std::string name) {
  rows.push_back({std::move(coeffs), rhs, std::move(name)});
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

double max_violation(const LinearProgram& lp, std::span<const double> values) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j) {
    worst = std::max({worst, lp.lower[j] - values[j], values[j] - lp.upper[j]});
  }
  for (const auto& row : lp.rows) {
    double lhs = 0.0;
    for (int j = 0; j < lp.num_vars(); ++j) lhs += row.coeffs[j] * values[j];
    worst = std::max(worst, lhs - row.rhs);
  }
  return worst;
}

namespace {

// Bounded-variable primal simplex on a dense tableau. All structural columns
// are shifted to [0, u]; each row gets a slack, and rows whose shifted rhs is
// negative are negated and given an artificial for phase one.
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp),
        opt_(options),
        k_(options.kernels != nullptr ? *options.kernels : kernels::active()),
        n_(lp.num_vars()),
        m_(lp.num_rows()) {
    shifted_rhs_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      double r = lp.rows[i].rhs;
      for (int j = 0; j < n_; ++j) r -= lp.rows[i].coeffs[j] * lp.lower[j];
      shifted_rhs_[i] = r;
      if (r < 0.0) ++num_art_;
    }
    width_ = n_ + m_ + num_art_;
    tab_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
    ub_.assign(width_, kInf);
    at_upper_.assign(width_, 0);
    sign_.assign(width_, 0.0);
    beta_.assign(m_, 0.0);
    basis_.assign(m_, -1);
    for (int j = 0; j < n_; ++j) ub_[j] = lp.upper[j] - lp.lower[j];

    int art = n_ + m_;
    for (int i = 0; i < m_; ++i) {
      double* row = row_ptr(i);
      const double sigma = shifted_rhs_[i] < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < n_; ++j) row[j] = sigma * lp.rows[i].coeffs[j];
      row[n_ + i] = sigma;
      beta_[i] = sigma * shifted_rhs_[i];
      if (sigma < 0.0) {
        row[art] = 1.0;
        basis_[i] = art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
    max_iterations_ = opt_.max_iterations > 0
                          ? opt_.max_iterations
                          : std::max<long>(20000, 50L * (m_ + width_));
  }

  LpSolution solve() {
    LpSolution out;
    for (int j = 0; j < n_; ++j) {
      if (ub_[j] < -opt_.feasibility_tolerance) {
        out.status = LpStatus::kInfeasible;
        return out;
      }
      ub_[j] = std::max(0.0, ub_[j]);
    }

    if (num_art_ > 0) {
      std::vector<double> phase1(width_, 0.0);
      for (int a = n_ + m_; a < width_; ++a) phase1[a] = -1.0;
      reset_pricing(phase1, /*allow_artificial=*/true);
      if (!iterate()) {
        out.status = LpStatus::kIterationLimit;
        out.iterations = iterations_;
        return out;
      }
      refresh_basic_values();
      double infeasibility = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] >= n_ + m_) infeasibility += std::max(0.0, beta_[i]);
      }
      if (infeasibility > opt_.feasibility_tolerance * std::max(1.0, rhs_scale())) {
        out.status = LpStatus::kInfeasible;
        out.iterations = iterations_;
        return out;
      }
      for (int a = n_ + m_; a < width_; ++a) ub_[a] = 0.0;
    }

    std::vector<double> phase2(width_, 0.0);
    for (int j = 0; j < n_; ++j) phase2[j] = lp_.objective[j];
    reset_pricing(phase2, /*allow_artificial=*/false);
    if (!iterate()) {
      out.status = LpStatus::kIterationLimit;
      out.iterations = iterations_;
      return out;
    }
    refresh_basic_values();

    std::vector<double> shifted(width_, 0.0);
    for (int j = 0; j < width_; ++j) {
      if (at_upper_[j]) shifted[j] = ub_[j];
    }
    for (int i = 0; i < m_; ++i) shifted[basis_[i]] = beta_[i];
    out.values.resize(n_);
    out.objective = 0.0;
    for (int j = 0; j < n_; ++j) {
      out.values[j] = std::clamp(lp_.lower[j] + shifted[j], lp_.lower[j], lp_.upper[j]);
      out.objective += lp_.objective[j] * out.values[j];
    }
    out.status = LpStatus::kOptimal;
    out.iterations = iterations_;
    return out;
  }

 private:
  double* row_ptr(int i) { return tab_.data() + static_cast<std::size_t>(i) * width_; }
  double& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * width_ + j]; }

  double rhs_scale() const {
    double s = 0.0;
    for (double r : shifted_rhs_) s = std::max(s, std::abs(r));
    return s;
  }

  bool is_artificial(int col) const { return col >= n_ + m_; }

  void update_sign(int col) {
    if (is_artificial(col) && !allow_artificial_) {
      sign_[col] = 0.0;
    } else if (at_upper_[col]) {
      sign_[col] = -1.0;
    } else {
      sign_[col] = ub_[col] > 0.0 ? 1.0 : 0.0;
    }
  }

  // Reduced costs d = c - c_B^T B^{-1} A for a new objective.
  void reset_pricing(const std::vector<double>& cost, bool allow_artificial) {
    allow_artificial_ = allow_artificial;
    reduced_ = cost;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb != 0.0) {
        k_.axpy(-cb, row_ptr(i), reduced_.data(), width_);
      }
    }
    for (int j = 0; j < width_; ++j) update_sign(j);
    for (int i = 0; i < m_; ++i) {
      reduced_[basis_[i]] = 0.0;
      sign_[basis_[i]] = 0.0;
    }
    degenerate_run_ = 0;
    bland_ = false;
  }

  // Recomputes basic values from B^{-1}, read off the slack columns.
  void refresh_basic_values() {
    std::vector<double> w(shifted_rhs_);
    for (int j = 0; j < n_; ++j) {
      if (!at_upper_[j]) continue;
      for (int k = 0; k < m_; ++k) w[k] -= lp_.rows[k].coeffs[j] * ub_[j];
    }
    for (int i = 0; i < m_; ++i) {
      const double* row = row_ptr(i);
      double v = 0.0;
      for (int k = 0; k < m_; ++k) v += row[n_ + k] * w[k];
      beta_[i] = v;
    }
  }

  int choose_entering() {
    if (bland_) {
      return static_cast<int>(
          k_.first_above(reduced_.data(), sign_.data(), opt_.pivot_tolerance, width_));
    }
    const auto best = k_.argmax_signed(reduced_.data(), sign_.data(), width_);
    return best.value > opt_.pivot_tolerance ? static_cast<int>(best.index) : -1;
  }

  // Returns false on hitting the iteration limit.
  bool iterate() {
    constexpr double kRatioTie = 1e-12;
    while (true) {
      if (iterations_ >= max_iterations_) return false;
      const int q = choose_entering();
      if (q < 0) return true;
      ++iterations_;
      const double dir = sign_[q];

      double theta_rows = kInf;
      for (int i = 0; i < m_; ++i) {
        const double r = dir * at(i, q);
        const double lim = row_limit(i, r);
        theta_rows = std::min(theta_rows, lim);
      }
      int leave_row = -1;
      if (theta_rows < kInf) {
        double best_alpha = -1.0;
        int best_var = std::numeric_limits<int>::max();
        for (int i = 0; i < m_; ++i) {
          const double r = dir * at(i, q);
          const double lim = row_limit(i, r);
          if (lim > theta_rows + kRatioTie) continue;
          if (bland_) {
            if (basis_[i] < best_var) {
              best_var = basis_[i];
              leave_row = i;
            }
          } else if (std::abs(r) > best_alpha) {
            best_alpha = std::abs(r);
            leave_row = i;
          }
        }
      }
      const double theta_flip = ub_[q];
      if (leave_row < 0 && theta_flip == kInf) {
        throw Error(ErrorKind::kLpFailure, "LP is unbounded; every bound must be finite");
      }

      double theta;
      if (leave_row < 0 || theta_flip <= theta_rows) {
        theta = theta_flip;
        for (int i = 0; i < m_; ++i) beta_[i] -= dir * theta * at(i, q);
        at_upper_[q] = at_upper_[q] ? 0 : 1;
        update_sign(q);
      } else {
        const double r = dir * at(leave_row, q);
        theta = std::max(0.0, row_limit(leave_row, r));
        const bool leaves_at_upper = r < 0.0;
        for (int i = 0; i < m_; ++i) beta_[i] -= dir * theta * at(i, q);
        const double entering_value = at_upper_[q] ? ub_[q] - theta : theta;
        pivot(leave_row, q);
        const int leaving = basis_[leave_row];
        basis_[leave_row] = q;
        beta_[leave_row] = entering_value;
        at_upper_[q] = 0;
        sign_[q] = 0.0;
        at_upper_[leaving] = leaves_at_upper ? 1 : 0;
        update_sign(leaving);
      }

      if (theta <= 1e-12) {
        if (++degenerate_run_ >= opt_.degenerate_pivots_before_bland) bland_ = true;
      } else {
        degenerate_run_ = 0;
        bland_ = false;
      }
      if (iterations_ % 100 == 0) refresh_basic_values();
    }
  }

  double row_limit(int i, double r) const {
    const int var = basis_[i];
    if (r > opt_.pivot_tolerance) return std::max(0.0, beta_[i] / r);
    if (r < -opt_.pivot_tolerance && ub_[var] < kInf) {
      return std::max(0.0, (ub_[var] - beta_[i]) / -r);
    }
    return kInf;
  }

  void pivot(int r, int q) {
    double* prow = row_ptr(r);
    k_.scale(1.0 / prow[q], prow, width_);
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = row_ptr(i);
      const double factor = row[q];
      if (factor == 0.0) continue;
      k_.axpy(-factor, prow, row, width_);
      row[q] = 0.0;
    }
    const double dq = reduced_[q];
    if (dq != 0.0) k_.axpy(-dq, prow, reduced_.data(), width_);
    reduced_[q] = 0.0;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  const kernels::KernelTable& k_;
  int n_;
  int m_;
  int num_art_ = 0;
  int width_ = 0;
  std::vector<double> tab_;
  std::vector<double> shifted_rhs_;
  std::vector<double> ub_;
  std::vector<char> at_upper_;
  std::vector<double> sign_;
  std::vector<double> reduced_;
  std::vector<double> beta_;
  std::vector<int> basis_;
  bool allow_artificial_ = true;
  bool bland_ = false;
  int degenerate_run_ = 0;
  long iterations_ = 0;
  long max_iterations_ = 0;
};

void check_program(const LinearProgram& lp) {
  const std::size_t n = lp.names.size();
  if (lp.lower.size() != n || lp.upper.size() != n || lp.objective.size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "LP variable arrays disagree in length");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j]) || !std::isfinite(lp.upper[j])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "variable '" + lp.names[j] + "' has a non-finite bound");
    }
  }
  for (const auto& row : lp.rows) {
    if (row.coeffs.size() != n) {
      throw Error(ErrorKind::kInvalidArgument, "constraint width differs from variable count");
    }
    if (!std::isfinite(row.rhs)) {
      throw Error(ErrorKind::kInvalidArgument, "constraint has a non-finite right-hand side");
    }
  }
}

}  // namespace

LpSolution solve_max(const LinearProgram& lp, const SimplexOptions& options) {
  check_program(lp);
  Tableau tableau(lp, options);
  return tableau.solve();
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const LinearProgram& lp, std::span<const int> integral)
      : work_(lp), integral_(integral.begin(), integral.end()) {}

  LpSolution run() {
    explore();
    if (!best_) {
      LpSolution none;
      none.status = LpStatus::kInfeasible;
      none.iterations = iterations_;
      return none;
    }
    best_->iterations = iterations_;
    return *best_;
  }

 private:
  void explore() {
    LpSolution node = solve_max(work_);
    iterations_ += node.iterations;
    if (node.status == LpStatus::kIterationLimit) {
      throw Error(ErrorKind::kLpFailure, "LP relaxation hit the iteration limit");
    }
    if (node.status != LpStatus::kOptimal) return;
    if (best_ && node.objective <= best_->objective + 1e-9) return;

    for (int var : integral_) {
      const double v = node.values[var];
      if (std::abs(v - std::round(v)) <= 1e-9) continue;
      branch(var, 1.0);
      branch(var, 0.0);
      return;
    }
    // Integral on every listed variable: snap and re-solve with them fixed.
    const auto saved_lo = work_.lower;
    const auto saved_hi = work_.upper;
    for (int var : integral_) {
      const double v = std::round(node.values[var]);
      work_.lower[var] = work_.upper[var] = v;
    }
    LpSolution leaf = solve_max(work_);
    iterations_ += leaf.iterations;
    work_.lower = saved_lo;
    work_.upper = saved_hi;
    if (leaf.status == LpStatus::kOptimal &&
        (!best_ || leaf.objective > best_->objective)) {
      best_ = std::move(leaf);
    }
  }

  void branch(int var, double value) {
    const double lo = work_.lower[var];
    const double hi = work_.upper[var];
    if (value < lo - 1e-12 || value > hi + 1e-12) return;
    work_.lower[var] = work_.upper[var] = value;
    explore();
    work_.lower[var] = lo;
    work_.upper[var] = hi;
  }

  LinearProgram work_;
  std::vector<int> integral_;
  std::optional<LpSolution> best_;
  long iterations_ = 0;
};

}  // namespace

LpSolution solve_ip_bruteforce(const LinearProgram& lp, std::span<const int> integral_vars) {
  check_program(lp);
  if (integral_vars.size() > kMaxBruteForceIntegralVars) {
    throw Error(ErrorKind::kInvalidArgument,
                "too many integral variables for exhaustive search (" +
                    std::to_string(integral_vars.size()) + " > " +
                    std::to_string(kMaxBruteForceIntegralVars) + ")");
  }
  for (int var : integral_vars) {
    if (var < 0 || var >= lp.num_vars()) {
      throw Error(ErrorKind::kInvalidArgument, "integral variable index out of range");
    }
  }
  return BranchAndBound(lp, integral_vars).run();
}

std::string dump_text(const LinearProgram& lp) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %d\n%-8s %d\n", "VARS", lp.num_vars(), "ROWS",
                lp.num_rows());
  out += line;
  for (int j = 0; j < lp.num_vars(); ++j) {
    std::snprintf(line, sizeof line, "%-8s %6d %-24s %14.8g %14.8g %14.8g\n", "VAR", j,
                  lp.names[j].c_str(), lp.lower[j], lp.upper[j], lp.objective[j]);
    out += line;
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.rows[i];
    std::snprintf(line, sizeof line, "%-8s %6d %-24s %14.8g\n", "ROW", i, row.name.c_str(),
                  row.rhs);
    out += line;
    for (int j = 0; j < lp.num_vars(); ++j) {
      if (row.coeffs[j] == 0.0) continue;
      std::snprintf(line, sizeof line, "%-8s %6d %-24s %14.8g\n", "  COEF", j,
                    lp.names[j].c_str(), row.coeffs[j]);
      out += line;
    }
  }
  return out;
}

}  // namespace capcov
