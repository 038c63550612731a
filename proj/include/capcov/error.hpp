#pragma once

#include <stdexcept>
#include <string>

namespace capcov {

enum class ErrorKind {
  kInvalidArgument,
  kSchema,            // malformed or mismatched instance file
  kLpSize,            // configuration LP would exceed its variable budget
  kCapacityCap,       // task capacity above the configuration-LP limit
  kSearchOverflow,    // exhaustive oracle would exceed its search budget
  kOracleMiss,        // explicit utility table has no entry for a subset
  kFeasibility,       // a policy produced an infeasible action
  kLpFailure,         // LP solve did not reach optimality
  kNonConvergence,    // quadrature exhausted its node budget
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace capcov
