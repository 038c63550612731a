#pragma once

// Dependent rounding of fractional values on the edges of a bipartite graph.
//
// Each output bit Z_e has E[Z_e] = z_e, every vertex ends with degree
// floor or ceil of its fractional degree, and edges sharing a vertex are
// negatively correlated.

#include <cstdint>
#include <span>
#include <vector>

#include "capcov/rng.hpp"

namespace capcov {

inline constexpr double kRoundingSnap = 1e-12;

struct FractionalAssignment {
  int num_left = 0;
  int num_right = 0;
  std::vector<int> left;    // left endpoint per edge
  std::vector<int> right;   // right endpoint per edge
  std::vector<double> value;

  FractionalAssignment() = default;
  // Values are clamped into [0, 1]; endpoints must be in range.
  FractionalAssignment(int num_left, int num_right, std::vector<int> left,
                       std::vector<int> right, std::vector<double> value);

  int num_edges() const { return static_cast<int>(value.size()); }
};

std::vector<std::uint8_t> dependent_round(const FractionalAssignment& fa, Rng& rng);

// Rounding on a star: all values share one hub.
std::vector<std::uint8_t> dependent_round_star(std::span<const double> values, Rng& rng);

}  // namespace capcov
