#include "capcov/rounding.hpp"

#include <algorithm>
#include <cmath>

#include "capcov/error.hpp"

namespace capcov {

namespace {

double snap(double z) {
  if (z <= kRoundingSnap) return 0.0;
  if (z >= 1.0 - kRoundingSnap) return 1.0;
  return z;
}

bool fractional(double z) { return z > 0.0 && z < 1.0; }

// One randomized shift on an alternating edge sequence: the even positions
// form M1 and the odd positions M2.
void shift(std::span<const int> walk, std::vector<double>& z, Rng& rng) {
  double alpha = 1.0;
  double beta = 1.0;
  for (std::size_t t = 0; t < walk.size(); ++t) {
    const double v = z[walk[t]];
    if (t % 2 == 0) {
      alpha = std::min(alpha, 1.0 - v);
      beta = std::min(beta, v);
    } else {
      alpha = std::min(alpha, v);
      beta = std::min(beta, 1.0 - v);
    }
  }
  const bool up = uniform01(rng) * (alpha + beta) < beta;
  const double delta = up ? alpha : -beta;
  for (std::size_t t = 0; t < walk.size(); ++t) {
    double& v = z[walk[t]];
    v = snap(t % 2 == 0 ? v + delta : v - delta);
  }
}

}  // namespace

FractionalAssignment::FractionalAssignment(int num_left_, int num_right_,
                                           std::vector<int> left_, std::vector<int> right_,
                                           std::vector<double> value_)
    : num_left(num_left_),
      num_right(num_right_),
      left(std::move(left_)),
      right(std::move(right_)),
      value(std::move(value_)) {
  if (left.size() != value.size() || right.size() != value.size()) {
    throw Error(ErrorKind::kInvalidArgument, "endpoint and value arrays differ in length");
  }
  for (std::size_t e = 0; e < value.size(); ++e) {
    if (left[e] < 0 || left[e] >= num_left || right[e] < 0 || right[e] >= num_right) {
      throw Error(ErrorKind::kInvalidArgument, "edge endpoint out of range");
    }
    value[e] = std::clamp(value[e], 0.0, 1.0);
  }
}

std::vector<std::uint8_t> dependent_round(const FractionalAssignment& fa, Rng& rng) {
  const int m = fa.num_edges();
  const int nv = fa.num_left + fa.num_right;
  std::vector<double> z(m);
  for (int e = 0; e < m; ++e) z[e] = snap(fa.value[e]);

  // Vertices: left side first, then right side offset by num_left.
  std::vector<std::vector<int>> incident(nv);
  std::vector<int> frac_degree(nv, 0);
  int remaining = 0;
  for (int e = 0; e < m; ++e) {
    incident[fa.left[e]].push_back(e);
    incident[fa.num_left + fa.right[e]].push_back(e);
    if (fractional(z[e])) {
      ++frac_degree[fa.left[e]];
      ++frac_degree[fa.num_left + fa.right[e]];
      ++remaining;
    }
  }
  auto other_end = [&](int e, int v) {
    return v == fa.left[e] ? fa.num_left + fa.right[e] : fa.left[e];
  };

  std::vector<int> position(nv, -1);  // index of vertex on the current walk
  std::vector<int> walk_vertices;
  std::vector<int> walk_edges;
  int lowest_edge = 0;
  while (remaining > 0) {
    int start = -1;
    for (int v = 0; v < nv; ++v) {
      if (frac_degree[v] == 1) {
        start = v;
        break;
      }
    }
    if (start < 0) {
      while (!fractional(z[lowest_edge])) ++lowest_edge;
      start = fa.left[lowest_edge];
    }

    walk_vertices.assign(1, start);
    walk_edges.clear();
    position[start] = 0;
    int cycle_from = -1;
    int v = start;
    int came_by = -1;
    for (;;) {
      int next_edge = -1;
      for (int e : incident[v]) {
        if (e != came_by && fractional(z[e])) {
          next_edge = e;
          break;
        }
      }
      if (next_edge < 0) break;  // maximal path
      walk_edges.push_back(next_edge);
      const int u = other_end(next_edge, v);
      if (position[u] >= 0) {
        cycle_from = position[u];
        break;
      }
      position[u] = static_cast<int>(walk_vertices.size());
      walk_vertices.push_back(u);
      came_by = next_edge;
      v = u;
    }
    for (int w : walk_vertices) position[w] = -1;

    std::span<const int> active(walk_edges);
    if (cycle_from >= 0) active = active.subspan(cycle_from);
    shift(active, z, rng);
    for (int e : active) {
      if (!fractional(z[e])) {
        --frac_degree[fa.left[e]];
        --frac_degree[fa.num_left + fa.right[e]];
        --remaining;
      }
    }
  }

  std::vector<std::uint8_t> out(m);
  for (int e = 0; e < m; ++e) out[e] = z[e] >= 0.5 ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> dependent_round_star(std::span<const double> values, Rng& rng) {
  const std::size_t m = values.size();
  std::vector<double> z(m);
  for (std::size_t e = 0; e < m; ++e) z[e] = snap(std::clamp(values[e], 0.0, 1.0));

  // Pair the open (fractional) entry with each next fractional entry; every
  // shift closes at least one of the two.
  int open = -1;
  for (std::size_t e = 0; e < m; ++e) {
    if (!fractional(z[e])) continue;
    if (open < 0) {
      open = static_cast<int>(e);
      continue;
    }
    const int pair[2] = {open, static_cast<int>(e)};
    shift(pair, z, rng);
    if (fractional(z[open])) continue;
    open = fractional(z[e]) ? static_cast<int>(e) : -1;
  }
  if (open >= 0) z[open] = uniform01(rng) < z[open] ? 1.0 : 0.0;

  std::vector<std::uint8_t> out(m);
  for (std::size_t e = 0; e < m; ++e) out[e] = z[e] >= 0.5 ? 1 : 0;
  return out;
}

}  // namespace capcov
