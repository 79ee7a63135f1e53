#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "gridshare/errors.hpp"

namespace gridshare {

// Undirected graph on series indices 0..node_count-1. Edge list is sorted,
// each pair stored once as (lo, hi).
struct VisibilityGraph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;

  int edge_count() const { return static_cast<int>(edges.size()); }
};

// Two samples see each other when every sample strictly between them lies
// strictly below the chord joining them. Written as a cross product so the
// test is exact for representable inputs, with no division.
bool samples_visible(std::span<const double> series, int m, int n);

// Reference O(n^2 * n) builder: checks every pair directly.
VisibilityGraph build_visibility_naive(std::span<const double> series);

// Divide and conquer on the range maximum: nothing can see across a sample
// that ties-or-exceeds both chord ends, so each side recurses independently
// and only pairs spanning the split point need direct checks against it.
VisibilityGraph build_visibility(std::span<const double> series);

// "m n" per line, sorted; trailing newline.
void write_edge_list(const VisibilityGraph& g, std::ostream& out);

}  // namespace gridshare
