#include "gridshare/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gridshare {

namespace {

void check_series(std::span<const double> series) {
  for (double v : series)
    if (!std::isfinite(v)) throw DataError("visibility series must be finite");
}

// Chord test p against (m, n), m < p < n:
//   b_p < b_n + (b_m - b_n) * (n - p) / (n - m)
// cleared of the positive denominator (n - m).
bool below_chord(std::span<const double> b, int m, int p, int n) {
  return (b[p] - b[n]) * (n - m) < (b[m] - b[n]) * (n - p);
}

// Edges incident to `apex` toward lower indices in [lo, apex). Walking out
// from the apex, a sample is visible iff its sightline slope beats every
// slope seen so far; slopes are compared by cross product to stay exact.
void scan_from_apex(std::span<const double> b, int lo, int hi, int apex, int step,
                    std::vector<std::pair<int, int>>& edges) {
  int blocker = -1;  // steepest sample so far
  for (int x = apex + step; x >= lo && x <= hi; x += step) {
    bool visible;
    if (blocker < 0) {
      visible = true;
    } else {
      // slope(x) > slope(blocker), both measured from apex; a sample that is
      // not visible can never raise the running slope maximum.
      double dx = std::abs(apex - x);
      double db = std::abs(apex - blocker);
      visible = (b[x] - b[apex]) * db > (b[blocker] - b[apex]) * dx;
    }
    if (visible) {
      edges.emplace_back(std::min(x, apex), std::max(x, apex));
      blocker = x;
    }
  }
}

// No sightline crosses a range maximum: the chord between samples on opposite
// sides sits at or below max(b_m, b_n) <= b_q at q, and visibility demands
// strictly above. So split at the max, collect its incident edges by direct
// scans, and recurse on the two open sides.
void build_range(std::span<const double> b, int lo, int hi,
                 std::vector<std::pair<int, int>>& edges) {
  while (hi - lo >= 1) {
    int apex = lo;
    for (int i = lo + 1; i <= hi; ++i)
      if (b[i] > b[apex]) apex = i;
    scan_from_apex(b, lo, hi, apex, -1, edges);
    scan_from_apex(b, lo, hi, apex, +1, edges);
    // Recurse on the smaller side, loop on the larger.
    if (apex - lo < hi - apex) {
      build_range(b, lo, apex - 1, edges);
      lo = apex + 1;
    } else {
      build_range(b, apex + 1, hi, edges);
      hi = apex - 1;
    }
  }
}

}  // namespace

bool samples_visible(std::span<const double> series, int m, int n) {
  if (m > n) std::swap(m, n);
  if (m < 0 || n >= static_cast<int>(series.size()))
    throw DataError("visibility query out of range");
  if (m == n) return false;
  for (int p = m + 1; p < n; ++p)
    if (!below_chord(series, m, p, n)) return false;
  return true;
}

VisibilityGraph build_visibility_naive(std::span<const double> series) {
  check_series(series);
  VisibilityGraph g;
  g.node_count = static_cast<int>(series.size());
  for (int m = 0; m < g.node_count; ++m) {
    for (int n = m + 1; n < g.node_count; ++n) {
      bool visible = true;
      for (int p = m + 1; p < n && visible; ++p) visible = below_chord(series, m, p, n);
      if (visible) g.edges.emplace_back(m, n);
    }
  }
  return g;
}

VisibilityGraph build_visibility(std::span<const double> series) {
  check_series(series);
  VisibilityGraph g;
  g.node_count = static_cast<int>(series.size());
  if (g.node_count >= 2) {
    g.edges.reserve(static_cast<std::size_t>(g.node_count) * 4);
    build_range(series, 0, g.node_count - 1, g.edges);
    std::sort(g.edges.begin(), g.edges.end());
  }
  return g;
}

void write_edge_list(const VisibilityGraph& g, std::ostream& out) {
  for (auto [a, b] : g.edges) out << a << ' ' << b << '\n';
  if (!out) throw DataError("edge list write failed");
}

}  // namespace gridshare
