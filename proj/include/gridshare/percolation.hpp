#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gridshare/visibility.hpp"

namespace gridshare {

// Bond-removal Monte Carlo over a fixed graph. For each removal count
// e = 0..E the curve records, across `trials` independent trials, the first
// two moments of the largest-cluster size S (kept as integer sums, so results
// are bit-identical regardless of thread count or summation schedule).
struct PercolationCurve {
  int node_count = 0;
  int edge_count = 0;
  int trials = 0;
  std::uint64_t seed = 0;

  std::vector<double> removal_fraction;        // p = e/E
  std::vector<std::uint64_t> cluster_sum;      // sum of S over trials
  std::vector<std::uint64_t> cluster_sq_sum;   // sum of S^2 over trials
  std::vector<double> strength;                // <S> / N
  std::vector<double> susceptibility;          // (<S^2> - <S>^2) / (N <S>)
  double threshold = 0.0;                      // argmax susceptibility, ties -> smallest p
};

// trials >= 1; graph needs >= 2 nodes and >= 1 edge (NumericError otherwise).
// Each (e, trial) pair draws from its own RNG stream derived from
// (seed, e, trial), so the trial schedule never leaks into the numbers.
// threads <= 0 picks hardware concurrency.
PercolationCurve percolation_curve(const VisibilityGraph& graph, int trials, std::uint64_t seed,
                                   int threads = 0);

// Recomputes the threshold from the stored susceptibility column.
double percolation_threshold(const PercolationCurve& curve);

// Removal fraction at the susceptibility peak for a series' visibility graph.
double resilience_of_series(std::span<const double> series, int trials, std::uint64_t seed,
                            int threads = 0);

// The strength and susceptibility columns above use trial means. These two
// return the published normalizations verbatim (sum over trials, 1/(N E) and
// 1/(N^2 E) prefactors); their values depend on the trial count by
// construction, which is why the threshold is not defined on them.
double printed_strength(const PercolationCurve& curve, int grid_index);
double printed_susceptibility(const PercolationCurve& curve, int grid_index);

// "e,p,strength,susceptibility" rows for e = 0..E, then "threshold,<value>".
void write_curve_csv(const PercolationCurve& curve, std::ostream& out);

}  // namespace gridshare
