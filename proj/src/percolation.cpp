#include "gridshare/percolation.hpp"

#include <atomic>
#include <charconv>
#include <cstring>
#include <ostream>
#include <thread>

#include "gridshare/rng.hpp"

namespace gridshare {

namespace {

// Forest as a single int32 array: non-negative entries point at the parent,
// negative roots hold -size.
int uf_find(std::int32_t* uf, int x) {
  while (uf[x] >= 0) {
    int parent = uf[x];
    if (uf[parent] >= 0) {
      uf[x] = uf[parent];
      x = uf[parent];
    } else {
      x = parent;
    }
  }
  return x;
}

struct MomentPair {
  std::uint64_t sum = 0;
  std::uint64_t sq_sum = 0;
};

// One grid point: `trials` independent removals of exactly `removed` edges.
MomentPair run_grid_point(int n, std::span<const std::int32_t> eu, std::span<const std::int32_t> ev,
                          int removed, int trials, std::uint64_t seed) {
  int edge_count = static_cast<int>(eu.size());
  std::size_t words = static_cast<std::size_t>(edge_count + 63) / 64;
  std::vector<std::uint64_t> removed_bits(words);
  std::vector<std::int32_t> uf(static_cast<std::size_t>(n));

  MomentPair acc;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(removed), static_cast<std::uint64_t>(trial)));

    // Floyd's sampler: a uniform `removed`-subset of edge slots.
    std::memset(removed_bits.data(), 0, words * sizeof(std::uint64_t));
    for (int j = edge_count - removed; j < edge_count; ++j) {
      std::uint32_t pick = rng.below(static_cast<std::uint32_t>(j) + 1);
      std::uint64_t& word = removed_bits[pick >> 6];
      std::uint64_t bit = 1ULL << (pick & 63);
      if (word & bit) {
        removed_bits[j >> 6] |= 1ULL << (j & 63);
      } else {
        word |= bit;
      }
    }

    std::memset(uf.data(), 0xFF, uf.size() * sizeof(std::int32_t));  // all roots of size 1
    std::int32_t largest = 1;
    for (int i = 0; i < edge_count; ++i) {
      if (removed_bits[i >> 6] & (1ULL << (i & 63))) continue;
      int a = uf_find(uf.data(), eu[i]);
      int b = uf_find(uf.data(), ev[i]);
      if (a == b) continue;
      std::int32_t size_a = -uf[a];
      std::int32_t size_b = -uf[b];
      if (size_a < size_b) std::swap(a, b);
      uf[a] = -(size_a + size_b);
      uf[b] = a;
      if (size_a + size_b > largest) largest = size_a + size_b;
    }

    std::uint64_t s = static_cast<std::uint64_t>(largest);
    acc.sum += s;
    acc.sq_sum += s * s;
  }
  return acc;
}

void append_double(std::string& s, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, res.ptr);
}

}  // namespace

PercolationCurve percolation_curve(const VisibilityGraph& graph, int trials, std::uint64_t seed,
                                   int threads) {
  if (graph.node_count < 2 || graph.edges.empty())
    throw NumericError("percolation needs a graph with at least 2 nodes and 1 edge");
  if (trials < 1) throw NumericError("percolation needs at least one trial");
  for (auto [a, b] : graph.edges)
    if (a < 0 || b < 0 || a >= graph.node_count || b >= graph.node_count || a == b)
      throw DataError("edge endpoint out of range");

  int n = graph.node_count;
  int edge_count = static_cast<int>(graph.edges.size());
  std::vector<std::int32_t> eu(edge_count), ev(edge_count);
  for (int i = 0; i < edge_count; ++i) {
    eu[i] = graph.edges[i].first;
    ev[i] = graph.edges[i].second;
  }

  PercolationCurve curve;
  curve.node_count = n;
  curve.edge_count = edge_count;
  curve.trials = trials;
  curve.seed = seed;
  curve.removal_fraction.resize(edge_count + 1);
  curve.cluster_sum.resize(edge_count + 1);
  curve.cluster_sq_sum.resize(edge_count + 1);
  curve.strength.resize(edge_count + 1);
  curve.susceptibility.resize(edge_count + 1);

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads > edge_count + 1) threads = edge_count + 1;

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int e = next.fetch_add(1, std::memory_order_relaxed);
      if (e > edge_count) break;
      MomentPair m = run_grid_point(n, eu, ev, e, trials, seed);
      curve.cluster_sum[e] = m.sum;
      curve.cluster_sq_sum[e] = m.sq_sum;
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (int e = 0; e <= edge_count; ++e) {
    curve.removal_fraction[e] = static_cast<double>(e) / edge_count;
    double mean = static_cast<double>(curve.cluster_sum[e]) / trials;
    double mean_sq = static_cast<double>(curve.cluster_sq_sum[e]) / trials;
    curve.strength[e] = mean / n;
    curve.susceptibility[e] = (mean_sq - mean * mean) / (n * mean);
  }
  curve.threshold = percolation_threshold(curve);
  return curve;
}

double percolation_threshold(const PercolationCurve& curve) {
  if (curve.susceptibility.empty()) throw NumericError("empty percolation curve");
  int best = 0;
  for (int e = 1; e < static_cast<int>(curve.susceptibility.size()); ++e)
    if (curve.susceptibility[e] > curve.susceptibility[best]) best = e;
  return curve.removal_fraction[best];
}

double resilience_of_series(std::span<const double> series, int trials, std::uint64_t seed,
                            int threads) {
  VisibilityGraph g = build_visibility(series);
  return percolation_curve(g, trials, seed, threads).threshold;
}

double printed_strength(const PercolationCurve& curve, int grid_index) {
  return static_cast<double>(curve.cluster_sum[grid_index]) /
         (static_cast<double>(curve.node_count) * curve.edge_count);
}

double printed_susceptibility(const PercolationCurve& curve, int grid_index) {
  double pinf = printed_strength(curve, grid_index);
  double sq = static_cast<double>(curve.cluster_sq_sum[grid_index]) /
              (static_cast<double>(curve.node_count) * curve.node_count * curve.edge_count);
  return (sq - pinf * pinf) / pinf;
}

void write_curve_csv(const PercolationCurve& curve, std::ostream& out) {
  std::string buf = "e,p,strength,susceptibility\n";
  for (int e = 0; e < static_cast<int>(curve.removal_fraction.size()); ++e) {
    buf += std::to_string(e);
    buf += ',';
    append_double(buf, curve.removal_fraction[e]);
    buf += ',';
    append_double(buf, curve.strength[e]);
    buf += ',';
    append_double(buf, curve.susceptibility[e]);
    buf += '\n';
  }
  buf += "threshold,";
  append_double(buf, curve.threshold);
  buf += '\n';
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("curve CSV write failed");
}

}  // namespace gridshare
