#pragma once

// Deterministic graph generators for tests. Everything draws from strap::Rng
// so a fixed seed reproduces the same graph on any platform.

#include <cstdint>
#include <utility>
#include <vector>

#include "strap/graph.hpp"
#include "strap/rng.hpp"

namespace strap::testing {

// Erdos-Renyi style digraph: each ordered pair becomes an arc with
// probability p.
inline Graph random_digraph(Rng& rng, NodeId n, double p) {
  std::vector<std::pair<NodeId, NodeId>> arcs;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v && rng.unit() < p) arcs.emplace_back(u, v);
    }
  }
  return Graph::from_arcs(n, std::move(arcs), GraphKind::directed);
}

inline Graph random_undirected(Rng& rng, NodeId n, double p) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.unit() < p) edges.emplace_back(u, v);
    }
  }
  return Graph::from_arcs(n, std::move(edges), GraphKind::undirected);
}

// Uniform graph with exactly m distinct arcs (or undirected edges).
inline Graph random_arcs_graph(Rng& rng, NodeId n, std::uint64_t m, GraphKind kind) {
  std::vector<std::pair<NodeId, NodeId>> chosen;
  std::vector<std::uint8_t> taken;
  const std::uint64_t cells = static_cast<std::uint64_t>(n) * n;
  taken.assign(cells, 0);
  while (chosen.size() < m) {
    NodeId u = static_cast<NodeId>(rng.below(n));
    NodeId v = static_cast<NodeId>(rng.below(n));
    if (u == v) continue;
    if (kind == GraphKind::undirected && u > v) std::swap(u, v);
    const std::uint64_t cell = static_cast<std::uint64_t>(u) * n + v;
    if (taken[cell]) continue;
    taken[cell] = 1;
    chosen.emplace_back(u, v);
  }
  return Graph::from_arcs(n, std::move(chosen), kind);
}

// Zipf(s) sampler over {1, ..., max_value} by inverse CDF.
class ZipfSampler {
 public:
  ZipfSampler(double exponent, std::uint64_t max_value) {
    cdf_.reserve(max_value);
    double total = 0.0;
    for (std::uint64_t k = 1; k <= max_value; ++k) {
      total += 1.0 / std::pow(static_cast<double>(k), exponent);
      cdf_.push_back(total);
    }
    for (double& c : cdf_) c /= total;
  }

  std::uint64_t sample(Rng& rng) const {
    const double u = rng.unit();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
  }

 private:
  std::vector<double> cdf_;
};

// Directed Chung-Lu graph: every node draws continuous Pareto in/out
// weights with the given density exponent, and arc (u, v) appears with
// probability wout_u * win_v / sum(win). Degree distributions keep the
// power-law tail while realized degrees carry Poisson jitter, so degree
// vectors are not dominated by huge tie groups the way integer Zipf degree
// sequences are.
inline Graph chung_lu_digraph(Rng& rng, NodeId n, double exponent = 2.2,
                              double mean_weight = 7.0, double cap_fraction = 0.05) {
  std::vector<double> wout(n), win(n);
  const double inv = 1.0 / (exponent - 1.0);
  const double cap = n * cap_fraction;
  for (NodeId u = 0; u < n; ++u) {
    wout[u] = std::min(cap, mean_weight * std::pow(1.0 - rng.unit(), -inv));
    win[u] = std::min(cap, mean_weight * std::pow(1.0 - rng.unit(), -inv));
  }
  double win_total = 0.0;
  for (double w : win) win_total += w;
  std::vector<std::pair<NodeId, NodeId>> arcs;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      if (rng.unit() < wout[u] * win[v] / win_total) arcs.emplace_back(u, v);
    }
  }
  return Graph::from_arcs(n, std::move(arcs), GraphKind::directed);
}

// Directed graph with Zipf out-degrees and Zipf-weighted target popularity,
// so both in- and out-degree distributions are heavy-tailed.
inline Graph powerlaw_digraph(Rng& rng, NodeId n, double exponent = 2.2) {
  const NodeId cap = std::max<NodeId>(2, n / 4);
  const ZipfSampler degrees(exponent, cap);
  const ZipfSampler weights(exponent, cap);

  std::vector<double> weight_cdf(n);
  double total = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    total += static_cast<double>(weights.sample(rng));
    weight_cdf[v] = total;
  }
  for (double& c : weight_cdf) c /= total;

  std::vector<std::pair<NodeId, NodeId>> arcs;
  for (NodeId u = 0; u < n; ++u) {
    const std::uint64_t degree = degrees.sample(rng);
    for (std::uint64_t k = 0; k < degree; ++k) {
      const double x = rng.unit();
      const auto it = std::lower_bound(weight_cdf.begin(), weight_cdf.end(), x);
      const NodeId v = static_cast<NodeId>(it - weight_cdf.begin());
      if (v != u) arcs.emplace_back(u, v);  // duplicates collapse in from_arcs
    }
  }
  return Graph::from_arcs(n, std::move(arcs), GraphKind::directed);
}

}  // namespace strap::testing
