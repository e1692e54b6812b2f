#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "strap/graph.hpp"

namespace strap {

// Personalized PageRank semantics used throughout: an alpha-discounted walk
// terminates at the current node with probability alpha, otherwise moves to
// a uniform random out-neighbor. A walk stranded at a sink never terminates,
// so PPR(s, .) = alpha * e_s for sinks and row sums can be below 1.

struct PprParams {
  double alpha = 0.5;   // termination probability, in (0, 1)
  double r_max = 1e-6;  // push threshold, > 0

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("PprParams: alpha must be in (0,1)");
    if (!(r_max > 0.0)) throw std::invalid_argument("PprParams: r_max must be positive");
  }
};

// Sparse outcome of one backward-push run toward a target node.
struct PushResult {
  NodeId target = 0;
  std::vector<std::pair<NodeId, double>> reserves;  // sorted by node id, values > 0
  std::vector<std::pair<NodeId, double>> residues;  // sorted by node id, values > 0
  std::uint64_t pushes = 0;

  static double lookup(const std::vector<std::pair<NodeId, double>>& entries, NodeId x) {
    auto it = std::lower_bound(entries.begin(), entries.end(), x,
                               [](const auto& e, NodeId key) { return e.first < key; });
    return (it != entries.end() && it->first == x) ? it->second : 0.0;
  }
  double reserve_at(NodeId x) const { return lookup(reserves, x); }
  double residue_at(NodeId x) const { return lookup(residues, x); }
};

// Reusable dense scratch for backward push. One instance per worker thread;
// clearing touches only the nodes visited by the previous run, so repeated
// runs on a large graph avoid O(n) resets.
class PushWorkspace {
 public:
  void ensure(NodeId n) {
    if (reserve_.size() < n) {
      reserve_.resize(n, 0.0);
      residue_.resize(n, 0.0);
      queued_.resize(n, 0);
      touched_flag_.resize(n, 0);
    }
  }

  double reserve(NodeId x) const { return reserve_[x]; }
  double residue(NodeId x) const { return residue_[x]; }

 private:
  template <class Observer>
  friend PushResult backward_push(const Graph&, NodeId, const PprParams&, PushWorkspace&,
                                  Observer&&);

  void touch(NodeId x) {
    if (!touched_flag_[x]) {
      touched_flag_[x] = 1;
      touched_.push_back(x);
    }
  }

  std::vector<double> reserve_, residue_;
  std::vector<std::uint8_t> queued_, touched_flag_;
  std::vector<NodeId> touched_;
  std::vector<NodeId> queue_;
};

// Backward push toward `target`: starting from residue r(target) = 1, any
// node whose residue exceeds r_max settles alpha * r into its reserve and
// spreads (1 - alpha) * r / d_out(y) to each in-neighbor y. Nodes are
// processed FIFO, enqueued at most once concurrently. On return every
// residue is <= r_max and reserves satisfy
//   PPR(u, target) - r_max <= reserve(u) <= PPR(u, target)  for all u.
// The observer runs after every push with the workspace state and the push
// count so far.
template <class Observer>
PushResult backward_push(const Graph& g, NodeId target, const PprParams& params,
                         PushWorkspace& ws, Observer&& after_push) {
  params.validate();
  if (target >= g.num_nodes()) throw std::out_of_range("backward_push: target out of range");
  ws.ensure(g.num_nodes());

  ws.queue_.clear();
  std::size_t head = 0;
  std::uint64_t pushes = 0;

  ws.touch(target);
  ws.residue_[target] = 1.0;
  if (1.0 > params.r_max) {
    ws.queued_[target] = 1;
    ws.queue_.push_back(target);
  }

  const double spread = 1.0 - params.alpha;
  while (head < ws.queue_.size()) {
    const NodeId x = ws.queue_[head++];
    ws.queued_[x] = 0;
    const double rx = ws.residue_[x];
    ws.residue_[x] = 0.0;
    ws.reserve_[x] += params.alpha * rx;
    for (NodeId y : g.in_neighbors(x)) {
      ws.touch(y);
      const double ry = (ws.residue_[y] += spread * rx / g.out_degree(y));
      if (ry > params.r_max && !ws.queued_[y]) {
        ws.queued_[y] = 1;
        ws.queue_.push_back(y);
      }
    }
    ++pushes;
    after_push(static_cast<const PushWorkspace&>(ws), pushes);
  }

  PushResult result;
  result.target = target;
  result.pushes = pushes;
  std::sort(ws.touched_.begin(), ws.touched_.end());
  for (NodeId x : ws.touched_) {
    if (ws.reserve_[x] > 0.0) result.reserves.emplace_back(x, ws.reserve_[x]);
    if (ws.residue_[x] > 0.0) result.residues.emplace_back(x, ws.residue_[x]);
    ws.reserve_[x] = 0.0;
    ws.residue_[x] = 0.0;
    ws.queued_[x] = 0;
    ws.touched_flag_[x] = 0;
  }
  ws.touched_.clear();
  return result;
}

inline PushResult backward_push(const Graph& g, NodeId target, const PprParams& params,
                                PushWorkspace& ws) {
  return backward_push(g, target, params, ws, [](const PushWorkspace&, std::uint64_t) {});
}

inline PushResult backward_push(const Graph& g, NodeId target, const PprParams& params) {
  PushWorkspace ws;
  return backward_push(g, target, params, ws);
}

// Power-iteration oracle for one source row: propagates un-terminated walk
// mass until less than `tol` remains, so every entry is within tol below the
// exact PPR value. Mass reaching a sink is dropped.
inline std::vector<double> exact_ppr_row(const Graph& g, NodeId source, double alpha,
                                         double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("exact_ppr_row: alpha must be in (0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("exact_ppr_row: tol must be positive");
  if (source >= g.num_nodes()) throw std::out_of_range("exact_ppr_row: source out of range");

  const NodeId n = g.num_nodes();
  std::vector<double> row(n, 0.0);
  std::vector<double> mass(n, 0.0);
  std::vector<double> next(n, 0.0);
  mass[source] = 1.0;
  double remaining = 1.0;
  while (remaining > tol) {
    std::fill(next.begin(), next.end(), 0.0);
    double next_total = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      const double q = mass[u];
      if (q == 0.0) continue;
      row[u] += alpha * q;
      const NodeId d = g.out_degree(u);
      if (d == 0) continue;  // stranded mass vanishes
      const double share = (1.0 - alpha) * q / d;
      for (NodeId w : g.out_neighbors(u)) {
        next[w] += share;
        next_total += share;
      }
    }
    mass.swap(next);
    remaining = next_total;
  }
  return row;
}

// Same recursion evaluated column-wise: returns PPR(., target) for every
// source, with each entry within tol below the exact value.
inline std::vector<double> exact_ppr_column(const Graph& g, NodeId target, double alpha,
                                            double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("exact_ppr_column: alpha must be in (0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("exact_ppr_column: tol must be positive");
  if (target >= g.num_nodes()) throw std::out_of_range("exact_ppr_column: target out of range");

  const NodeId n = g.num_nodes();
  std::vector<double> col(n, 0.0);
  std::vector<double> walk(n, 0.0);
  std::vector<double> next(n, 0.0);
  walk[target] = 1.0;
  double bound = 1.0;  // max-norm bound on `walk`, shrinks by (1 - alpha) per step
  for (;;) {
    for (NodeId u = 0; u < n; ++u) col[u] += alpha * walk[u];
    bound *= 1.0 - alpha;
    if (bound <= tol) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (NodeId u = 0; u < n; ++u) {
      const NodeId d = g.out_degree(u);
      if (d == 0) continue;
      double acc = 0.0;
      for (NodeId w : g.out_neighbors(u)) acc += walk[w];
      next[u] = (1.0 - alpha) * acc / d;
    }
    walk.swap(next);
  }
  return col;
}

// Global PageRank under the same walk semantics: the power series started
// from the uniform distribution, so n * PR(v) = sum_u PPR(u, v) up to n*tol.
// On graphs with sinks the entries sum to less than 1.
inline std::vector<double> global_pagerank(const Graph& g, double alpha, double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("global_pagerank: alpha must be in (0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("global_pagerank: tol must be positive");

  const NodeId n = g.num_nodes();
  std::vector<double> pr(n, 0.0);
  if (n == 0) return pr;
  std::vector<double> mass(n, 1.0 / n);
  std::vector<double> next(n, 0.0);
  double remaining = 1.0;
  while (remaining > tol) {
    std::fill(next.begin(), next.end(), 0.0);
    double next_total = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      const double q = mass[u];
      if (q == 0.0) continue;
      pr[u] += alpha * q;
      const NodeId d = g.out_degree(u);
      if (d == 0) continue;
      const double share = (1.0 - alpha) * q / d;
      for (NodeId w : g.out_neighbors(u)) {
        next[w] += share;
        next_total += share;
      }
    }
    mass.swap(next);
    remaining = next_total;
  }
  return pr;
}

}  // namespace strap
