#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "strap/factorize.hpp"
#include "strap/graph.hpp"
#include "strap/pipeline.hpp"
#include "strap/rng.hpp"

namespace strap {

struct ScoredPair {
  NodeId u = 0;
  NodeId v = 0;
  double score = 0.0;
};

// Total order used for every ranking: score descending, ties broken by
// (u, v) ascending, so rankings are reproducible.
inline bool ranks_before(const ScoredPair& a, const ScoredPair& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

namespace detail {

// Bounded keeper of the m best pairs under ranks_before; worst kept pair on
// top of the heap.
class TopPairs {
 public:
  explicit TopPairs(std::size_t m) : m_(m) {}

  // ranks_before as heap order makes the front the *maximum*, i.e. the pair
  // every kept pair ranks before: the worst one, ready for eviction.
  void offer(const ScoredPair& p) {
    if (heap_.size() < m_) {
      heap_.push_back(p);
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    } else if (!heap_.empty() && ranks_before(p, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
      heap_.back() = p;
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    }
  }

  std::vector<ScoredPair> sorted_desc() && {
    std::sort(heap_.begin(), heap_.end(), ranks_before);
    return std::move(heap_);
  }

 private:
  std::size_t m_;
  std::vector<ScoredPair> heap_;
};

}  // namespace detail

// The m highest-scoring ordered pairs (u, v), u != v, without materializing
// all n^2 scores: source rows are processed in blocks of 1024, each block
// scored with one dense product and fed to a bounded keeper; the per-block
// results are merged in block order, so the outcome is deterministic at any
// thread count.
inline std::vector<ScoredPair> top_m_pairs(const EmbeddingPair& emb, std::uint64_t m,
                                           int threads = 0) {
  const NodeId n = emb.num_nodes();
  const std::uint64_t max_pairs = static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0);
  if (m > max_pairs) throw std::invalid_argument("top_m_pairs: m exceeds n*(n-1)");
  if (m == 0) return {};

  constexpr NodeId kBlockRows = 1024;
  const NodeId nblocks = (n + kBlockRows - 1) / kBlockRows;
  std::vector<std::vector<ScoredPair>> block_top(nblocks);

  const int nthreads = resolve_threads(threads);
  (void)nthreads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    const NodeId row0 = static_cast<NodeId>(b) * kBlockRows;
    const NodeId rows = std::min<NodeId>(kBlockRows, n - row0);
    const Matrix scores = emb.source.middleRows(row0, rows) * emb.target.transpose();
    detail::TopPairs keeper(m);
    for (NodeId i = 0; i < rows; ++i) {
      const NodeId u = row0 + i;
      for (NodeId v = 0; v < n; ++v) {
        if (v == u) continue;
        keeper.offer({u, v, scores(i, v)});
      }
    }
    block_top[static_cast<std::size_t>(b)] = std::move(keeper).sorted_desc();
  }

  std::vector<ScoredPair> all;
  for (auto& part : block_top) {
    all.insert(all.end(), part.begin(), part.end());
    part.clear();
    part.shrink_to_fit();
  }
  const std::size_t take = std::min<std::size_t>(m, all.size());
  std::partial_sort(all.begin(), all.begin() + take, all.end(), ranks_before);
  all.resize(take);
  return all;
}

// Fraction of true arcs among the top-m predictions, m = number of arcs.
inline double reconstruction_precision(const Graph& g, const EmbeddingPair& emb,
                                       int threads = 0) {
  if (emb.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("reconstruction_precision: embedding/graph node count mismatch");
  }
  const std::uint64_t m = g.num_arcs();
  if (m == 0) return 0.0;
  const auto top = top_m_pairs(emb, m, threads);
  std::uint64_t hits = 0;
  for (const auto& p : top) {
    if (g.has_arc(p.u, p.v)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(m);
}

// Graph rebuilt from the top-m predicted pairs, m = g.num_arcs().
inline Graph reconstruct_graph(const Graph& g, const EmbeddingPair& emb, int threads = 0) {
  const auto top = top_m_pairs(emb, g.num_arcs(), threads);
  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(top.size());
  for (const auto& p : top) arcs.emplace_back(p.u, p.v);
  return Graph::from_arcs(g.num_nodes(), std::move(arcs), GraphKind::directed);
}

struct DegreeHistograms {
  std::map<NodeId, NodeId> original_in;
  std::map<NodeId, NodeId> original_out;
  std::map<NodeId, NodeId> reconstructed_in;
  std::map<NodeId, NodeId> reconstructed_out;
};

inline DegreeHistograms reconstructed_degree_histograms(const Graph& g, const EmbeddingPair& emb,
                                                        int threads = 0) {
  const Graph recon = reconstruct_graph(g, emb, threads);
  return DegreeHistograms{
      degree_histogram(g, Direction::in),
      degree_histogram(g, Direction::out),
      degree_histogram(recon, Direction::in),
      degree_histogram(recon, Direction::out),
  };
}

// Uniform random edge holdout. For undirected graphs an edge and its
// reverse arc move together. Negatives are sampled uniformly from non-edges
// (self-loops excluded) by rejection, with no duplicates.
struct LinkSplit {
  std::vector<std::pair<NodeId, NodeId>> train_edges;  // canonical: u < v when undirected
  std::vector<std::pair<NodeId, NodeId>> test_pos;
  std::vector<std::pair<NodeId, NodeId>> test_neg;
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

inline LinkSplit make_link_split(const Graph& g, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("make_link_split: ratio must be in (0,1)");
  const NodeId n = g.num_nodes();
  const bool undirected = g.kind() == GraphKind::undirected;

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.out_neighbors(u)) {
      if (!undirected || u < v) edges.emplace_back(u, v);
    }
  }

  Rng rng(seed);
  shuffle(edges, rng);
  const std::size_t n_train =
      static_cast<std::size_t>(std::llround(ratio * static_cast<double>(edges.size())));

  LinkSplit split;
  split.ratio = ratio;
  split.seed = seed;
  split.train_edges.assign(edges.begin(), edges.begin() + std::min(n_train, edges.size()));
  split.test_pos.assign(edges.begin() + std::min(n_train, edges.size()), edges.end());
  std::sort(split.train_edges.begin(), split.train_edges.end());
  std::sort(split.test_pos.begin(), split.test_pos.end());

  const std::uint64_t needed = split.test_pos.size();
  const std::uint64_t all_pairs = undirected
                                      ? static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2
                                      : static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0);
  const std::uint64_t existing = undirected ? g.num_arcs() / 2 : g.num_arcs();
  if (needed > all_pairs - existing) {
    throw std::runtime_error("make_link_split: graph too dense to sample enough negatives");
  }

  std::set<std::pair<NodeId, NodeId>> negatives;
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = 100 * needed + 10000;
  while (negatives.size() < needed) {
    if (++attempts > max_attempts) {
      throw std::runtime_error("make_link_split: negative sampling exceeded retry budget");
    }
    NodeId u = static_cast<NodeId>(rng.below(n));
    NodeId v = static_cast<NodeId>(rng.below(n));
    if (u == v) continue;
    if (undirected && u > v) std::swap(u, v);
    if (g.has_arc(u, v)) continue;
    negatives.emplace(u, v);
  }
  split.test_neg.assign(negatives.begin(), negatives.end());
  return split;
}

// Graph over the same node set containing only the training edges.
inline Graph train_graph(const Graph& g, const LinkSplit& split) {
  return Graph::from_arcs(g.num_nodes(), split.train_edges, g.kind());
}

// Fraction of positives among the k best-ranked candidates.
inline double precision_at_k(std::vector<ScoredPair> candidates, std::size_t k,
                             const std::function<bool(NodeId, NodeId)>& is_positive) {
  if (k == 0) return 0.0;
  if (k > candidates.size()) throw std::invalid_argument("precision_at_k: k exceeds candidate count");
  std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(), ranks_before);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (is_positive(candidates[i].u, candidates[i].v)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

// Hides (1 - ratio) of the edges, trains on the rest, scores the held-out
// positives against an equal number of sampled non-edges, and reports the
// fraction of positives among the top-|positives| candidates.
inline double link_prediction_precision(const Graph& g, const StrapConfig& config, double ratio,
                                        std::uint64_t seed, int threads = 0) {
  const LinkSplit split = make_link_split(g, ratio, seed);
  const Graph trained = train_graph(g, split);
  const EmbeddingPair emb = embed_graph(trained, config, threads).embeddings;

  std::vector<ScoredPair> candidates;
  candidates.reserve(split.test_pos.size() + split.test_neg.size());
  for (const auto& [u, v] : split.test_pos) candidates.push_back({u, v, emb.score(u, v)});
  for (const auto& [u, v] : split.test_neg) candidates.push_back({u, v, emb.score(u, v)});

  std::set<std::pair<NodeId, NodeId>> positives(split.test_pos.begin(), split.test_pos.end());
  return precision_at_k(std::move(candidates), split.test_pos.size(),
                        [&positives](NodeId u, NodeId v) { return positives.count({u, v}) != 0; });
}

// Spearman rank correlation with average ranks on ties. Returns NaN when
// either input has zero rank variance.
inline double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: size mismatch");
  if (a.empty()) throw std::invalid_argument("spearman: empty input");
  const std::size_t n = a.size();

  const auto ranks = [n](std::span<const double> x) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&x](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> r(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };

  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += ra[i];
    mean_b += rb[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = ra[i] - mean_a;
    const double db = rb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return cov / std::sqrt(var_a * var_b);
}

inline std::vector<double> out_degree_values(const Graph& g) {
  std::vector<double> d(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) d[u] = g.out_degree(u);
  return d;
}

inline std::vector<double> in_degree_values(const Graph& g) {
  std::vector<double> d(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) d[u] = g.in_degree(u);
  return d;
}

}  // namespace strap
