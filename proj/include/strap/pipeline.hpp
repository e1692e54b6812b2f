#pragma once

#include <chrono>
#include <cstdint>
#include <tuple>
#include <vector>

#include "strap/factorize.hpp"
#include "strap/graph.hpp"
#include "strap/proximity.hpp"

namespace strap {

struct StageTimings {
  double push_g_seconds = 0.0;
  double push_gt_seconds = 0.0;
  double transform_seconds = 0.0;
  double svd_seconds = 0.0;
};

struct EmbedResult {
  EmbeddingPair embeddings;
  StageTimings timings;
  std::uint64_t proximity_nnz = 0;
};

// End-to-end embedding run: assemble the transpose-proximity matrix, apply
// the entry-wise log, factorize, and scale the singular vectors into
// content/context embeddings. Deterministic for fixed (graph, config, seed)
// at any thread count.
inline EmbedResult embed_graph(const Graph& g, const StrapConfig& config, int threads = 0,
                               ProximitySides sides = ProximitySides::both) {
  config.validate();
  if (static_cast<std::uint64_t>(config.dim) > g.num_nodes()) {
    throw std::invalid_argument("embed_graph: dim exceeds node count");
  }

  using clock = std::chrono::steady_clock;
  const auto seconds_since = [](clock::time_point start) {
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  EmbedResult result;
  ProximityPassTimings pass_timings;
  SparseProximityMatrix p =
      build_transpose_proximity(g, config.alpha, config.eps, threads, sides, &pass_timings);
  result.timings.push_g_seconds = pass_timings.seconds_pass_g;
  result.timings.push_gt_seconds = pass_timings.seconds_pass_gt;
  result.proximity_nnz = p.nnz();

  auto t = clock::now();
  p = log_transform(std::move(p));
  result.timings.transform_seconds = seconds_since(t);

  t = clock::now();
  const SvdResult svd = randomized_svd(p, config.dim, config.seed, config.svd_oversample,
                                       config.svd_power_iters, threads);
  result.timings.svd_seconds = seconds_since(t);

  result.embeddings = extract_embeddings(svd, config);
  return result;
}

// Sanity baseline: truncated SVD of the raw adjacency matrix, scaled the
// same way. Strong at reconstruction, weak at prediction.
inline EmbeddingPair adjacency_svd_embeddings(const Graph& g, const StrapConfig& config,
                                              int threads = 0) {
  config.validate();
  if (static_cast<std::uint64_t>(config.dim) > g.num_nodes()) {
    throw std::invalid_argument("adjacency_svd_embeddings: dim exceeds node count");
  }
  std::vector<std::tuple<NodeId, NodeId, double>> triples;
  triples.reserve(g.num_arcs());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.out_neighbors(u)) triples.emplace_back(u, v, 1.0);
  }
  const auto adj = SparseProximityMatrix::from_triples(g.num_nodes(), config.eps,
                                                       std::move(triples), /*transformed=*/true);
  const SvdResult svd = randomized_svd(adj, config.dim, config.seed, config.svd_oversample,
                                       config.svd_power_iters, threads);
  return extract_embeddings(svd, config);
}

}  // namespace strap
