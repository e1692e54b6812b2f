#include <catch2/catch.hpp>

#include <cmath>

#include "strap/evaluate.hpp"
#include "strap/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace strap;

TEST_CASE("full pipeline on the two-node cycle recovers the log proximity") {
  const auto g = Graph::from_arcs(2, {{0, 1}, {1, 0}}, GraphKind::directed);
  StrapConfig cfg;
  cfg.alpha = 0.5;
  cfg.eps = 1e-4;
  cfg.dim = 2;
  const auto result = embed_graph(g, cfg);
  // P is 2x2 and d = 2, so the factorization is exact and the score equals
  // the log-transformed transpose proximity ln((2/eps) * 2/3)
  const double expected = std::log((2.0 / cfg.eps) * (2.0 / 3.0));
  REQUIRE(result.embeddings.score(0, 1) == Approx(expected).margin(1e-3));
  REQUIRE(result.embeddings.score(1, 0) == Approx(expected).margin(1e-3));
}

TEST_CASE("pipeline determinism and stage accounting") {
  Rng rng(307);
  const Graph g = testing::powerlaw_digraph(rng, 200, 2.2);
  StrapConfig cfg;
  cfg.eps = 1e-3;
  cfg.dim = 12;
  cfg.seed = 21;

  const auto a = embed_graph(g, cfg);
  const auto b = embed_graph(g, cfg);
  REQUIRE(a.embeddings.source == b.embeddings.source);
  REQUIRE(a.embeddings.target == b.embeddings.target);
  REQUIRE(a.proximity_nnz == b.proximity_nnz);

  const auto one_thread = embed_graph(g, cfg, 1);
  const auto two_threads = embed_graph(g, cfg, 2);
  REQUIRE(one_thread.embeddings.source == two_threads.embeddings.source);
  REQUIRE(one_thread.embeddings.target == two_threads.embeddings.target);

  REQUIRE(a.timings.push_g_seconds >= 0.0);
  REQUIRE(a.timings.push_gt_seconds >= 0.0);
  REQUIRE(a.timings.transform_seconds >= 0.0);
  REQUIRE(a.timings.svd_seconds >= 0.0);
  REQUIRE(a.proximity_nnz > 0);
}

TEST_CASE("pipeline rejects dim above the node count") {
  const auto g = Graph::from_arcs(2, {{0, 1}}, GraphKind::directed);
  StrapConfig cfg;
  cfg.dim = 3;
  REQUIRE_THROWS_AS(embed_graph(g, cfg), std::invalid_argument);
}

TEST_CASE("undirected pipeline produces a symmetric score matrix") {
  Rng rng(311);
  const Graph g = testing::random_undirected(rng, 60, 0.15);
  StrapConfig cfg;
  cfg.eps = 1e-3;
  cfg.dim = 8;
  const auto emb = embed_graph(g, cfg).embeddings;
  const Matrix scores = emb.source * emb.target.transpose();
  const double rel = (scores - scores.transpose()).norm() / scores.norm();
  REQUIRE(rel <= 1e-8);
}

TEST_CASE("pipeline beats the null model on reconstruction") {
  Rng rng(313);
  const Graph g = testing::powerlaw_digraph(rng, 400, 2.2);
  StrapConfig cfg;
  cfg.eps = 1e-4;
  cfg.dim = 32;
  const auto emb = embed_graph(g, cfg).embeddings;
  const double precision = reconstruction_precision(g, emb);
  const double null_rate = static_cast<double>(g.num_arcs()) /
                           (static_cast<double>(g.num_nodes()) * (g.num_nodes() - 1));
  INFO("precision=" << precision << " null=" << null_rate);
  REQUIRE(precision > 10.0 * null_rate);
}

TEST_CASE("adjacency svd baseline nails reconstruction at full rank") {
  Rng rng(317);
  const Graph g = testing::random_digraph(rng, 12, 0.25);
  StrapConfig cfg;
  cfg.dim = 12;
  const auto emb = adjacency_svd_embeddings(g, cfg);
  REQUIRE(reconstruction_precision(g, emb) == 1.0);
}
