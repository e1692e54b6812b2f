#pragma once

// Independent reference computations used to pin expected values: full PPR
// matrices from the power-iteration oracle, dense SVD via Eigen's Jacobi
// implementation, and brute-force pair ranking.

#include <algorithm>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "strap/evaluate.hpp"
#include "strap/factorize.hpp"
#include "strap/graph.hpp"
#include "strap/ppr.hpp"
#include "strap/proximity.hpp"

namespace strap::testing {

// rows[u][v] = PPR(u, v), each entry within tol of exact.
inline std::vector<std::vector<double>> full_ppr_matrix(const Graph& g, double alpha,
                                                        double tol) {
  std::vector<std::vector<double>> rows(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) rows[u] = exact_ppr_row(g, u, alpha, tol);
  return rows;
}

inline Eigen::MatrixXd dense_of(const SparseProximityMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.dim(), m.dim());
  m.for_each([&](NodeId u, NodeId v, double x) { d(u, v) = x; });
  return d;
}

// Optimal rank-d Frobenius error from a full dense SVD.
inline double optimal_rank_error(const Eigen::MatrixXd& dense, int dim) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
  const auto& sigma = svd.singularValues();
  double tail = 0.0;
  for (Eigen::Index k = dim; k < sigma.size(); ++k) tail += sigma(k) * sigma(k);
  return std::sqrt(tail);
}

inline double reconstruction_error(const Eigen::MatrixXd& dense, const SvdResult& svd) {
  return (dense - svd.U * svd.sigma.asDiagonal() * svd.V.transpose()).norm();
}

// All n*(n-1) ordered pairs ranked by (score desc, u asc, v asc).
inline std::vector<ScoredPair> brute_force_top_m(const EmbeddingPair& emb, std::uint64_t m) {
  std::vector<ScoredPair> all;
  const NodeId n = emb.num_nodes();
  all.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v) all.push_back({u, v, emb.score(u, v)});
    }
  }
  std::sort(all.begin(), all.end(), ranks_before);
  if (all.size() > m) all.resize(m);
  return all;
}

}  // namespace strap::testing
