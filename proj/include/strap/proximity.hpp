#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "strap/graph.hpp"
#include "strap/ppr.hpp"

namespace strap {

// Full parameterization of one embedding run.
struct StrapConfig {
  double alpha = 0.5;
  double eps = 1e-5;
  int dim = 128;
  std::uint64_t seed = 1;
  int svd_oversample = 10;
  int svd_power_iters = 10;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("StrapConfig: alpha must be in (0,1)");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("StrapConfig: eps must be in (0,1)");
    if (dim < 1) throw std::invalid_argument("StrapConfig: dim must be >= 1");
    if (svd_oversample < 0) throw std::invalid_argument("StrapConfig: svd_oversample must be >= 0");
    if (svd_power_iters < 0) throw std::invalid_argument("StrapConfig: svd_power_iters must be >= 0");
  }

  // Short tag for output filenames, e.g. "a0.5_e1e-05_d128_s7".
  std::string fingerprint() const {
    std::ostringstream out;
    out << 'a' << alpha << "_e" << eps << "_d" << dim << "_s" << seed;
    return out.str();
  }
};

inline int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

// Sparse n x n matrix in compressed-row form, entries sorted by (row, col).
// Built by the proximity assembly below; the factorizer and tests may also
// construct instances directly from triples.
class SparseProximityMatrix {
 public:
  SparseProximityMatrix() = default;

  static SparseProximityMatrix from_triples(
      NodeId n, double eps, std::vector<std::tuple<NodeId, NodeId, double>> triples,
      bool transformed = false) {
    std::sort(triples.begin(), triples.end(), [](const auto& a, const auto& b) {
      return std::pair(std::get<0>(a), std::get<1>(a)) < std::pair(std::get<0>(b), std::get<1>(b));
    });
    std::vector<std::uint64_t> off(n + 1u, 0);
    std::vector<NodeId> col;
    std::vector<double> val;
    col.reserve(triples.size());
    val.reserve(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const auto& [r, c, v] = triples[i];
      if (r >= n || c >= n) throw std::invalid_argument("SparseProximityMatrix: index out of range");
      if (i > 0 && r == std::get<0>(triples[i - 1]) && c == std::get<1>(triples[i - 1])) {
        throw std::invalid_argument("SparseProximityMatrix: duplicate (row, col) entry");
      }
      ++off[r + 1u];
      col.push_back(c);
      val.push_back(v);
    }
    for (NodeId i = 0; i < n; ++i) off[i + 1] += off[i];
    return from_csr(n, eps, std::move(off), std::move(col), std::move(val), transformed);
  }

  NodeId dim() const { return n_; }
  std::uint64_t nnz() const { return col_.size(); }
  double eps() const { return eps_; }
  bool transformed() const { return transformed_; }

  std::span<const std::uint64_t> row_offsets() const { return row_off_; }
  std::span<const NodeId> columns() const { return col_; }
  std::span<const double> values() const { return val_; }

  std::span<const NodeId> row_columns(NodeId u) const {
    return {col_.data() + row_off_[u], col_.data() + row_off_[u + 1]};
  }
  std::span<const double> row_values(NodeId u) const {
    return {val_.data() + row_off_[u], val_.data() + row_off_[u + 1]};
  }

  double value_at(NodeId u, NodeId v) const {
    const auto cols = row_columns(u);
    const auto it = std::lower_bound(cols.begin(), cols.end(), v);
    if (it == cols.end() || *it != v) return 0.0;
    return val_[row_off_[u] + static_cast<std::size_t>(it - cols.begin())];
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (NodeId u = 0; u < n_; ++u) {
      const auto cols = row_columns(u);
      const auto vals = row_values(u);
      for (std::size_t k = 0; k < cols.size(); ++k) fn(u, cols[k], vals[k]);
    }
  }

  // Adopts ready-made CSR arrays; off must have n+1 monotone entries and
  // col/val must be sorted by (row, col) with no duplicates.
  static SparseProximityMatrix from_csr(NodeId n, double eps, std::vector<std::uint64_t> off,
                                        std::vector<NodeId> col, std::vector<double> val,
                                        bool transformed = false) {
    SparseProximityMatrix m;
    m.n_ = n;
    m.eps_ = eps;
    m.transformed_ = transformed;
    m.row_off_ = std::move(off);
    m.col_ = std::move(col);
    m.val_ = std::move(val);
    return m;
  }

 private:
  friend SparseProximityMatrix log_transform(SparseProximityMatrix);

  NodeId n_ = 0;
  double eps_ = 0.0;
  bool transformed_ = false;
  std::vector<std::uint64_t> row_off_;
  std::vector<NodeId> col_;
  std::vector<double> val_;
};

enum class ProximitySides {
  both,          // forward pass on G plus transpose pass on G^T
  forward_only,  // ablation: transpose pass disabled
};

struct ProximityPassTimings {
  double seconds_pass_g = 0.0;
  double seconds_pass_gt = 0.0;
};

namespace detail {

// One backward-push sweep over all targets; kept[t] holds the (source,
// reserve) pairs with reserve >= keep. Targets run in parallel, each thread
// on its own workspace; results land in per-target slots so the outcome is
// independent of scheduling.
inline std::vector<std::vector<std::pair<NodeId, double>>> push_all_targets(
    const Graph& g, double alpha, double r_max, double keep, int threads) {
  const NodeId n = g.num_nodes();
  std::vector<std::vector<std::pair<NodeId, double>>> kept(n);
  const PprParams params{alpha, r_max};
  const int nthreads = resolve_threads(threads);
  std::vector<PushWorkspace> workspaces(static_cast<std::size_t>(nthreads));

#ifdef _OPENMP
#pragma omp parallel num_threads(nthreads)
  {
    PushWorkspace& ws = workspaces[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(n); ++t) {
      PushResult r = backward_push(g, static_cast<NodeId>(t), params, ws);
      auto& out = kept[static_cast<std::size_t>(t)];
      for (const auto& [u, pi] : r.reserves) {
        if (pi >= keep) out.emplace_back(u, pi);
      }
    }
  }
#else
  PushWorkspace& ws = workspaces[0];
  for (NodeId t = 0; t < n; ++t) {
    PushResult r = backward_push(g, t, params, ws);
    auto& out = kept[t];
    for (const auto& [u, pi] : r.reserves) {
      if (pi >= keep) out.emplace_back(u, pi);
    }
  }
#endif
  return kept;
}

inline double wall_seconds() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return 0.0;
#endif
}

}  // namespace detail

// Assembles the sparse transpose-proximity matrix: for every target v a
// backward push on G contributes column entries P[u][v] = pi(u, v), then for
// every target u a backward push on G^T adds P[u][v] += pi_T(v, u). Both
// passes push with r_max = eps/2 and keep reserves >= eps/2. Every stored
// entry lies within [PPR(u,v) + PPR^T(v,u) - 2*eps, PPR(u,v) + PPR^T(v,u)]
// and the matrix has at most 4n/eps non-zeros.
inline SparseProximityMatrix build_transpose_proximity(
    const Graph& g, double alpha, double eps, int threads = 0,
    ProximitySides sides = ProximitySides::both, ProximityPassTimings* timings = nullptr) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("build_transpose_proximity: alpha must be in (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("build_transpose_proximity: eps must be in (0,1)");

  const NodeId n = g.num_nodes();
  const double keep = eps / 2.0;

  const double t0 = detail::wall_seconds();
  // Pass on G: kept_by_col[v] lists (u, pi(u, v)) -> column-grouped entries.
  auto kept_by_col = detail::push_all_targets(g, alpha, keep, keep, threads);
  const double t1 = detail::wall_seconds();

  // Pass on G^T: kept_by_row[u] lists (v, pi_T(v, u)) -> row-grouped entries.
  std::vector<std::vector<std::pair<NodeId, double>>> kept_by_row(n);
  if (sides == ProximitySides::both) {
    const Graph gt = g.transposed();
    kept_by_row = detail::push_all_targets(gt, alpha, keep, keep, threads);
  }
  const double t2 = detail::wall_seconds();
  if (timings) {
    timings->seconds_pass_g = t1 - t0;
    timings->seconds_pass_gt = t2 - t1;
  }

  // Regroup the G-side entries by row. Iterating columns in ascending order
  // keeps each row's column list sorted.
  std::vector<std::uint64_t> row_count(n + 1u, 0);
  for (NodeId v = 0; v < n; ++v) {
    for (const auto& [u, pi] : kept_by_col[v]) ++row_count[u + 1u];
  }
  for (NodeId i = 0; i < n; ++i) row_count[i + 1] += row_count[i];
  std::vector<std::pair<NodeId, double>> g_side(row_count[n]);
  {
    std::vector<std::uint64_t> cursor(row_count.begin(), row_count.end() - 1);
    for (NodeId v = 0; v < n; ++v) {
      for (const auto& [u, pi] : kept_by_col[v]) g_side[cursor[u]++] = {v, pi};
    }
  }
  kept_by_col.clear();
  kept_by_col.shrink_to_fit();

  // Merge the two sorted per-row lists, summing collisions.
  std::vector<std::uint64_t> off(n + 1u, 0);
  std::vector<NodeId> col;
  std::vector<double> val;
  std::uint64_t reserve_guess = row_count[n];
  for (NodeId u = 0; u < n; ++u) reserve_guess += kept_by_row[u].size();
  col.reserve(reserve_guess);
  val.reserve(reserve_guess);

  for (NodeId u = 0; u < n; ++u) {
    auto a = g_side.begin() + static_cast<std::ptrdiff_t>(row_count[u]);
    const auto a_end = g_side.begin() + static_cast<std::ptrdiff_t>(row_count[u + 1]);
    const auto& b = kept_by_row[u];
    std::size_t bi = 0;
    while (a != a_end || bi < b.size()) {
      if (bi >= b.size() || (a != a_end && a->first < b[bi].first)) {
        col.push_back(a->first);
        val.push_back(a->second);
        ++a;
      } else if (a == a_end || b[bi].first < a->first) {
        col.push_back(b[bi].first);
        val.push_back(b[bi].second);
        ++bi;
      } else {
        col.push_back(a->first);
        val.push_back(a->second + b[bi].second);
        ++a;
        ++bi;
      }
    }
    off[u + 1] = col.size();
  }

  if (static_cast<double>(col.size()) > 4.0 * static_cast<double>(n) / eps) {
    throw std::logic_error("build_transpose_proximity: sparsity bound 4n/eps violated");
  }
  for (double v : val) {
    if (!(v >= keep) || !(v <= 2.0 + 1e-9)) {
      throw std::logic_error("build_transpose_proximity: entry outside [eps/2, 2]");
    }
  }

  return SparseProximityMatrix::from_csr(n, eps, std::move(off), std::move(col), std::move(val));
}

// Entry-wise non-linearity: every stored value x becomes ln((2/eps) * x).
// The sparsity pattern is unchanged. Requires an untransformed matrix whose
// values are all >= eps/2, so results are >= ln(1) = 0.
inline SparseProximityMatrix log_transform(SparseProximityMatrix m) {
  if (m.transformed()) throw std::invalid_argument("log_transform: matrix already transformed");
  const double scale = 2.0 / m.eps();
  const double floor = m.eps() / 2.0;
  for (double& v : m.val_) {
    if (!(v >= floor)) {
      throw std::logic_error("log_transform: entry below eps/2 indicates a broken assembly threshold");
    }
    double t = std::log(scale * v);
    if (t < 0.0) t = 0.0;  // values at the keep threshold are ln(1); absorb rounding residue
    v = t;
  }
  m.transformed_ = true;
  return m;
}

// Exact per-row sums of the stored entries. Only meaningful before the log
// transform, where they track out-degree; refuses transformed input.
inline std::vector<double> proximity_row_sums(const SparseProximityMatrix& m) {
  if (m.transformed()) throw std::invalid_argument("proximity_row_sums: requires untransformed matrix");
  std::vector<double> sums(m.dim(), 0.0);
  m.for_each([&](NodeId u, NodeId, double v) { sums[u] += v; });
  return sums;
}

inline std::vector<double> proximity_col_sums(const SparseProximityMatrix& m) {
  if (m.transformed()) throw std::invalid_argument("proximity_col_sums: requires untransformed matrix");
  std::vector<double> sums(m.dim(), 0.0);
  m.for_each([&](NodeId, NodeId v, double x) { sums[v] += x; });
  return sums;
}

// Text dump "u v value", one entry per line, sorted by (u, v).
inline void dump_triples(const SparseProximityMatrix& m, std::ostream& out) {
  char buf[64];
  m.for_each([&](NodeId u, NodeId v, double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << u << ' ' << v << ' ' << buf << '\n';
  });
}

}  // namespace strap
