#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strap/proximity.hpp"
#include "strap/rng.hpp"

namespace strap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Row-major panels keep the sparse-times-dense kernels on contiguous rows.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SvdResult {
  Matrix U;      // n x d, orthonormal columns
  Vector sigma;  // d non-negative values, non-increasing
  Matrix V;      // n x d, orthonormal columns
};

// Content/context embeddings: score(u, v) = <source row u, target row v>.
struct EmbeddingPair {
  Matrix source;  // n x d, rows s_u
  Matrix target;  // n x d, rows t_v
  int dim = 0;
  StrapConfig config;

  NodeId num_nodes() const { return static_cast<NodeId>(source.rows()); }

  double score(NodeId u, NodeId v) const {
    if (u >= num_nodes() || v >= num_nodes()) throw std::out_of_range("EmbeddingPair::score: node out of range");
    return source.row(u).dot(target.row(v));
  }
};

namespace detail {

struct CsrMatrix {
  NodeId rows = 0;
  std::vector<std::uint64_t> off;
  std::vector<NodeId> col;
  std::vector<double> val;
};

inline CsrMatrix transposed_csr(const SparseProximityMatrix& m) {
  CsrMatrix t;
  t.rows = m.dim();
  t.off.assign(m.dim() + 1u, 0);
  for (NodeId c : m.columns()) ++t.off[c + 1u];
  for (NodeId i = 0; i < m.dim(); ++i) t.off[i + 1] += t.off[i];
  t.col.resize(m.nnz());
  t.val.resize(m.nnz());
  std::vector<std::uint64_t> cursor(t.off.begin(), t.off.end() - 1);
  m.for_each([&](NodeId u, NodeId v, double x) {
    t.col[cursor[v]] = u;
    t.val[cursor[v]] = x;
    ++cursor[v];
  });
  return t;
}

// Y = A * X with A in CSR form. Rows are independent, so the row-parallel
// loop is deterministic for any thread count.
template <class Csr>
RowMatrix spmm(const Csr& a, std::uint64_t a_rows, const RowMatrix& x, int threads) {
  RowMatrix y = RowMatrix::Zero(static_cast<Eigen::Index>(a_rows), x.cols());
  const int nthreads = resolve_threads(threads);
  (void)nthreads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256) num_threads(nthreads)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(a_rows); ++i) {
    auto yi = y.row(i);
    const std::uint64_t begin = a.off[static_cast<std::size_t>(i)];
    const std::uint64_t end = a.off[static_cast<std::size_t>(i) + 1];
    for (std::uint64_t k = begin; k < end; ++k) {
      yi.noalias() += a.val[k] * x.row(a.col[k]);
    }
  }
  return y;
}

struct CsrSpanView {
  std::span<const std::uint64_t> off;
  std::span<const NodeId> col;
  std::span<const double> val;
};

inline RowMatrix spmm(const SparseProximityMatrix& m, const RowMatrix& x, int threads) {
  CsrSpanView view{m.row_offsets(), m.columns(), m.values()};
  return spmm(view, m.dim(), x, threads);
}

inline RowMatrix thin_q(const RowMatrix& y) {
  Eigen::HouseholderQR<RowMatrix> qr(y);
  RowMatrix q = qr.householderQ() * RowMatrix::Identity(y.rows(), y.cols());
  return q;
}

}  // namespace detail

inline bool is_entry_symmetric(const SparseProximityMatrix& m) {
  for (NodeId u = 0; u < m.dim(); ++u) {
    const auto cols = m.row_columns(u);
    const auto vals = m.row_values(u);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (m.value_at(cols[k], u) != vals[k]) return false;
    }
  }
  return true;
}

// Truncated SVD of a sparse matrix by a Gaussian randomized range finder
// with power iterations (QR re-orthogonalization each step). With the
// default oversample/power-iteration counts the reconstruction error is
// within a small constant factor of the optimal rank-d Frobenius error.
// Deterministic for a fixed seed at any thread count.
inline SvdResult randomized_svd(const SparseProximityMatrix& p, int dim, std::uint64_t seed,
                                int oversample = 10, int power_iters = 10, int threads = 0) {
  const NodeId n = p.dim();
  if (dim < 1) throw std::invalid_argument("randomized_svd: dim must be >= 1");
  if (static_cast<std::uint64_t>(dim) > n) throw std::invalid_argument("randomized_svd: dim exceeds matrix dimension");
  if (oversample < 0 || power_iters < 0) throw std::invalid_argument("randomized_svd: negative control parameter");

  const Eigen::Index l = std::min<Eigen::Index>(static_cast<Eigen::Index>(dim) + oversample,
                                                static_cast<Eigen::Index>(n));

  Rng rng(seed);
  RowMatrix omega(static_cast<Eigen::Index>(n), l);
  for (Eigen::Index i = 0; i < omega.rows(); ++i) {
    for (Eigen::Index j = 0; j < omega.cols(); ++j) omega(i, j) = rng.gaussian();
  }

  const detail::CsrMatrix pt = detail::transposed_csr(p);

  RowMatrix q = detail::thin_q(detail::spmm(p, omega, threads));
  for (int it = 0; it < power_iters; ++it) {
    const RowMatrix z = detail::thin_q(detail::spmm(pt, pt.rows, q, threads));
    q = detail::thin_q(detail::spmm(p, z, threads));
  }

  SvdResult result;
  if (is_entry_symmetric(p)) {
    // Symmetric input: Rayleigh-Ritz eigendecomposition of the projected
    // matrix. Each retained triple has V column = +/- U column, so the
    // reconstruction (and every score) is symmetric exactly, even when the
    // spectrum is degenerate at the rank cut.
    const Matrix qd(q);
    const Matrix b = qd.transpose() * Matrix(detail::spmm(p, q, threads));
    const Matrix b_sym = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b_sym);
    if (eig.info() != Eigen::Success) throw std::runtime_error("randomized_svd: eigensolver failed");
    const Vector& lambda = eig.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(lambda.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    std::sort(order.begin(), order.end(), [&lambda](Eigen::Index a, Eigen::Index b_) {
      const double ma = std::abs(lambda(a));
      const double mb = std::abs(lambda(b_));
      if (ma != mb) return ma > mb;
      if (lambda(a) != lambda(b_)) return lambda(a) > lambda(b_);
      return a < b_;
    });
    result.U.resize(static_cast<Eigen::Index>(n), dim);
    result.V.resize(static_cast<Eigen::Index>(n), dim);
    result.sigma.resize(dim);
    for (int k = 0; k < dim; ++k) {
      const Eigen::Index i = order[static_cast<std::size_t>(k)];
      result.U.col(k) = qd * eig.eigenvectors().col(i);
      result.sigma(k) = std::abs(lambda(i));
      result.V.col(k) = result.U.col(k);
      if (lambda(i) < 0.0) result.V.col(k) = -result.V.col(k);
    }
  } else {
    // B = Q^T P factored through its transpose: Bt = P^T Q, so P ~ Q (Bt)^T.
    const RowMatrix bt = detail::spmm(pt, pt.rows, q, threads);
    Eigen::BDCSVD<Matrix> svd(Matrix(bt), Eigen::ComputeThinU | Eigen::ComputeThinV);
    result.U = Matrix(q) * svd.matrixV().leftCols(dim);
    result.sigma = svd.singularValues().head(dim);
    result.V = svd.matrixU().leftCols(dim);
  }

  // Sign convention: the largest-magnitude entry of each U column is
  // non-negative, so output files are identical across runs and platforms.
  for (int k = 0; k < dim; ++k) {
    Eigen::Index at = 0;
    result.U.col(k).cwiseAbs().maxCoeff(&at);
    if (result.U(at, k) < 0.0) {
      result.U.col(k) = -result.U.col(k);
      result.V.col(k) = -result.V.col(k);
    }
  }

  for (int k = 0; k + 1 < dim; ++k) {
    if (result.sigma(k) < result.sigma(k + 1)) {
      throw std::logic_error("randomized_svd: singular values not sorted");
    }
  }
  const double u_err = (result.U.transpose() * result.U - Matrix::Identity(dim, dim)).norm();
  const double v_err = (result.V.transpose() * result.V - Matrix::Identity(dim, dim)).norm();
  if (!(u_err <= 1e-8) || !(v_err <= 1e-8)) {
    throw std::logic_error("randomized_svd: factor columns lost orthonormality");
  }
  return result;
}

// S = U * sqrt(Sigma), T = V * sqrt(Sigma); score(u, v) reproduces the
// rank-d reconstruction exactly.
inline EmbeddingPair extract_embeddings(const SvdResult& svd, const StrapConfig& config) {
  EmbeddingPair emb;
  const Vector root = svd.sigma.cwiseMax(0.0).cwiseSqrt();
  emb.source = svd.U * root.asDiagonal();
  emb.target = svd.V * root.asDiagonal();
  emb.dim = static_cast<int>(svd.sigma.size());
  emb.config = config;
  return emb;
}

// Canonical embedding text format: header "n d", then n source rows and n
// target rows of "orig_id f_1 ... f_d" with 17 significant digits.
inline void write_embeddings(const EmbeddingPair& emb, std::span<const std::uint64_t> original_ids,
                             std::ostream& out) {
  const NodeId n = emb.num_nodes();
  if (original_ids.size() != n) throw std::invalid_argument("write_embeddings: id table size mismatch");
  out << n << ' ' << emb.dim << '\n';
  char buf[40];
  const auto write_rows = [&](const Matrix& m) {
    for (NodeId u = 0; u < n; ++u) {
      out << original_ids[u];
      for (int k = 0; k < emb.dim; ++k) {
        std::snprintf(buf, sizeof(buf), " %.17g", m(u, k));
        out << buf;
      }
      out << '\n';
    }
  };
  write_rows(emb.source);
  write_rows(emb.target);
}

struct ReadEmbeddings {
  EmbeddingPair embeddings;
  std::vector<std::uint64_t> original_ids;
};

inline ReadEmbeddings read_embeddings(std::istream& in) {
  std::uint64_t n = 0;
  int d = 0;
  if (!(in >> n >> d) || d < 1) throw std::runtime_error("read_embeddings: bad header");
  ReadEmbeddings result;
  result.embeddings.dim = d;
  result.embeddings.config.dim = d;
  result.embeddings.source.resize(static_cast<Eigen::Index>(n), d);
  result.embeddings.target.resize(static_cast<Eigen::Index>(n), d);
  result.original_ids.resize(n);
  for (int half = 0; half < 2; ++half) {
    Matrix& m = half == 0 ? result.embeddings.source : result.embeddings.target;
    for (std::uint64_t u = 0; u < n; ++u) {
      std::uint64_t id = 0;
      if (!(in >> id)) throw std::runtime_error("read_embeddings: truncated file");
      if (half == 0) {
        result.original_ids[u] = id;
      } else if (result.original_ids[u] != id) {
        throw std::runtime_error("read_embeddings: source/target id mismatch");
      }
      for (int k = 0; k < d; ++k) {
        if (!(in >> m(static_cast<Eigen::Index>(u), k))) {
          throw std::runtime_error("read_embeddings: truncated row");
        }
      }
    }
  }
  return result;
}

}  // namespace strap
