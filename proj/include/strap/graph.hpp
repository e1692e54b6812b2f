#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace strap {

using NodeId = std::uint32_t;

enum class GraphKind { directed, undirected };
enum class Direction { in, out };

// Immutable directed graph in compressed adjacency form. Both orientations
// are indexed, neighbor lists are strictly increasing, and node ids are
// dense integers in [0, n). Undirected graphs are stored as both arcs, so
// num_arcs() counts directed arcs (2x the undirected edge count).
//
// Safe for concurrent reads once constructed.
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an arc list: drops self-loops, deduplicates, and for
  // undirected input materializes both arcs. Node ids must be < n.
  static Graph from_arcs(NodeId n, std::vector<std::pair<NodeId, NodeId>> arcs,
                         GraphKind kind) {
    if (kind == GraphKind::undirected) {
      const std::size_t original = arcs.size();
      arcs.reserve(original * 2);
      for (std::size_t i = 0; i < original; ++i) {
        arcs.emplace_back(arcs[i].second, arcs[i].first);
      }
    }
    std::erase_if(arcs, [](const auto& a) { return a.first == a.second; });
    for (const auto& [u, v] : arcs) {
      if (u >= n || v >= n) throw std::invalid_argument("Graph::from_arcs: node id out of range");
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

    Graph g;
    g.kind_ = kind;
    g.n_ = n;
    g.build_csr(arcs);
    return g;
  }

  NodeId num_nodes() const { return n_; }
  std::uint64_t num_arcs() const { return out_adj_.size(); }
  GraphKind kind() const { return kind_; }

  std::span<const NodeId> out_neighbors(NodeId u) const {
    return {out_adj_.data() + out_off_[u], out_adj_.data() + out_off_[u + 1]};
  }
  std::span<const NodeId> in_neighbors(NodeId u) const {
    return {in_adj_.data() + in_off_[u], in_adj_.data() + in_off_[u + 1]};
  }
  NodeId out_degree(NodeId u) const { return static_cast<NodeId>(out_off_[u + 1] - out_off_[u]); }
  NodeId in_degree(NodeId u) const { return static_cast<NodeId>(in_off_[u + 1] - in_off_[u]); }

  bool has_arc(NodeId u, NodeId v) const {
    const auto nb = out_neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  Graph transposed() const {
    Graph t;
    t.kind_ = kind_;
    t.n_ = n_;
    t.out_off_ = in_off_;
    t.out_adj_ = in_adj_;
    t.in_off_ = out_off_;
    t.in_adj_ = out_adj_;
    return t;
  }

  // Full consistency scan: strictly increasing neighbor lists, every arc
  // indexed in both directions, degree sums equal to the arc count.
  void validate() const {
    if (out_off_.size() != n_ + 1u || in_off_.size() != n_ + 1u) {
      throw std::logic_error("Graph::validate: offset array size mismatch");
    }
    std::uint64_t out_total = 0;
    std::uint64_t in_total = 0;
    for (NodeId u = 0; u < n_; ++u) {
      out_total += out_degree(u);
      in_total += in_degree(u);
      check_sorted(out_neighbors(u), u);
      check_sorted(in_neighbors(u), u);
      for (NodeId v : out_neighbors(u)) {
        const auto nb = in_neighbors(v);
        if (!std::binary_search(nb.begin(), nb.end(), u)) {
          throw std::logic_error("Graph::validate: arc missing from in-adjacency");
        }
      }
      for (NodeId v : in_neighbors(u)) {
        const auto nb = out_neighbors(v);
        if (!std::binary_search(nb.begin(), nb.end(), u)) {
          throw std::logic_error("Graph::validate: arc missing from out-adjacency");
        }
      }
    }
    if (out_total != num_arcs() || in_total != num_arcs()) {
      throw std::logic_error("Graph::validate: degree sums disagree with arc count");
    }
    if (kind_ == GraphKind::undirected) {
      for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v : out_neighbors(u)) {
          if (!has_arc(v, u)) throw std::logic_error("Graph::validate: undirected arc not mirrored");
        }
      }
    }
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.kind_ == b.kind_ && a.n_ == b.n_ && a.out_off_ == b.out_off_ &&
           a.out_adj_ == b.out_adj_;
  }

 private:
  static void check_sorted(std::span<const NodeId> nb, NodeId self) {
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] == self) throw std::logic_error("Graph::validate: self-loop present");
      if (i > 0 && nb[i] <= nb[i - 1]) {
        throw std::logic_error("Graph::validate: neighbor list not strictly increasing");
      }
    }
  }

  // arcs must be sorted by (u, v), deduplicated, self-loop free.
  void build_csr(const std::vector<std::pair<NodeId, NodeId>>& arcs) {
    out_off_.assign(n_ + 1u, 0);
    in_off_.assign(n_ + 1u, 0);
    for (const auto& [u, v] : arcs) {
      ++out_off_[u + 1];
      ++in_off_[v + 1];
    }
    for (NodeId i = 0; i < n_; ++i) {
      out_off_[i + 1] += out_off_[i];
      in_off_[i + 1] += in_off_[i];
    }
    out_adj_.resize(arcs.size());
    in_adj_.resize(arcs.size());
    std::vector<std::uint64_t> cursor(in_off_.begin(), in_off_.end() - 1);
    std::size_t k = 0;
    for (const auto& [u, v] : arcs) {
      out_adj_[k++] = v;
      in_adj_[cursor[v]++] = u;  // u ascends per v, so in-lists come out sorted
    }
  }

  GraphKind kind_ = GraphKind::directed;
  NodeId n_ = 0;
  std::vector<std::uint64_t> out_off_, in_off_;
  std::vector<NodeId> out_adj_, in_adj_;
};

// A graph together with the table mapping dense ids back to the ids found in
// the input file. original_ids is strictly increasing, so dense order and
// original order agree.
struct LoadedGraph {
  Graph graph;
  std::vector<std::uint64_t> original_ids;
};

namespace detail {

inline bool parse_u64(std::string_view token, std::uint64_t& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace detail

// Parses edge-list text: one "u v" pair per line, '#' lines are comments,
// blank lines are ignored. Node ids need not be contiguous; they are
// remapped to dense [0, n) in increasing order of original id.
inline LoadedGraph parse_edge_list(std::istream& in, GraphKind kind,
                                   const std::string& source_name = "<stream>") {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    const auto first_nonspace = view.find_first_not_of(" \t");
    if (first_nonspace == std::string_view::npos) continue;
    if (view[first_nonspace] == '#') continue;

    std::uint64_t fields[2];
    std::size_t field_count = 0;
    std::size_t pos = 0;
    bool bad = false;
    while (pos < view.size()) {
      while (pos < view.size() && (view[pos] == ' ' || view[pos] == '\t')) ++pos;
      if (pos >= view.size()) break;
      std::size_t end = pos;
      while (end < view.size() && view[end] != ' ' && view[end] != '\t') ++end;
      if (field_count >= 2 || !detail::parse_u64(view.substr(pos, end - pos), fields[field_count])) {
        bad = true;
        break;
      }
      ++field_count;
      pos = end;
    }
    if (bad || field_count != 2) {
      throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                               ": malformed edge line: \"" + line + "\"");
    }
    raw.emplace_back(fields[0], fields[1]);
  }
  if (raw.empty()) {
    throw std::runtime_error(source_name + ": no edges found");
  }

  std::vector<std::uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() > std::numeric_limits<NodeId>::max()) {
    throw std::runtime_error(source_name + ": too many distinct node ids");
  }
  const auto dense = [&ids](std::uint64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(raw.size());
  for (const auto& [u, v] : raw) arcs.emplace_back(dense(u), dense(v));

  LoadedGraph result;
  result.graph = Graph::from_arcs(static_cast<NodeId>(ids.size()), std::move(arcs), kind);
  result.graph.validate();
  result.original_ids = std::move(ids);
  return result;
}

inline LoadedGraph load_edge_list(const std::filesystem::path& path, GraphKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path.string());
  return parse_edge_list(in, kind, path.string());
}

// Emits "u v" lines in original-id space, sorted by (u, v).
inline void write_edge_list(const Graph& g, std::span<const std::uint64_t> original_ids,
                            std::ostream& out) {
  if (original_ids.size() != g.num_nodes()) {
    throw std::invalid_argument("write_edge_list: id table size mismatch");
  }
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.out_neighbors(u)) {
      out << original_ids[u] << ' ' << original_ids[v] << '\n';
    }
  }
}

inline std::map<NodeId, NodeId> degree_histogram(const Graph& g, Direction direction) {
  std::map<NodeId, NodeId> hist;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const NodeId d = direction == Direction::out ? g.out_degree(u) : g.in_degree(u);
    ++hist[d];
  }
  return hist;
}

}  // namespace strap
