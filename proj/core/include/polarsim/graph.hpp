#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polarsim {

using NodeId = std::uint32_t;

/// Unordered node pair stored with lo < hi. Used as the key of per-edge tables.
struct EdgeId {
  NodeId lo = 0;
  NodeId hi = 0;

  /// Normalizes the endpoint order. Throws std::invalid_argument when a == b.
  static EdgeId of(NodeId a, NodeId b);

  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

/// Immutable simple undirected graph with CSR adjacency.
///
/// Node ids are dense in [0, node_count). The edge list is sorted, every edge
/// appears in exactly two adjacency rows, and each adjacency row is sorted.
class Graph {
 public:
  Graph() = default;

  /// Throws std::invalid_argument on self-loops, parallel edges, out-of-range
  /// endpoints, or a label vector whose length is not node_count.
  static Graph from_edges(std::size_t node_count, std::vector<EdgeId> edges,
                          std::vector<int> block_labels = {});

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const EdgeId> edges() const { return edges_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId a, NodeId b) const;

  /// Position of `e` in edges(); throws std::out_of_range if absent.
  std::size_t edge_index(EdgeId e) const;

  bool has_block_labels() const { return !block_labels_.empty(); }
  std::span<const int> block_labels() const { return block_labels_; }

 private:
  std::size_t node_count_ = 0;
  std::vector<EdgeId> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::vector<int> block_labels_;
};

/// Result of collapsing a multigraph (self-loops, repeated pairs) to a simple graph.
struct ErasedGraph {
  Graph graph;
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
};

ErasedGraph erase_to_simple(std::size_t node_count,
                            std::span<const std::pair<NodeId, NodeId>> pairs,
                            std::vector<int> block_labels = {});

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Graph read from an edge-list file. original_ids[v] is the id the file used
/// for dense node v (first-appearance order).
struct LoadedGraph {
  Graph graph;
  std::vector<std::uint64_t> original_ids;
  std::size_t dropped_self_loops = 0;
  std::size_t dropped_duplicates = 0;

  std::size_t dropped() const { return dropped_self_loops + dropped_duplicates; }
  /// Dense id for a file id; throws std::out_of_range if unknown.
  NodeId dense_id(std::uint64_t original) const;
};

/// Parses the edge-list text format: two non-negative integers per line,
/// '#' comment lines, blank lines ignored. Throws ParseError.
LoadedGraph load_edge_list(std::istream& in);
LoadedGraph load_edge_list_file(const std::string& path);

/// Writes one "i j" line per edge. When `ids` is non-empty it maps dense ids
/// back to the caller's ids.
void write_edge_list(std::ostream& out, const Graph& g,
                     std::span<const std::uint64_t> ids = {});

/// Components as sorted node lists, ordered by their smallest member.
std::vector<std::vector<NodeId>> connected_components(const Graph& g);

/// Copy of `g` without `victims`. Throws std::invalid_argument if a victim is not an edge.
Graph remove_edges(const Graph& g, const std::set<EdgeId>& victims);

}  // namespace polarsim
