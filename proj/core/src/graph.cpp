#include "polarsim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace polarsim {

EdgeId EdgeId::of(NodeId a, NodeId b) {
  if (a == b) {
    throw std::invalid_argument("self-loop " + std::to_string(a) + " is not an edge");
  }
  return a < b ? EdgeId{a, b} : EdgeId{b, a};
}

Graph Graph::from_edges(std::size_t node_count, std::vector<EdgeId> edges,
                        std::vector<int> block_labels) {
  if (!block_labels.empty() && block_labels.size() != node_count) {
    throw std::invalid_argument("block label vector length " +
                                std::to_string(block_labels.size()) +
                                " does not match node count " +
                                std::to_string(node_count));
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const EdgeId& e = edges[k];
    if (e.lo >= e.hi) {
      throw std::invalid_argument("edge (" + std::to_string(e.lo) + "," +
                                  std::to_string(e.hi) + ") is a self-loop or not normalized");
    }
    if (e.hi >= node_count) {
      throw std::invalid_argument("edge endpoint " + std::to_string(e.hi) +
                                  " out of range for " + std::to_string(node_count) + " nodes");
    }
    if (k > 0 && edges[k - 1] == e) {
      throw std::invalid_argument("parallel edge (" + std::to_string(e.lo) + "," +
                                  std::to_string(e.hi) + ")");
    }
  }

  Graph g;
  g.node_count_ = node_count;
  g.offsets_.assign(node_count + 1, 0);
  for (const EdgeId& e : edges) {
    ++g.offsets_[e.lo + 1];
    ++g.offsets_[e.hi + 1];
  }
  for (std::size_t v = 0; v < node_count; ++v) {
    g.offsets_[v + 1] += g.offsets_[v];
  }
  g.adjacency_.resize(2 * edges.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges are sorted by (lo, hi), so filling in this order leaves rows sorted
  // except for the entries contributed as the `hi` endpoint; sort afterwards.
  for (const EdgeId& e : edges) {
    g.adjacency_[cursor[e.lo]++] = e.hi;
    g.adjacency_[cursor[e.hi]++] = e.lo;
  }
  for (std::size_t v = 0; v < node_count; ++v) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
  }
  g.edges_ = std::move(edges);
  g.block_labels_ = std::move(block_labels);
  return g;
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a >= node_count_ || b >= node_count_ || a == b) return false;
  auto row = neighbors(a);
  return std::binary_search(row.begin(), row.end(), b);
}

std::size_t Graph::edge_index(EdgeId e) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) {
    throw std::out_of_range("edge (" + std::to_string(e.lo) + "," + std::to_string(e.hi) +
                            ") not in graph");
  }
  return static_cast<std::size_t>(it - edges_.begin());
}

ErasedGraph erase_to_simple(std::size_t node_count,
                            std::span<const std::pair<NodeId, NodeId>> pairs,
                            std::vector<int> block_labels) {
  ErasedGraph out;
  std::vector<EdgeId> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    if (a == b) {
      ++out.self_loops;
      continue;
    }
    edges.push_back(EdgeId::of(a, b));
  }
  std::sort(edges.begin(), edges.end());
  auto last = std::unique(edges.begin(), edges.end());
  out.duplicates = static_cast<std::size_t>(edges.end() - last);
  edges.erase(last, edges.end());
  out.graph = Graph::from_edges(node_count, std::move(edges), std::move(block_labels));
  return out;
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

NodeId LoadedGraph::dense_id(std::uint64_t original) const {
  auto it = std::find(original_ids.begin(), original_ids.end(), original);
  if (it == original_ids.end()) {
    throw std::out_of_range("node id " + std::to_string(original) + " not present in graph");
  }
  return static_cast<NodeId>(it - original_ids.begin());
}

namespace {

std::uint64_t parse_node_token(std::string_view token, std::size_t line_no) {
  std::uint64_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(line_no, "expected a non-negative integer node id, got '" +
                                  std::string(token) + "'");
  }
  return value;
}

}  // namespace

LoadedGraph load_edge_list(std::istream& in) {
  LoadedGraph result;
  std::unordered_map<std::uint64_t, NodeId> dense;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  auto intern = [&](std::uint64_t id) {
    auto [it, inserted] = dense.try_emplace(id, static_cast<NodeId>(result.original_ids.size()));
    if (inserted) result.original_ids.push_back(id);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    auto start = view.find_first_not_of(" \t\r");
    if (start == std::string_view::npos) continue;
    view.remove_prefix(start);
    if (view.front() == '#') continue;

    std::vector<std::string_view> tokens;
    while (!view.empty()) {
      auto end = view.find_first_of(" \t\r");
      tokens.push_back(view.substr(0, end));
      if (end == std::string_view::npos) break;
      view.remove_prefix(end);
      auto next = view.find_first_not_of(" \t\r");
      if (next == std::string_view::npos) break;
      view.remove_prefix(next);
    }
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected two node ids, got " + std::to_string(tokens.size()) +
                                    " tokens");
    }
    std::uint64_t a = parse_node_token(tokens[0], line_no);
    std::uint64_t b = parse_node_token(tokens[1], line_no);
    NodeId da = intern(a);
    NodeId db = intern(b);
    pairs.emplace_back(da, db);
  }
  if (pairs.empty()) {
    throw ParseError(line_no, "edge list contains no edges");
  }
  ErasedGraph erased = erase_to_simple(result.original_ids.size(), pairs);
  result.graph = std::move(erased.graph);
  result.dropped_self_loops = erased.self_loops;
  result.dropped_duplicates = erased.duplicates;
  return result;
}

LoadedGraph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  return load_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g, std::span<const std::uint64_t> ids) {
  if (!ids.empty() && ids.size() != g.node_count()) {
    throw std::invalid_argument("id map length does not match node count");
  }
  for (const EdgeId& e : g.edges()) {
    if (ids.empty()) {
      out << e.lo << ' ' << e.hi << '\n';
    } else {
      out << ids[e.lo] << ' ' << ids[e.hi] << '\n';
    }
  }
}

std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<NodeId>> components;
  std::vector<NodeId> frontier;
  for (NodeId root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<NodeId> members{root};
    seen[root] = true;
    frontier.assign(1, root);
    while (!frontier.empty()) {
      NodeId v = frontier.back();
      frontier.pop_back();
      for (NodeId w : g.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = true;
          members.push_back(w);
          frontier.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  return components;
}

Graph remove_edges(const Graph& g, const std::set<EdgeId>& victims) {
  for (const EdgeId& e : victims) {
    if (e.hi >= g.node_count() || !g.has_edge(e.lo, e.hi)) {
      throw std::invalid_argument("cannot remove (" + std::to_string(e.lo) + "," +
                                  std::to_string(e.hi) + "): not an edge of the graph");
    }
  }
  std::vector<EdgeId> kept;
  kept.reserve(g.edge_count() - victims.size());
  for (const EdgeId& e : g.edges()) {
    if (!victims.contains(e)) kept.push_back(e);
  }
  auto labels = g.block_labels();
  return Graph::from_edges(g.node_count(), std::move(kept),
                           std::vector<int>(labels.begin(), labels.end()));
}

}  // namespace polarsim
