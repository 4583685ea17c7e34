#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ohmpath/error.hpp"

namespace ohmpath {

/// Undirected arc stored with endpoints in ascending order.
struct Arc {
  int u{};
  int v{};

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Normalizes {i,j} to ascending order; rejects self-loops.
inline Arc make_arc(int i, int j) {
  if (i == j) fail(ErrorCode::SelfLoop, "arc {" + std::to_string(i) + "," + std::to_string(j) + "}");
  return i < j ? Arc{i, j} : Arc{j, i};
}

/// Simple undirected graph over dense node ids 0..node_count-1.
/// Arcs are kept sorted lexicographically; that order defines the
/// coordinate order of conductance vectors.
struct Graph {
  int node_count{};
  std::vector<Arc> arcs;

  bool has_node(int i) const { return i >= 0 && i < node_count; }

  bool has_arc(Arc a) const {
    return std::binary_search(arcs.begin(), arcs.end(), a);
  }

  /// Index of an arc in the sorted arc list, -1 if absent.
  int arc_index(Arc a) const {
    auto it = std::lower_bound(arcs.begin(), arcs.end(), a);
    if (it == arcs.end() || *it != a) return -1;
    return static_cast<int>(it - arcs.begin());
  }

  int degree(int node) const {
    int d = 0;
    for (const Arc& a : arcs)
      if (a.u == node || a.v == node) ++d;
    return d;
  }

  /// Neighbor lists in ascending order.
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(node_count);
    for (const Arc& a : arcs) {
      adj[a.u].push_back(a.v);
      adj[a.v].push_back(a.u);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
  }

  friend bool operator==(const Graph&, const Graph&) = default;
};

/// Validates and canonicalizes raw arc data into a Graph.
inline Graph make_graph(int node_count, std::vector<std::pair<int, int>> raw_arcs,
                        int min_nodes = 1) {
  if (node_count < min_nodes)
    fail(ErrorCode::TooFewNodes,
         "graph has " + std::to_string(node_count) + " nodes, need at least " +
             std::to_string(min_nodes));
  Graph g;
  g.node_count = node_count;
  g.arcs.reserve(raw_arcs.size());
  for (auto [i, j] : raw_arcs) {
    if (i < 0 || j < 0 || i >= node_count || j >= node_count)
      fail(ErrorCode::NodeOutOfRange,
           "arc endpoint outside 0.." + std::to_string(node_count - 1));
    g.arcs.push_back(make_arc(i, j));
  }
  std::sort(g.arcs.begin(), g.arcs.end());
  auto dup = std::adjacent_find(g.arcs.begin(), g.arcs.end());
  if (dup != g.arcs.end())
    fail(ErrorCode::DuplicateArc,
         "arc {" + std::to_string(dup->u) + "," + std::to_string(dup->v) + "} listed twice");
  return g;
}

/// Graph file content: the graph plus optional endpoint hints.
struct GraphFile {
  Graph graph;
  std::optional<int> h_start;
  std::optional<int> h_end;
};

/// Parses the JSON graph format {"nodes": n, "arcs": [[i,j],...]} with
/// optional "h_start"/"h_end" keys. Enforces the >= 3 node rule for
/// original graphs.
inline GraphFile parse_graph_file(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedJson, e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("arcs") ||
      !doc["nodes"].is_number_integer() || !doc["arcs"].is_array())
    fail(ErrorCode::MalformedJson, "expected {\"nodes\": int, \"arcs\": [[i,j],...]}");

  std::vector<std::pair<int, int>> raw;
  for (const auto& entry : doc["arcs"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() ||
        !entry[1].is_number_integer())
      fail(ErrorCode::MalformedJson, "each arc must be a pair of node ids");
    raw.emplace_back(entry[0].get<int>(), entry[1].get<int>());
  }

  GraphFile file;
  file.graph = make_graph(doc["nodes"].get<int>(), std::move(raw), /*min_nodes=*/3);
  for (const char* key : {"h_start", "h_end"}) {
    if (!doc.contains(key)) continue;
    if (!doc[key].is_number_integer()) fail(ErrorCode::MalformedJson, std::string(key) + " must be a node id");
    int node = doc[key].get<int>();
    if (!file.graph.has_node(node))
      fail(ErrorCode::NodeOutOfRange, std::string(key) + "=" + std::to_string(node));
    (key[2] == 's' ? file.h_start : file.h_end) = node;
  }
  return file;
}

inline Graph parse_graph(const std::string& text) { return parse_graph_file(text).graph; }

/// Canonical writer: arcs sorted lexicographically.
inline std::string graph_to_json(const Graph& g, std::optional<int> h_start = {},
                                 std::optional<int> h_end = {}) {
  nlohmann::json doc;
  doc["nodes"] = g.node_count;
  auto arcs = nlohmann::json::array();
  for (const Arc& a : g.arcs) arcs.push_back({a.u, a.v});
  doc["arcs"] = std::move(arcs);
  if (h_start) doc["h_start"] = *h_start;
  if (h_end) doc["h_end"] = *h_end;
  return doc.dump();
}

/// A path visiting every node of a graph exactly once.
struct HamiltonianPath {
  std::vector<int> nodes;

  std::vector<Arc> arc_set() const {
    std::vector<Arc> arcs;
    arcs.reserve(nodes.empty() ? 0 : nodes.size() - 1);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
      arcs.push_back(make_arc(nodes[k], nodes[k + 1]));
    return arcs;
  }

  friend bool operator==(const HamiltonianPath&, const HamiltonianPath&) = default;
};

namespace detail {

inline void hp_backtrack(const std::vector<std::vector<int>>& adj, int end,
                         std::vector<int>& path, std::vector<bool>& used,
                         std::size_t limit, std::vector<HamiltonianPath>& out) {
  if (out.size() == limit) return;
  int current = path.back();
  if (path.size() == adj.size()) {
    if (current == end) out.push_back(HamiltonianPath{path});
    return;
  }
  for (int next : adj[current]) {
    if (used[next]) continue;
    // the end node may only be taken as the final step
    if (next == end && path.size() + 1 != adj.size()) continue;
    used[next] = true;
    path.push_back(next);
    hp_backtrack(adj, end, path, used, limit, out);
    path.pop_back();
    used[next] = false;
  }
}

}  // namespace detail

/// Exhaustive backtracking search for Hamiltonian paths from start to end.
/// Results come out in lexicographic order of the node sequence. An empty
/// result means no such path exists.
inline std::vector<HamiltonianPath> brute_force_hp(
    const Graph& g, int start, int end,
    std::optional<std::size_t> limit = {}) {
  if (!g.has_node(start) || !g.has_node(end))
    fail(ErrorCode::UnknownNode, "endpoint outside the node range");
  if (start == end) fail(ErrorCode::InvalidParameter, "start and end must differ");

  std::vector<HamiltonianPath> out;
  std::vector<int> path{start};
  std::vector<bool> used(g.node_count, false);
  used[start] = true;
  detail::hp_backtrack(g.adjacency(), end, path, used,
                       limit.value_or(std::numeric_limits<std::size_t>::max()), out);
  return out;
}

}  // namespace ohmpath
