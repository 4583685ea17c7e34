#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ohmpath/error.hpp"
#include "ohmpath/graph.hpp"

namespace ohmpath {

/// Which terminal-attachment case applied, keyed by the number of
/// degree-1 nodes in the original graph.
enum class CaseTag { TwoLeaves, OneLeaf, NoLeaves };

inline std::string_view case_name(CaseTag tag) {
  switch (tag) {
    case CaseTag::TwoLeaves: return "TwoLeaves";
    case CaseTag::OneLeaf: return "OneLeaf";
    case CaseTag::NoLeaves: return "NoLeaves";
  }
  return "?";
}

/// Original graph plus the source/sink terminals wired to it.
struct AugmentedGraph {
  Graph base;                        // the original graph
  Graph full;                        // base plus any added terminal arcs
  int v_in{};                        // source terminal, degree 1 in `full`
  int v_out{};                       // sink terminal, degree 1 in `full`
  std::vector<int> added_nodes;      // appended after the base ids
  std::vector<Arc> added_arcs;       // arcs of full not in base
  CaseTag case_tag{};
  std::vector<Arc> forced_zero_arcs; // base arcs whose conductance is pinned to 0
  int n_total{};

  // derived lookup tables
  std::vector<int> base_arc_in_full;   // base arc index -> full arc index
  std::vector<bool> forced_zero_mask;  // over base arcs

  int base_arc_count() const { return static_cast<int>(base.arcs.size()); }
  int full_arc_count() const { return static_cast<int>(full.arcs.size()); }
  bool is_added_arc(Arc a) const {
    return std::find(added_arcs.begin(), added_arcs.end(), a) != added_arcs.end();
  }
};

/// Builds `full`, n_total and the index tables from the raw pieces.
/// augment() uses this; tests may call it directly to assemble
/// configurations that the Table-1 construction cannot reach.
inline AugmentedGraph assemble_augmented(Graph base, int v_in, int v_out,
                                         std::vector<int> added_nodes,
                                         std::vector<Arc> added_arcs, CaseTag tag,
                                         std::vector<Arc> forced_zero_arcs = {}) {
  AugmentedGraph ag;
  ag.n_total = base.node_count + static_cast<int>(added_nodes.size());
  ag.full.node_count = ag.n_total;
  ag.full.arcs = base.arcs;
  ag.full.arcs.insert(ag.full.arcs.end(), added_arcs.begin(), added_arcs.end());
  std::sort(ag.full.arcs.begin(), ag.full.arcs.end());

  ag.base = std::move(base);
  ag.v_in = v_in;
  ag.v_out = v_out;
  ag.added_nodes = std::move(added_nodes);
  ag.added_arcs = std::move(added_arcs);
  ag.case_tag = tag;
  std::sort(forced_zero_arcs.begin(), forced_zero_arcs.end());
  ag.forced_zero_arcs = std::move(forced_zero_arcs);

  ag.base_arc_in_full.resize(ag.base.arcs.size());
  for (std::size_t k = 0; k < ag.base.arcs.size(); ++k)
    ag.base_arc_in_full[k] = ag.full.arc_index(ag.base.arcs[k]);
  ag.forced_zero_mask.assign(ag.base.arcs.size(), false);
  for (const Arc& a : ag.forced_zero_arcs) {
    int k = ag.base.arc_index(a);
    if (k < 0) fail(ErrorCode::PathNotInGraph, "forced-zero arc not in the base graph");
    ag.forced_zero_mask[k] = true;
  }
  return ag;
}

namespace detail {

inline bool is_connected(const Graph& g) {
  if (g.node_count == 0) return true;
  auto adj = g.adjacency();
  std::vector<bool> seen(g.node_count, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int visited = 1;
  while (!stack.empty()) {
    int node = stack.back();
    stack.pop_back();
    for (int next : adj[node]) {
      if (seen[next]) continue;
      seen[next] = true;
      ++visited;
      stack.push_back(next);
    }
  }
  return visited == g.node_count;
}

inline void check_endpoint(const Graph& g, int node, const char* role) {
  if (!g.has_node(node))
    fail(ErrorCode::UnknownNode, std::string(role) + "=" + std::to_string(node));
}

}  // namespace detail

/// Attaches the e.m.f. terminals to the original graph. Dispatches on the
/// number of degree-1 nodes:
///   >2 leaves  -> no Hamiltonian path can exist, error;
///   2 leaves   -> the leaves become v_in/v_out, nothing added;
///   1 leaf     -> the leaf is v_in, a fresh v_out is wired to h_end;
///   0 leaves   -> fresh v_in and v_out wired to h_start and h_end.
/// Free endpoint choices default to the smallest admissible node ids.
inline AugmentedGraph augment(const Graph& g0, std::optional<int> h_start = {},
                              std::optional<int> h_end = {}) {
  if (g0.node_count < 3) fail(ErrorCode::TooFewNodes, "original graph needs >= 3 nodes");
  if (!detail::is_connected(g0)) fail(ErrorCode::DisconnectedGraph, "original graph is not connected");
  if (h_start) detail::check_endpoint(g0, *h_start, "h_start");
  if (h_end) detail::check_endpoint(g0, *h_end, "h_end");
  if (h_start && h_end && *h_start == *h_end)
    fail(ErrorCode::InconsistentEndpoints, "h_start and h_end must differ");

  std::vector<int> leaves;
  for (int node = 0; node < g0.node_count; ++node)
    if (g0.degree(node) == 1) leaves.push_back(node);

  const int n0 = g0.node_count;

  if (leaves.size() > 2)
    fail(ErrorCode::NoHamiltonianPath,
         std::to_string(leaves.size()) + " degree-1 nodes");

  if (leaves.size() == 2) {
    // the two leaves are the only candidates, up to a swap
    int in = leaves[0], out = leaves[1];
    if ((h_start && *h_start == leaves[1]) || (h_end && *h_end == leaves[0]))
      std::swap(in, out);
    if ((h_start && *h_start != in) || (h_end && *h_end != out))
      fail(ErrorCode::InconsistentEndpoints,
           "endpoints must be the two degree-1 nodes {" + std::to_string(leaves[0]) +
               "," + std::to_string(leaves[1]) + "}");
    std::vector<Arc> forced;
    if (g0.has_arc(make_arc(in, out))) forced.push_back(make_arc(in, out));
    return assemble_augmented(g0, in, out, {}, {}, CaseTag::TwoLeaves, std::move(forced));
  }

  if (leaves.size() == 1) {
    int leaf = leaves[0];
    if (h_start && *h_start != leaf)
      fail(ErrorCode::InconsistentEndpoints,
           "the single degree-1 node " + std::to_string(leaf) + " must be h_start");
    if (h_end && *h_end == leaf)
      fail(ErrorCode::InconsistentEndpoints, "h_end may not be the degree-1 node");
    int end = h_end.value_or(leaf == 0 ? 1 : 0);
    int v_out = n0;
    return assemble_augmented(g0, leaf, v_out, {v_out}, {make_arc(end, v_out)},
                              CaseTag::OneLeaf);
  }

  // no leaves: both terminals are new nodes
  int start = h_start.value_or(h_end && *h_end == 0 ? 1 : 0);
  int end = h_end.value_or(start == 0 ? 1 : 0);
  if (start == end)
    fail(ErrorCode::InconsistentEndpoints, "h_start and h_end must differ");
  int v_in = n0, v_out = n0 + 1;
  return assemble_augmented(g0, v_in, v_out, {v_in, v_out},
                            {make_arc(v_in, start), make_arc(end, v_out)},
                            CaseTag::NoLeaves);
}

/// Per-arc conductances over the base arc set, in base arc order.
struct ConductanceConfig {
  std::vector<double> values;

  friend bool operator==(const ConductanceConfig&, const ConductanceConfig&) = default;
};

inline void check_dimension(const AugmentedGraph& ag, const ConductanceConfig& g) {
  if (static_cast<int>(g.values.size()) != ag.base_arc_count())
    fail(ErrorCode::DimensionMismatch,
         "config has " + std::to_string(g.values.size()) + " entries, graph has " +
             std::to_string(ag.base_arc_count()) + " arcs");
}

/// True iff the arc set forms a Hamiltonian path from `from` to `to` in a
/// graph with `node_count` nodes: checked by walking the degree sequence,
/// no path enumeration involved.
inline bool arcs_form_hp(int node_count, const std::vector<Arc>& arcs, int from, int to) {
  if (static_cast<int>(arcs.size()) != node_count - 1) return false;
  std::vector<std::vector<int>> adj(node_count);
  for (const Arc& a : arcs) {
    if (a.u >= node_count || a.v >= node_count || a.u < 0) return false;
    adj[a.u].push_back(a.v);
    adj[a.v].push_back(a.u);
  }
  for (int node = 0; node < node_count; ++node) {
    std::size_t want = (node == from || node == to) ? 1 : 2;
    if (adj[node].size() != want) return false;
  }
  // walk from one terminal; a degree sequence of all 2s with two 1-ends can
  // still hide a cycle plus a shorter path, so count the visited nodes
  int prev = -1, current = from, visited = 1;
  while (current != to) {
    int next = (adj[current][0] == prev && adj[current].size() > 1) ? adj[current][1]
                                                                    : adj[current][0];
    if (next == prev) return false;
    prev = current;
    current = next;
    ++visited;
  }
  return visited == node_count;
}

/// Membership test for the target set: g must be exactly binary and its
/// unit arcs, together with the added arcs, must form a Hamiltonian path
/// from v_in to v_out in the full graph.
inline bool is_target_config(const AugmentedGraph& ag, const ConductanceConfig& g) {
  check_dimension(ag, g);
  std::vector<Arc> arcs;
  arcs.reserve(ag.full_arc_count());
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    double value = g.values[k];
    if (value != 0.0 && value != 1.0) return false;
    if (value == 1.0) arcs.push_back(ag.base.arcs[k]);
  }
  arcs.insert(arcs.end(), ag.added_arcs.begin(), ag.added_arcs.end());
  return arcs_form_hp(ag.n_total, arcs, ag.v_in, ag.v_out);
}

/// Encodes a Hamiltonian path of the full graph as the binary configuration
/// with unit conductance on its base arcs and zero elsewhere.
inline ConductanceConfig encode_hp(const AugmentedGraph& ag, const HamiltonianPath& hp) {
  if (static_cast<int>(hp.nodes.size()) != ag.n_total ||
      hp.nodes.front() != ag.v_in || hp.nodes.back() != ag.v_out)
    fail(ErrorCode::PathNotInGraph, "not a Hamiltonian path from v_in to v_out");
  std::vector<bool> seen(ag.n_total, false);
  ConductanceConfig g;
  g.values.assign(ag.base_arc_count(), 0.0);
  seen[hp.nodes.front()] = true;
  for (std::size_t k = 0; k + 1 < hp.nodes.size(); ++k) {
    int a = hp.nodes[k], b = hp.nodes[k + 1];
    if (b < 0 || b >= ag.n_total || seen[b])
      fail(ErrorCode::PathNotInGraph, "node " + std::to_string(b) + " repeats or is unknown");
    seen[b] = true;
    Arc arc = make_arc(a, b);
    if (!ag.full.has_arc(arc))
      fail(ErrorCode::PathNotInGraph,
           "arc {" + std::to_string(arc.u) + "," + std::to_string(arc.v) + "} not in the graph");
    int base_index = ag.base.arc_index(arc);
    if (base_index >= 0) g.values[base_index] = 1.0;
  }
  return g;
}

}  // namespace ohmpath
