#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "ohmpath/error.hpp"
#include "ohmpath/graph.hpp"

namespace ohmpath {

/// A generated graph plus the endpoints it was built around, when any.
struct GeneratedGraph {
  Graph graph;
  std::optional<int> h_start;
  std::optional<int> h_end;
};

inline Graph make_path(int n) {
  if (n < 3) fail(ErrorCode::InvalidParameter, "path needs n >= 3");
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i + 1 < n; ++i) arcs.emplace_back(i, i + 1);
  return make_graph(n, std::move(arcs));
}

inline Graph make_cycle(int n) {
  if (n < 3) fail(ErrorCode::InvalidParameter, "cycle needs n >= 3");
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i + 1 < n; ++i) arcs.emplace_back(i, i + 1);
  arcs.emplace_back(n - 1, 0);
  return make_graph(n, std::move(arcs));
}

inline Graph make_complete(int n) {
  if (n < 3) fail(ErrorCode::InvalidParameter, "complete graph needs n >= 3");
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) arcs.emplace_back(i, j);
  return make_graph(n, std::move(arcs));
}

/// Star K_{1,n-1}: center 0, leaves 1..n-1. Has no Hamiltonian path for
/// n >= 4; useful as a rejection fixture.
inline Graph make_star(int n) {
  if (n < 3) fail(ErrorCode::InvalidParameter, "star needs n >= 3");
  std::vector<std::pair<int, int>> arcs;
  for (int i = 1; i < n; ++i) arcs.emplace_back(0, i);
  return make_graph(n, std::move(arcs));
}

inline GeneratedGraph make_erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 3) fail(ErrorCode::InvalidParameter, "erdos-renyi needs n >= 3");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidParameter, "edge probability outside [0,1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) < p) arcs.emplace_back(i, j);
  return GeneratedGraph{make_graph(n, std::move(arcs)), {}, {}};
}

/// Random graph with a guaranteed Hamiltonian path: a shuffled spine plus
/// extra off-spine arcs. Records endpoints consistent with the leaf
/// structure so the terminal attachment accepts them.
inline GeneratedGraph make_planted_hp(int n, int extra, std::uint64_t seed) {
  if (n < 3) fail(ErrorCode::InvalidParameter, "planted-hp needs n >= 3");
  if (extra < 0) fail(ErrorCode::InvalidParameter, "extra arc count must be >= 0");
  std::mt19937_64 rng(seed);

  std::vector<int> spine(n);
  std::iota(spine.begin(), spine.end(), 0);
  std::shuffle(spine.begin(), spine.end(), rng);

  std::vector<Arc> arcs;
  for (int i = 0; i + 1 < n; ++i) arcs.push_back(make_arc(spine[i], spine[i + 1]));
  std::sort(arcs.begin(), arcs.end());

  std::vector<Arc> candidates;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!std::binary_search(arcs.begin(), arcs.end(), Arc{i, j}))
        candidates.push_back(Arc{i, j});
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const int take = std::min<int>(extra, static_cast<int>(candidates.size()));
  arcs.insert(arcs.end(), candidates.begin(), candidates.begin() + take);

  std::vector<std::pair<int, int>> raw;
  raw.reserve(arcs.size());
  for (const Arc& a : arcs) raw.emplace_back(a.u, a.v);
  Graph graph = make_graph(n, std::move(raw));

  // extra arcs may have killed a spine end's leaf status; when exactly one
  // leaf remains it has to play h_start
  int first = spine.front(), last = spine.back();
  int h_start = first, h_end = last;
  if (graph.degree(first) > 1 && graph.degree(last) == 1) std::swap(h_start, h_end);
  return GeneratedGraph{std::move(graph), h_start, h_end};
}

}  // namespace ohmpath
