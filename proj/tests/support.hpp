#pragma once

// Small random instances and brute-force oracles shared by the test suites.
// Oracles here are deliberately naive and independent of the library code
// they check.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dagmono/graph.hpp"
#include "dagmono/rational.hpp"
#include "dagmono/rng.hpp"

namespace testsupport {

using dagmono::Arc;
using dagmono::Rng;
using dagmono::Vertex;

/// Random DAG: a random permutation fixes the topological order, each
/// forward pair becomes an edge with probability p.
inline dagmono::Dag random_dag(std::size_t n, double p, Rng& rng) {
  std::vector<Vertex> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Vertex>(i);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  std::vector<Arc> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform01() < p) edges.push_back({perm[i], perm[j]});
    }
  }
  for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[rng.uniform_index(i)]);
  return dagmono::Dag(n, std::move(edges));
}

/// reach[u][v]: DFS from every vertex over the raw edge list.
inline std::vector<std::vector<bool>> dfs_reach(std::size_t n, const std::vector<Arc>& edges) {
  std::vector<std::vector<Vertex>> adj(n);
  for (const Arc& a : edges) adj[a.from].push_back(a.to);
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<Vertex> stack(adj[s].begin(), adj[s].end());
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      if (reach[s][v]) continue;
      reach[s][v] = true;
      for (Vertex w : adj[v]) stack.push_back(w);
    }
  }
  return reach;
}

inline std::vector<dagmono::Rational> random_values(std::size_t n, int distinct, Rng& rng) {
  std::vector<dagmono::Rational> f(n);
  for (auto& x : f) x = dagmono::Rational(static_cast<std::int64_t>(rng.uniform_index(distinct)));
  return f;
}

/// Minimum relabel count: smallest |S| such that f restricted to V \ S is
/// monotone along closure pairs. Exhaustive over subsets, n <= 20.
inline std::size_t brute_force_distance(std::size_t n, const std::vector<Arc>& edges,
                                        const std::vector<dagmono::Rational>& f) {
  const auto reach = dfs_reach(n, edges);
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    bool ok = true;
    for (std::size_t u = 0; u < n && ok; ++u) {
      if (mask >> u & 1U) continue;
      for (std::size_t v = 0; v < n && ok; ++v) {
        if (mask >> v & 1U) continue;
        if (reach[u][v] && f[u] > f[v]) ok = false;
      }
    }
    if (ok) best = size;
  }
  return best;
}

/// Exhaustive search for an M-alternating simple cycle: enumerate simple
/// cycles from every start vertex by DFS over the undirected graph and test
/// alternation of matching and non-matching edges around the whole cycle.
inline bool has_alternating_cycle(const dagmono::BipartiteGraph& u, const std::vector<dagmono::BiEdge>& m) {
  const std::size_t n = u.vertex_count();
  const auto left = static_cast<Vertex>(u.left_size());
  std::vector<std::vector<std::pair<Vertex, bool>>> adj(n);
  for (const dagmono::BiEdge& e : u.edges()) {
    const bool in_m = std::find(m.begin(), m.end(), e) != m.end();
    adj[e.left].push_back({left + e.right, in_m});
    adj[left + e.right].push_back({e.left, in_m});
  }
  std::vector<Vertex> path;
  std::vector<bool> flags;  // flags[i]: edge path[i] -> path[i+1] is in m
  std::vector<bool> on_path(n, false);
  bool found = false;
  auto dfs = [&](auto&& self, Vertex start, Vertex v) -> void {
    if (found) return;
    for (auto [w, in_m] : adj[v]) {
      if (w == start && path.size() >= 4) {
        flags.push_back(in_m);
        bool alt = true;
        for (std::size_t i = 0; i < flags.size(); ++i) {
          if (flags[i] == flags[(i + 1) % flags.size()]) alt = false;
        }
        flags.pop_back();
        if (alt) found = true;
        continue;
      }
      if (on_path[w]) continue;
      if (!flags.empty() && flags.back() == in_m) continue;  // prune non-alternating prefixes
      on_path[w] = true;
      path.push_back(w);
      flags.push_back(in_m);
      self(self, start, w);
      flags.pop_back();
      path.pop_back();
      on_path[w] = false;
    }
  };
  for (Vertex s = 0; s < n && !found; ++s) {
    path = {s};
    flags.clear();
    std::fill(on_path.begin(), on_path.end(), false);
    on_path[s] = true;
    dfs(dfs, s, s);
  }
  return found;
}

/// Every matching of u (including the empty one), by subset enumeration.
inline std::vector<std::vector<dagmono::BiEdge>> all_matchings(const dagmono::BipartiteGraph& u) {
  const auto edges = u.edges();
  std::vector<std::vector<dagmono::BiEdge>> out;
  std::vector<dagmono::BiEdge> cur;
  std::vector<bool> used_l(u.left_size(), false);
  std::vector<bool> used_r(u.right_size(), false);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == edges.size()) {
      out.push_back(cur);
      return;
    }
    self(self, i + 1);
    const auto& e = edges[i];
    if (!used_l[e.left] && !used_r[e.right]) {
      used_l[e.left] = used_r[e.right] = true;
      cur.push_back(e);
      self(self, i + 1);
      cur.pop_back();
      used_l[e.left] = used_r[e.right] = false;
    }
  };
  rec(rec, 0);
  return out;
}

inline dagmono::BipartiteGraph random_bipartite(std::size_t max_side, double p, Rng& rng) {
  const std::size_t l = 1 + rng.uniform_index(max_side);
  const std::size_t r = 1 + rng.uniform_index(max_side);
  std::vector<dagmono::BiEdge> edges;
  for (Vertex a = 0; a < l; ++a) {
    for (Vertex b = 0; b < r; ++b) {
      if (rng.uniform01() < p) edges.push_back({a, b});
    }
  }
  return dagmono::BipartiteGraph(l, r, std::move(edges));
}

}  // namespace testsupport
