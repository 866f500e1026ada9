#include <doctest.h>

#include <set>

#include "dagmono/errors.hpp"
#include "dagmono/graph.hpp"
#include "dagmono/pmrs.hpp"
#include "support.hpp"

using namespace dagmono;

namespace {

std::set<Arc> closure_set(const ClosureView& tc) {
  const auto p = tc.pairs();
  return {p.begin(), p.end()};
}

/// Brute-force 4-cycle scan: any two left vertices with two common right
/// neighbours, straight from the edge list.
bool brute_c4(const BipartiteGraph& u) {
  std::vector<std::set<Vertex>> nb(u.left_size());
  for (const BiEdge& e : u.edges()) nb[e.left].insert(e.right);
  for (std::size_t a = 0; a < nb.size(); ++a) {
    for (std::size_t b = a + 1; b < nb.size(); ++b) {
      int common = 0;
      for (Vertex r : nb[a]) common += nb[b].count(r) ? 1 : 0;
      if (common >= 2) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("construction rejects cycles, loops, duplicates and bad endpoints") {
  CHECK_THROWS_AS(Dag(3, {{0, 1}, {1, 2}, {2, 0}}), InputError);
  CHECK_THROWS_AS(Dag(2, {{1, 1}}), InputError);
  CHECK_THROWS_AS(Dag(2, {{0, 1}, {0, 1}}), InputError);
  CHECK_THROWS_AS(Dag(2, {{0, 2}}), InputError);
  CHECK_NOTHROW(Dag(0, {}));
}

TEST_CASE("closure of a path and of the empty graph") {
  const Dag path(3, {{0, 1}, {1, 2}});
  const ClosureView tc(path);
  CHECK(tc.pair_count() == 3);
  CHECK(closure_set(tc) == std::set<Arc>{{0, 1}, {0, 2}, {1, 2}});
  CHECK_FALSE(tc.reachable(0, 0));
  CHECK(ClosureView(Dag(4, {})).pair_count() == 0);
}

TEST_CASE("closure cap is enforced") {
  CHECK_THROWS_AS(ClosureView(Dag(10, {}), 5), InputError);
}

TEST_CASE("closure equals per-vertex DFS on random DAGs") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(9);
    const Dag g = testsupport::random_dag(n, 0.35, rng);
    const auto reach = testsupport::dfs_reach(n, {g.edges().begin(), g.edges().end()});
    const ClosureView tc(g);
    std::uint64_t count = 0;
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = 0; v < n; ++v) {
        CHECK(tc.reachable(u, v) == (u != v && reach[u][v]));
        count += (u != v && reach[u][v]) ? 1 : 0;
      }
    }
    CHECK(tc.pair_count() == count);
  }
}

TEST_CASE("topological order respects every edge and prefers small indices") {
  const Dag g(4, {{3, 0}, {2, 1}});
  const auto order = g.topological_order();
  CHECK(std::vector<Vertex>(order.begin(), order.end()) == std::vector<Vertex>{2, 1, 3, 0});
}

TEST_CASE("reduction drops shortcuts only") {
  const Dag tri(3, {{0, 1}, {1, 2}, {0, 2}});
  const Dag r = transitive_reduction(tri);
  CHECK(std::vector<Arc>(r.edges().begin(), r.edges().end()) == std::vector<Arc>{{0, 1}, {1, 2}});

  const Dag matching(4, {{0, 2}, {1, 3}});
  CHECK(transitive_reduction(matching).edge_count() == 2);
}

TEST_CASE("reduction preserves closure and is minimal on random DAGs") {
  Rng rng(202);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(6);
    const Dag g = testsupport::random_dag(n, 0.5, rng);
    const Dag r = transitive_reduction(g);
    const auto full = closure_set(ClosureView(g));
    REQUIRE(closure_set(ClosureView(r)) == full);
    for (std::size_t drop = 0; drop < r.edge_count(); ++drop) {
      std::vector<Arc> fewer;
      for (std::size_t i = 0; i < r.edge_count(); ++i) {
        if (i != drop) fewer.push_back(r.edges()[i]);
      }
      CHECK(closure_set(ClosureView(Dag(n, fewer))) != full);
    }
  }
}

TEST_CASE("orientation puts R after L and the closure equals the edge set") {
  const BipartiteGraph one(1, 1, {{0, 0}});
  const Dag d1 = orient_bipartite(one);
  CHECK(d1.vertex_count() == 2);
  CHECK(ClosureView(d1).pair_count() == 1);

  const BipartiteGraph k22(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const Dag d = orient_bipartite(k22);
  CHECK(d.edge_count() == 4);
  CHECK(ClosureView(d).pair_count() == 4);
  CHECK(d.has_edge(1, 3));
}

TEST_CASE("orienting a shift scaffold gives closure size equal to the sum of matching sizes") {
  const ShiftParams p{2, 3, 1, ShiftSetMode::full_box};
  const PmrsFamily fam = build_shift_pmrs(p);
  std::uint64_t total = 0;
  for (const Shift& a : build_shift_set(p)) total += shift_matching_size(p, a);
  CHECK(ClosureView(orient_bipartite(fam.scaffold)).pair_count() == total);
}

TEST_CASE("has_c4 on the canonical cases") {
  const BipartiteGraph k22(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const auto w = has_c4(k22);
  REQUIRE(w.has_value());
  CHECK(w->l1 != w->l2);
  CHECK(w->r1 != w->r2);
  CHECK_FALSE(has_c4(BipartiteGraph(3, 3, {{0, 0}, {1, 1}, {2, 2}})));
}

TEST_CASE("has_c4 agrees with the common-neighbour scan") {
  Rng rng(303);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t l = 1 + rng.uniform_index(12);
    const std::size_t r = 1 + rng.uniform_index(12);
    std::vector<BiEdge> edges;
    for (Vertex a = 0; a < l; ++a) {
      for (Vertex b = 0; b < r; ++b) {
        if (rng.uniform01() < 0.12) edges.push_back({a, b});
      }
    }
    const BipartiteGraph u(l, r, edges);
    const auto w = has_c4(u);
    CHECK(w.has_value() == brute_c4(u));
    if (w) {
      CHECK(u.find_edge(w->l1, w->r1));
      CHECK(u.find_edge(w->l1, w->r2));
      CHECK(u.find_edge(w->l2, w->r1));
      CHECK(u.find_edge(w->l2, w->r2));
    }
  }
}

TEST_CASE("difference-free scaffold with P=2, N=6 has no 4-cycle") {
  const PmrsFamily fam = build_shift_pmrs({2, 6, 2, ShiftSetMode::difference_free});
  CHECK_FALSE(has_c4(fam.scaffold));
  CHECK_FALSE(brute_c4(fam.scaffold));
}
