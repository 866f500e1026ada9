#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dagmono/graph.hpp"
#include "dagmono/monotonicity.hpp"
#include "dagmono/rational.hpp"

namespace dagmono {

/// Edge subset of a bipartite graph, endpoints in bipartite-local indices.
struct Matching {
  std::vector<BiEdge> edges;
};

/// Weights on oriented vertices (L first, then R).
struct WeightWitness {
  std::vector<Rational> w;
};

/// Throws InputError unless every edge lies in u and edges are pairwise
/// vertex-disjoint.
void validate_matching(const BipartiteGraph& u, const Matching& m);

/// Per-side saturation flags of m, indexed by oriented vertex.
std::vector<bool> saturated_vertices(const BipartiteGraph& u, const Matching& m);

/// Empty string if w certifies m: sum > 0 on m, sum <= 0 on every other
/// edge of u. Otherwise the first failing edge, described.
std::string check_witness(const BipartiteGraph& u, const Matching& m, const WeightWitness& w);

struct PositivityResult {
  bool positive = false;
  std::optional<WeightWitness> witness;
  /// Oriented vertex sequence l1, r1, l2, r2, ... with (l_i, r_i) in m and
  /// (r_i, l_{i+1}) in E \ m, closing back at l1. Present iff !positive.
  std::vector<Vertex> alternating_cycle;
};

/// Decides positivity via difference constraints and returns either a
/// witness normalized to a minimum matching sum of 1, or an alternating
/// cycle inside the subgraph induced by V(m).
PositivityResult is_positive(const BipartiteGraph& u, const Matching& m);

/// f(l) = w(l), f(r) = -w(r). Throws InputError when the positive-sum edges
/// of w do not form a matching.
Assignment realize_function(const BipartiteGraph& u, const WeightWitness& w);

/// is_positive(u, m_sub).positive, after checking m_sub is a subset of m.
bool submatching_positive_check(const BipartiteGraph& u, const Matching& m, const Matching& m_sub);

/// Witness for m_sub derived from a witness for m: values on V(m_sub) are
/// kept, every other vertex is set to -(max |w| on V(m_sub) + 1).
WeightWitness restrict_witness(const BipartiteGraph& u, const WeightWitness& w, const Matching& m_sub);

}  // namespace dagmono
