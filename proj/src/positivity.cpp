#include "dagmono/positivity.hpp"

#include <algorithm>
#include <compare>
#include <limits>
#include <string>
#include <unordered_set>

#include "dagmono/errors.hpp"

namespace dagmono {
namespace {

std::string edge_text(const BiEdge& e) {
  return "(" + std::to_string(e.left) + "," + std::to_string(e.right) + ")";
}

/// Lexicographic weight: real part first, then the count of strict arcs
/// (negative, standing for an infinitesimal -delta each).
struct LexWeight {
  std::int64_t real = 0;
  std::int64_t strict = 0;
  friend LexWeight operator+(LexWeight a, LexWeight b) { return {a.real + b.real, a.strict + b.strict}; }
  friend auto operator<=>(const LexWeight&, const LexWeight&) = default;
};

struct ConstraintArc {
  std::size_t from;
  std::size_t to;
  LexWeight weight;
};

}  // namespace

void validate_matching(const BipartiteGraph& u, const Matching& m) {
  std::vector<bool> used(u.vertex_count(), false);
  for (const BiEdge& e : m.edges) {
    if (!u.find_edge(e.left, e.right)) throw InputError("matching edge " + edge_text(e) + " is not in the graph");
    const Vertex l = u.oriented_left(e.left);
    const Vertex r = u.oriented_right(e.right);
    if (used[l] || used[r]) throw InputError("matching edges share a vertex at " + edge_text(e));
    used[l] = used[r] = true;
  }
}

std::vector<bool> saturated_vertices(const BipartiteGraph& u, const Matching& m) {
  std::vector<bool> sat(u.vertex_count(), false);
  for (const BiEdge& e : m.edges) {
    sat[u.oriented_left(e.left)] = true;
    sat[u.oriented_right(e.right)] = true;
  }
  return sat;
}

std::string check_witness(const BipartiteGraph& u, const Matching& m, const WeightWitness& w) {
  if (w.w.size() != u.vertex_count()) {
    return "witness has " + std::to_string(w.w.size()) + " entries for " +
           std::to_string(u.vertex_count()) + " vertices";
  }
  std::unordered_set<std::uint64_t> in_m;
  for (const BiEdge& e : m.edges) in_m.insert((std::uint64_t{e.left} << 32) | e.right);
  for (EdgeId id = 0; id < u.edge_count(); ++id) {
    const BiEdge& e = u.edge(id);
    const Rational sum = w.w[u.oriented_left(e.left)] + w.w[u.oriented_right(e.right)];
    const bool matched = in_m.contains((std::uint64_t{e.left} << 32) | e.right);
    if (matched && sum <= Rational(0)) {
      return "matching edge " + edge_text(e) + " has non-positive sum " + sum.str();
    }
    if (!matched && sum > Rational(0)) {
      return "non-matching edge " + edge_text(e) + " has positive sum " + sum.str();
    }
  }
  return {};
}

PositivityResult is_positive(const BipartiteGraph& u, const Matching& m) {
  validate_matching(u, m);
  PositivityResult result;
  const std::size_t n = u.vertex_count();

  // Variables: x_l = w(l) for saturated l, y_r = -w(r) for saturated r.
  // Matching edge: x_l - y_r > 0, i.e. y_r - x_l <= -delta: arc l -> r, (0,-1).
  // Other edge inside V(m): x_l - y_r <= 0: arc r -> l, (0,0).
  const auto sat = saturated_vertices(u, m);
  std::vector<std::size_t> var_of(n, std::numeric_limits<std::size_t>::max());
  std::vector<Vertex> vertex_of;
  for (Vertex v = 0; v < n; ++v) {
    if (sat[v]) {
      var_of[v] = vertex_of.size();
      vertex_of.push_back(v);
    }
  }
  std::unordered_set<std::uint64_t> in_m;
  for (const BiEdge& e : m.edges) in_m.insert((std::uint64_t{e.left} << 32) | e.right);
  std::vector<ConstraintArc> arcs;
  for (const BiEdge& e : u.edges()) {
    const Vertex l = u.oriented_left(e.left);
    const Vertex r = u.oriented_right(e.right);
    if (!sat[l] || !sat[r]) continue;
    if (in_m.contains((std::uint64_t{e.left} << 32) | e.right)) {
      arcs.push_back({var_of[l], var_of[r], {0, -1}});
    } else {
      arcs.push_back({var_of[r], var_of[l], {0, 0}});
    }
  }

  // Bellman-Ford from a virtual source joined to every variable at weight 0.
  const std::size_t vars = vertex_of.size();
  std::vector<LexWeight> dist(vars);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(vars, kNone);
  std::size_t relaxed_last = kNone;
  for (std::size_t round = 0; round <= vars; ++round) {
    relaxed_last = kNone;
    for (const ConstraintArc& a : arcs) {
      const LexWeight cand = dist[a.from] + a.weight;
      if (cand < dist[a.to]) {
        dist[a.to] = cand;
        parent[a.to] = a.from;
        relaxed_last = a.to;
      }
    }
    if (relaxed_last == kNone) break;
  }

  if (relaxed_last != kNone) {
    // A relaxation in round |vars|+1 lies on or behind a negative cycle.
    std::size_t x = relaxed_last;
    for (std::size_t i = 0; i < vars; ++i) {
      if (parent[x] == kNone) throw InternalError("broken predecessor chain in negative-cycle walk");
      x = parent[x];
    }
    std::vector<std::size_t> cycle{x};
    for (std::size_t y = parent[x]; y != x; y = parent[y]) cycle.push_back(y);
    std::reverse(cycle.begin(), cycle.end());
    // Rotate so that the walk starts at an L vertex and follows l -> r arcs.
    const auto left_size = static_cast<Vertex>(u.left_size());
    auto first_left = std::find_if(cycle.begin(), cycle.end(),
                                   [&](std::size_t var) { return vertex_of[var] < left_size; });
    std::rotate(cycle.begin(), first_left, cycle.end());
    for (std::size_t var : cycle) result.alternating_cycle.push_back(vertex_of[var]);
    return result;
  }

  // Turn lexicographic potentials into rationals: value = real + strict * eps,
  // with eps small enough that every constraint holds. With all real parts
  // zero any eps > 0 works, so eps = 1.
  std::vector<Rational> value(vars);
  for (std::size_t i = 0; i < vars; ++i) {
    if (dist[i].real != 0) throw InternalError("unexpected real part in positivity potential");
    value[i] = Rational(dist[i].strict);
  }
  WeightWitness witness;
  witness.w.assign(n, Rational(0));
  for (std::size_t i = 0; i < vars; ++i) {
    const Vertex v = vertex_of[i];
    witness.w[v] = v < u.left_size() ? value[i] : -value[i];
  }
  // Normalize to minimum matching sum 1.
  if (!m.edges.empty()) {
    Rational min_sum;
    bool first = true;
    for (const BiEdge& e : m.edges) {
      const Rational s = witness.w[u.oriented_left(e.left)] + witness.w[u.oriented_right(e.right)];
      if (first || s < min_sum) min_sum = s;
      first = false;
    }
    if (min_sum <= Rational(0)) throw InternalError("positivity potential has non-positive matching sum");
    for (std::size_t i = 0; i < vars; ++i) witness.w[vertex_of[i]] /= min_sum;
  }
  Rational max_abs(0);
  for (Vertex v : vertex_of) max_abs = std::max(max_abs, abs(witness.w[v]));
  const Rational pad = -(max_abs + Rational(1));
  for (Vertex v = 0; v < n; ++v) {
    if (!sat[v]) witness.w[v] = pad;
  }
  const std::string problem = check_witness(u, m, witness);
  if (!problem.empty()) throw InternalError("synthesized witness fails: " + problem);
  result.positive = true;
  result.witness = std::move(witness);
  return result;
}

Assignment realize_function(const BipartiteGraph& u, const WeightWitness& w) {
  if (w.w.size() != u.vertex_count()) throw InputError("witness length does not match the graph");
  std::vector<bool> used(u.vertex_count(), false);
  for (const BiEdge& e : u.edges()) {
    const Vertex l = u.oriented_left(e.left);
    const Vertex r = u.oriented_right(e.right);
    if (w.w[l] + w.w[r] > Rational(0)) {
      if (used[l] || used[r]) {
        throw InputError("invalid witness: positive-sum edges share a vertex at " + edge_text(e));
      }
      used[l] = used[r] = true;
    }
  }
  std::vector<Rational> f(u.vertex_count());
  for (Vertex v = 0; v < u.vertex_count(); ++v) f[v] = v < u.left_size() ? w.w[v] : -w.w[v];
  return Assignment(std::move(f));
}

bool submatching_positive_check(const BipartiteGraph& u, const Matching& m, const Matching& m_sub) {
  std::unordered_set<std::uint64_t> in_m;
  for (const BiEdge& e : m.edges) in_m.insert((std::uint64_t{e.left} << 32) | e.right);
  for (const BiEdge& e : m_sub.edges) {
    if (!in_m.contains((std::uint64_t{e.left} << 32) | e.right)) {
      throw InputError("edge " + edge_text(e) + " of the submatching is not in the matching");
    }
  }
  return is_positive(u, m_sub).positive;
}

WeightWitness restrict_witness(const BipartiteGraph& u, const WeightWitness& w, const Matching& m_sub) {
  if (w.w.size() != u.vertex_count()) throw InputError("witness length does not match the graph");
  const auto sat = saturated_vertices(u, m_sub);
  Rational max_abs(0);
  for (Vertex v = 0; v < u.vertex_count(); ++v) {
    if (sat[v]) max_abs = std::max(max_abs, abs(w.w[v]));
  }
  const Rational pad = -(max_abs + Rational(1));
  WeightWitness out;
  out.w.resize(u.vertex_count());
  for (Vertex v = 0; v < u.vertex_count(); ++v) out.w[v] = sat[v] ? w.w[v] : pad;
  return out;
}

}  // namespace dagmono
