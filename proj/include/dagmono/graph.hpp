#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dagmono {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

struct Arc {
  Vertex from;
  Vertex to;
  friend bool operator==(const Arc&, const Arc&) = default;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Default ceiling on vertex count for closure computations.
inline constexpr std::size_t kDefaultVertexCap = 100'000;

/// Directed acyclic graph on vertices 0..n-1. Edge order is preserved as
/// given. Construction rejects cycles, self-loops, duplicates and
/// out-of-range endpoints.
class Dag {
 public:
  Dag() = default;
  Dag(std::size_t n, std::vector<Arc> edges);

  [[nodiscard]] std::size_t vertex_count() const { return n_; }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] std::span<const Arc> edges() const { return edges_; }
  [[nodiscard]] std::span<const Vertex> out(Vertex v) const {
    return {out_targets_.data() + out_offsets_[v], out_targets_.data() + out_offsets_[v + 1]};
  }
  [[nodiscard]] std::span<const Vertex> in(Vertex v) const {
    return {in_sources_.data() + in_offsets_[v], in_sources_.data() + in_offsets_[v + 1]};
  }
  /// Topological order, smallest-index-first among ready vertices.
  [[nodiscard]] std::span<const Vertex> topological_order() const { return topo_; }
  [[nodiscard]] bool has_edge(Vertex u, Vertex v) const;

 private:
  std::size_t n_ = 0;
  std::vector<Arc> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Vertex> out_targets_;  // sorted ascending per vertex
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Vertex> in_sources_;
  std::vector<Vertex> topo_;
};

/// Reachability relation of a DAG, one bitset row per vertex. Reflexive
/// pairs are excluded, so pair_count() is the number of ordered pairs (u,v)
/// with u != v and a directed path u -> v.
class ClosureView {
 public:
  ClosureView() = default;
  explicit ClosureView(const Dag& g, std::size_t vertex_cap = kDefaultVertexCap);

  [[nodiscard]] std::size_t vertex_count() const { return n_; }
  [[nodiscard]] bool reachable(Vertex u, Vertex v) const {
    return (bits_[u * words_ + (v >> 6)] >> (v & 63)) & 1U;
  }
  [[nodiscard]] std::uint64_t pair_count() const { return pairs_; }
  [[nodiscard]] std::span<const std::uint64_t> row(Vertex u) const {
    return {bits_.data() + u * words_, words_};
  }
  /// All closure pairs in (u, v) lexicographic order.
  [[nodiscard]] std::vector<Arc> pairs() const;
  /// Closure pairs of u in increasing v.
  [[nodiscard]] std::vector<Vertex> successors(Vertex u) const;

  friend bool operator==(const ClosureView&, const ClosureView&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::uint64_t pairs_ = 0;
};

ClosureView transitive_closure(const Dag& g, std::size_t vertex_cap = kDefaultVertexCap);

/// Hasse diagram: drops every edge (u,v) for which v is reachable from u
/// through another out-neighbour of u. Kept edges retain input order.
Dag transitive_reduction(const Dag& g);

struct BiEdge {
  Vertex left;   // index in L
  Vertex right;  // index in R
  friend bool operator==(const BiEdge&, const BiEdge&) = default;
  friend auto operator<=>(const BiEdge&, const BiEdge&) = default;
};

/// Undirected bipartite graph U = (L, R; E). L and R are indexed
/// independently from 0; after orientation, R-vertex r becomes left_size + r.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(std::size_t left_size, std::size_t right_size, std::vector<BiEdge> edges);

  [[nodiscard]] std::size_t left_size() const { return left_size_; }
  [[nodiscard]] std::size_t right_size() const { return right_size_; }
  [[nodiscard]] std::size_t vertex_count() const { return left_size_ + right_size_; }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] std::span<const BiEdge> edges() const { return edges_; }
  [[nodiscard]] const BiEdge& edge(EdgeId e) const { return edges_[e]; }

  /// Edge ids incident to L-vertex l (in id order).
  [[nodiscard]] std::span<const EdgeId> left_incident(Vertex l) const {
    return {left_inc_.data() + left_off_[l], left_inc_.data() + left_off_[l + 1]};
  }
  /// Edge ids incident to R-vertex r (in id order).
  [[nodiscard]] std::span<const EdgeId> right_incident(Vertex r) const {
    return {right_inc_.data() + right_off_[r], right_inc_.data() + right_off_[r + 1]};
  }
  /// Incident edges of an oriented vertex id (L first, then R).
  [[nodiscard]] std::span<const EdgeId> incident(Vertex oriented) const {
    return oriented < left_size_ ? left_incident(oriented)
                                 : right_incident(oriented - static_cast<Vertex>(left_size_));
  }
  [[nodiscard]] std::optional<EdgeId> find_edge(Vertex l, Vertex r) const;

  [[nodiscard]] Vertex oriented_left(Vertex l) const { return l; }
  [[nodiscard]] Vertex oriented_right(Vertex r) const {
    return static_cast<Vertex>(left_size_) + r;
  }

 private:
  std::size_t left_size_ = 0;
  std::size_t right_size_ = 0;
  std::vector<BiEdge> edges_;
  std::vector<std::size_t> left_off_{0};
  std::vector<EdgeId> left_inc_;
  std::vector<std::size_t> right_off_{0};
  std::vector<EdgeId> right_inc_;
};

/// Orients every edge L -> R; returns a depth-1 DAG on left+right vertices.
Dag orient_bipartite(const BipartiteGraph& u);

/// Four vertices l1, r1, l2, r2 forming the cycle l1-r1-l2-r2-l1.
struct C4Witness {
  Vertex l1, r1, l2, r2;
};

/// Detects a 4-cycle: two left vertices sharing two right neighbours.
std::optional<C4Witness> has_c4(const BipartiteGraph& u);

}  // namespace dagmono
