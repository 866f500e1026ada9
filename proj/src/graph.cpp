#include "dagmono/graph.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>

#include "dagmono/errors.hpp"

namespace dagmono {
namespace {

void build_csr(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& keyed,
               std::vector<std::size_t>& offsets, std::vector<Vertex>& targets) {
  offsets.assign(n + 1, 0);
  for (const auto& [k, _] : keyed) ++offsets[k + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  targets.assign(keyed.size(), 0);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [k, v] : keyed) targets[cursor[k]++] = v;
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(targets.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
              targets.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]));
  }
}

}  // namespace

Dag::Dag(std::size_t n, std::vector<Arc> edges) : n_(n), edges_(std::move(edges)) {
  if (n > std::numeric_limits<Vertex>::max()) throw InputError("too many vertices");
  std::vector<std::pair<Vertex, Vertex>> fwd;
  std::vector<std::pair<Vertex, Vertex>> bwd;
  fwd.reserve(edges_.size());
  bwd.reserve(edges_.size());
  for (const Arc& a : edges_) {
    if (a.from >= n || a.to >= n) {
      throw InputError("edge (" + std::to_string(a.from) + "," + std::to_string(a.to) +
                       ") out of range for n=" + std::to_string(n));
    }
    if (a.from == a.to) throw InputError("self-loop at vertex " + std::to_string(a.from));
    fwd.emplace_back(a.from, a.to);
    bwd.emplace_back(a.to, a.from);
  }
  build_csr(n, fwd, out_offsets_, out_targets_);
  build_csr(n, bwd, in_offsets_, in_sources_);
  for (Vertex v = 0; v < n; ++v) {
    auto o = out(v);
    if (std::adjacent_find(o.begin(), o.end()) != o.end()) {
      throw InputError("duplicate edge leaving vertex " + std::to_string(v));
    }
  }

  // Kahn's algorithm, smallest ready vertex first.
  std::vector<std::size_t> indeg(n);
  for (Vertex v = 0; v < n; ++v) indeg[v] = in(v).size();
  std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
  for (Vertex v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push(v);
  }
  topo_.reserve(n);
  while (!ready.empty()) {
    const Vertex v = ready.top();
    ready.pop();
    topo_.push_back(v);
    for (Vertex w : out(v)) {
      if (--indeg[w] == 0) ready.push(w);
    }
  }
  if (topo_.size() != n) throw InputError("graph contains a directed cycle");
}

bool Dag::has_edge(Vertex u, Vertex v) const {
  auto o = out(u);
  return std::binary_search(o.begin(), o.end(), v);
}

ClosureView::ClosureView(const Dag& g, std::size_t vertex_cap) : n_(g.vertex_count()) {
  if (n_ > vertex_cap) {
    throw InputError("closure of " + std::to_string(n_) + " vertices exceeds cap " +
                     std::to_string(vertex_cap));
  }
  words_ = (n_ + 63) / 64;
  bits_.assign(n_ * words_, 0);
  const auto topo = g.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const Vertex u = *it;
    std::uint64_t* row_u = bits_.data() + u * words_;
    for (Vertex w : g.out(u)) {
      const std::uint64_t* row_w = bits_.data() + w * words_;
      for (std::size_t i = 0; i < words_; ++i) row_u[i] |= row_w[i];
      row_u[w >> 6] |= std::uint64_t{1} << (w & 63);
    }
  }
  for (std::uint64_t word : bits_) pairs_ += static_cast<std::uint64_t>(std::popcount(word));
}

std::vector<Arc> ClosureView::pairs() const {
  std::vector<Arc> result;
  result.reserve(pairs_);
  for (Vertex u = 0; u < n_; ++u) {
    for (Vertex v : successors(u)) result.push_back({u, v});
  }
  return result;
}

std::vector<Vertex> ClosureView::successors(Vertex u) const {
  std::vector<Vertex> result;
  const std::uint64_t* row_u = bits_.data() + u * words_;
  for (std::size_t i = 0; i < words_; ++i) {
    std::uint64_t word = row_u[i];
    while (word != 0) {
      const int bit = std::countr_zero(word);
      result.push_back(static_cast<Vertex>(i * 64 + static_cast<std::size_t>(bit)));
      word &= word - 1;
    }
  }
  return result;
}

ClosureView transitive_closure(const Dag& g, std::size_t vertex_cap) {
  return ClosureView(g, vertex_cap);
}

Dag transitive_reduction(const Dag& g) {
  const ClosureView tc(g);
  std::vector<Arc> kept;
  kept.reserve(g.edge_count());
  for (const Arc& a : g.edges()) {
    bool redundant = false;
    for (Vertex w : g.out(a.from)) {
      if (w != a.to && tc.reachable(w, a.to)) {
        redundant = true;
        break;
      }
    }
    if (!redundant) kept.push_back(a);
  }
  return Dag(g.vertex_count(), std::move(kept));
}

BipartiteGraph::BipartiteGraph(std::size_t left_size, std::size_t right_size,
                               std::vector<BiEdge> edges)
    : left_size_(left_size), right_size_(right_size), edges_(std::move(edges)) {
  if (left_size + right_size > std::numeric_limits<Vertex>::max()) {
    throw InputError("too many vertices");
  }
  if (edges_.size() > std::numeric_limits<EdgeId>::max()) throw InputError("too many edges");
  left_off_.assign(left_size_ + 1, 0);
  right_off_.assign(right_size_ + 1, 0);
  for (const BiEdge& e : edges_) {
    if (e.left >= left_size_ || e.right >= right_size_) {
      throw InputError("bipartite edge (" + std::to_string(e.left) + "," +
                       std::to_string(e.right) + ") out of range");
    }
    ++left_off_[e.left + 1];
    ++right_off_[e.right + 1];
  }
  for (std::size_t i = 0; i < left_size_; ++i) left_off_[i + 1] += left_off_[i];
  for (std::size_t i = 0; i < right_size_; ++i) right_off_[i + 1] += right_off_[i];
  left_inc_.resize(edges_.size());
  right_inc_.resize(edges_.size());
  std::vector<std::size_t> lc(left_off_.begin(), left_off_.end() - 1);
  std::vector<std::size_t> rc(right_off_.begin(), right_off_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    left_inc_[lc[edges_[id].left]++] = id;
    right_inc_[rc[edges_[id].right]++] = id;
  }
  for (Vertex l = 0; l < left_size_; ++l) {
    auto inc = left_incident(l);
    std::vector<Vertex> rs;
    rs.reserve(inc.size());
    for (EdgeId id : inc) rs.push_back(edges_[id].right);
    std::sort(rs.begin(), rs.end());
    if (std::adjacent_find(rs.begin(), rs.end()) != rs.end()) {
      throw InputError("duplicate bipartite edge at left vertex " + std::to_string(l));
    }
  }
}

std::optional<EdgeId> BipartiteGraph::find_edge(Vertex l, Vertex r) const {
  if (l >= left_size_) return std::nullopt;
  for (EdgeId id : left_incident(l)) {
    if (edges_[id].right == r) return id;
  }
  return std::nullopt;
}

Dag orient_bipartite(const BipartiteGraph& u) {
  std::vector<Arc> arcs;
  arcs.reserve(u.edge_count());
  for (const BiEdge& e : u.edges()) arcs.push_back({u.oriented_left(e.left), u.oriented_right(e.right)});
  return Dag(u.vertex_count(), std::move(arcs));
}

std::optional<C4Witness> has_c4(const BipartiteGraph& u) {
  std::unordered_map<std::uint64_t, Vertex> first_owner;
  std::vector<Vertex> nbrs;
  for (Vertex l = 0; l < u.left_size(); ++l) {
    nbrs.clear();
    for (EdgeId id : u.left_incident(l)) nbrs.push_back(u.edge(id).right);
    std::sort(nbrs.begin(), nbrs.end());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
        const std::uint64_t key = (static_cast<std::uint64_t>(nbrs[i]) << 32) | nbrs[j];
        auto [it, inserted] = first_owner.emplace(key, l);
        if (!inserted) return C4Witness{it->second, nbrs[i], l, nbrs[j]};
      }
    }
  }
  return std::nullopt;
}

}  // namespace dagmono
