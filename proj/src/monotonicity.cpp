#include "dagmono/monotonicity.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <limits>

namespace dagmono {

const std::vector<Rational>& Assignment::exact() const {
  if (const auto* ex = std::get_if<std::vector<Rational>>(&values_)) return *ex;
  throw InputError("exact-mode assignment required; got float values");
}

const std::vector<double>& Assignment::real() const {
  if (const auto* re = std::get_if<std::vector<double>>(&values_)) return *re;
  throw InputError("float-mode assignment required; got exact values");
}

std::string Assignment::value_string(Vertex v) const {
  if (const auto* ex = std::get_if<std::vector<Rational>>(&values_)) return (*ex)[v].str();
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::get<std::vector<double>>(values_)[v]);
  return {buf, res.ptr};
}

namespace {

void check_length(const Dag& g, const Assignment& f) {
  if (f.size() != g.vertex_count()) {
    throw InputError("assignment has " + std::to_string(f.size()) + " values for " +
                     std::to_string(g.vertex_count()) + " vertices");
  }
}

}  // namespace

std::vector<Arc> violating_pairs(const Dag& g, const ClosureView& tc, const Assignment& f) {
  check_length(g, f);
  const auto& values = f.exact();
  std::vector<Arc> result;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    for (Vertex v : tc.successors(u)) {
      if (values[u] > values[v]) result.push_back({u, v});
    }
  }
  return result;
}

std::vector<Arc> violating_pairs(const Dag& g, const Assignment& f) {
  return violating_pairs(g, ClosureView(g), f);
}

std::vector<Arc> violating_edges(const Dag& g, const Assignment& f) {
  check_length(g, f);
  const auto& values = f.exact();
  std::vector<Arc> result;
  for (const Arc& a : g.edges()) {
    if (values[a.from] > values[a.to]) result.push_back(a);
  }
  return result;
}

std::vector<std::int64_t> hopcroft_karp(std::size_t left_size, std::size_t right_size,
                                        const std::vector<std::vector<Vertex>>& adj) {
  constexpr std::int64_t kFree = -1;
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::int64_t> mate_left(left_size, kFree);
  std::vector<std::int64_t> mate_right(right_size, kFree);
  std::vector<std::size_t> dist(left_size);
  std::vector<std::size_t> cursor(left_size);

  auto bfs = [&]() {
    std::deque<Vertex> queue;
    bool found = false;
    for (Vertex l = 0; l < left_size; ++l) {
      if (mate_left[l] == kFree) {
        dist[l] = 0;
        queue.push_back(l);
      } else {
        dist[l] = kInf;
      }
    }
    while (!queue.empty()) {
      const Vertex l = queue.front();
      queue.pop_front();
      for (Vertex r : adj[l]) {
        const std::int64_t next = mate_right[r];
        if (next == kFree) {
          found = true;
        } else if (dist[static_cast<std::size_t>(next)] == kInf) {
          dist[static_cast<std::size_t>(next)] = dist[l] + 1;
          queue.push_back(static_cast<Vertex>(next));
        }
      }
    }
    return found;
  };

  // Iterative DFS along the layered graph.
  auto augment = [&](Vertex root) {
    std::vector<Vertex> stack{root};
    while (!stack.empty()) {
      const Vertex l = stack.back();
      bool advanced = false;
      while (cursor[l] < adj[l].size()) {
        const Vertex r = adj[l][cursor[l]];
        const std::int64_t next = mate_right[r];
        if (next == kFree) {
          // Flip the path root .. l, r.
          Vertex right = r;
          for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            const Vertex left = *it;
            const std::int64_t prev = mate_left[left];
            mate_left[left] = right;
            mate_right[right] = left;
            if (prev == kFree) break;
            right = static_cast<Vertex>(prev);
          }
          return true;
        }
        const auto nl = static_cast<std::size_t>(next);
        if (dist[nl] == dist[l] + 1) {
          stack.push_back(static_cast<Vertex>(nl));
          advanced = true;
          break;
        }
        ++cursor[l];
      }
      if (!advanced) {
        dist[l] = kInf;
        stack.pop_back();
        if (!stack.empty()) ++cursor[stack.back()];
      }
    }
    return false;
  };

  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (Vertex l = 0; l < left_size; ++l) {
      if (mate_left[l] == kFree) augment(l);
    }
  }
  return mate_left;
}

DistanceResult distance_to_monotone(const Dag& g, const ClosureView& tc, const Assignment& f) {
  const std::vector<Arc> violations = violating_pairs(g, tc, f);
  DistanceResult result;
  if (violations.empty()) return result;

  // Compact both sides to the vertices that carry at least one violation.
  const std::size_t n = g.vertex_count();
  std::vector<std::int64_t> left_id(n, -1);
  std::vector<std::int64_t> right_id(n, -1);
  std::vector<Vertex> left_vertex;
  std::vector<Vertex> right_vertex;
  for (const Arc& a : violations) {
    if (left_id[a.from] < 0) {
      left_id[a.from] = static_cast<std::int64_t>(left_vertex.size());
      left_vertex.push_back(a.from);
    }
    if (right_id[a.to] < 0) {
      right_id[a.to] = static_cast<std::int64_t>(right_vertex.size());
      right_vertex.push_back(a.to);
    }
  }
  std::vector<std::vector<Vertex>> adj(left_vertex.size());
  for (const Arc& a : violations) {
    adj[static_cast<std::size_t>(left_id[a.from])].push_back(static_cast<Vertex>(right_id[a.to]));
  }
  const auto mate = hopcroft_karp(left_vertex.size(), right_vertex.size(), adj);
  for (std::size_t l = 0; l < mate.size(); ++l) {
    if (mate[l] >= 0) {
      result.matching.push_back({left_vertex[l], right_vertex[static_cast<std::size_t>(mate[l])]});
    }
  }
  std::sort(result.matching.begin(), result.matching.end());
  result.distance = result.matching.size();
  return result;
}

DistanceResult distance_to_monotone(const Dag& g, const Assignment& f) {
  return distance_to_monotone(g, ClosureView(g), f);
}

bool is_eps_far(const Dag& g, const Assignment& f, const Rational& eps) {
  if (eps <= Rational(0) || eps >= Rational(1)) throw InputError("eps must lie in (0,1)");
  const auto d = distance_to_monotone(g, f).distance;
  return Rational(static_cast<std::int64_t>(d)) > eps * Rational(static_cast<std::int64_t>(g.vertex_count()));
}

Rational farness_from_matching(std::size_t matching_size, std::size_t n) {
  if (n == 0) throw InputError("farness of an empty vertex set");
  return {static_cast<std::int64_t>(matching_size), static_cast<std::int64_t>(n)};
}

}  // namespace dagmono
