#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dagmono/errors.hpp"
#include "dagmono/graph.hpp"
#include "dagmono/rational.hpp"

namespace dagmono {

enum class NumericMode { exact, real };

/// Vertex-indexed function values, either exact rationals or 64-bit floats.
/// The violation and distance machinery accepts exact mode only; real mode
/// exists for Gibbs configurations.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<Rational> values) : values_(std::move(values)) {}
  explicit Assignment(std::vector<double> values) : values_(std::move(values)) {}

  [[nodiscard]] NumericMode mode() const {
    return std::holds_alternative<std::vector<Rational>>(values_) ? NumericMode::exact
                                                                  : NumericMode::real;
  }
  [[nodiscard]] std::size_t size() const {
    return std::visit([](const auto& v) { return v.size(); }, values_);
  }
  /// Throws InputError in real mode.
  [[nodiscard]] const std::vector<Rational>& exact() const;
  /// Throws InputError in exact mode.
  [[nodiscard]] const std::vector<double>& real() const;

  /// f(u) > f(v), in whichever mode the assignment is.
  [[nodiscard]] bool greater(Vertex u, Vertex v) const {
    if (const auto* ex = std::get_if<std::vector<Rational>>(&values_)) return (*ex)[u] > (*ex)[v];
    const auto& re = std::get<std::vector<double>>(values_);
    return re[u] > re[v];
  }

  /// Value at v rendered as text ("p/q" or a shortest round-trip decimal).
  [[nodiscard]] std::string value_string(Vertex v) const;

 private:
  std::variant<std::vector<Rational>, std::vector<double>> values_{std::vector<Rational>{}};
};

/// Violated closure pairs (u,v): u ~> v and f(u) > f(v), sorted.
std::vector<Arc> violating_pairs(const Dag& g, const ClosureView& tc, const Assignment& f);
std::vector<Arc> violating_pairs(const Dag& g, const Assignment& f);

/// Violated edges of g itself, in edge order.
std::vector<Arc> violating_edges(const Dag& g, const Assignment& f);

/// Maximum matching in a bipartite graph given as left adjacency lists.
/// Returns mate_of_left (or -1) for every left vertex.
std::vector<std::int64_t> hopcroft_karp(std::size_t left_size, std::size_t right_size,
                                        const std::vector<std::vector<Vertex>>& adj);

struct DistanceResult {
  std::size_t distance = 0;
  /// Maximum matching of the two-copy violation graph: violated closure pairs
  /// with distinct sources and distinct sinks. A vertex may be the source of
  /// one pair and the sink of another. Size equals distance.
  std::vector<Arc> matching;
};

/// Exact distance to monotonicity: maximum matching of the violation graph.
DistanceResult distance_to_monotone(const Dag& g, const ClosureView& tc, const Assignment& f);
DistanceResult distance_to_monotone(const Dag& g, const Assignment& f);

/// distance_to_monotone(g, f) > eps * n, compared exactly.
bool is_eps_far(const Dag& g, const Assignment& f, const Rational& eps);

/// matching_size / n: lower bound on the normalized distance.
Rational farness_from_matching(std::size_t matching_size, std::size_t n);

/// Ordered query answers; a vertex appears at most once.
template <class Value>
class BasicTranscript {
 public:
  struct Entry {
    Vertex vertex;
    Value value;
  };

  /// Appends unless the vertex was already answered; returns whether a new
  /// entry was added.
  bool record(Vertex v, Value value) {
    for (const Entry& e : entries_) {
      if (e.vertex == v) return false;
    }
    entries_.push_back({v, std::move(value)});
    return true;
  }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool empty() const { return entries_.empty(); }

 private:
  std::vector<Entry> entries_;
};

using Transcript = BasicTranscript<Rational>;

template <class Value>
struct ExtensionResult {
  /// Monotone extension agreeing with the transcript, when one exists.
  std::optional<std::vector<Value>> extension;
  /// Otherwise the first violated queried edge in edge order.
  std::optional<Arc> violated_edge;
};

/// Monotone extension of a transcript on a bipartite-oriented DAG
/// (left_size vertices first, edges L -> R). Unqueried L vertices take a
/// value strictly below every R answer and 0; unqueried R vertices take a
/// value strictly above every L answer and 0.
template <class Value>
ExtensionResult<Value> monotone_extension(const Dag& g, std::size_t left_size,
                                          const BasicTranscript<Value>& t) {
  const std::size_t n = g.vertex_count();
  std::vector<std::optional<Value>> answer(n);
  for (const auto& e : t.entries()) {
    if (e.vertex >= n) throw InputError("transcript vertex " + std::to_string(e.vertex) + " out of range");
    answer[e.vertex] = e.value;
  }
  ExtensionResult<Value> result;
  for (const Arc& a : g.edges()) {
    if (a.from >= left_size || a.to < left_size) {
      throw InputError("monotone_extension expects edges oriented from L to R");
    }
    if (answer[a.from] && answer[a.to] && *answer[a.from] > *answer[a.to]) {
      result.violated_edge = a;
      return result;
    }
  }
  Value low_floor = Value(0);
  Value high_ceiling = Value(0);
  for (const auto& e : t.entries()) {
    if (e.vertex >= left_size) {
      if (e.value < low_floor) low_floor = e.value;
    } else {
      if (e.value > high_ceiling) high_ceiling = e.value;
    }
  }
  const Value a_minus = low_floor - Value(1);
  const Value a_plus = high_ceiling + Value(1);
  std::vector<Value> g_values(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (answer[v]) {
      g_values[v] = *answer[v];
    } else {
      g_values[v] = v < left_size ? a_minus : a_plus;
    }
  }
  result.extension = std::move(g_values);
  return result;
}

}  // namespace dagmono
