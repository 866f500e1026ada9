#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dagmono/graph.hpp"
#include "dagmono/monotonicity.hpp"
#include "dagmono/rational.hpp"

namespace dagmono {

/// Graph-side precomputation shared by all tester runs on one DAG: the
/// transitive reduction, its closure, and the closure pairs as a flat array
/// for uniform sampling. Immutable after construction.
class TesterContext {
 public:
  explicit TesterContext(const Dag& g);

  [[nodiscard]] const Dag& reduced() const { return reduced_; }
  [[nodiscard]] const ClosureView& closure() const { return closure_; }
  [[nodiscard]] const std::vector<Arc>& closure_pairs() const { return pairs_; }
  [[nodiscard]] std::size_t n() const { return reduced_.vertex_count(); }
  [[nodiscard]] std::size_t m() const { return reduced_.edge_count(); }
  [[nodiscard]] std::size_t ell() const { return pairs_.size(); }

 private:
  Dag reduced_;
  ClosureView closure_;
  std::vector<Arc> pairs_;
};

/// Per-run view of f that counts queries. Many oracles may share one
/// Assignment across threads; each oracle itself is single-owner.
class QueryOracle {
 public:
  explicit QueryOracle(const Assignment& f);

  void query(Vertex v);
  /// f(u) > f(v). Both vertices must have been queried.
  [[nodiscard]] bool violates(Vertex u, Vertex v) const;

  [[nodiscard]] std::size_t raw_queries() const { return raw_; }
  [[nodiscard]] std::size_t distinct_queries() const { return distinct_; }

 private:
  const Assignment* f_;
  std::vector<bool> seen_;
  std::size_t raw_ = 0;
  std::size_t distinct_ = 0;
};

enum class TesterKind { mt_tr, mt3, pair_baseline };

std::string tester_name(TesterKind kind);
TesterKind parse_tester(const std::string& name);

struct TesterConfig {
  Rational eps{1, 10};
  double c1 = 8.0;
  double c2 = 8.0;
  std::uint64_t seed = 0;
  TesterKind kind = TesterKind::mt_tr;

  void validate() const;
};

enum class Verdict { accept, reject };

struct TesterReport {
  Verdict verdict = Verdict::accept;
  std::size_t raw_queries = 0;
  std::size_t distinct_queries = 0;
  /// Planned samples per loop.
  std::size_t q_stage1 = 0;
  std::size_t q_stage2 = 0;
  std::optional<Arc> witness;
  /// 1 or 2 for the loop that rejected, 0 on accept.
  int stage = 0;
};

/// ceil(c * sqrt(m ell) / (eps n)).
std::size_t mt_tr_sample_count(std::size_t n, std::size_t m, std::size_t ell, const Rational& eps, double c);
/// ceil(c * m^(1/3) / eps^(2/3)).
std::size_t mt3_sample_count(std::size_t m, const Rational& eps, double c);
/// ceil(c * ell / (eps n)).
std::size_t pair_sample_count(std::size_t n, std::size_t ell, const Rational& eps, double c);

/// Stage 2 of mt3: queries both multisets, then returns the first
/// (x, y) in left x right order that is a violated closure pair.
std::optional<Arc> cross_scan(const TesterContext& ctx, QueryOracle& oracle, const std::vector<Vertex>& left,
                              const std::vector<Vertex>& right);

TesterReport mt_tr(const TesterContext& ctx, const Assignment& f, const TesterConfig& cfg);
TesterReport mt3(const TesterContext& ctx, const Assignment& f, const TesterConfig& cfg);
TesterReport pair_baseline(const TesterContext& ctx, const Assignment& f, const TesterConfig& cfg);
TesterReport run_tester(const TesterContext& ctx, const Assignment& f, const TesterConfig& cfg);

/// Re-checks a rejection: the witness is a closure pair with f(u) > f(v).
bool witness_is_genuine(const TesterContext& ctx, const Assignment& f, const TesterReport& report);

struct Bucket {
  Arc edge;                   // first violated reduction edge on the paths
  std::vector<Arc> pairs;     // M_e
  Rational threshold;         // lower median of f over the left endpoints
  std::vector<Vertex> upper;  // A_e^+: left endpoints with f >= threshold
  std::vector<Vertex> lower;  // B_e^-: right endpoints with f < threshold
};

struct BottleneckReport {
  std::vector<Bucket> buckets;  // ordered by edge
  /// Every (a, b) in upper x lower is a violated closure pair, for all buckets.
  bool cross_pairs_violated = true;
  std::uint64_t sum_squared_bucket_sizes = 0;
  std::size_t violated_edges = 0;  // |F_f| on the reduction
};

/// Buckets the violated pairs of a vertex-disjoint matching by the first
/// violated edge along the lexicographically smallest path in the reduction.
BottleneckReport bottleneck_partition(const TesterContext& ctx, const Assignment& f, const std::vector<Arc>& matching);

/// Path from u to v in the reduction that always steps to the smallest
/// out-neighbour still reaching v.
std::vector<Vertex> canonical_path(const TesterContext& ctx, Vertex u, Vertex v);

}  // namespace dagmono
