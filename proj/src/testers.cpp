#include "dagmono/testers.hpp"

#include <algorithm>
#include <cmath>

#include "dagmono/errors.hpp"
#include "dagmono/rng.hpp"

namespace dagmono {
namespace {

/// Ceiling that tolerates rounding just above an exact integer.
std::size_t ceil_count(double x) {
  if (!(x > 0)) return 0;
  return static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12)));
}

Vertex random_vertex(Rng& rng, std::size_t n) { return static_cast<Vertex>(rng.uniform_index(n)); }

/// Queries both endpoints of a sample and returns whether it is violated.
bool probe(QueryOracle& oracle, const Arc& a) {
  oracle.query(a.from);
  oracle.query(a.to);
  return oracle.violates(a.from, a.to);
}

void finish(TesterReport& rep, const QueryOracle& oracle) {
  rep.raw_queries = oracle.raw_queries();
  rep.distinct_queries = oracle.distinct_queries();
}

}  // namespace

TesterContext::TesterContext(const Dag& g)
    : reduced_(transitive_reduction(g)), closure_(reduced_), pairs_(closure_.pairs()) {}

QueryOracle::QueryOracle(const Assignment& f) : f_(&f), seen_(f.size(), false) {}

void QueryOracle::query(Vertex v) {
  if (v >= seen_.size()) throw InputError("oracle query out of range");
  ++raw_;
  if (!seen_[v]) {
    seen_[v] = true;
    ++distinct_;
  }
}

bool QueryOracle::violates(Vertex u, Vertex v) const {
  if (!seen_[u] || !seen_[v]) throw InternalError("comparison of an unqueried vertex");
  return f_->greater(u, v);
}

std::string tester_name(TesterKind kind) {
  switch (kind) {
    case TesterKind::mt_tr:
      return "mt_tr";
    case TesterKind::mt3:
      return "mt3";
    case TesterKind::pair_baseline:
      return "pair";
  }
  return "unknown";
}

TesterKind parse_tester(const std::string& name) {
  if (name == "mt_tr") return TesterKind::mt_tr;
  if (name == "mt3") return TesterKind::mt3;
  if (name == "pair" || name == "pair_baseline") return TesterKind::pair_baseline;
  throw InputError("unknown tester '" + name + "' (expected mt_tr, mt3 or pair)");
}

void TesterConfig::validate() const {
  if (eps <= Rational(0) || eps >= Rational(1)) throw InputError("tester eps must lie in (0,1)");
  if (!(c1 > 0) || !(c2 > 0)) throw InputError("tester constants must be positive");
}

std::size_t mt_tr_sample_count(std::size_t n, std::size_t m, std::size_t ell, const Rational& eps, double c) {
  if (n == 0) return 0;
  return ceil_count(c * std::sqrt(static_cast<double>(m) * static_cast<double>(ell)) /
                    (eps.to_double() * static_cast<double>(n)));
}

std::size_t mt3_sample_count(std::size_t m, const Rational& eps, double c) {
  return ceil_count(c * std::cbrt(static_cast<double>(m)) / std::cbrt(eps.to_double() * eps.to_double()));
}

std::size_t pair_sample_count(std::size_t n, std::size_t ell, const Rational& eps, double c) {
  if (n == 0) return 0;
  return ceil_count(c * static_cast<double>(ell) / (eps.to_double() * static_cast<double>(n)));
}

TesterReport mt_tr(const TesterContext& ctx, const Assignment& f, const TesterConfig& cfg) {
  cfg.validate();
  if (f.size() != ctx.n()) throw InputError("function length does not match the graph");
  TesterReport rep;
  rep.q_stage1 = mt_tr_sample_count(ctx.n(), ctx.m(), ctx.ell(), cfg.eps, cfg.c1);
  rep.q_stage2 = mt_tr_sample_count(ctx.n(), ctx.m(), ctx.ell(), cfg.eps, cfg.c2);
  Rng rng(cfg.seed);
  QueryOracle oracle(f);
  const auto edges = ctx.reduced().edges();
  for (std::size_t i = 0; i < rep.q_stage1 && !edges.empty(); ++i) {
    const Arc a = edges[rng.uniform_index(edges.size())];
    if (probe(oracle, a)) {
      rep.verdict = Verdict::reject;
      rep.witness = a;
      rep.stage = 1;
      finish(rep, oracle);
      return rep;
    }
  }
  const auto& pairs = ctx.closure_pairs();
  for (std::size_t i = 0; i < rep.q_stage2 && !pairs.empty(); ++i) {
    const Arc a = pairs[rng.uniform_index(pairs.size())];
    if (probe(oracle, a)) {
      rep.verdict = Verdict::reject;
      rep.witness = a;
      rep.stage = 2;
      break;
    }
  }
  finish(rep, oracle);
  return rep;
}

std::optional<Arc> cross_scan(const TesterContext& ctx, QueryOracle& oracle, const std::vector<Vertex>& left,
                              const std::vector<Vertex>& right) {
  for (Vertex v : left) oracle.query(v);
  for (Vertex v : right) oracle.query(v);
  const auto& tc = ctx.closure();
  for (Vertex x : left) {
    for (Vertex y : right) {
      if (tc.reachable(x, y) && oracle.violates(x, y)) return Arc{x, y};
    }
  }
  return std::nullopt;
}

TesterReport mt3(const TesterContext& ctx, const Assignment& f, const TesterConfig& cfg) {
  cfg.validate();
  if (f.size() != ctx.n()) throw InputError("function length does not match the graph");
  TesterReport rep;
  rep.q_stage1 = mt3_sample_count(ctx.m(), cfg.eps, cfg.c1);
  rep.q_stage2 = mt3_sample_count(ctx.m(), cfg.eps, cfg.c2);
  Rng rng(cfg.seed);
  QueryOracle oracle(f);
  const auto edges = ctx.reduced().edges();
  for (std::size_t i = 0; i < rep.q_stage1 && !edges.empty(); ++i) {
    const Arc a = edges[rng.uniform_index(edges.size())];
    if (probe(oracle, a)) {
      rep.verdict = Verdict::reject;
      rep.witness = a;
      rep.stage = 1;
      finish(rep, oracle);
      return rep;
    }
  }
  if (ctx.n() > 0) {
    std::vector<Vertex> left(rep.q_stage2);
    std::vector<Vertex> right(rep.q_stage2);
    for (auto& v : left) v = random_vertex(rng, ctx.n());
    for (auto& v : right) v = random_vertex(rng, ctx.n());
    if (const auto w = cross_scan(ctx, oracle, left, right)) {
      rep.verdict = Verdict::reject;
      rep.witness = w;
      rep.stage = 2;
    }
  }
  finish(rep, oracle);
  return rep;
}

TesterReport pair_baseline(const TesterContext& ctx, const Assignment& f, const TesterConfig& cfg) {
  cfg.validate();
  if (f.size() != ctx.n()) throw InputError("function length does not match the graph");
  TesterReport rep;
  rep.q_stage2 = pair_sample_count(ctx.n(), ctx.ell(), cfg.eps, cfg.c1);
  Rng rng(cfg.seed);
  QueryOracle oracle(f);
  const auto& pairs = ctx.closure_pairs();
  for (std::size_t i = 0; i < rep.q_stage2 && !pairs.empty(); ++i) {
    const Arc a = pairs[rng.uniform_index(pairs.size())];
    if (probe(oracle, a)) {
      rep.verdict = Verdict::reject;
      rep.witness = a;
      rep.stage = 2;
      break;
    }
  }
  finish(rep, oracle);
  return rep;
}

TesterReport run_tester(const TesterContext& ctx, const Assignment& f, const TesterConfig& cfg) {
  switch (cfg.kind) {
    case TesterKind::mt_tr:
      return mt_tr(ctx, f, cfg);
    case TesterKind::mt3:
      return mt3(ctx, f, cfg);
    case TesterKind::pair_baseline:
      return pair_baseline(ctx, f, cfg);
  }
  throw InternalError("unhandled tester kind");
}

bool witness_is_genuine(const TesterContext& ctx, const Assignment& f, const TesterReport& report) {
  if (report.verdict == Verdict::accept) return !report.witness.has_value();
  if (!report.witness) return false;
  const Arc w = *report.witness;
  if (w.from >= ctx.n() || w.to >= ctx.n()) return false;
  return ctx.closure().reachable(w.from, w.to) && f.greater(w.from, w.to);
}

std::vector<Vertex> canonical_path(const TesterContext& ctx, Vertex u, Vertex v) {
  const auto& tc = ctx.closure();
  if (!tc.reachable(u, v)) throw InputError("no path from " + std::to_string(u) + " to " + std::to_string(v));
  std::vector<Vertex> path{u};
  Vertex x = u;
  while (x != v) {
    Vertex next = x;
    for (Vertex w : ctx.reduced().out(x)) {
      if (w == v || tc.reachable(w, v)) {
        next = w;
        break;
      }
    }
    if (next == x) throw InternalError("reachability without a successor step");
    path.push_back(next);
    x = next;
  }
  return path;
}

BottleneckReport bottleneck_partition(const TesterContext& ctx, const Assignment& f,
                                      const std::vector<Arc>& matching) {
  const auto& values = f.exact();
  if (values.size() != ctx.n()) throw InputError("function length does not match the graph");
  std::vector<bool> used(ctx.n(), false);
  std::map<Arc, std::vector<Arc>> groups;
  for (const Arc& pair : matching) {
    if (used[pair.from] || used[pair.to]) throw InputError("matching pairs are not vertex-disjoint");
    used[pair.from] = used[pair.to] = true;
    if (!(values[pair.from] > values[pair.to])) throw InputError("matching pair is not violated");
    const auto path = canonical_path(ctx, pair.from, pair.to);
    std::optional<Arc> first;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (values[path[i]] > values[path[i + 1]]) {
        first = Arc{path[i], path[i + 1]};
        break;
      }
    }
    if (!first) throw InternalError("violated pair without a violated edge on its path");
    groups[*first].push_back(pair);
  }

  BottleneckReport rep;
  for (const Arc& e : ctx.reduced().edges()) {
    if (values[e.from] > values[e.to]) ++rep.violated_edges;
  }
  const auto& tc = ctx.closure();
  for (auto& [edge, pairs] : groups) {
    Bucket b;
    b.edge = edge;
    b.pairs = std::move(pairs);
    std::vector<Rational> left_values;
    for (const Arc& p : b.pairs) left_values.push_back(values[p.from]);
    std::sort(left_values.begin(), left_values.end());
    b.threshold = left_values[(left_values.size() - 1) / 2];
    for (const Arc& p : b.pairs) {
      if (values[p.from] >= b.threshold) b.upper.push_back(p.from);
      if (values[p.to] < b.threshold) b.lower.push_back(p.to);
    }
    for (Vertex a : b.upper) {
      for (Vertex c : b.lower) {
        if (!tc.reachable(a, c) || !(values[a] > values[c])) rep.cross_pairs_violated = false;
      }
    }
    rep.sum_squared_bucket_sizes += static_cast<std::uint64_t>(b.pairs.size()) * b.pairs.size();
    rep.buckets.push_back(std::move(b));
  }
  return rep;
}

}  // namespace dagmono
