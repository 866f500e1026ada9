#include "dagmono/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

#include "dagmono/errors.hpp"
#include "dagmono/normal.hpp"

namespace dagmono {
namespace {

/// Neumaier's compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double positive_part(double x) { return x > 0 ? x : 0.0; }

double log_sum_exp(const std::vector<double>& xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// Hinge term beta * (sign * x + offset)_+^2 in the site variable x.
struct Hinge {
  double sign;
  double offset;
};

}  // namespace

void GibbsParams::validate() const {
  const auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(alpha) || alpha <= 0) throw InputError("alpha must be positive");
  if (!finite(lambda) || lambda < 0) throw InputError("lambda must be nonnegative");
  if (!finite(beta) || beta < 0) throw InputError("beta must be nonnegative");
  if (!finite(gamma) || gamma <= 0) throw InputError("gamma must be positive");
  if (!finite(box) || box <= 0) throw InputError("box bound must be positive");
}

Admissibility admissibility(const GibbsParams& p) {
  Admissibility a;
  a.support = p.box >= p.gamma / 2;
  a.separation = p.beta * p.gamma >= p.alpha * (p.box + p.gamma / 2) + p.lambda * p.gamma + p.drift_tolerance;
  a.strong_hinge = p.beta >= 10;
  return a;
}

std::size_t HarnessAccess::hidden_index(const GibbsModel& m) { return m.hidden_; }

GibbsModel::GibbsModel(BipartiteGraph scaffold, std::vector<Matching> matchings, std::size_t hidden_index,
                       GibbsParams params)
    : scaffold_(std::move(scaffold)), matchings_(std::move(matchings)), hidden_(hidden_index), params_(params) {
  params_.validate();
  if (matchings_.empty()) throw InputError("Gibbs model needs at least one matching");
  if (hidden_ >= matchings_.size()) throw InputError("hidden matching index out of range");
  if (const auto c4 = has_c4(scaffold_)) {
    throw InputError("Gibbs scaffold contains a 4-cycle through left vertices " + std::to_string(c4->l1) +
                     " and " + std::to_string(c4->l2));
  }
  owner_.assign(scaffold_.edge_count(), kNoMatching);
  for (std::size_t i = 0; i < matchings_.size(); ++i) {
    validate_matching(scaffold_, matchings_[i]);
    for (const BiEdge& e : matchings_[i].edges) {
      const EdgeId id = *scaffold_.find_edge(e.left, e.right);
      if (owner_[id] != kNoMatching) throw InputError("matchings are not edge-disjoint");
      owner_[id] = i;
    }
  }
  min_degree_ = std::numeric_limits<std::size_t>::max();
  for (Vertex v = 0; v < scaffold_.vertex_count(); ++v) {
    const std::size_t d = scaffold_.incident(v).size();
    min_degree_ = std::min(min_degree_, d);
    max_degree_ = std::max(max_degree_, d);
  }
  if (scaffold_.vertex_count() == 0) min_degree_ = 0;
}

double hamiltonian(const GibbsModel& model, const std::vector<double>& f) {
  const auto& u = model.scaffold();
  const GibbsParams& p = model.params();
  if (f.size() != u.vertex_count()) throw InputError("configuration length does not match the scaffold");
  CompensatedSum h;
  for (std::size_t v = 0; v < f.size(); ++v) {
    if (!(std::abs(f[v]) <= p.box)) {
      throw InputError("value at vertex " + std::to_string(v) + " lies outside [-B, B]");
    }
    h.add(0.5 * p.alpha * f[v] * f[v]);
  }
  for (EdgeId id = 0; id < u.edge_count(); ++id) {
    const BiEdge& e = u.edge(id);
    const double d = f[u.oriented_left(e.left)] - f[u.oriented_right(e.right)];
    h.add(p.lambda * d * d);
    const double hinge = model.favours_violation(id) ? positive_part(p.gamma - d) : positive_part(d + p.gamma);
    h.add(p.beta * hinge * hinge);
  }
  return h.value();
}

OneSiteDensity::OneSiteDensity(std::vector<DensityPiece> pieces, double base_curvature)
    : pieces_(std::move(pieces)), base_curvature_(base_curvature) {
  if (pieces_.empty()) throw InternalError("one-site density without pieces");
  std::vector<double> logs;
  logs.reserve(pieces_.size());
  for (const auto& piece : pieces_) logs.push_back(piece.log_mass);
  log_z_ = log_sum_exp(logs);
  weights_.reserve(pieces_.size());
  for (double l : logs) weights_.push_back(std::exp(l - log_z_));
}

double OneSiteDensity::min_piece_curvature() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces_) lo = std::min(lo, piece.curvature);
  return lo;
}

double OneSiteDensity::total_mass() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

double OneSiteDensity::density(double x) const {
  for (const auto& piece : pieces_) {
    if (x >= piece.lo && x <= piece.hi) {
      const double d = x - piece.mean;
      return std::exp(-(0.5 * piece.curvature * d * d + piece.min_energy) - log_z_);
    }
  }
  return 0.0;
}

double OneSiteDensity::cdf(double x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& piece = pieces_[k];
    if (x >= piece.hi) {
      acc += weights_[k];
      continue;
    }
    if (x > piece.lo) {
      const double s = std::sqrt(piece.curvature);
      acc += weights_[k] * truncated_normal_cdf(s * (x - piece.mean), s * (piece.lo - piece.mean),
                                                s * (piece.hi - piece.mean));
    }
    break;
  }
  return std::min(acc, 1.0);
}

double OneSiteDensity::mean() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& piece = pieces_[k];
    const double s = std::sqrt(piece.curvature);
    const double a = s * (piece.lo - piece.mean);
    const double b = s * (piece.hi - piece.mean);
    const double log_i = log_normal_interval(a, b);
    constexpr double kLogSqrt2Pi = 0.91893853320467274178;
    const double z_mean = std::exp(-0.5 * a * a - kLogSqrt2Pi - log_i) - std::exp(-0.5 * b * b - kLogSqrt2Pi - log_i);
    acc += weights_[k] * (piece.mean + z_mean / s);
  }
  return acc;
}

double OneSiteDensity::sample(Rng& rng) const {
  const double u = rng.uniform01();
  std::size_t k = 0;
  double cum = weights_[0];
  while (k + 1 < pieces_.size() && u >= cum) cum += weights_[++k];
  const auto& piece = pieces_[k];
  const double s = std::sqrt(piece.curvature);
  const double t = sample_truncated_normal(s * (piece.lo - piece.mean), s * (piece.hi - piece.mean), rng);
  return std::clamp(piece.mean + t / s, piece.lo, piece.hi);
}

OneSiteDensity one_site_conditional(const GibbsModel& model, Vertex v, const std::vector<double>& f) {
  const auto& u = model.scaffold();
  const GibbsParams& p = model.params();
  const bool on_left = v < u.left_size();
  const auto incident = u.incident(v);

  double sum_y = 0.0;
  double sum_y2 = 0.0;
  std::vector<Hinge> hinges;
  std::vector<double> breaks;
  for (EdgeId id : incident) {
    const BiEdge& e = u.edge(id);
    const double y = on_left ? f[u.oriented_right(e.right)] : f[u.oriented_left(e.left)];
    sum_y += y;
    sum_y2 += y * y;
    if (p.beta == 0) continue;
    // On L, d = x - y; on R, d = y - x. Favoured edges penalize d < gamma,
    // the rest penalize d > -gamma.
    const bool favoured = model.favours_violation(id);
    Hinge h{};
    if (on_left) {
      h = favoured ? Hinge{-1.0, p.gamma + y} : Hinge{+1.0, p.gamma - y};
    } else {
      h = favoured ? Hinge{+1.0, p.gamma - y} : Hinge{-1.0, p.gamma + y};
    }
    hinges.push_back(h);
    const double at = -h.sign * h.offset;
    if (at > -p.box && at < p.box) breaks.push_back(at);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> knots{-p.box};
  knots.insert(knots.end(), breaks.begin(), breaks.end());
  knots.push_back(p.box);

  const double deg = static_cast<double>(incident.size());
  const double base = p.alpha + 2 * p.lambda * deg;
  std::vector<DensityPiece> pieces;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double lo = knots[k];
    const double hi = knots[k + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    // h(x) = curvature/2 x^2 + lin x + c on this piece.
    double curvature = base;
    double lin = -2 * p.lambda * sum_y;
    double c = p.lambda * sum_y2;
    for (const Hinge& h : hinges) {
      if (h.sign * mid + h.offset > 0) {
        curvature += 2 * p.beta;
        lin += 2 * p.beta * h.sign * h.offset;
        c += p.beta * h.offset * h.offset;
      }
    }
    const double mean = -lin / curvature;
    const double min_energy = c - lin * lin / (2 * curvature);
    const double s = std::sqrt(curvature);
    const double log_mass = -min_energy + 0.5 * std::log(2 * std::numbers::pi / curvature) +
                            log_normal_interval(s * (lo - mean), s * (hi - mean));
    pieces.push_back({lo, hi, curvature, mean, min_energy, log_mass});
  }
  return OneSiteDensity(std::move(pieces), base);
}

GibbsChain::GibbsChain(const GibbsModel& model, std::uint64_t seed)
    : model_(&model), rng_(seed), f_(model.vertex_count(), 0.0) {}

void GibbsChain::sweep() {
  for (Vertex v = 0; v < f_.size(); ++v) f_[v] = one_site_conditional(*model_, v, f_).sample(rng_);
}

Assignment gibbs_sweep_sample(const GibbsModel& model, std::size_t sweeps, std::uint64_t seed) {
  GibbsChain chain(model, seed);
  chain.run(sweeps);
  return Assignment(chain.state());
}

std::vector<std::vector<double>> gibbs_samples(const GibbsModel& model, std::size_t count, std::uint64_t seed,
                                               const SweepOptions& opts) {
  if (opts.thinning == 0) throw InputError("thinning must be at least 1");
  GibbsChain chain(model, seed);
  chain.run(opts.burn_in);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) chain.run(opts.thinning);
    out.push_back(chain.state());
  }
  return out;
}

EdgeStatistics edge_statistics(const GibbsModel& model, const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) throw InputError("edge statistics need at least one sample");
  const auto& u = model.scaffold();
  const GibbsParams& p = model.params();
  EdgeStatistics st;
  st.samples = samples.size();
  std::vector<std::size_t> violated(u.edge_count(), 0);
  std::size_t hidden_edges = 0;
  for (EdgeId id = 0; id < u.edge_count(); ++id) hidden_edges += model.favours_violation(id) ? 1 : 0;
  std::size_t good = 0;
  std::size_t strip_hits = 0;
  double farness = 0.0;
  const double strip = p.gamma / 2;
  for (const auto& f : samples) {
    if (f.size() != u.vertex_count()) throw InputError("sample length does not match the scaffold");
    std::size_t matched_violated = 0;
    for (EdgeId id = 0; id < u.edge_count(); ++id) {
      const BiEdge& e = u.edge(id);
      if (f[u.oriented_left(e.left)] > f[u.oriented_right(e.right)]) {
        ++violated[id];
        if (model.favours_violation(id)) ++matched_violated;
      }
    }
    if (static_cast<double>(hidden_edges - matched_violated) <= static_cast<double>(hidden_edges) / 100.0) ++good;
    farness += static_cast<double>(matched_violated) / static_cast<double>(u.vertex_count());
    for (Vertex v = 0; v < u.vertex_count(); ++v) {
      const bool hit = v < u.left_size() ? f[v] >= p.box - strip : f[v] <= -p.box + strip;
      strip_hits += hit ? 1 : 0;
    }
  }
  const auto n_samples = static_cast<double>(samples.size());
  std::size_t m_total = 0;
  std::size_t o_total = 0;
  std::size_t o_edges = 0;
  for (EdgeId id = 0; id < u.edge_count(); ++id) {
    const double rate = static_cast<double>(violated[id]) / n_samples;
    if (model.favours_violation(id)) {
      m_total += violated[id];
      st.min_matching_edge_rate = std::min(st.min_matching_edge_rate, rate);
    } else {
      o_total += violated[id];
      ++o_edges;
      st.max_nonmatching_edge_rate = std::max(st.max_nonmatching_edge_rate, rate);
    }
  }
  if (hidden_edges > 0) st.matching_violation_rate = static_cast<double>(m_total) / (n_samples * hidden_edges);
  if (o_edges > 0) st.nonmatching_violation_rate = static_cast<double>(o_total) / (n_samples * o_edges);
  st.good_match_rate = static_cast<double>(good) / n_samples;
  st.boundary_strip_rate = static_cast<double>(strip_hits) / (n_samples * static_cast<double>(u.vertex_count()));
  st.mean_farness_floor = farness / n_samples;
  return st;
}

GameResult run_adaptive_game(const GibbsModel& model, const Strategy& strategy, std::size_t budget,
                             std::uint64_t seed, const GameOptions& opts) {
  const auto& u = model.scaffold();
  const GibbsParams& p = model.params();
  GibbsChain chain(model, seed);
  chain.run(opts.sweeps.burn_in);
  const std::vector<double>& f = chain.state();

  GameResult result;
  std::vector<bool> queried(u.vertex_count(), false);
  const GameView view{&u, &result.transcript, budget};
  for (std::size_t calls = 0;; ++calls) {
    if (calls >= opts.max_strategy_calls) {
      throw BudgetExceeded("strategy exceeded " + std::to_string(opts.max_strategy_calls) + " calls");
    }
    const GameAction action = strategy(view);
    if (action.kind != GameActionKind::query) {
      result.verdict = action.kind;
      break;
    }
    const Vertex v = action.vertex;
    if (v >= u.vertex_count()) throw InputError("strategy queried vertex " + std::to_string(v) + " out of range");
    if (queried[v]) continue;
    if (result.transcript.size() >= budget) {
      throw BudgetExceeded("strategy asked for query " + std::to_string(budget + 1) + " with budget " +
                           std::to_string(budget));
    }
    queried[v] = true;
    result.transcript.record(v, f[v]);
    RoundLog log{result.transcript.size(), v, f[v], {}, false};
    const bool on_left = v < u.left_size();
    for (EdgeId id : u.incident(v)) {
      const BiEdge& e = u.edge(id);
      const Vertex l = u.oriented_left(e.left);
      const Vertex r = u.oriented_right(e.right);
      if (!queried[on_left ? r : l]) continue;
      const ClosedEdge closed{id, f[l] > f[r], model.favours_violation(id)};
      if (closed.violated && !result.first_violation) result.first_violation = id;
      log.closed.push_back(closed);
    }
    log.boundary_query = on_left ? f[v] > p.box - p.gamma / 2 : f[v] < -p.box + p.gamma / 2;
    result.rounds.push_back(std::move(log));
  }
  return result;
}

std::size_t decode_index(const GibbsModel& model, const RealTranscript& t) {
  const auto& u = model.scaffold();
  std::vector<std::optional<double>> answer(u.vertex_count());
  for (const auto& entry : t.entries()) {
    const Vertex v = entry.vertex;
    if (v >= u.vertex_count()) throw InputError("transcript vertex out of range");
    answer[v] = entry.value;
    const bool on_left = v < u.left_size();
    for (EdgeId id : u.incident(v)) {
      const BiEdge& e = u.edge(id);
      const Vertex l = u.oriented_left(e.left);
      const Vertex r = u.oriented_right(e.right);
      const Vertex other = on_left ? r : l;
      if (other == v || !answer[other]) continue;
      if (*answer[l] > *answer[r]) return model.matching_of(id).value_or(0);
    }
  }
  return 0;
}

Strategy random_query_strategy(std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const GameView& view) -> GameAction {
    const auto& u = *view.scaffold;
    const auto& t = *view.transcript;
    if (t.size() < view.budget && t.size() < u.vertex_count()) {
      std::unordered_set<Vertex> seen;
      for (const auto& e : t.entries()) seen.insert(e.vertex);
      Vertex v = 0;
      do {
        v = static_cast<Vertex>(rng->uniform_index(u.vertex_count()));
      } while (seen.contains(v));
      return {GameActionKind::query, v};
    }
    std::vector<std::optional<double>> answer(u.vertex_count());
    for (const auto& e : t.entries()) answer[e.vertex] = e.value;
    for (const BiEdge& e : u.edges()) {
      const auto& a = answer[u.oriented_left(e.left)];
      const auto& b = answer[u.oriented_right(e.right)];
      if (a && b && *a > *b) return {GameActionKind::reject, 0};
    }
    return {GameActionKind::accept, 0};
  };
}

GibbsDiagnostics gibbs_diagnostics(const GibbsModel& model, const DiagnosticConstants& c) {
  const GibbsParams& p = model.params();
  const auto delta = static_cast<double>(model.min_degree());
  const auto big_delta = static_cast<double>(std::max<std::size_t>(model.max_degree(), 1));
  GibbsDiagnostics d{};
  d.m_min = p.alpha + 2 * p.lambda * delta;
  d.m_edge = p.alpha / 2 + 2 * p.lambda;
  const double u_half = p.drift_tolerance / 2;
  const double lb = p.lambda + p.beta;
  d.p_drift = 2 * std::exp(-c.c_drift * d.m_min * u_half * u_half / (lb * lb * big_delta));
  d.p_match = std::exp(-d.m_edge * p.gamma * p.gamma / 8) + d.p_drift + c.p_mean;
  if (p.beta > p.lambda) {
    const double gap = p.beta - p.lambda;
    d.boundary_bound = c.C_bdry * lb / gap * (p.box + p.gamma) / p.gamma *
                       std::exp(-c.c_bdry * delta * gap * gap / lb * p.gamma * p.gamma);
  } else {
    d.boundary_bound = std::numeric_limits<double>::infinity();
  }
  return d;
}

}  // namespace dagmono
