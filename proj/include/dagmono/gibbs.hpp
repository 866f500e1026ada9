#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dagmono/graph.hpp"
#include "dagmono/harness_access.hpp"
#include "dagmono/monotonicity.hpp"
#include "dagmono/positivity.hpp"
#include "dagmono/rng.hpp"

namespace dagmono {

struct GibbsParams {
  double alpha = 1.0;   // pinning
  double lambda = 1.0;  // smoothing
  double beta = 10.0;   // hinge strength
  double gamma = 4.0;   // hinge margin
  double box = 16.0;    // values live in [-box, box]
  double query_scale = 1.0;
  double drift_tolerance = 4.0;

  /// Basic sanity: alpha, gamma, box > 0; lambda, beta >= 0. beta = 0 is
  /// allowed so the hinge-free chain can be calibrated.
  void validate() const;
};

struct Admissibility {
  bool support = false;     // box >= gamma / 2
  bool separation = false;  // beta gamma >= alpha (box + gamma/2) + lambda gamma + u
  bool strong_hinge = false;  // beta >= 10
  [[nodiscard]] bool ok() const { return support && separation && strong_hinge; }
};
Admissibility admissibility(const GibbsParams& p);

/// Truncated Gibbs measure on a C4-free scaffold with a hidden matching.
class GibbsModel {
 public:
  GibbsModel(BipartiteGraph scaffold, std::vector<Matching> matchings, std::size_t hidden_index,
             GibbsParams params);

  [[nodiscard]] const BipartiteGraph& scaffold() const { return scaffold_; }
  [[nodiscard]] const std::vector<Matching>& matchings() const { return matchings_; }
  [[nodiscard]] const GibbsParams& params() const { return params_; }
  [[nodiscard]] std::size_t vertex_count() const { return scaffold_.vertex_count(); }
  /// Matching that owns each scaffold edge, if any.
  [[nodiscard]] std::optional<std::size_t> matching_of(EdgeId e) const {
    return owner_[e] == kNoMatching ? std::nullopt : std::optional<std::size_t>(owner_[e]);
  }
  [[nodiscard]] std::size_t min_degree() const { return min_degree_; }
  [[nodiscard]] std::size_t max_degree() const { return max_degree_; }

  /// Whether edge e carries the violation-favouring hinge. Internal to the
  /// sampler; the hidden index itself is only exposed via HarnessAccess.
  [[nodiscard]] bool favours_violation(EdgeId e) const { return owner_[e] == hidden_; }

 private:
  friend class HarnessAccess;
  static constexpr std::size_t kNoMatching = static_cast<std::size_t>(-1);

  BipartiteGraph scaffold_;
  std::vector<Matching> matchings_;
  std::size_t hidden_;
  GibbsParams params_;
  std::vector<std::size_t> owner_;
  std::size_t min_degree_ = 0;
  std::size_t max_degree_ = 0;
};

/// Neumaier-compensated energy. Throws InputError on values outside the box.
double hamiltonian(const GibbsModel& model, const std::vector<double>& f);

/// Piece of the one-site density: on [lo, hi] the negative log density is
/// curvature/2 (x - mean)^2 + const.
struct DensityPiece {
  double lo;
  double hi;
  double curvature;
  double mean;
  double min_energy;  // h at the unconstrained minimum of this piece
  double log_mass;    // unnormalized
};

/// Conditional law of one site given its neighbours: density proportional to
/// exp(-h(x)) on [-box, box], h piecewise quadratic.
class OneSiteDensity {
 public:
  OneSiteDensity(std::vector<DensityPiece> pieces, double base_curvature);

  [[nodiscard]] const std::vector<DensityPiece>& pieces() const { return pieces_; }
  [[nodiscard]] double log_normalizer() const { return log_z_; }
  /// alpha + 2 lambda deg(v); every piece's curvature is at least this.
  [[nodiscard]] double base_curvature() const { return base_curvature_; }
  [[nodiscard]] double min_piece_curvature() const;
  /// Sum of normalized piece masses.
  [[nodiscard]] double total_mass() const;

  /// Normalized density and distribution function.
  [[nodiscard]] double density(double x) const;
  [[nodiscard]] double cdf(double x) const;
  [[nodiscard]] double mean() const;

  double sample(Rng& rng) const;

 private:
  std::vector<DensityPiece> pieces_;
  std::vector<double> weights_;  // normalized piece masses
  double log_z_ = 0.0;
  double base_curvature_ = 0.0;
};

/// Conditional density of oriented vertex v given the rest of f.
OneSiteDensity one_site_conditional(const GibbsModel& model, Vertex v, const std::vector<double>& f);

struct SweepOptions {
  std::size_t burn_in = 200;
  std::size_t thinning = 5;
};

/// Systematic-scan Gibbs chain started from the zero configuration.
class GibbsChain {
 public:
  GibbsChain(const GibbsModel& model, std::uint64_t seed);
  void sweep();
  void run(std::size_t sweeps) {
    for (std::size_t i = 0; i < sweeps; ++i) sweep();
  }
  [[nodiscard]] const std::vector<double>& state() const { return f_; }

 private:
  const GibbsModel* model_;
  Rng rng_;
  std::vector<double> f_;
};

/// Final configuration after `sweeps` sweeps.
Assignment gibbs_sweep_sample(const GibbsModel& model, std::size_t sweeps, std::uint64_t seed);

/// Burn-in, then `count` configurations `thinning` sweeps apart.
std::vector<std::vector<double>> gibbs_samples(const GibbsModel& model, std::size_t count, std::uint64_t seed,
                                               const SweepOptions& opts = {});

struct EdgeStatistics {
  std::size_t samples = 0;
  /// Pooled violation frequencies.
  double matching_violation_rate = 0.0;
  double nonmatching_violation_rate = 0.0;
  /// Extremes of per-edge frequencies.
  double min_matching_edge_rate = 1.0;
  double max_nonmatching_edge_rate = 0.0;
  /// Fraction of samples with at most |M_i|/100 non-violated matching edges.
  double good_match_rate = 0.0;
  /// Fraction of (sample, vertex) pairs in the boundary strips:
  /// L values in [B - gamma/2, B], R values in [-B, -B + gamma/2].
  double boundary_strip_rate = 0.0;
  /// Mean over samples of (violated matching edges) / n, a farness floor.
  double mean_farness_floor = 0.0;
};

EdgeStatistics edge_statistics(const GibbsModel& model, const std::vector<std::vector<double>>& samples);

enum class GameActionKind { query, accept, reject };

struct GameAction {
  GameActionKind kind = GameActionKind::accept;
  Vertex vertex = 0;
};

using RealTranscript = BasicTranscript<double>;

/// What a strategy may see: the public scaffold and its own transcript.
struct GameView {
  const BipartiteGraph* scaffold;
  const RealTranscript* transcript;
  std::size_t budget;
};

using Strategy = std::function<GameAction(const GameView&)>;

struct ClosedEdge {
  EdgeId edge;
  bool violated;
  bool in_hidden_matching;
};

struct RoundLog {
  std::size_t round;
  Vertex vertex;
  double value;
  std::vector<ClosedEdge> closed;
  bool boundary_query;
};

struct GameOptions {
  SweepOptions sweeps;
  /// Cap on strategy invocations, counting repeat queries.
  std::size_t max_strategy_calls = 1'000'000;
};

struct GameResult {
  RealTranscript transcript;
  GameActionKind verdict = GameActionKind::accept;
  std::vector<RoundLog> rounds;
  /// First violated closed edge in query order.
  std::optional<EdgeId> first_violation;
};

/// Samples one configuration (burn-in sweeps) and answers the strategy's
/// queries from it. Throws BudgetExceeded when the strategy asks for a new
/// vertex after `budget` distinct queries.
GameResult run_adaptive_game(const GibbsModel& model, const Strategy& strategy, std::size_t budget,
                             std::uint64_t seed, const GameOptions& opts = {});

/// Matching index (0-based) of the first violated closed edge in query order,
/// or 0 when there is none or that edge lies in no matching.
std::size_t decode_index(const GibbsModel& model, const RealTranscript& t);

/// Strategy that queries uniformly random unqueried vertices up to the budget
/// and then rejects iff it saw a violated edge.
Strategy random_query_strategy(std::uint64_t seed);

struct GibbsDiagnostics {
  double m_min;    // alpha + 2 lambda delta
  double m_edge;   // alpha/2 + 2 lambda
  double p_drift;  // at u/2
  double p_match;  // exp(-m_edge gamma^2/8) + p_drift(u/2) + p_mean
  double boundary_bound;
};

struct DiagnosticConstants {
  double c_drift = 1.0;
  double c_bdry = 1.0;
  double C_bdry = 1.0;
  /// Mean-control failure probability; not computable in closed form.
  double p_mean = 0.0;
};

GibbsDiagnostics gibbs_diagnostics(const GibbsModel& model, const DiagnosticConstants& c = {});

}  // namespace dagmono
