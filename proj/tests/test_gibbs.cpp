#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>

#include "dagmono/errors.hpp"
#include "dagmono/gibbs.hpp"
#include "dagmono/pmrs.hpp"

using namespace dagmono;

namespace {

using boost::math::quadrature::gauss_kronrod;

/// Six-vertex tree plus one unmatched edge: L{0,1,2}, R{0,1,2}, a 6-cycle
/// at most, so no 4-cycle.
BipartiteGraph small_scaffold() { return BipartiteGraph(3, 3, {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {0, 2}}); }
std::vector<Matching> small_matchings() { return {Matching{{{0, 0}, {1, 1}, {2, 2}}}, Matching{{{1, 0}, {2, 1}}}}; }

GibbsParams params(double alpha, double lambda, double beta, double gamma, double box) {
  GibbsParams p;
  p.alpha = alpha;
  p.lambda = lambda;
  p.beta = beta;
  p.gamma = gamma;
  p.box = box;
  return p;
}

/// Termwise evaluator written from the energy definition, with the hidden
/// matching passed explicitly.
double energy_oracle(const BipartiteGraph& u, const Matching& hidden, const GibbsParams& p,
                     const std::vector<double>& f) {
  long double h = 0;
  for (double x : f) h += 0.5L * p.alpha * x * x;
  for (const BiEdge& e : u.edges()) {
    const long double d = f[e.left] - f[u.left_size() + e.right];
    h += p.lambda * d * d;
    const bool in_m = std::find(hidden.edges.begin(), hidden.edges.end(), e) != hidden.edges.end();
    const long double t = in_m ? p.gamma - d : d + p.gamma;
    if (t > 0) h += p.beta * t * t;
  }
  return static_cast<double>(h);
}

/// Unnormalized one-site energy from the full Hamiltonian.
double site_energy(const GibbsModel& m, Vertex v, std::vector<double> f, double x) {
  f[v] = x;
  return hamiltonian(m, f);
}

struct Quadrature {
  double z;
  double mean;
};

/// Integrates exp(-(h(x) - h0)) over the box, split at the hinge breakpoints
/// so each panel is smooth.
Quadrature quadrature_moments(const GibbsModel& m, Vertex v, const std::vector<double>& f) {
  const auto& p = m.params();
  const double h0 = site_energy(m, v, f, 0.0);
  std::vector<double> cuts{-p.box, p.box};
  const auto& u = m.scaffold();
  for (EdgeId id : u.incident(v)) {
    const BiEdge& e = u.edge(id);
    const Vertex other = v < u.left_size() ? u.oriented_right(e.right) : u.oriented_left(e.left);
    for (double c : {f[other] - p.gamma, f[other] + p.gamma}) {
      if (c > -p.box && c < p.box) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double z = 0;
  double first = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    auto dens = [&](double x) { return std::exp(-(site_energy(m, v, f, x) - h0)); };
    z += gauss_kronrod<double, 61>::integrate(dens, cuts[k], cuts[k + 1], 15, 1e-13);
    first += gauss_kronrod<double, 61>::integrate([&](double x) { return x * dens(x); }, cuts[k], cuts[k + 1], 15,
                                                  1e-13);
  }
  return {z, first / z};
}

std::vector<double> random_config(std::size_t n, double box, Rng& rng) {
  std::vector<double> f(n);
  for (auto& x : f) x = (2 * rng.uniform01() - 1) * box;
  return f;
}

}  // namespace

TEST_CASE("hamiltonian on a single matching edge") {
  const BipartiteGraph one(1, 1, {{0, 0}});
  const GibbsModel m(one, {Matching{{{0, 0}}}}, 0, params(1, 1, 10, 1, 4));
  CHECK(hamiltonian(m, {0.0, 0.0}) == doctest::Approx(10.0));
  CHECK(hamiltonian(m, {2.0, 0.0}) == doctest::Approx(6.0));
  CHECK_THROWS_AS(hamiltonian(m, {5.0, 0.0}), InputError);
  CHECK_THROWS_AS(hamiltonian(m, {0.0}), InputError);
}

TEST_CASE("hamiltonian equals a termwise oracle and ignores edge order") {
  const auto u = small_scaffold();
  const auto ms = small_matchings();
  const GibbsParams p = params(1.5, 0.75, 12, 2, 8);
  Rng rng(101);
  for (std::size_t hidden = 0; hidden < ms.size(); ++hidden) {
    const GibbsModel m(u, ms, hidden, p);
    std::vector<BiEdge> reversed(u.edges().begin(), u.edges().end());
    std::reverse(reversed.begin(), reversed.end());
    const GibbsModel flipped(BipartiteGraph(3, 3, reversed), ms, hidden, p);
    for (int trial = 0; trial < 200; ++trial) {
      const auto f = random_config(6, 8, rng);
      const double h = hamiltonian(m, f);
      CHECK(h == doctest::Approx(energy_oracle(u, ms[hidden], p, f)).epsilon(1e-12));
      CHECK(hamiltonian(flipped, f) == doctest::Approx(h).epsilon(1e-12));
    }
  }
}

TEST_CASE("model construction guards") {
  const BipartiteGraph k22(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK_THROWS_AS(GibbsModel(k22, {Matching{{{0, 0}, {1, 1}}}}, 0, params(1, 1, 10, 1, 4)), InputError);
  CHECK_THROWS_AS(GibbsModel(small_scaffold(), small_matchings(), 2, params(1, 1, 10, 1, 4)), InputError);
  CHECK_THROWS_AS(GibbsModel(small_scaffold(), {Matching{{{0, 0}}}, Matching{{{0, 0}}}}, 0, params(1, 1, 10, 1, 4)),
                  InputError);
  CHECK_THROWS_AS(GibbsModel(small_scaffold(), small_matchings(), 0, params(0, 1, 10, 1, 4)), InputError);
  CHECK_NOTHROW(GibbsModel(small_scaffold(), small_matchings(), 0, params(1, 1, 0, 1, 4)));
}

TEST_CASE("admissibility conditions") {
  // B = 4 gamma with alpha = lambda = 1, beta = 10: 10 gamma >= 5.5 gamma + u.
  GibbsParams p = params(1, 1, 10, 1, 4);
  p.drift_tolerance = 4;
  CHECK(admissibility(p).ok());
  p.drift_tolerance = 5;
  CHECK_FALSE(admissibility(p).separation);
  CHECK_FALSE(admissibility(params(1, 1, 9.5, 8, 32)).strong_hinge);
  CHECK_FALSE(admissibility(params(1, 1, 10, 10, 4)).support);
}

TEST_CASE("one-site pieces: unit mass and curvature at least the base") {
  const auto u = small_scaffold();
  const GibbsModel m(u, small_matchings(), 1, params(1, 0.5, 10, 1.5, 6));
  Rng rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_config(6, 6, rng);
    for (Vertex v = 0; v < 6; ++v) {
      const OneSiteDensity d = one_site_conditional(m, v, f);
      CHECK(std::abs(d.total_mass() - 1.0) <= 1e-9);
      CHECK(d.base_curvature() == doctest::Approx(1 + 2 * 0.5 * static_cast<double>(u.incident(v).size())));
      CHECK(d.min_piece_curvature() >= d.base_curvature() - 1e-12);
      CHECK(d.cdf(6) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(d.cdf(-6) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("one-site density matches quadrature of the Hamiltonian") {
  const auto u = small_scaffold();
  const GibbsModel m(u, small_matchings(), 0, params(1, 1, 10, 1, 4));
  Rng rng(107);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_config(6, 4, rng);
    for (Vertex v = 0; v < 6; ++v) {
      const OneSiteDensity d = one_site_conditional(m, v, f);
      const Quadrature q = quadrature_moments(m, v, f);
      CHECK(d.mean() == doctest::Approx(q.mean).epsilon(1e-8));
      const double h0 = site_energy(m, v, f, 0.0);
      for (double x : {-3.5, -1.0, 0.25, 2.0}) {
        const double expected = std::exp(-(site_energy(m, v, f, x) - h0)) / q.z;
        CHECK(d.density(x) == doctest::Approx(expected).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("isolated site is a truncated Gaussian with variance 1/alpha") {
  // Vertex R1 has no edges; with the box wide the truncation is negligible.
  const GibbsModel m(BipartiteGraph(1, 2, {{0, 0}}), {Matching{{{0, 0}}}}, 0, params(4, 1, 10, 1, 40));
  const OneSiteDensity d = one_site_conditional(m, 2, {0.0, 0.0, 0.0});
  REQUIRE(d.pieces().size() == 1);
  CHECK(d.pieces()[0].curvature == doctest::Approx(4.0));
  CHECK(d.mean() == doctest::Approx(0.0));
}

TEST_CASE("empirical mean of exact site draws agrees with quadrature") {
  const auto u = small_scaffold();
  const GibbsModel m(u, small_matchings(), 1, params(1, 1, 10, 1, 4));
  Rng cfg(109);
  const auto f = random_config(6, 4, cfg);
  Rng rng(113);
  for (Vertex v : {Vertex{1}, Vertex{4}}) {
    const OneSiteDensity d = one_site_conditional(m, v, f);
    const Quadrature q = quadrature_moments(m, v, f);
    constexpr int kDraws = 100000;
    double s = 0;
    double s2 = 0;
    for (int i = 0; i < kDraws; ++i) {
      const double x = d.sample(rng);
      REQUIRE(std::abs(x) <= 4.0);
      s += x;
      s2 += x * x;
    }
    const double mean = s / kDraws;
    const double se = std::sqrt((s2 / kDraws - mean * mean) / kDraws);
    CHECK(std::abs(mean - q.mean) <= 4 * se);
  }
}

TEST_CASE("hinge-free chain reproduces independent truncated Gaussian marginals") {
  // 500 disjoint edges, 1000 sites; alpha = 1, box 2 so truncation matters.
  std::vector<BiEdge> edges;
  for (Vertex i = 0; i < 500; ++i) edges.push_back({i, i});
  const GibbsModel m(BipartiteGraph(500, 500, edges), {Matching{edges}}, 0, params(1, 0, 0, 1, 2));
  SweepOptions opts;
  opts.burn_in = 1;
  opts.thinning = 1;
  const auto samples = gibbs_samples(m, 100, 127, opts);
  std::vector<double> xs;
  for (const auto& s : samples) xs.insert(xs.end(), s.begin(), s.end());
  REQUIRE(xs.size() == 100000);
  std::sort(xs.begin(), xs.end());
  auto gauss = [](double x) { return std::exp(-0.5 * x * x); };
  const double z = gauss_kronrod<double, 61>::integrate(gauss, -2.0, 2.0, 15, 1e-14);
  double ks = 0;
  for (std::size_t i = 0; i < xs.size(); i += 97) {
    const double cdf = gauss_kronrod<double, 61>::integrate(gauss, -2.0, xs[i], 15, 1e-14) / z;
    const double n = static_cast<double>(xs.size());
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  CHECK(ks <= 0.01);
}

TEST_CASE("chains are reproducible per seed") {
  const GibbsModel m(small_scaffold(), small_matchings(), 0, params(1, 1, 10, 1, 4));
  CHECK(gibbs_sweep_sample(m, 20, 5).real() == gibbs_sweep_sample(m, 20, 5).real());
  CHECK(gibbs_sweep_sample(m, 20, 5).real() != gibbs_sweep_sample(m, 20, 6).real());
  const Assignment f = gibbs_sweep_sample(m, 20, 7);
  for (double x : f.real()) CHECK(std::abs(x) <= 4.0);
}

TEST_CASE("edge statistics on fixed configurations") {
  const GibbsModel m(small_scaffold(), small_matchings(), 0, params(1, 1, 10, 1, 4));
  // Hidden matching (0,0),(1,1),(2,2) pushed apart by more than gamma.
  // Non-hidden (1,0) and (0,2) are violated too; (2,1) is not.
  const std::vector<double> apart{2, 2, 0, -2, 1, -2};
  const auto st = edge_statistics(m, {apart});
  CHECK(st.matching_violation_rate == doctest::Approx(1.0));
  CHECK(st.min_matching_edge_rate == doctest::Approx(1.0));
  CHECK(st.good_match_rate == doctest::Approx(1.0));
  CHECK(st.mean_farness_floor == doctest::Approx(3.0 / 6.0));
  CHECK(st.nonmatching_violation_rate == doctest::Approx(2.0 / 3.0));
  CHECK(st.max_nonmatching_edge_rate == doctest::Approx(1.0));
  const std::vector<double> flat(6, 0.0);
  const auto st0 = edge_statistics(m, {flat});
  CHECK(st0.matching_violation_rate == doctest::Approx(0.0));
  CHECK(st0.good_match_rate == doctest::Approx(0.0));
  CHECK(st0.boundary_strip_rate == doctest::Approx(0.0));
  const std::vector<double> edge_hits{4, 3.5, 0, -4, 0, 0};
  CHECK(edge_statistics(m, {edge_hits}).boundary_strip_rate == doctest::Approx(3.0 / 6.0));
  CHECK_THROWS_AS(edge_statistics(m, {}), InputError);
}

TEST_CASE("decode_index returns the matching of the first violated closed edge") {
  const GibbsModel m(small_scaffold(), small_matchings(), 0, params(1, 1, 10, 1, 8));
  // Oriented: L0..2 = 0..2, R0..2 = 3..5.
  SUBCASE("no violation") {
    RealTranscript t;
    t.record(0, -1.0);
    t.record(3, 1.0);
    CHECK(decode_index(m, t) == 0);
    CHECK(decode_index(m, RealTranscript{}) == 0);
  }
  SUBCASE("first violation in the second matching") {
    RealTranscript t;
    t.record(2, 5.0);
    t.record(4, 0.0);  // closes (2,1), in matching 1
    t.record(0, 5.0);
    t.record(3, 0.0);  // closes (0,0), in matching 0
    CHECK(decode_index(m, t) == 1);
  }
  SUBCASE("first violation off every matching") {
    RealTranscript t;
    t.record(0, 5.0);
    t.record(5, 0.0);  // closes (0,2), unmatched
    t.record(2, 5.0);
    t.record(4, 0.0);
    CHECK(decode_index(m, t) == 0);
  }
}

TEST_CASE("adaptive game rules") {
  const GibbsModel m(small_scaffold(), small_matchings(), 1, params(1, 1, 10, 1, 4));
  GameOptions opts;
  opts.sweeps.burn_in = 10;

  SUBCASE("budget") {
    auto greedy = [](const GameView& view) {
      return GameAction{GameActionKind::query, static_cast<Vertex>(view.transcript->size())};
    };
    CHECK_THROWS_AS(run_adaptive_game(m, greedy, 3, 1, opts), BudgetExceeded);
  }
  SUBCASE("repeat queries do not count") {
    int calls = 0;
    auto repeat = [&calls](const GameView&) {
      return ++calls < 10 ? GameAction{GameActionKind::query, 0} : GameAction{GameActionKind::accept, 0};
    };
    const GameResult r = run_adaptive_game(m, repeat, 1, 2, opts);
    CHECK(r.transcript.size() == 1);
    CHECK(r.verdict == GameActionKind::accept);
  }
  SUBCASE("left-only strategy closes nothing and extends monotonically") {
    auto left_only = [](const GameView& view) {
      const auto k = view.transcript->size();
      return k < 3 ? GameAction{GameActionKind::query, static_cast<Vertex>(k)} : GameAction{GameActionKind::accept, 0};
    };
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const GameResult r = run_adaptive_game(m, left_only, 3, seed, opts);
      CHECK_FALSE(r.first_violation);
      for (const auto& round : r.rounds) CHECK(round.closed.empty());
      const auto ext = monotone_extension(orient_bipartite(m.scaffold()), 3, r.transcript);
      CHECK(ext.extension.has_value());
    }
  }
  SUBCASE("answers stay in the box and logs are consistent") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const GameResult r = run_adaptive_game(m, random_query_strategy(seed), 6, seed, opts);
      CHECK(r.transcript.size() == 6);
      std::size_t closed = 0;
      for (const auto& round : r.rounds) {
        CHECK(std::abs(round.value) <= 4.0);
        closed += round.closed.size();
      }
      CHECK(closed == m.scaffold().edge_count());
      CHECK((r.verdict == GameActionKind::reject) == r.first_violation.has_value());
    }
  }
}

TEST_CASE("querying both endpoints of a hidden edge usually witnesses a violation") {
  const PmrsFamily fam = build_shift_pmrs({2, 6, 2, ShiftSetMode::difference_free});
  // Index 0: the middle shift's matching is frustrated at this size (long
  // alternating paths need a wider box than 4 gamma), so it is not used here.
  const GibbsModel m(fam.scaffold, fam.matchings, 0, params(1, 1, 10, 2, 8));
  const BiEdge target = fam.matchings[0].edges[fam.matchings[0].edges.size() / 2];
  const Vertex l = fam.scaffold.oriented_left(target.left);
  const Vertex r = fam.scaffold.oriented_right(target.right);
  auto probe = [l, r](const GameView& view) {
    const auto k = view.transcript->size();
    if (k == 0) return GameAction{GameActionKind::query, l};
    if (k == 1) return GameAction{GameActionKind::query, r};
    return GameAction{GameActionKind::accept, 0};
  };
  GameOptions opts;
  opts.sweeps.burn_in = 30;
  int hits = 0;
  constexpr int kGames = 40;
  for (int g = 0; g < kGames; ++g) {
    const GameResult res = run_adaptive_game(m, probe, 2, substream_seed(131, g), opts);
    REQUIRE(res.rounds.size() == 2);
    REQUIRE(res.rounds[1].closed.size() == 1);
    CHECK(res.rounds[1].closed[0].in_hidden_matching);
    hits += res.first_violation ? 1 : 0;
  }
  CHECK(hits >= kGames * 9 / 10);
}

TEST_CASE("boundary-strip frequency does not grow with gamma") {
  const PmrsFamily fam = build_shift_pmrs({2, 6, 2, ShiftSetMode::difference_free});
  SweepOptions opts;
  opts.burn_in = 30;
  opts.thinning = 2;
  double prev = 1.0;
  double prev_se = 0.0;
  for (double gamma : {1.0, 2.0, 3.0, 4.0}) {
    const GibbsModel m(fam.scaffold, fam.matchings, 0, params(1, 1, 10, gamma, 4 * gamma));
    const auto st = edge_statistics(m, gibbs_samples(m, 20, 137, opts));
    const double trials = 20.0 * static_cast<double>(fam.scaffold.vertex_count());
    const double se = std::sqrt(std::max(st.boundary_strip_rate * (1 - st.boundary_strip_rate), 1e-12) / trials);
    CHECK(st.boundary_strip_rate <= prev + 2 * std::hypot(se, prev_se));
    prev = st.boundary_strip_rate;
    prev_se = se;
  }
}

TEST_CASE("diagnostic formulas") {
  const GibbsModel m(small_scaffold(), small_matchings(), 0, params(1, 1, 10, 2, 8));
  const auto d = gibbs_diagnostics(m);
  CHECK(d.m_min == doctest::Approx(1 + 2 * static_cast<double>(m.min_degree())));
  CHECK(d.m_edge == doctest::Approx(2.5));
  CHECK(d.p_match >= std::exp(-2.5 * 4 / 8));
  CHECK(d.p_drift > 0);
}
