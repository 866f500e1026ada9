#include <doctest.h>

#include <memory>
#include <set>

#include "dagmono/errors.hpp"
#include "dagmono/hard_instances.hpp"
#include "dagmono/positivity.hpp"
#include "support.hpp"

using namespace dagmono;

namespace {

std::shared_ptr<const PmrsFamily> shift_family(std::int64_t N, std::int64_t P) {
  return std::make_shared<const PmrsFamily>(build_shift_pmrs({2, N, P, ShiftSetMode::full_box}));
}

std::vector<BiEdge> violated_bi_edges(const BipartiteGraph& u, const Assignment& f) {
  std::vector<BiEdge> out;
  for (const Arc& a : violating_pairs(orient_bipartite(u), f)) {
    out.push_back({a.from, static_cast<Vertex>(a.to - u.left_size())});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("margin normalization on hand witnesses") {
  SUBCASE("matching sums of 2") {
    const BipartiteGraph one(1, 1, {{0, 0}});
    const MarginWitness mw = normalize_margin(one, Matching{{{0, 0}}}, WeightWitness{{1, 1}});
    CHECK(mw.delta == Rational(2));
    CHECK(mw.w_tilde[0] + mw.w_tilde[1] == Rational(1, 2));
    CHECK(mw.slack_base[0] == mw.slack_base[1]);
  }
  SUBCASE("non-matching sum 0 maps to -1/2") {
    const BipartiteGraph u(2, 2, {{0, 0}, {1, 1}, {0, 1}});
    const MarginWitness mw = normalize_margin(u, Matching{{{0, 0}, {1, 1}}}, WeightWitness{{1, 2, 0, -1}});
    CHECK(mw.delta == Rational(1));
    CHECK(mw.w_tilde[0] + mw.w_tilde[3] == Rational(-1, 2));
    CHECK(mw.gap.size() == 2);
  }
  SUBCASE("invalid witness") {
    const BipartiteGraph u(2, 2, {{0, 0}, {1, 1}, {0, 1}});
    CHECK_THROWS_AS(normalize_margin(u, Matching{{{0, 0}, {1, 1}}}, WeightWitness{{1, 1, 1, 1}}), InputError);
  }
}

TEST_CASE("margin invariants hold on random positive matchings") {
  Rng rng(61);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const BipartiteGraph u = testsupport::random_bipartite(6, 0.4, rng);
    const auto all = testsupport::all_matchings(u);
    const Matching m{all[rng.uniform_index(all.size())]};
    if (m.edges.empty()) continue;
    const auto r = is_positive(u, m);
    if (!r.positive) continue;
    ++checked;
    const MarginWitness mw = normalize_margin(u, m, *r.witness);
    const std::set<BiEdge> in_m(m.edges.begin(), m.edges.end());
    for (const BiEdge& e : u.edges()) {
      const Vertex l = u.oriented_left(e.left);
      const Vertex rv = u.oriented_right(e.right);
      const Rational sum = mw.w_tilde[l] + mw.w_tilde[rv];
      if (in_m.count(e)) {
        CHECK(sum >= Rational(1, 2));
        CHECK(mw.slack_base[l] == mw.slack_base[rv]);
      } else {
        CHECK(sum <= Rational(-1, 2));
        CHECK(mw.slack_base[l] <= mw.slack_base[rv] - Rational(1, 2));
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("zero noise gives the slack base for both tags") {
  const HardInstanceSampler sampler(shift_family(4, 1));
  const std::size_t size = sampler.family().matchings[0].edges.size();
  const HardSample yes = sampler.assemble(SampleTag::yes, 0, std::vector<std::uint8_t>(size, 0));
  CHECK(yes.function().exact() == sampler.margin(0).slack_base);
  CHECK(violating_pairs(sampler.dag(), yes.function()).empty());
  const HardSample no = sampler.assemble(SampleTag::no, 0, std::vector<std::uint8_t>(size, 0));
  CHECK(violating_pairs(sampler.dag(), no.function()).empty());
  CHECK_THROWS_AS(sampler.assemble(SampleTag::yes, 0, {}), InputError);
  CHECK_THROWS_AS(sampler.assemble(SampleTag::yes, 99, {}), InputError);
}

TEST_CASE("ten thousand YES samples are monotone") {
  const HardInstanceSampler sampler(shift_family(4, 1));
  Rng rng(67);
  std::size_t bad = 0;
  for (int i = 0; i < 10000; ++i) {
    bad += violating_pairs(sampler.dag(), sampler.sample_yes(rng).function()).empty() ? 0 : 1;
  }
  CHECK(bad == 0);
}

TEST_CASE("NO samples violate exactly the noisy matching edges") {
  const HardInstanceSampler sampler(shift_family(4, 1));
  Rng rng(71);
  for (int i = 0; i < 500; ++i) {
    const HardSample s = sampler.sample_no(rng);
    const std::size_t idx = HarnessAccess::hidden_index(s);
    auto expected = expected_no_violations(sampler.family(), idx, s.noise());
    std::sort(expected.begin(), expected.end());
    CHECK(violated_bi_edges(sampler.family().scaffold, s.function()) == expected);
  }
}

TEST_CASE("per-edge gap under NO noise") {
  const HardInstanceSampler sampler(shift_family(4, 1));
  const auto& fam = sampler.family();
  const auto& m = fam.matchings[1];
  for (std::uint8_t z = 0; z < 4; ++z) {
    std::vector<std::uint8_t> noise(m.edges.size(), 0);
    noise[0] = z;
    const auto f = sampler.assemble(SampleTag::no, 1, noise).function().exact();
    const Rational diff = f[fam.scaffold.oriented_left(m.edges[0].left)] - f[fam.scaffold.oriented_right(m.edges[0].right)];
    CHECK(diff == (z == 0 ? Rational(-3, 8) : Rational(1, 8)));
  }
}

TEST_CASE("violation count concentrates above half the matching") {
  const HardInstanceSampler sampler(shift_family(4, 1));
  const auto& fam = sampler.family();
  std::size_t smallest = SIZE_MAX;
  for (const auto& m : fam.matchings) smallest = std::min(smallest, m.edges.size());
  // Largest eps with |M_i| >= 4 eps n0 for every i.
  const Rational eps(static_cast<std::int64_t>(smallest), 4 * static_cast<std::int64_t>(fam.n0()));
  const Rational target = Rational(2) * eps * Rational(static_cast<std::int64_t>(fam.n0()));
  Rng rng(73);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const HardSample s = sampler.sample_no(rng);
    const auto x = static_cast<std::int64_t>(expected_no_violations(fam, HarnessAccess::hidden_index(s), s.noise()).size());
    hits += Rational(x) >= target ? 1 : 0;
  }
  CHECK(hits >= 1800);
}

TEST_CASE("NO samples past the farness threshold are eps-far") {
  const HardInstanceSampler sampler(shift_family(3, 1));
  const auto& fam = sampler.family();
  const auto n = static_cast<std::int64_t>(sampler.dag().vertex_count());
  Rng rng(79);
  for (int i = 0; i < 40; ++i) {
    const HardSample s = sampler.sample_no(rng);
    const auto x = expected_no_violations(fam, HarnessAccess::hidden_index(s), s.noise()).size();
    if (x == 0) continue;
    const auto d = distance_to_monotone(sampler.dag(), s.function()).distance;
    CHECK(d == x);
    const auto xs = static_cast<std::int64_t>(x);
    // eps with 2 eps n0 = x - 1/2 is strictly below; eps with 2 eps n0 = x sits on the boundary.
    CHECK(is_eps_far(sampler.dag(), s.function(), Rational(2 * xs - 1, 2 * n)));
    CHECK_FALSE(is_eps_far(sampler.dag(), s.function(), Rational(xs, n)));
  }
}

TEST_CASE("transcripts without a full matching edge are identical") {
  const HardInstanceSampler sampler(shift_family(4, 1));
  const auto& fam = sampler.family();
  const auto& u = fam.scaffold;
  const auto& m = fam.matchings[0];
  const Vertex l0 = u.oriented_left(m.edges[0].left);
  const Vertex r0 = u.oriented_right(m.edges[0].right);
  const Vertex r1 = u.oriented_right(m.edges[1].right);

  SUBCASE("single endpoint: uniform over four shifted values") {
    const auto t = transcript_distribution(sampler, 0, {l0});
    CHECK(t.equal);
    CHECK(t.touched_edges == 1);
    REQUIRE(t.yes.size() == 4);
    const Rational g = sampler.margin(0).slack_base[l0];
    std::int64_t step = 0;
    for (const auto& [answers, count] : t.yes) {
      CHECK(answers[0] == g + Rational(step++, 8));
      CHECK(count == 1);
    }
  }
  SUBCASE("one endpoint of two different edges") {
    CHECK(transcript_distribution(sampler, 0, {l0, r1}).equal);
  }
  SUBCASE("both endpoints of an edge") {
    CHECK_FALSE(transcript_distribution(sampler, 0, {l0, r0}).equal);
  }
  SUBCASE("disjoint from the matching") {
    std::vector<bool> covered(u.vertex_count(), false);
    for (const BiEdge& e : m.edges) {
      covered[u.oriented_left(e.left)] = true;
      covered[u.oriented_right(e.right)] = true;
    }
    std::vector<Vertex> q;
    for (Vertex v = 0; v < u.vertex_count() && q.size() < 5; ++v) {
      if (!covered[v]) q.push_back(v);
    }
    REQUIRE_FALSE(q.empty());
    const auto t = transcript_distribution(sampler, 0, q);
    CHECK(t.equal);
    CHECK(t.touched_edges == 0);
    CHECK(t.yes.size() == 1);
  }
  SUBCASE("cap") {
    std::vector<Vertex> q;
    for (std::size_t e = 0; e < 13; ++e) q.push_back(u.oriented_left(m.edges[e].left));
    CHECK_THROWS_AS(transcript_distribution(sampler, 0, q), InputError);
  }
}

TEST_CASE("random query sets: equal unless an edge is fully queried") {
  const HardInstanceSampler sampler(shift_family(3, 1));
  const auto& fam = sampler.family();
  const auto& u = fam.scaffold;
  Rng rng(83);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t idx = rng.uniform_index(fam.size());
    const auto& m = fam.matchings[idx];
    std::vector<Vertex> q;
    bool full = false;
    for (int pick = 0; pick < 4; ++pick) {
      const BiEdge& e = m.edges[rng.uniform_index(m.edges.size())];
      const int which = static_cast<int>(rng.uniform_index(3));
      if (which != 1) q.push_back(u.oriented_left(e.left));
      if (which != 0) q.push_back(u.oriented_right(e.right));
    }
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end()), q.end());
    const std::set<Vertex> qs(q.begin(), q.end());
    for (const BiEdge& e : m.edges) {
      full = full || (qs.count(u.oriented_left(e.left)) && qs.count(u.oriented_right(e.right)));
    }
    CHECK(transcript_distribution(sampler, idx, q).equal == !full);
  }
}

TEST_CASE("quantization is a rank map") {
  const Assignment f(std::vector<Rational>{Rational(-1, 2), Rational(0), Rational(7, 8)});
  CHECK(quantize_to_range(f, 3).exact() == std::vector<Rational>{0, 1, 2});
  CHECK_THROWS_AS(quantize_to_range(f, 2), RangeExceeded);
  CHECK_THROWS_AS(quantize_to_range(f, 0), InputError);
  const Assignment ties(std::vector<Rational>{Rational(5), Rational(5), Rational(-1)});
  CHECK(quantize_to_range(ties, 2).exact() == std::vector<Rational>{1, 1, 0});
}

TEST_CASE("quantization commutes with violating pairs") {
  const HardInstanceSampler sampler(shift_family(3, 1));
  Rng rng(89);
  for (int i = 0; i < 50; ++i) {
    const HardSample s = i % 2 ? sampler.sample_no(rng) : sampler.sample_yes(rng);
    const Assignment q = quantize_to_range(s.function(), 1 << 20);
    CHECK(violating_pairs(sampler.dag(), q) == violating_pairs(sampler.dag(), s.function()));
  }
  Rng rng2(97);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng2.uniform_index(7);
    const Dag g = testsupport::random_dag(n, 0.4, rng2);
    const Assignment f(testsupport::random_values(n, 5, rng2));
    CHECK(violating_pairs(g, quantize_to_range(f, 5)) == violating_pairs(g, f));
  }
}

TEST_CASE("sampling is reproducible per substream") {
  const HardInstanceSampler sampler(shift_family(4, 1));
  Rng a(substream_seed(5, 3));
  Rng b(substream_seed(5, 3));
  const HardSample x = sampler.sample_no(a);
  const HardSample y = sampler.sample_no(b);
  CHECK(HarnessAccess::hidden_index(x) == HarnessAccess::hidden_index(y));
  CHECK(x.noise() == y.noise());
}
