#include "dagmono/hard_instances.hpp"

#include <algorithm>
#include <set>

#include "dagmono/errors.hpp"

namespace dagmono {

std::size_t HarnessAccess::hidden_index(const HardSample& s) { return s.index_; }

MarginWitness normalize_margin(const BipartiteGraph& u, const Matching& m, const WeightWitness& w) {
  const std::string problem = check_witness(u, m, w);
  if (!problem.empty()) throw InputError("invalid witness: " + problem);
  if (m.edges.empty()) throw InputError("margin normalization of an empty matching");

  MarginWitness mw;
  bool first = true;
  for (const BiEdge& e : m.edges) {
    const Rational s = w.w[u.oriented_left(e.left)] + w.w[u.oriented_right(e.right)];
    if (first || s < mw.delta) mw.delta = s;
    first = false;
  }
  const std::size_t n = u.vertex_count();
  const Rational quarter(1, 4);
  mw.w_tilde.resize(n);
  mw.base.resize(n);
  for (Vertex v = 0; v < n; ++v) {
    mw.w_tilde[v] = w.w[v] / mw.delta - quarter;
    mw.base[v] = v < u.left_size() ? mw.w_tilde[v] : -mw.w_tilde[v];
  }
  mw.slack_base = mw.base;
  mw.gap.reserve(m.edges.size());
  const Rational half(1, 2);
  for (const BiEdge& e : m.edges) {
    const Vertex l = u.oriented_left(e.left);
    const Vertex r = u.oriented_right(e.right);
    const Rational gap = mw.base[l] - mw.base[r];
    mw.gap.push_back(gap);
    mw.slack_base[l] = mw.base[l] - gap * half;
    mw.slack_base[r] = mw.base[r] + gap * half;
  }
  return mw;
}

HardInstanceSampler::HardInstanceSampler(std::shared_ptr<const PmrsFamily> family)
    : family_(std::move(family)), dag_(orient_bipartite(family_->scaffold)) {
  if (family_->matchings.empty()) throw InputError("hard-instance family has no matchings");
  margins_.reserve(family_->matchings.size());
  for (std::size_t i = 0; i < family_->matchings.size(); ++i) {
    if (i >= family_->witnesses.size() || !family_->witnesses[i]) {
      throw InputError("matching " + std::to_string(i) + " has no witness");
    }
    margins_.push_back(normalize_margin(family_->scaffold, family_->matchings[i], *family_->witnesses[i]));
  }
}

HardSample HardInstanceSampler::sample(SampleTag tag, Rng& rng) const {
  const auto index = static_cast<std::size_t>(rng.uniform_index(margins_.size()));
  return sample_at(tag, index, rng);
}

HardSample HardInstanceSampler::sample_at(SampleTag tag, std::size_t index, Rng& rng) const {
  if (index >= margins_.size()) throw InputError("matching index out of range");
  std::vector<std::uint8_t> noise(family_->matchings[index].edges.size());
  for (auto& z : noise) z = static_cast<std::uint8_t>(rng.uniform_index(kNoiseAlphabet));
  return assemble(tag, index, std::move(noise));
}

HardSample HardInstanceSampler::assemble(SampleTag tag, std::size_t index, std::vector<std::uint8_t> noise) const {
  if (index >= margins_.size()) throw InputError("matching index out of range");
  const auto& u = family_->scaffold;
  const auto& m = family_->matchings[index];
  if (noise.size() != m.edges.size()) throw InputError("noise vector length differs from the matching size");
  std::vector<Rational> f = margins_[index].slack_base;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const int z = noise[e];
    if (z < 0 || z >= kNoiseAlphabet) throw InputError("noise value outside {0..3}");
    const int right_z = tag == SampleTag::yes ? z : (z + kNoiseAlphabet - 1) % kNoiseAlphabet;
    f[u.oriented_left(m.edges[e].left)] += kNoiseStep * Rational(z);
    f[u.oriented_right(m.edges[e].right)] += kNoiseStep * Rational(right_z);
  }
  return {tag, index, std::move(noise), Assignment(std::move(f))};
}

std::vector<BiEdge> expected_no_violations(const PmrsFamily& fam, std::size_t index,
                                           const std::vector<std::uint8_t>& noise) {
  const auto& edges = fam.matchings.at(index).edges;
  std::vector<BiEdge> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (noise.at(e) != 0) out.push_back(edges[e]);
  }
  return out;
}

TranscriptComparison transcript_distribution(const HardInstanceSampler& sampler, std::size_t index,
                                             const std::vector<Vertex>& query_set) {
  const auto& fam = sampler.family();
  const auto& u = fam.scaffold;
  const auto& m = fam.matchings.at(index);
  // Matching edge touched by each oriented vertex, if any.
  std::vector<std::size_t> edge_at(u.vertex_count(), m.edges.size());
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    edge_at[u.oriented_left(m.edges[e].left)] = e;
    edge_at[u.oriented_right(m.edges[e].right)] = e;
  }
  std::vector<std::size_t> touched;
  for (Vertex v : query_set) {
    if (v >= u.vertex_count()) throw InputError("query vertex out of range");
    if (edge_at[v] < m.edges.size()) touched.push_back(edge_at[v]);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  if (touched.size() > kTranscriptEdgeCap) {
    throw InputError("query set touches " + std::to_string(touched.size()) + " matching edges; cap is " +
                     std::to_string(kTranscriptEdgeCap));
  }

  TranscriptComparison out;
  out.touched_edges = touched.size();
  std::vector<std::uint8_t> noise(m.edges.size(), 0);
  std::uint64_t outcomes = 1;
  for (std::size_t i = 0; i < touched.size(); ++i) outcomes *= kNoiseAlphabet;
  for (std::uint64_t code = 0; code < outcomes; ++code) {
    std::uint64_t c = code;
    for (std::size_t e : touched) {
      noise[e] = static_cast<std::uint8_t>(c % kNoiseAlphabet);
      c /= kNoiseAlphabet;
    }
    for (SampleTag tag : {SampleTag::yes, SampleTag::no}) {
      const HardSample s = sampler.assemble(tag, index, noise);
      const auto& values = s.function().exact();
      std::vector<Rational> answers;
      answers.reserve(query_set.size());
      for (Vertex v : query_set) answers.push_back(values[v]);
      ++(tag == SampleTag::yes ? out.yes : out.no)[answers];
    }
  }
  out.equal = out.yes == out.no;
  return out;
}

Assignment quantize_to_range(const Assignment& f, std::int64_t range) {
  if (range < 1) throw InputError("range must be at least 1");
  const auto& values = f.exact();
  std::vector<Rational> distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (static_cast<std::int64_t>(distinct.size()) > range) {
    throw RangeExceeded("dynamic range exceeded: " + std::to_string(distinct.size()) +
                        " distinct values for range " + std::to_string(range));
  }
  std::vector<Rational> out;
  out.reserve(values.size());
  for (const Rational& v : values) {
    out.emplace_back(static_cast<std::int64_t>(std::lower_bound(distinct.begin(), distinct.end(), v) -
                                               distinct.begin()));
  }
  return Assignment(std::move(out));
}

}  // namespace dagmono
