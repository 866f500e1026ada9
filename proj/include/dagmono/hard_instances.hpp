#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "dagmono/graph.hpp"
#include "dagmono/harness_access.hpp"
#include "dagmono/monotonicity.hpp"
#include "dagmono/pmrs.hpp"
#include "dagmono/rational.hpp"
#include "dagmono/rng.hpp"

namespace dagmono {

/// Noise step and alphabet size of the YES/NO distributions.
inline const Rational kNoiseStep{1, 8};
inline constexpr int kNoiseAlphabet = 4;

/// Margin-normalized witness of one matching and the derived functions.
/// Vertex vectors are indexed by oriented vertex.
struct MarginWitness {
  Rational delta;                   // min matching-edge sum of the raw witness
  std::vector<Rational> w_tilde;    // w / delta - 1/4
  std::vector<Rational> base;       // f: w_tilde on L, -w_tilde on R
  std::vector<Rational> slack_base; // g: matching endpoints moved together
  std::vector<Rational> gap;        // per matching edge, base(l) - base(r)
};

/// Throws InputError if w does not certify m.
MarginWitness normalize_margin(const BipartiteGraph& u, const Matching& m, const WeightWitness& w);

enum class SampleTag { yes, no };

/// One draw from the YES or NO distribution. The generating matching index
/// is private; only HarnessAccess reads it.
class HardSample {
 public:
  HardSample(SampleTag tag, std::size_t index, std::vector<std::uint8_t> noise, Assignment f)
      : tag_(tag), index_(index), noise_(std::move(noise)), f_(std::move(f)) {}

  [[nodiscard]] SampleTag tag() const { return tag_; }
  /// Z_e in {0..3}, one per edge of the hidden matching, in its edge order.
  [[nodiscard]] const std::vector<std::uint8_t>& noise() const { return noise_; }
  [[nodiscard]] const Assignment& function() const { return f_; }

 private:
  friend class HarnessAccess;
  SampleTag tag_;
  std::size_t index_;
  std::vector<std::uint8_t> noise_;
  Assignment f_;
};

/// YES/NO sampler over a PMRS family with margins prepared for every
/// matching. Shares the family read-only.
class HardInstanceSampler {
 public:
  explicit HardInstanceSampler(std::shared_ptr<const PmrsFamily> family);

  [[nodiscard]] const PmrsFamily& family() const { return *family_; }
  [[nodiscard]] const Dag& dag() const { return dag_; }
  [[nodiscard]] const MarginWitness& margin(std::size_t i) const { return margins_[i]; }
  [[nodiscard]] std::size_t matching_count() const { return margins_.size(); }

  HardSample sample_yes(Rng& rng) const { return sample(SampleTag::yes, rng); }
  HardSample sample_no(Rng& rng) const { return sample(SampleTag::no, rng); }
  HardSample sample(SampleTag tag, Rng& rng) const;
  /// Draws Z for a fixed matching index.
  HardSample sample_at(SampleTag tag, std::size_t index, Rng& rng) const;
  /// Deterministic assembly from a given noise vector.
  [[nodiscard]] HardSample assemble(SampleTag tag, std::size_t index, std::vector<std::uint8_t> noise) const;

 private:
  std::shared_ptr<const PmrsFamily> family_;
  Dag dag_;
  std::vector<MarginWitness> margins_;
};

/// Matching edges of M_index violated by a NO sample: {e : Z_e != 0}.
std::vector<BiEdge> expected_no_violations(const PmrsFamily& fam, std::size_t index,
                                           const std::vector<std::uint8_t>& noise);

struct TranscriptComparison {
  /// Answer vectors (in query-set order) with their multiplicity over the
  /// 4^t equally likely noise outcomes.
  std::map<std::vector<Rational>, std::uint64_t> yes;
  std::map<std::vector<Rational>, std::uint64_t> no;
  std::size_t touched_edges = 0;
  bool equal = false;
};

inline constexpr std::size_t kTranscriptEdgeCap = 12;

/// Exact transcript distributions of the query set under both distributions
/// conditioned on the hidden index. Throws InputError when the query set
/// touches more than kTranscriptEdgeCap matching edges.
TranscriptComparison transcript_distribution(const HardInstanceSampler& sampler, std::size_t index,
                                             const std::vector<Vertex>& query_set);

/// Rank map onto {0..B-1}. Throws RangeExceeded("dynamic range exceeded")
/// when f takes more than B distinct values.
Assignment quantize_to_range(const Assignment& f, std::int64_t range);

}  // namespace dagmono
