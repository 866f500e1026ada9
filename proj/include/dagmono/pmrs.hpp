#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dagmono/graph.hpp"
#include "dagmono/positivity.hpp"
#include "dagmono/rational.hpp"

namespace dagmono {

enum class ShiftSetMode { full_box, difference_free };

using Shift = std::vector<std::int64_t>;

struct ShiftParams {
  int k = 2;
  std::int64_t N = 4;
  std::int64_t P = 1;
  ShiftSetMode mode = ShiftSetMode::full_box;

  /// P / N, exact.
  [[nodiscard]] Rational alpha() const { return {P, N}; }
  /// Throws InputError unless k >= 2, 1 <= P <= N-1, k*P^2 < N^2, and
  /// difference_free is only requested with k = 2.
  void validate() const;
};

/// Vertices per side: N^k * N^2. Throws OverflowError beyond 2^31.
std::uint64_t shift_side_size(const ShiftParams& p);

/// Shift set in lexicographic order: {0..P}^k minus the origin, or the
/// two-dimensional difference-free set with first coordinate > floor(P/2).
std::vector<Shift> build_shift_set(const ShiftParams& p);
std::vector<Shift> build_difference_free_shift_set(std::int64_t P);

/// True iff (A - A) and A share no vector other than the origin.
bool is_difference_free(const std::vector<Shift>& shifts);

/// (1 - alpha)^k (1 - k alpha^2), the guaranteed |M_a| / n0.
Rational shift_size_guarantee(const ShiftParams& p);

/// Closed form of |M_a|: prod(N - a_i) * (N^2 - |a|^2).
std::uint64_t shift_matching_size(const ShiftParams& p, const Shift& a);

/// Flat vertex index of (x, z): x_1 + x_2 N + ... + x_k N^{k-1} + z N^k.
std::uint64_t shift_vertex_index(const ShiftParams& p, const Shift& x, std::int64_t z);
/// Inverse of shift_vertex_index; the last component of the result is z.
std::vector<std::int64_t> shift_vertex_coords(const ShiftParams& p, std::uint64_t index);

/// Weight witness w_a evaluated on one vertex.
Rational shift_witness_left(const Shift& a, const std::vector<std::int64_t>& coords);
Rational shift_witness_right(const Shift& a, const std::vector<std::int64_t>& coords);

/// Scaffold, edge-disjoint matchings and positivity witnesses. Witnesses may
/// be shared between families, hence the shared pointers.
struct PmrsFamily {
  BipartiteGraph scaffold;
  std::vector<Matching> matchings;
  std::vector<std::shared_ptr<const WeightWitness>> witnesses;
  Rational eps0;

  /// Present for shift families. shifts[i] generated matchings[i].
  std::optional<ShiftParams> params;
  std::vector<Shift> shifts;
  /// Original shift-scaffold vertex of each L / R vertex; empty means the
  /// identity. Kept so the shift identity can be checked on subfamilies.
  std::vector<Vertex> left_origin;
  std::vector<Vertex> right_origin;

  [[nodiscard]] std::size_t n0() const { return scaffold.left_size(); }
  [[nodiscard]] std::size_t size() const { return matchings.size(); }
};

PmrsFamily build_shift_pmrs(const ShiftParams& p);

/// Splits each matching into consecutive parts of size ceil(eps * n0),
/// discarding the remainder; each part gets the restricted witness.
PmrsFamily refine_family(const PmrsFamily& fam, const Rational& eps);

struct DenseCoreOptions {
  /// Minimum-degree fraction after balancing; defaults to c0^2 / 32.
  std::optional<Rational> min_degree_fraction;
  int balance_attempts = 64;
};

struct DenseCoreReport {
  Rational c0;
  Rational min_degree_fraction;
  std::size_t pruned_left = 0;
  std::size_t pruned_right = 0;
  /// Degrees after pruning, before balancing.
  std::size_t pruned_min_degree = 0;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  int balance_attempts_used = 0;
  std::size_t kept_matchings = 0;
  std::size_t original_matchings = 0;
  /// kept_matchings / original_matchings.
  double kept_fraction = 0.0;
};

struct DenseCore {
  PmrsFamily family;
  DenseCoreReport report;
};

/// Degree pruning at (c0/4) s, random balancing of the larger side, and
/// removal of matchings below (c_delta/2) n0. The scaffold must be C4-free.
DenseCore extract_dense_core(const PmrsFamily& fam, std::uint64_t seed, const DenseCoreOptions& opts = {});

struct PmrsReport {
  bool edge_disjoint = true;
  bool sizes_ok = true;
  bool positivity_ok = true;
  bool balanced = true;
  /// Only checked for shift families.
  std::optional<bool> shift_identity_ok;
  std::optional<bool> within_count_bound;
  std::vector<std::string> failures;

  [[nodiscard]] bool ok() const {
    return edge_disjoint && sizes_ok && positivity_ok && balanced && shift_identity_ok.value_or(true) &&
           within_count_bound.value_or(true);
  }
};

/// Exact check of edge-disjointness, |M_i| >= eps0 n0, witness validity,
/// and for shift families the identity w_a-sum(e) = 1/2 - |b - a|^2 on
/// every edge of M_b and the count bound s <= |E| / (eps0 n0).
PmrsReport verify_pmrs(const PmrsFamily& fam);

}  // namespace dagmono
