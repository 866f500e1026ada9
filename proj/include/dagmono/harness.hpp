#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dagmono/io.hpp"
#include "dagmono/pmrs.hpp"
#include "dagmono/rational.hpp"
#include "dagmono/testers.hpp"

namespace dagmono {

/// Worker count: DAGMONO_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, count) on thread_count() workers. Exceptions
/// are rethrown on the caller (the one from the smallest index wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

struct Interval {
  double lo;
  double hi;
};
/// Wilson score interval at 95%; trials must be positive.
Interval wilson_interval(std::size_t successes, std::size_t trials);

enum class InstanceKind { pmrs, files, gibbs };

struct InstanceSource {
  InstanceKind kind = InstanceKind::pmrs;
  // pmrs: draw a fresh YES or NO sample per trial.
  ShiftParams shift;
  SampleTag dist = SampleTag::no;
  // files: one fixed graph and function.
  std::filesystem::path graph;
  std::filesystem::path function;
  // gibbs: one chain run per trial.
  std::filesystem::path model;
  std::size_t sweeps = 200;
};

struct TesterSpec {
  TesterKind kind = TesterKind::mt_tr;
  double c1 = 8.0;
  double c2 = 8.0;
};

struct ExperimentSpec {
  std::string name = "experiment";
  InstanceSource instance;
  std::vector<TesterSpec> testers;
  std::vector<Rational> eps;
  std::size_t trials = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Relative file paths are resolved against `base_dir`. The seed may be
/// absent from the JSON when the caller supplies it separately.
ExperimentSpec experiment_spec_from_json(const Json& j, const std::filesystem::path& base_dir);

struct ExperimentRow {
  std::string tester;
  Rational eps;
  double c1;
  double c2;
  std::size_t trials;
  std::size_t rejects;
  Interval reject_ci;
  double mean_raw_queries;
  double mean_distinct_queries;
  std::size_t q_stage1;
  std::size_t q_stage2;
  /// Rejections whose witness failed re-verification; zero for a correct tester.
  std::size_t witness_failures;
};

struct ExperimentReport {
  std::string name;
  std::uint64_t seed;
  std::vector<ExperimentRow> rows;
  /// Excluded from to_csv so the report is a pure function of (spec, seed).
  double wall_seconds = 0.0;

  [[nodiscard]] std::string to_csv() const;
  [[nodiscard]] Json to_json() const;
};

/// Trial t draws its instance from substream_seed(seed, t) and runs every
/// (tester, eps) cell c with substream_seed(that seed, c + 1).
ExperimentReport run_experiment(const ExperimentSpec& spec);

enum class RegimeFormula { transitive_reduction, two_stage, sqrt_n, pair };
std::string regime_formula_name(RegimeFormula f);

struct RegimePoint {
  double c;  // m = n^c
  double d;  // ell = n^d
  /// Natural logs of sqrt(m ell)/(eps n), m^(1/3)/eps^(2/3), sqrt(n/eps), ell/(eps n).
  double log_cost[4];
  RegimeFormula best;
  /// False when another formula ties the minimum within 1e-9.
  bool unique;
};

/// Grid 1 <= c <= d <= 2 with the given step, endpoints included.
std::vector<RegimePoint> regime_table(double n, const Rational& eps, double step);
std::string regime_csv(const std::vector<RegimePoint>& table);

struct BundleReport {
  std::size_t files_checked = 0;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
  [[nodiscard]] bool ok() const { return failures.empty(); }
};

/// Checks every *.json file in `dir` by its shape: PMRS families go through
/// verify_pmrs, samples are re-assembled from their "family" reference and
/// checked for YES monotonicity or the exact NO violation set, models and
/// graphs are re-validated.
BundleReport verify_bundle(const std::filesystem::path& dir);

}  // namespace dagmono
