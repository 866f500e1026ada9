#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "dagmono/gibbs.hpp"
#include "dagmono/graph.hpp"
#include "dagmono/hard_instances.hpp"
#include "dagmono/monotonicity.hpp"
#include "dagmono/pmrs.hpp"
#include "dagmono/positivity.hpp"

namespace dagmono {

using Json = nlohmann::ordered_json;

// Graph: {"n", "edges": [[u,v],...], "bipartite_left"?}. A bipartite graph is
// stored oriented, with R-vertex r at index left_size + r.
Json dag_to_json(const Dag& g);
Dag dag_from_json(const Json& j);
Json bipartite_to_json(const BipartiteGraph& u);
/// Requires "bipartite_left" and every edge to go from [0, left) to [left, n).
BipartiteGraph bipartite_from_json(const Json& j);

// Assignment: {"values": [...]}. Exact values are written as "p/q" strings,
// real values as numbers. On reading, strings and integers give exact mode
// unless a non-integer number is present, which gives real mode.
Json assignment_to_json(const Assignment& f);
Assignment assignment_from_json(const Json& j);

// Matching: {"edges": [[l,r],...]} with side-local indices. Witness:
// {"w": [...]} over oriented vertices.
Json matching_to_json(const Matching& m);
Matching matching_from_json(const Json& j);
Json witness_to_json(const WeightWitness& w);
WeightWitness witness_from_json(const Json& j);

Json pmrs_to_json(const PmrsFamily& fam);
PmrsFamily pmrs_from_json(const Json& j);

/// `family_ref` is stored verbatim as the "family" field when given.
Json sample_to_json(const HardSample& s, const std::optional<std::string>& family_ref);
struct SampleRecord {
  SampleTag tag;
  std::size_t index;
  std::vector<std::uint8_t> noise;
  Assignment values;
  std::optional<std::string> family_ref;
};
SampleRecord sample_from_json(const Json& j);

Json gibbs_params_to_json(const GibbsParams& p);
GibbsParams gibbs_params_from_json(const Json& j);
/// The hidden index sits in a "sealed" object that strategies never read.
Json model_to_json(const GibbsModel& model);
GibbsModel model_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace dagmono
