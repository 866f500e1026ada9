#include "dagmono/io.hpp"

#include <fstream>
#include <sstream>

#include "dagmono/errors.hpp"

namespace dagmono {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get_as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

Rational rational_from_json(const Json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number_float()) return Rational::from_double(v.get<double>());
  throw InputError("expected a rational string or number");
}

std::vector<Arc> arcs_from_json(const Json& edges) {
  if (!edges.is_array()) throw InputError("'edges' must be an array");
  std::vector<Arc> out;
  out.reserve(edges.size());
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw InputError("edge entries must be [u, v] integer pairs");
    }
    const auto u = e[0].get<std::int64_t>();
    const auto v = e[1].get<std::int64_t>();
    if (u < 0 || v < 0 || u > UINT32_MAX || v > UINT32_MAX) throw InputError("edge endpoint out of range");
    out.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  return out;
}

const char* mode_name(ShiftSetMode m) { return m == ShiftSetMode::full_box ? "full_box" : "difference_free"; }

ShiftSetMode mode_from_name(const std::string& s) {
  if (s == "full_box") return ShiftSetMode::full_box;
  if (s == "difference_free") return ShiftSetMode::difference_free;
  throw InputError("unknown shift-set mode '" + s + "'");
}

}  // namespace

Json dag_to_json(const Dag& g) {
  Json edges = Json::array();
  for (const Arc& a : g.edges()) edges.push_back({a.from, a.to});
  return Json{{"n", g.vertex_count()}, {"edges", std::move(edges)}};
}

Dag dag_from_json(const Json& j) {
  const auto n = get_as<std::int64_t>(j, "n");
  if (n < 0) throw InputError("'n' must be non-negative");
  return Dag(static_cast<std::size_t>(n), arcs_from_json(field(j, "edges")));
}

Json bipartite_to_json(const BipartiteGraph& u) {
  Json edges = Json::array();
  for (const BiEdge& e : u.edges()) edges.push_back({u.oriented_left(e.left), u.oriented_right(e.right)});
  return Json{{"n", u.vertex_count()}, {"edges", std::move(edges)}, {"bipartite_left", u.left_size()}};
}

BipartiteGraph bipartite_from_json(const Json& j) {
  const auto n = get_as<std::int64_t>(j, "n");
  const auto left = get_as<std::int64_t>(j, "bipartite_left");
  if (left < 0 || left > n) throw InputError("'bipartite_left' must lie in [0, n]");
  std::vector<BiEdge> edges;
  for (const Arc& a : arcs_from_json(field(j, "edges"))) {
    if (a.from >= left || a.to < left || a.to >= n) {
      throw InputError("bipartite edge [" + std::to_string(a.from) + "," + std::to_string(a.to) +
                       "] does not go from L to R");
    }
    edges.push_back({a.from, static_cast<Vertex>(a.to - left)});
  }
  return BipartiteGraph(static_cast<std::size_t>(left), static_cast<std::size_t>(n - left), std::move(edges));
}

Json assignment_to_json(const Assignment& f) {
  Json values = Json::array();
  if (f.mode() == NumericMode::exact) {
    for (const Rational& r : f.exact()) values.push_back(r.str());
  } else {
    for (double x : f.real()) values.push_back(x);
  }
  return Json{{"values", std::move(values)}};
}

Assignment assignment_from_json(const Json& j) {
  const Json& values = field(j, "values");
  if (!values.is_array()) throw InputError("'values' must be an array");
  bool real = false;
  for (const auto& v : values) {
    if (!v.is_string() && !v.is_number()) throw InputError("values must be strings or numbers");
    if (v.is_number_float()) real = true;
  }
  if (real) {
    std::vector<double> out;
    for (const auto& v : values) {
      if (v.is_string()) {
        out.push_back(Rational::parse(v.get<std::string>()).to_double());
      } else {
        out.push_back(v.get<double>());
      }
    }
    return Assignment(std::move(out));
  }
  std::vector<Rational> out;
  for (const auto& v : values) out.push_back(rational_from_json(v));
  return Assignment(std::move(out));
}

Json matching_to_json(const Matching& m) {
  Json edges = Json::array();
  for (const BiEdge& e : m.edges) edges.push_back({e.left, e.right});
  return Json{{"edges", std::move(edges)}};
}

Matching matching_from_json(const Json& j) {
  Matching m;
  for (const Arc& a : arcs_from_json(field(j, "edges"))) m.edges.push_back({a.from, a.to});
  return m;
}

Json witness_to_json(const WeightWitness& w) {
  Json values = Json::array();
  for (const Rational& r : w.w) values.push_back(r.str());
  return Json{{"w", std::move(values)}};
}

WeightWitness witness_from_json(const Json& j) {
  const Json& values = field(j, "w");
  if (!values.is_array()) throw InputError("'w' must be an array");
  WeightWitness w;
  for (std::size_t i = 0; i < values.size(); ++i) {
    try {
      w.w.push_back(rational_from_json(values[i]));
    } catch (const Error& e) {
      throw InputError("witness entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return w;
}

Json pmrs_to_json(const PmrsFamily& fam) {
  Json j;
  j["scaffold"] = bipartite_to_json(fam.scaffold);
  Json ms = Json::array();
  for (const auto& m : fam.matchings) ms.push_back(matching_to_json(m));
  j["matchings"] = std::move(ms);
  Json ws = Json::array();
  for (const auto& w : fam.witnesses) ws.push_back(witness_to_json(*w));
  j["witnesses"] = std::move(ws);
  j["eps0"] = fam.eps0.str();
  if (fam.params) {
    Json shifts = Json::array();
    for (const Shift& a : fam.shifts) shifts.push_back(a);
    j["params"] = Json{{"k", fam.params->k},
                       {"N", fam.params->N},
                       {"P", fam.params->P},
                       {"mode", mode_name(fam.params->mode)},
                       {"shifts", std::move(shifts)}};
  }
  if (!fam.left_origin.empty()) j["left_origin"] = fam.left_origin;
  if (!fam.right_origin.empty()) j["right_origin"] = fam.right_origin;
  return j;
}

PmrsFamily pmrs_from_json(const Json& j) {
  PmrsFamily fam;
  fam.scaffold = bipartite_from_json(field(j, "scaffold"));
  const Json& ms = field(j, "matchings");
  const Json& ws = field(j, "witnesses");
  if (!ms.is_array() || !ws.is_array()) throw InputError("'matchings' and 'witnesses' must be arrays");
  if (ms.size() != ws.size()) throw InputError("one witness per matching is required");
  for (const auto& m : ms) fam.matchings.push_back(matching_from_json(m));
  for (std::size_t i = 0; i < ws.size(); ++i) {
    try {
      fam.witnesses.push_back(std::make_shared<const WeightWitness>(witness_from_json(ws[i])));
    } catch (const InputError& e) {
      throw InputError("witness " + std::to_string(i) + ": " + e.what());
    }
  }
  fam.eps0 = rational_from_json(field(j, "eps0"));
  if (j.contains("params")) {
    const Json& p = j.at("params");
    ShiftParams sp;
    sp.k = get_as<int>(p, "k");
    sp.N = get_as<std::int64_t>(p, "N");
    sp.P = get_as<std::int64_t>(p, "P");
    sp.mode = mode_from_name(get_as<std::string>(p, "mode"));
    sp.validate();
    fam.params = sp;
    fam.shifts = get_as<std::vector<Shift>>(p, "shifts");
    if (fam.shifts.size() != fam.matchings.size()) throw InputError("one shift per matching is required");
  }
  if (j.contains("left_origin")) fam.left_origin = get_as<std::vector<Vertex>>(j, "left_origin");
  if (j.contains("right_origin")) fam.right_origin = get_as<std::vector<Vertex>>(j, "right_origin");
  return fam;
}

Json sample_to_json(const HardSample& s, const std::optional<std::string>& family_ref) {
  Json j;
  j["tag"] = s.tag() == SampleTag::yes ? "yes" : "no";
  j["i"] = HarnessAccess::hidden_index(s);
  Json z = Json::array();
  for (auto v : s.noise()) z.push_back(static_cast<int>(v));
  j["Z"] = std::move(z);
  j["values"] = assignment_to_json(s.function())["values"];
  if (family_ref) j["family"] = *family_ref;
  return j;
}

SampleRecord sample_from_json(const Json& j) {
  SampleRecord rec;
  const auto tag = get_as<std::string>(j, "tag");
  if (tag == "yes") {
    rec.tag = SampleTag::yes;
  } else if (tag == "no") {
    rec.tag = SampleTag::no;
  } else {
    throw InputError("sample tag must be 'yes' or 'no'");
  }
  rec.index = get_as<std::size_t>(j, "i");
  for (int z : get_as<std::vector<int>>(j, "Z")) {
    if (z < 0 || z >= 4) throw InputError("noise letters must lie in {0,1,2,3}");
    rec.noise.push_back(static_cast<std::uint8_t>(z));
  }
  rec.values = assignment_from_json(Json{{"values", field(j, "values")}});
  if (j.contains("family")) rec.family_ref = get_as<std::string>(j, "family");
  return rec;
}

Json gibbs_params_to_json(const GibbsParams& p) {
  return Json{{"alpha", p.alpha},          {"lambda", p.lambda},
              {"beta", p.beta},            {"gamma", p.gamma},
              {"box", p.box},              {"query_scale", p.query_scale},
              {"drift_tolerance", p.drift_tolerance}};
}

GibbsParams gibbs_params_from_json(const Json& j) {
  GibbsParams p;
  p.alpha = get_as<double>(j, "alpha");
  p.lambda = get_as<double>(j, "lambda");
  p.beta = get_as<double>(j, "beta");
  p.gamma = get_as<double>(j, "gamma");
  p.box = get_as<double>(j, "box");
  if (j.contains("query_scale")) p.query_scale = get_as<double>(j, "query_scale");
  if (j.contains("drift_tolerance")) p.drift_tolerance = get_as<double>(j, "drift_tolerance");
  p.validate();
  return p;
}

Json model_to_json(const GibbsModel& model) {
  Json ms = Json::array();
  for (const auto& m : model.matchings()) ms.push_back(matching_to_json(m));
  return Json{{"scaffold", bipartite_to_json(model.scaffold())},
              {"matchings", std::move(ms)},
              {"params", gibbs_params_to_json(model.params())},
              {"sealed", Json{{"hidden_index", HarnessAccess::hidden_index(model)}}}};
}

GibbsModel model_from_json(const Json& j) {
  BipartiteGraph scaffold = bipartite_from_json(field(j, "scaffold"));
  std::vector<Matching> ms;
  const Json& mj = field(j, "matchings");
  if (!mj.is_array()) throw InputError("'matchings' must be an array");
  for (const auto& m : mj) ms.push_back(matching_from_json(m));
  const auto hidden = get_as<std::size_t>(field(j, "sealed"), "hidden_index");
  return GibbsModel(std::move(scaffold), std::move(ms), hidden, gibbs_params_from_json(field(j, "params")));
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_atomic(path, j.dump(1) + "\n"); }

}  // namespace dagmono
