// Command-line front end. Every subcommand prints JSON or CSV to stdout
// unless --out is given; errors go to stderr with exit code 1 (2 for a
// failed verification).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dagmono/errors.hpp"
#include "dagmono/gibbs.hpp"
#include "dagmono/hard_instances.hpp"
#include "dagmono/harness.hpp"
#include "dagmono/io.hpp"
#include "dagmono/monotonicity.hpp"
#include "dagmono/pmrs.hpp"
#include "dagmono/rng.hpp"
#include "dagmono/testers.hpp"

namespace fs = std::filesystem;
using namespace dagmono;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_atomic(out, text);
  }
}

void emit_json(const std::string& out, const Json& j) { emit(out, j.dump(1) + "\n"); }

ShiftSetMode parse_mode(const std::string& s) {
  if (s == "full_box") return ShiftSetMode::full_box;
  if (s == "difference_free") return ShiftSetMode::difference_free;
  throw InputError("--mode must be full_box or difference_free");
}

struct GibbsFlags {
  std::optional<double> alpha, lambda, beta, gamma, box;
  std::size_t sweeps = 200;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "pinning strength");
    app->add_option("--lambda", lambda, "smoothing strength");
    app->add_option("--beta", beta, "hinge strength");
    app->add_option("--gamma", gamma, "hinge margin");
    app->add_option("--boxB", box, "box bound B");
    app->add_option("--sweeps", sweeps, "burn-in sweeps")->capture_default_str();
    app->add_option("--seed", seed, "master seed")->required();
  }
  void apply(GibbsParams& p) const {
    if (alpha) p.alpha = *alpha;
    if (lambda) p.lambda = *lambda;
    if (beta) p.beta = *beta;
    if (gamma) p.gamma = *gamma;
    if (box) p.box = *box;
  }
};

GibbsModel load_model(const std::string& path, const GibbsFlags& flags) {
  GibbsModel stored = model_from_json(read_json_file(path));
  GibbsParams p = stored.params();
  flags.apply(p);
  return GibbsModel(stored.scaffold(), stored.matchings(), HarnessAccess::hidden_index(stored), p);
}

Json tester_report_json(const TesterReport& r, TesterKind kind) {
  Json j{{"tester", tester_name(kind)},
         {"verdict", r.verdict == Verdict::accept ? "accept" : "reject"},
         {"raw_queries", r.raw_queries},
         {"distinct_queries", r.distinct_queries},
         {"q_stage1", r.q_stage1},
         {"q_stage2", r.q_stage2},
         {"stage", r.stage}};
  if (r.witness) j["witness"] = {r.witness->from, r.witness->to};
  return j;
}

Json stats_json(const EdgeStatistics& st) {
  return Json{{"samples", st.samples},
              {"matching_violation_rate", st.matching_violation_rate},
              {"nonmatching_violation_rate", st.nonmatching_violation_rate},
              {"min_matching_edge_rate", st.min_matching_edge_rate},
              {"max_nonmatching_edge_rate", st.max_nonmatching_edge_rate},
              {"good_match_rate", st.good_match_rate},
              {"boundary_strip_rate", st.boundary_strip_rate},
              {"mean_farness_floor", st.mean_farness_floor}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotonicity testing on explicit DAGs: instances, testers, adversaries, experiments"};
  app.require_subcommand(1);
  std::string out;

  // gen pmrs | hard | gibbs
  auto* gen = app.add_subcommand("gen", "generate instance files");
  gen->require_subcommand(1);

  auto* gen_pmrs = gen->add_subcommand("pmrs", "shift-matching PMRS family");
  int k = 2;
  std::int64_t N = 4, P = 1;
  std::string mode = "full_box";
  bool dense_core = false;
  std::uint64_t core_seed = 0;
  gen_pmrs->add_option("--k", k, "dimension")->capture_default_str();
  gen_pmrs->add_option("--N", N, "box side")->required();
  gen_pmrs->add_option("--P", P, "shift range")->required();
  gen_pmrs->add_option("--mode", mode, "full_box | difference_free")->capture_default_str();
  gen_pmrs->add_flag("--dense-core", dense_core, "extract the balanced dense core (difference_free only)");
  gen_pmrs->add_option("--seed", core_seed, "balancing seed for --dense-core");
  gen_pmrs->add_option("--out", out, "output file");

  auto* gen_hard = gen->add_subcommand("hard", "YES/NO samples over a PMRS family");
  std::string family_path, dist = "no", out_dir;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  gen_hard->add_option("--family", family_path, "PMRS file")->required()->check(CLI::ExistingFile);
  gen_hard->add_option("--dist", dist, "yes | no")->capture_default_str();
  gen_hard->add_option("--count", count, "number of samples")->capture_default_str();
  gen_hard->add_option("--seed", seed, "master seed")->required();
  gen_hard->add_option("--out-dir", out_dir, "directory for sample_NNNN.json")->required();

  auto* gen_gibbs = gen->add_subcommand("gibbs", "Gibbs model over a PMRS family");
  std::optional<std::size_t> hidden;
  GibbsFlags gen_flags;
  gen_gibbs->add_option("--family", family_path, "PMRS file (C4-free)")->required()->check(CLI::ExistingFile);
  gen_gibbs->add_option("--index", hidden, "hidden matching; drawn from the seed if absent");
  gen_flags.add(gen_gibbs);
  gen_gibbs->add_option("--out", out, "output file");

  // gibbs sample | game | stats
  auto* gibbs = app.add_subcommand("gibbs", "run the truncated Gibbs adversary");
  gibbs->require_subcommand(1);
  std::string model_path;
  GibbsFlags gflags;
  std::size_t budget = 100;
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
    gflags.add(sub);
    sub->add_option("--out", out, "output file");
  };
  auto* g_sample = gibbs->add_subcommand("sample", "one configuration after burn-in");
  add_model(g_sample);
  auto* g_game = gibbs->add_subcommand("game", "adaptive game with a random-query strategy");
  add_model(g_game);
  g_game->add_option("--budget", budget, "query budget")->capture_default_str();
  auto* g_stats = gibbs->add_subcommand("stats", "edge statistics and diagnostics");
  add_model(g_stats);
  g_stats->add_option("--count", count, "samples after burn-in")->capture_default_str();

  // test
  auto* test = app.add_subcommand("test", "run one tester on a graph and function");
  std::string tester = "mt_tr", graph_path, function_path, eps_text = "1/10";
  double c1 = 8.0, c2 = 8.0;
  test->add_option("--tester", tester, "mt_tr | mt3 | pair")->capture_default_str();
  test->add_option("--graph", graph_path, "graph file")->required()->check(CLI::ExistingFile);
  test->add_option("--function", function_path, "assignment file")->required()->check(CLI::ExistingFile);
  test->add_option("--eps", eps_text, "distance parameter, p/q or decimal")->capture_default_str();
  test->add_option("--c1", c1, "stage-1 constant")->capture_default_str();
  test->add_option("--c2", c2, "stage-2 constant")->capture_default_str();
  test->add_option("--seed", seed, "seed")->required();
  test->add_option("--out", out, "output file");

  // dist
  auto* dist_cmd = app.add_subcommand("dist", "exact distance to monotonicity");
  std::optional<std::string> far_eps;
  dist_cmd->add_option("--graph", graph_path, "graph file")->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("--function", function_path, "assignment file")->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("--eps", far_eps, "also report eps-farness");
  dist_cmd->add_option("--out", out, "output file");

  // verify
  auto* verify = app.add_subcommand("verify", "verify every instance file in a directory");
  std::string bundle_dir;
  verify->add_option("dir", bundle_dir, "directory")->required()->check(CLI::ExistingDirectory);

  // exp run | regimes
  auto* exp = app.add_subcommand("exp", "experiments");
  exp->require_subcommand(1);
  auto* exp_run = exp->add_subcommand("run", "rejection-rate experiment from a JSON spec");
  std::string spec_path, timing_path;
  bool as_json = false;
  exp_run->add_option("--spec", spec_path, "experiment spec")->required()->check(CLI::ExistingFile);
  exp_run->add_option("--seed", seed, "master seed")->required();
  exp_run->add_option("--out", out, "report file (CSV, or JSON with --json)");
  exp_run->add_flag("--json", as_json, "emit JSON instead of CSV");
  exp_run->add_option("--timing", timing_path, "write wall time here (kept out of the report)");
  auto* exp_regimes = exp->add_subcommand("regimes", "predicted best tester over the (c, d) grid");
  double regime_n = 1e6, step = 0.05;
  exp_regimes->add_option("--n", regime_n, "vertex count")->capture_default_str();
  exp_regimes->add_option("--eps", eps_text, "distance parameter")->capture_default_str();
  exp_regimes->add_option("--step", step, "grid step")->capture_default_str();
  exp_regimes->add_option("--out", out, "CSV file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_pmrs->parsed()) {
      ShiftParams p{k, N, P, parse_mode(mode)};
      PmrsFamily fam = build_shift_pmrs(p);
      if (dense_core) fam = extract_dense_core(fam, core_seed).family;
      emit_json(out, pmrs_to_json(fam));
    } else if (gen_hard->parsed()) {
      if (dist != "yes" && dist != "no") throw InputError("--dist must be yes or no");
      auto fam = std::make_shared<const PmrsFamily>(pmrs_from_json(read_json_file(family_path)));
      const HardInstanceSampler sampler(fam);
      fs::create_directories(out_dir);
      const std::string ref = fs::relative(fs::absolute(family_path), fs::absolute(out_dir)).string();
      for (std::size_t i = 0; i < count; ++i) {
        Rng rng(substream_seed(seed, i));
        const HardSample s = sampler.sample(dist == "yes" ? SampleTag::yes : SampleTag::no, rng);
        char name[32];
        std::snprintf(name, sizeof name, "sample_%04zu.json", i);
        write_json_file(fs::path(out_dir) / name, sample_to_json(s, ref));
      }
    } else if (gen_gibbs->parsed()) {
      const PmrsFamily fam = pmrs_from_json(read_json_file(family_path));
      GibbsParams p;
      gen_flags.apply(p);
      std::size_t index = 0;
      if (hidden) {
        index = *hidden;
      } else {
        Rng rng(gen_flags.seed);
        index = rng.uniform_index(fam.size());
      }
      emit_json(out, model_to_json(GibbsModel(fam.scaffold, fam.matchings, index, p)));
    } else if (g_sample->parsed()) {
      const GibbsModel model = load_model(model_path, gflags);
      emit_json(out, assignment_to_json(gibbs_sweep_sample(model, gflags.sweeps, gflags.seed)));
    } else if (g_game->parsed()) {
      const GibbsModel model = load_model(model_path, gflags);
      GameOptions opts;
      opts.sweeps.burn_in = gflags.sweeps;
      const GameResult r = run_adaptive_game(model, random_query_strategy(substream_seed(gflags.seed, 1)), budget,
                                             substream_seed(gflags.seed, 0), opts);
      std::size_t closed = 0, violated = 0, spurious = 0, boundary = 0;
      for (const auto& round : r.rounds) {
        boundary += round.boundary_query;
        for (const auto& c : round.closed) {
          ++closed;
          violated += c.violated;
          spurious += c.violated && !c.in_hidden_matching;
        }
      }
      Json j{{"verdict", r.verdict == GameActionKind::reject ? "reject" : "accept"},
             {"queries", r.transcript.size()},
             {"closed_edges", closed},
             {"violated_closed_edges", violated},
             {"spurious_violations", spurious},
             {"boundary_queries", boundary},
             {"decoded_index", decode_index(model, r.transcript)}};
      emit_json(out, j);
    } else if (g_stats->parsed()) {
      const GibbsModel model = load_model(model_path, gflags);
      SweepOptions opts;
      opts.burn_in = gflags.sweeps;
      const auto samples = gibbs_samples(model, count, gflags.seed, opts);
      const auto d = gibbs_diagnostics(model);
      const auto adm = admissibility(model.params());
      Json j{{"statistics", stats_json(edge_statistics(model, samples))},
             {"diagnostics",
              {{"m_min", d.m_min}, {"m_edge", d.m_edge}, {"p_drift", d.p_drift}, {"p_match", d.p_match},
               {"boundary_bound", d.boundary_bound}}},
             {"admissibility",
              {{"support", adm.support}, {"separation", adm.separation}, {"strong_hinge", adm.strong_hinge}}}};
      emit_json(out, j);
    } else if (test->parsed()) {
      const TesterContext ctx(dag_from_json(read_json_file(graph_path)));
      const Assignment f = assignment_from_json(read_json_file(function_path));
      TesterConfig cfg;
      cfg.kind = parse_tester(tester);
      cfg.eps = Rational::parse(eps_text);
      cfg.c1 = c1;
      cfg.c2 = c2;
      cfg.seed = seed;
      const TesterReport r = run_tester(ctx, f, cfg);
      if (!witness_is_genuine(ctx, f, r)) throw InternalError("tester produced an unverifiable witness");
      emit_json(out, tester_report_json(r, cfg.kind));
    } else if (dist_cmd->parsed()) {
      const Dag g = dag_from_json(read_json_file(graph_path));
      const Assignment f = assignment_from_json(read_json_file(function_path));
      const DistanceResult d = distance_to_monotone(g, f);
      Json pairs = Json::array();
      for (const Arc& a : d.matching) pairs.push_back({a.from, a.to});
      Json j{{"n", g.vertex_count()}, {"distance", d.distance}, {"matching", std::move(pairs)}};
      if (far_eps) j["eps_far"] = is_eps_far(g, f, Rational::parse(*far_eps));
      emit_json(out, j);
    } else if (verify->parsed()) {
      const BundleReport r = verify_bundle(bundle_dir);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& f : r.failures) std::cerr << "FAIL " << f << '\n';
      std::cout << (r.ok() ? "pass" : "fail") << " (" << r.files_checked << " files, " << r.failures.size()
                << " failures)\n";
      return r.ok() ? 0 : 2;
    } else if (exp_run->parsed()) {
      ExperimentSpec spec =
          experiment_spec_from_json(read_json_file(spec_path), fs::absolute(spec_path).parent_path());
      spec.seed = seed;
      const ExperimentReport r = run_experiment(spec);
      emit(out, as_json ? r.to_json().dump(1) + "\n" : r.to_csv());
      if (!timing_path.empty()) write_json_file(timing_path, Json{{"wall_seconds", r.wall_seconds}});
    } else if (exp_regimes->parsed()) {
      emit(out, regime_csv(regime_table(regime_n, Rational::parse(eps_text), step)));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
