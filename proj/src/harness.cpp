#include "dagmono/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "dagmono/errors.hpp"
#include "dagmono/gibbs.hpp"
#include "dagmono/hard_instances.hpp"
#include "dagmono/rng.hpp"

namespace dagmono {
namespace {

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

/// One drawn instance: the function, and the tester context it is tested on.
struct DrawnInstance {
  const TesterContext* ctx;
  Assignment f;
};

/// Instance material shared read-only by all trials.
class InstanceFactory {
 public:
  explicit InstanceFactory(const InstanceSource& src) : src_(src) {
    switch (src.kind) {
      case InstanceKind::pmrs: {
        auto fam = std::make_shared<const PmrsFamily>(build_shift_pmrs(src.shift));
        sampler_ = std::make_unique<HardInstanceSampler>(fam);
        ctx_ = std::make_unique<TesterContext>(sampler_->dag());
        break;
      }
      case InstanceKind::files: {
        ctx_ = std::make_unique<TesterContext>(dag_from_json(read_json_file(src.graph)));
        fixed_ = assignment_from_json(read_json_file(src.function));
        if (fixed_.size() != ctx_->n()) throw InputError("function length does not match the graph");
        break;
      }
      case InstanceKind::gibbs: {
        model_ = std::make_unique<GibbsModel>(model_from_json(read_json_file(src.model)));
        ctx_ = std::make_unique<TesterContext>(orient_bipartite(model_->scaffold()));
        break;
      }
    }
  }

  DrawnInstance draw(std::uint64_t seed) const {
    switch (src_.kind) {
      case InstanceKind::pmrs: {
        Rng rng(seed);
        return {ctx_.get(), sampler_->sample(src_.dist, rng).function()};
      }
      case InstanceKind::files:
        return {ctx_.get(), fixed_};
      case InstanceKind::gibbs:
        return {ctx_.get(), gibbs_sweep_sample(*model_, src_.sweeps, seed)};
    }
    throw InternalError("unhandled instance kind");
  }

 private:
  InstanceSource src_;
  std::unique_ptr<HardInstanceSampler> sampler_;
  std::unique_ptr<GibbsModel> model_;
  std::unique_ptr<TesterContext> ctx_;
  Assignment fixed_;
};

struct CellOutcome {
  bool reject = false;
  bool witness_ok = true;
  std::size_t raw = 0;
  std::size_t distinct = 0;
  std::size_t q1 = 0;
  std::size_t q2 = 0;
};

}  // namespace

std::size_t thread_count() {
  if (const char* env = std::getenv("DAGMONO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::size_t err_index = count;
  std::exception_ptr err;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw InputError("Wilson interval needs at least one trial");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw InputError("experiment needs at least one trial");
  if (testers.empty()) throw InputError("experiment needs at least one tester");
  if (eps.empty()) throw InputError("experiment needs at least one eps value");
  for (const auto& t : testers) {
    TesterConfig cfg;
    cfg.c1 = t.c1;
    cfg.c2 = t.c2;
    for (const auto& e : eps) {
      cfg.eps = e;
      cfg.validate();
    }
  }
  if (instance.kind == InstanceKind::pmrs) instance.shift.validate();
}

ExperimentSpec experiment_spec_from_json(const Json& j, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  try {
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    const Json& inst = j.at("instance");
    const auto kind = inst.at("kind").get<std::string>();
    auto resolve = [&](const char* key) {
      std::filesystem::path p = inst.at(key).get<std::string>();
      return p.is_absolute() ? p : base_dir / p;
    };
    if (kind == "pmrs") {
      spec.instance.kind = InstanceKind::pmrs;
      spec.instance.shift.k = inst.value("k", 2);
      spec.instance.shift.N = inst.at("N").get<std::int64_t>();
      spec.instance.shift.P = inst.at("P").get<std::int64_t>();
      const auto mode = inst.value("mode", std::string("full_box"));
      if (mode == "full_box") {
        spec.instance.shift.mode = ShiftSetMode::full_box;
      } else if (mode == "difference_free") {
        spec.instance.shift.mode = ShiftSetMode::difference_free;
      } else {
        throw InputError("unknown shift-set mode '" + mode + "'");
      }
      const auto dist = inst.value("dist", std::string("no"));
      if (dist != "yes" && dist != "no") throw InputError("'dist' must be yes or no");
      spec.instance.dist = dist == "yes" ? SampleTag::yes : SampleTag::no;
    } else if (kind == "files") {
      spec.instance.kind = InstanceKind::files;
      spec.instance.graph = resolve("graph");
      spec.instance.function = resolve("function");
    } else if (kind == "gibbs") {
      spec.instance.kind = InstanceKind::gibbs;
      spec.instance.model = resolve("model");
      spec.instance.sweeps = inst.value("sweeps", std::size_t{200});
    } else {
      throw InputError("unknown instance kind '" + kind + "'");
    }
    for (const auto& t : j.at("testers")) {
      TesterSpec ts;
      ts.kind = parse_tester(t.at("tester").get<std::string>());
      ts.c1 = t.value("c1", 8.0);
      ts.c2 = t.value("c2", 8.0);
      spec.testers.push_back(ts);
    }
    for (const auto& e : j.at("eps")) {
      spec.eps.push_back(e.is_string() ? Rational::parse(e.get<std::string>()) : Rational::from_double(e.get<double>()));
    }
    spec.trials = j.at("trials").get<std::size_t>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("experiment spec: ") + e.what());
  }
  return spec;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "tester,eps,c1,c2,trials,rejects,reject_rate,wilson_lo,wilson_hi,mean_raw_queries,"
         "mean_distinct_queries,q_stage1,q_stage2,witness_failures\n";
  for (const auto& r : rows) {
    out << r.tester << ',' << r.eps.str() << ',' << fmt(r.c1, 3) << ',' << fmt(r.c2, 3) << ',' << r.trials << ','
        << r.rejects << ',' << fmt(static_cast<double>(r.rejects) / static_cast<double>(r.trials)) << ','
        << fmt(r.reject_ci.lo) << ',' << fmt(r.reject_ci.hi) << ',' << fmt(r.mean_raw_queries, 3) << ','
        << fmt(r.mean_distinct_queries, 3) << ',' << r.q_stage1 << ',' << r.q_stage2 << ',' << r.witness_failures
        << '\n';
  }
  return out.str();
}

Json ExperimentReport::to_json() const {
  Json rows_j = Json::array();
  for (const auto& r : rows) {
    rows_j.push_back(Json{{"tester", r.tester},
                          {"eps", r.eps.str()},
                          {"c1", r.c1},
                          {"c2", r.c2},
                          {"trials", r.trials},
                          {"rejects", r.rejects},
                          {"wilson_lo", r.reject_ci.lo},
                          {"wilson_hi", r.reject_ci.hi},
                          {"mean_raw_queries", r.mean_raw_queries},
                          {"mean_distinct_queries", r.mean_distinct_queries},
                          {"q_stage1", r.q_stage1},
                          {"q_stage2", r.q_stage2},
                          {"witness_failures", r.witness_failures}});
  }
  return Json{{"name", name}, {"seed", seed}, {"rows", std::move(rows_j)}};
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const InstanceFactory factory(spec.instance);

  struct Cell {
    TesterConfig cfg;
  };
  std::vector<Cell> cells;
  for (const auto& t : spec.testers) {
    for (const auto& e : spec.eps) {
      TesterConfig cfg;
      cfg.kind = t.kind;
      cfg.c1 = t.c1;
      cfg.c2 = t.c2;
      cfg.eps = e;
      cells.push_back({cfg});
    }
  }

  std::vector<std::vector<CellOutcome>> outcomes(spec.trials, std::vector<CellOutcome>(cells.size()));
  parallel_for(spec.trials, [&](std::size_t t) {
    const std::uint64_t trial_seed = substream_seed(spec.seed, t);
    const DrawnInstance inst = factory.draw(trial_seed);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      TesterConfig cfg = cells[c].cfg;
      cfg.seed = substream_seed(trial_seed, c + 1);
      const TesterReport rep = run_tester(*inst.ctx, inst.f, cfg);
      auto& out = outcomes[t][c];
      out.reject = rep.verdict == Verdict::reject;
      out.witness_ok = witness_is_genuine(*inst.ctx, inst.f, rep);
      out.raw = rep.raw_queries;
      out.distinct = rep.distinct_queries;
      out.q1 = rep.q_stage1;
      out.q2 = rep.q_stage2;
    }
  });

  ExperimentReport report;
  report.name = spec.name;
  report.seed = spec.seed;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    ExperimentRow row{};
    row.tester = tester_name(cells[c].cfg.kind);
    row.eps = cells[c].cfg.eps;
    row.c1 = cells[c].cfg.c1;
    row.c2 = cells[c].cfg.c2;
    row.trials = spec.trials;
    double raw = 0;
    double distinct = 0;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      const auto& o = outcomes[t][c];
      row.rejects += o.reject;
      row.witness_failures += !o.witness_ok;
      raw += static_cast<double>(o.raw);
      distinct += static_cast<double>(o.distinct);
      row.q_stage1 = o.q1;
      row.q_stage2 = o.q2;
    }
    row.reject_ci = wilson_interval(row.rejects, row.trials);
    row.mean_raw_queries = raw / static_cast<double>(spec.trials);
    row.mean_distinct_queries = distinct / static_cast<double>(spec.trials);
    report.rows.push_back(row);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string regime_formula_name(RegimeFormula f) {
  switch (f) {
    case RegimeFormula::transitive_reduction:
      return "sqrt(m*l)/(eps*n)";
    case RegimeFormula::two_stage:
      return "m^(1/3)/eps^(2/3)";
    case RegimeFormula::sqrt_n:
      return "sqrt(n/eps)";
    case RegimeFormula::pair:
      return "l/(eps*n)";
  }
  return "unknown";
}

std::vector<RegimePoint> regime_table(double n, const Rational& eps, double step) {
  if (!(n >= 2)) throw InputError("regime table needs n >= 2");
  if (!(step > 0) || step > 1) throw InputError("grid step must lie in (0, 1]");
  if (eps <= Rational(0) || eps >= Rational(1)) throw InputError("eps must lie in (0,1)");
  const double ln = std::log(n);
  const double le = std::log(eps.to_double());
  const auto steps = static_cast<int>(std::llround(1.0 / step));
  std::vector<RegimePoint> table;
  for (int i = 0; i <= steps; ++i) {
    const double c = 1.0 + std::min(1.0, i * step);
    for (int j = i; j <= steps; ++j) {
      const double d = 1.0 + std::min(1.0, j * step);
      RegimePoint p{};
      p.c = c;
      p.d = d;
      p.log_cost[0] = 0.5 * (c + d) * ln - le - ln;
      p.log_cost[1] = c / 3.0 * ln - 2.0 / 3.0 * le;
      p.log_cost[2] = 0.5 * (ln - le);
      p.log_cost[3] = d * ln - le - ln;
      int best = 0;
      for (int k = 1; k < 4; ++k) {
        if (p.log_cost[k] < p.log_cost[best]) best = k;
      }
      p.best = static_cast<RegimeFormula>(best);
      p.unique = true;
      for (int k = 0; k < 4; ++k) {
        if (k != best && std::abs(p.log_cost[k] - p.log_cost[best]) <= 1e-9 * (1.0 + std::abs(p.log_cost[best]))) {
          p.unique = false;
        }
      }
      table.push_back(p);
    }
  }
  return table;
}

std::string regime_csv(const std::vector<RegimePoint>& table) {
  std::ostringstream out;
  out << "c,d,log_tr,log_two_stage,log_sqrt_n,log_pair,best,unique\n";
  for (const auto& p : table) {
    out << fmt(p.c, 4) << ',' << fmt(p.d, 4);
    for (double v : p.log_cost) out << ',' << fmt(v);
    out << ",\"" << regime_formula_name(p.best) << "\"," << (p.unique ? 1 : 0) << '\n';
  }
  return out.str();
}

BundleReport verify_bundle(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  BundleReport rep;
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    rep.warnings.push_back(dir.string() + ": no instance files; nothing verified");
    return rep;
  }

  std::map<fs::path, std::shared_ptr<const HardInstanceSampler>> samplers;
  auto sampler_for = [&](const fs::path& path) {
    const fs::path key = fs::weakly_canonical(path);
    auto it = samplers.find(key);
    if (it == samplers.end()) {
      auto fam = std::make_shared<const PmrsFamily>(pmrs_from_json(read_json_file(path)));
      it = samplers.emplace(key, std::make_shared<const HardInstanceSampler>(fam)).first;
    }
    return it->second;
  };

  for (const auto& path : files) {
    const std::string where = path.filename().string();
    auto fail = [&](const std::string& msg) { rep.failures.push_back(where + ": " + msg); };
    ++rep.files_checked;
    try {
      const Json j = read_json_file(path);
      if (j.contains("scaffold") && j.contains("witnesses")) {
        const PmrsFamily fam = pmrs_from_json(j);
        const PmrsReport pr = verify_pmrs(fam);
        for (const auto& f : pr.failures) fail(f);
        if (fam.params && fam.params->mode == ShiftSetMode::difference_free && has_c4(fam.scaffold)) {
          fail("difference-free scaffold contains a 4-cycle");
        }
      } else if (j.contains("sealed")) {
        (void)model_from_json(j);
      } else if (j.contains("tag") && j.contains("Z")) {
        const SampleRecord rec = sample_from_json(j);
        if (!rec.family_ref) {
          rep.warnings.push_back(where + ": no family reference; structural checks skipped");
          continue;
        }
        fs::path fam_path = *rec.family_ref;
        if (fam_path.is_relative()) fam_path = path.parent_path() / fam_path;
        const auto sampler = sampler_for(fam_path);
        if (rec.index >= sampler->matching_count()) {
          fail("matching index out of range");
          continue;
        }
        const HardSample rebuilt = sampler->assemble(rec.tag, rec.index, rec.noise);
        if (rec.values.mode() != NumericMode::exact || rec.values.exact() != rebuilt.function().exact()) {
          fail("values differ from the re-assembled sample");
          continue;
        }
        const auto violated = violating_edges(sampler->dag(), rec.values);
        if (rec.tag == SampleTag::yes) {
          if (!violated.empty()) fail("YES sample violates " + std::to_string(violated.size()) + " edges");
        } else {
          const auto& scaffold = sampler->family().scaffold;
          std::vector<Arc> expected;
          for (const BiEdge& e : expected_no_violations(sampler->family(), rec.index, rec.noise)) {
            expected.push_back({scaffold.oriented_left(e.left), scaffold.oriented_right(e.right)});
          }
          std::vector<Arc> got(violated.begin(), violated.end());
          std::sort(expected.begin(), expected.end());
          std::sort(got.begin(), got.end());
          if (got != expected) fail("NO sample violation set differs from {e : Z_e != 0}");
        }
      } else if (j.contains("n") && j.contains("edges")) {
        if (j.contains("bipartite_left")) {
          (void)bipartite_from_json(j);
        } else {
          (void)dag_from_json(j);
        }
      } else if (j.contains("values")) {
        (void)assignment_from_json(j);
      } else if (j.contains("w")) {
        (void)witness_from_json(j);
      } else if (j.contains("edges")) {
        (void)matching_from_json(j);
      } else if (j.contains("rows") || j.contains("instance")) {
        rep.warnings.push_back(where + ": report or experiment spec; skipped");
      } else {
        fail("unrecognized file shape");
      }
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  return rep;
}

}  // namespace dagmono
