#include "dagmono/pmrs.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_map>

#include "dagmono/errors.hpp"
#include "dagmono/rng.hpp"

namespace dagmono {
namespace {

std::int64_t norm_sq(const Shift& a) {
  std::int64_t s = 0;
  for (std::int64_t c : a) s += c * c;
  return s;
}

Rational int_rational(std::uint64_t v) { return Rational(static_cast<std::int64_t>(v)); }

std::string shift_text(const Shift& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
  return s + ")";
}

}  // namespace

void ShiftParams::validate() const {
  if (k < 2) throw InputError("shift dimension k must be at least 2");
  if (P < 1 || P > N - 1) throw InputError("shift cap P must satisfy 1 <= P <= N-1");
  if (static_cast<__int128>(k) * P * P >= static_cast<__int128>(N) * N) {
    throw InputError("k*P^2 must be below N^2 for the matchings to be non-empty");
  }
  if (mode == ShiftSetMode::difference_free && k != 2) {
    throw InputError("difference-free shift sets are defined for k = 2 only");
  }
}

std::uint64_t shift_side_size(const ShiftParams& p) {
  __int128 size = 1;
  for (int i = 0; i < p.k + 2; ++i) {
    size *= p.N;
    if (size > (__int128{1} << 31)) throw OverflowError("shift scaffold side exceeds 2^31 vertices");
  }
  return static_cast<std::uint64_t>(size);
}

std::vector<Shift> build_difference_free_shift_set(std::int64_t P) {
  if (P < 1) throw InputError("shift cap P must be at least 1");
  std::vector<Shift> out;
  for (std::int64_t a1 = P / 2 + 1; a1 <= P; ++a1) {
    for (std::int64_t a2 = 0; a2 <= P; ++a2) out.push_back({a1, a2});
  }
  return out;
}

std::vector<Shift> build_shift_set(const ShiftParams& p) {
  p.validate();
  if (p.mode == ShiftSetMode::difference_free) return build_difference_free_shift_set(p.P);
  std::vector<Shift> out;
  Shift a(static_cast<std::size_t>(p.k), 0);
  // Odometer over {0..P}^k with the first coordinate most significant.
  while (true) {
    if (norm_sq(a) != 0) out.push_back(a);
    int i = p.k - 1;
    while (i >= 0 && a[static_cast<std::size_t>(i)] == p.P) a[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++a[static_cast<std::size_t>(i)];
  }
  return out;
}

bool is_difference_free(const std::vector<Shift>& shifts) {
  const std::set<Shift> members(shifts.begin(), shifts.end());
  for (const Shift& a : shifts) {
    for (const Shift& b : shifts) {
      Shift d(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
      if (norm_sq(d) != 0 && members.contains(d)) return false;
    }
  }
  return true;
}

Rational shift_size_guarantee(const ShiftParams& p) {
  p.validate();
  const Rational alpha = p.alpha();
  Rational base(1);
  for (int i = 0; i < p.k; ++i) base *= Rational(1) - alpha;
  return base * (Rational(1) - Rational(p.k) * alpha * alpha);
}

std::uint64_t shift_matching_size(const ShiftParams& p, const Shift& a) {
  std::uint64_t size = 1;
  for (std::int64_t c : a) size *= static_cast<std::uint64_t>(p.N - c);
  return size * static_cast<std::uint64_t>(p.N * p.N - norm_sq(a));
}

std::uint64_t shift_vertex_index(const ShiftParams& p, const Shift& x, std::int64_t z) {
  std::uint64_t idx = 0;
  std::uint64_t scale = 1;
  for (std::int64_t c : x) {
    idx += static_cast<std::uint64_t>(c) * scale;
    scale *= static_cast<std::uint64_t>(p.N);
  }
  return idx + static_cast<std::uint64_t>(z) * scale;
}

std::vector<std::int64_t> shift_vertex_coords(const ShiftParams& p, std::uint64_t index) {
  std::vector<std::int64_t> coords(static_cast<std::size_t>(p.k) + 1);
  const auto n = static_cast<std::uint64_t>(p.N);
  for (int i = 0; i < p.k; ++i) {
    coords[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(index % n);
    index /= n;
  }
  coords.back() = static_cast<std::int64_t>(index);
  return coords;
}

Rational shift_witness_left(const Shift& a, const std::vector<std::int64_t>& coords) {
  std::int64_t dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * coords[i];
  return Rational(coords.back() - 2 * dot);
}

Rational shift_witness_right(const Shift& a, const std::vector<std::int64_t>& coords) {
  std::int64_t dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * coords[i];
  return Rational(-coords.back() + 2 * dot - norm_sq(a)) + Rational(1, 2);
}

PmrsFamily build_shift_pmrs(const ShiftParams& p) {
  p.validate();
  const std::uint64_t side = shift_side_size(p);
  if (2 * side > kDefaultVertexCap) {
    throw InputError("shift scaffold has " + std::to_string(2 * side) + " vertices, above the cap " +
                     std::to_string(kDefaultVertexCap));
  }
  const auto shifts = build_shift_set(p);
  const std::int64_t z_range = p.N * p.N;

  std::vector<std::vector<std::int64_t>> coords(side);
  for (std::uint64_t v = 0; v < side; ++v) coords[v] = shift_vertex_coords(p, v);

  PmrsFamily fam;
  std::vector<BiEdge> edges;
  for (const Shift& a : shifts) {
    const std::int64_t lift = norm_sq(a);
    Matching m;
    m.edges.reserve(shift_matching_size(p, a));
    for (std::uint64_t v = 0; v < side; ++v) {
      const auto& c = coords[v];
      bool inside = c.back() + lift < z_range;
      for (std::size_t i = 0; inside && i < a.size(); ++i) inside = c[i] + a[i] < p.N;
      if (!inside) continue;
      Shift y(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) y[i] = c[i] + a[i];
      const auto r = shift_vertex_index(p, y, c.back() + lift);
      m.edges.push_back({static_cast<Vertex>(v), static_cast<Vertex>(r)});
    }
    edges.insert(edges.end(), m.edges.begin(), m.edges.end());
    fam.matchings.push_back(std::move(m));

    auto w = std::make_shared<WeightWitness>();
    w->w.resize(2 * side);
    for (std::uint64_t v = 0; v < side; ++v) {
      w->w[v] = shift_witness_left(a, coords[v]);
      w->w[side + v] = shift_witness_right(a, coords[v]);
    }
    fam.witnesses.push_back(std::move(w));
  }
  fam.scaffold = BipartiteGraph(side, side, std::move(edges));
  fam.eps0 = shift_size_guarantee(p);
  fam.params = p;
  fam.shifts = shifts;
  return fam;
}

PmrsFamily refine_family(const PmrsFamily& fam, const Rational& eps) {
  if (eps <= Rational(0)) throw InputError("refinement eps must be positive");
  if (eps > fam.eps0) throw InputError("refinement eps " + eps.str() + " exceeds eps0 " + fam.eps0.str());
  const auto part = static_cast<std::size_t>((eps * int_rational(fam.n0())).ceil());
  if (part == 0) throw InputError("refinement part size is zero");

  PmrsFamily out;
  out.scaffold = fam.scaffold;
  out.eps0 = eps;
  out.params = fam.params;
  out.left_origin = fam.left_origin;
  out.right_origin = fam.right_origin;
  for (std::size_t i = 0; i < fam.matchings.size(); ++i) {
    const auto& edges = fam.matchings[i].edges;
    const std::size_t parts = edges.size() / part;
    for (std::size_t j = 0; j < parts; ++j) {
      Matching sub;
      sub.edges.assign(edges.begin() + static_cast<std::ptrdiff_t>(j * part),
                       edges.begin() + static_cast<std::ptrdiff_t>((j + 1) * part));
      if (i < fam.witnesses.size() && fam.witnesses[i]) {
        out.witnesses.push_back(
            std::make_shared<WeightWitness>(restrict_witness(fam.scaffold, *fam.witnesses[i], sub)));
      } else {
        out.witnesses.push_back(nullptr);
      }
      if (i < fam.shifts.size()) out.shifts.push_back(fam.shifts[i]);
      out.matchings.push_back(std::move(sub));
    }
  }
  return out;
}

DenseCore extract_dense_core(const PmrsFamily& fam, std::uint64_t seed, const DenseCoreOptions& opts) {
  if (!fam.params || fam.params->k != 2) throw InputError("dense core needs a k=2 shift family");
  if (has_c4(fam.scaffold)) throw InputError("dense core needs a C4-free scaffold");
  const auto& u = fam.scaffold;
  const ShiftParams& p = *fam.params;
  const auto s = static_cast<std::int64_t>(fam.size());
  if (s == 0) throw InputError("dense core of a family without matchings");

  DenseCore core;
  DenseCoreReport& rep = core.report;
  const Rational ratio(p.P, p.N);
  rep.c0 = (Rational(1) - ratio) * (Rational(1) - ratio) * (Rational(1) - Rational(2) * ratio * ratio);
  rep.min_degree_fraction = opts.min_degree_fraction.value_or(rep.c0 * rep.c0 / Rational(32));
  rep.original_matchings = fam.size();

  // Degree pruning: delete vertices with degree < (c0/4) s until none remain.
  const Rational prune_below = rep.c0 / Rational(4) * Rational(s);
  const std::size_t n = u.vertex_count();
  std::vector<std::size_t> degree(n);
  for (Vertex v = 0; v < n; ++v) degree[v] = u.incident(v).size();
  std::vector<bool> alive(n, true);
  std::deque<Vertex> queue;
  for (Vertex v = 0; v < n; ++v) {
    if (Rational(static_cast<std::int64_t>(degree[v])) < prune_below) queue.push_back(v);
  }
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    if (!alive[v]) continue;
    alive[v] = false;
    for (EdgeId id : u.incident(v)) {
      const BiEdge& e = u.edge(id);
      const Vertex other = v < u.left_size() ? u.oriented_right(e.right) : u.oriented_left(e.left);
      if (!alive[other]) continue;
      --degree[other];
      if (Rational(static_cast<std::int64_t>(degree[other])) < prune_below) queue.push_back(other);
    }
  }
  std::vector<Vertex> left_kept;
  std::vector<Vertex> right_kept;
  for (Vertex v = 0; v < u.left_size(); ++v) {
    if (alive[v]) left_kept.push_back(v);
  }
  for (Vertex r = 0; r < u.right_size(); ++r) {
    if (alive[u.oriented_right(r)]) right_kept.push_back(r);
  }
  rep.pruned_left = u.left_size() - left_kept.size();
  rep.pruned_right = u.right_size() - right_kept.size();
  if (left_kept.empty() || right_kept.empty()) throw InputError("dense core is empty after pruning");
  rep.pruned_min_degree = std::numeric_limits<std::size_t>::max();
  for (Vertex v = 0; v < n; ++v) {
    if (alive[v]) rep.pruned_min_degree = std::min(rep.pruned_min_degree, degree[v]);
  }

  // Balance: subsample the larger side down to the smaller one; retry until
  // every vertex of the untouched side keeps degree >= c_delta * s.
  const std::size_t n0 = std::min(left_kept.size(), right_kept.size());
  const bool shrink_left = left_kept.size() > right_kept.size();
  auto& big = shrink_left ? left_kept : right_kept;
  const auto& small = shrink_left ? right_kept : left_kept;
  const Rational degree_floor = rep.min_degree_fraction * Rational(s);
  if (big.size() != small.size()) {
    std::vector<Vertex> pool = big;
    bool found = false;
    for (int attempt = 0; attempt < opts.balance_attempts && !found; ++attempt) {
      rep.balance_attempts_used = attempt + 1;
      Rng rng(substream_seed(seed, static_cast<std::uint64_t>(attempt)));
      std::vector<Vertex> sample = pool;
      for (std::size_t i = 0; i < n0; ++i) {
        const auto j = i + rng.uniform_index(sample.size() - i);
        std::swap(sample[i], sample[j]);
      }
      sample.resize(n0);
      std::vector<bool> chosen(shrink_left ? u.left_size() : u.right_size(), false);
      for (Vertex v : sample) chosen[v] = true;
      found = true;
      for (Vertex w : small) {
        std::int64_t d = 0;
        const auto inc = shrink_left ? u.right_incident(w) : u.left_incident(w);
        for (EdgeId id : inc) {
          const BiEdge& e = u.edge(id);
          const Vertex other = shrink_left ? e.left : e.right;
          const Vertex other_oriented = shrink_left ? u.oriented_left(other) : u.oriented_right(other);
          if (alive[other_oriented] && chosen[other]) ++d;
        }
        if (Rational(d) < degree_floor) {
          found = false;
          break;
        }
      }
      if (found) {
        std::sort(sample.begin(), sample.end());
        big = std::move(sample);
      }
    }
    if (!found) {
      throw InputError("dense core balancing failed after " + std::to_string(opts.balance_attempts) +
                       " attempts; lower the minimum-degree fraction");
    }
  }

  // Induced subfamily on the kept vertices, relabelled densely.
  constexpr Vertex kGone = std::numeric_limits<Vertex>::max();
  std::vector<Vertex> new_left(u.left_size(), kGone);
  std::vector<Vertex> new_right(u.right_size(), kGone);
  for (std::size_t i = 0; i < left_kept.size(); ++i) new_left[left_kept[i]] = static_cast<Vertex>(i);
  for (std::size_t i = 0; i < right_kept.size(); ++i) new_right[right_kept[i]] = static_cast<Vertex>(i);

  std::vector<BiEdge> edges;
  for (const BiEdge& e : u.edges()) {
    if (new_left[e.left] != kGone && new_right[e.right] != kGone) {
      edges.push_back({new_left[e.left], new_right[e.right]});
    }
  }
  PmrsFamily& out = core.family;
  out.scaffold = BipartiteGraph(left_kept.size(), right_kept.size(), std::move(edges));
  out.params = fam.params;
  out.eps0 = rep.min_degree_fraction / Rational(2);
  auto origin = [](const std::vector<Vertex>& prev, Vertex v) { return prev.empty() ? v : prev[v]; };
  for (Vertex l : left_kept) out.left_origin.push_back(origin(fam.left_origin, l));
  for (Vertex r : right_kept) out.right_origin.push_back(origin(fam.right_origin, r));

  const Rational keep_at = rep.min_degree_fraction / Rational(2) * int_rational(n0);
  const std::size_t old_left = u.left_size();
  const std::size_t new_left_size = left_kept.size();
  for (std::size_t i = 0; i < fam.matchings.size(); ++i) {
    Matching m;
    for (const BiEdge& e : fam.matchings[i].edges) {
      if (new_left[e.left] != kGone && new_right[e.right] != kGone) {
        m.edges.push_back({new_left[e.left], new_right[e.right]});
      }
    }
    if (Rational(static_cast<std::int64_t>(m.edges.size())) < keep_at) continue;
    if (i < fam.witnesses.size() && fam.witnesses[i]) {
      const auto& w = fam.witnesses[i]->w;
      auto restricted = std::make_shared<WeightWitness>();
      restricted->w.reserve(out.scaffold.vertex_count());
      for (Vertex l : left_kept) restricted->w.push_back(w[l]);
      for (Vertex r : right_kept) restricted->w.push_back(w[old_left + r]);
      if (restricted->w.size() != new_left_size + right_kept.size()) {
        throw InternalError("restricted witness has the wrong length");
      }
      out.witnesses.push_back(std::move(restricted));
    } else {
      out.witnesses.push_back(nullptr);
    }
    if (i < fam.shifts.size()) out.shifts.push_back(fam.shifts[i]);
    out.matchings.push_back(std::move(m));
  }
  rep.kept_matchings = out.matchings.size();
  rep.kept_fraction = static_cast<double>(rep.kept_matchings) / static_cast<double>(rep.original_matchings);

  rep.min_degree = std::numeric_limits<std::size_t>::max();
  rep.max_degree = 0;
  for (Vertex v = 0; v < out.scaffold.vertex_count(); ++v) {
    const std::size_t d = out.scaffold.incident(v).size();
    rep.min_degree = std::min(rep.min_degree, d);
    rep.max_degree = std::max(rep.max_degree, d);
  }
  return core;
}

PmrsReport verify_pmrs(const PmrsFamily& fam) {
  PmrsReport rep;
  const auto& u = fam.scaffold;
  if (u.left_size() != u.right_size()) {
    rep.balanced = false;
    rep.failures.push_back("sides differ: |L|=" + std::to_string(u.left_size()) +
                           " |R|=" + std::to_string(u.right_size()));
  }

  // Edge-disjointness and per-matching vertex-disjointness.
  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> owner(u.edge_count(), kFree);
  for (std::size_t i = 0; i < fam.matchings.size(); ++i) {
    std::vector<bool> used(u.vertex_count(), false);
    for (const BiEdge& e : fam.matchings[i].edges) {
      const std::string where = "matching " + std::to_string(i) + " edge (" + std::to_string(e.left) + "," +
                                std::to_string(e.right) + ")";
      const auto id = u.find_edge(e.left, e.right);
      if (!id) {
        rep.edge_disjoint = false;
        rep.failures.push_back(where + " is not a scaffold edge");
        continue;
      }
      if (owner[*id] != kFree) {
        rep.edge_disjoint = false;
        rep.failures.push_back(where + " also belongs to matching " + std::to_string(owner[*id]));
      }
      owner[*id] = i;
      const Vertex l = u.oriented_left(e.left);
      const Vertex r = u.oriented_right(e.right);
      if (used[l] || used[r]) {
        rep.edge_disjoint = false;
        rep.failures.push_back(where + " shares a vertex with another edge of the same matching");
      }
      used[l] = used[r] = true;
    }
  }

  const Rational floor_size = fam.eps0 * int_rational(fam.n0());
  for (std::size_t i = 0; i < fam.matchings.size(); ++i) {
    const Rational size(static_cast<std::int64_t>(fam.matchings[i].edges.size()));
    if (size < floor_size) {
      rep.sizes_ok = false;
      rep.failures.push_back("matching " + std::to_string(i) + " has size " + size.str() + " < eps0*n0 = " +
                             floor_size.str());
    }
  }

  if (rep.edge_disjoint) {
    for (std::size_t i = 0; i < fam.matchings.size(); ++i) {
      std::string problem;
      if (i < fam.witnesses.size() && fam.witnesses[i]) {
        problem = check_witness(u, fam.matchings[i], *fam.witnesses[i]);
      } else if (!is_positive(u, fam.matchings[i]).positive) {
        problem = "no witness and the matching is not positive";
      }
      if (!problem.empty()) {
        rep.positivity_ok = false;
        rep.failures.push_back("matching " + std::to_string(i) + " witness: " + problem);
      }
    }
  }

  const Rational total_edges(static_cast<std::int64_t>(u.edge_count()));
  rep.within_count_bound = fam.matchings.empty() || floor_size <= Rational(0) ||
                           Rational(static_cast<std::int64_t>(fam.matchings.size())) * floor_size <= total_edges;
  if (!*rep.within_count_bound) rep.failures.push_back("more matchings than |E| / (eps0 n0) allows");

  if (fam.params && fam.shifts.size() == fam.matchings.size()) {
    const ShiftParams& p = *fam.params;
    std::vector<Shift> distinct = fam.shifts;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    bool ok = true;
    const Rational half(1, 2);
    for (std::size_t j = 0; j < fam.matchings.size() && ok; ++j) {
      const Shift& b = fam.shifts[j];
      for (const BiEdge& e : fam.matchings[j].edges) {
        const Vertex lo = fam.left_origin.empty() ? e.left : fam.left_origin[e.left];
        const Vertex ro = fam.right_origin.empty() ? e.right : fam.right_origin[e.right];
        const auto cl = shift_vertex_coords(p, lo);
        const auto cr = shift_vertex_coords(p, ro);
        bool shape = cr.back() == cl.back() + norm_sq(b);
        for (std::size_t i = 0; i < b.size(); ++i) shape = shape && cr[i] == cl[i] + b[i];
        if (!shape) {
          ok = false;
          rep.failures.push_back("matching " + std::to_string(j) + " edge (" + std::to_string(e.left) + "," +
                                 std::to_string(e.right) + ") is not a shift-" + shift_text(b) + " edge");
          break;
        }
        for (const Shift& a : distinct) {
          Shift d(a.size());
          for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
          const Rational expect = half - Rational(norm_sq(d));
          const Rational got = shift_witness_left(a, cl) + shift_witness_right(a, cr);
          if (got != expect) {
            ok = false;
            rep.failures.push_back("witness " + shift_text(a) + " on matching " + std::to_string(j) +
                                   " sums to " + got.str() + ", expected " + expect.str());
            break;
          }
        }
        if (!ok) break;
      }
    }
    rep.shift_identity_ok = ok;
  }
  return rep;
}

}  // namespace dagmono
