#include "fhn/cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "fhn/errors.hpp"

namespace fhn::cli {

FhnParams SweepGrid::node(std::size_t i) const {
  const std::size_t ng = static_cast<std::size_t>(gamma.n), nc = static_cast<std::size_t>(c.n),
                    na = static_cast<std::size_t>(a.n);
  const std::size_t ig = i % ng, ic = (i / ng) % nc, ia = (i / (ng * nc)) % na,
                    is = i / (ng * nc * na);
  const auto [b, delta] = slices.at(is);
  return {a.at(static_cast<int>(ia)), b, c.at(static_cast<int>(ic)), gamma.at(static_cast<int>(ig)),
          delta};
}

namespace {

enum class Nest { o, a, outer, other };

struct Found {
  std::vector<LimitCycle> cycles;
  bool continuum = false;
  bool grazes = false;
};

std::optional<Section> section_towards(const PlanarField& f, Vec2 anchor, Vec2 dir) {
  for (int k = 0; k < 4; ++k) {
    try {
      return make_section(f, anchor, rotated(dir, 0.1 * k));
    } catch (const usage_error&) {
    }
  }
  return std::nullopt;
}

Found search(const PlanarField& f, const Section& sec, double lo, double hi,
             const SweepSettings& s) {
  CycleOptions opt = s.cycle;
  opt.geometric_scan = true;
  const auto cs = find_cycles(f, sec, lo, hi, s.n_scan, opt);
  return {cs.cycles, cs.continuum, !cs.grazes.empty()};
}

Nest nest_of(const LimitCycle& cy, const std::vector<Equilibrium>& eqs) {
  const auto poly = cy.polyline(400);
  std::vector<bool> inside;
  for (const auto& e : eqs) inside.push_back(winding_number(poly, e.location) != 0);
  const auto n = std::count(inside.begin(), inside.end(), true);
  if (eqs.size() > 1 && n == static_cast<long>(eqs.size())) return Nest::outer;
  if (n != 1) return Nest::other;
  for (std::size_t i = 0; i < eqs.size(); ++i)
    if (inside[i]) {
      if (eqs.size() == 1) return Nest::o;
      return eqs[i].label == EquilibriumLabel::O ? Nest::o : Nest::a;
    }
  return Nest::other;
}

void add_event(NodeResult& r, const std::string& e) {
  if (std::find(r.events.begin(), r.events.end(), e) == r.events.end()) r.events.push_back(e);
}

}  // namespace

NodeResult sweep_node(const FhnParams& params, Stage stage, const SweepSettings& s) {
  NodeResult r;
  r.params = params;
  try {
    const PlanarField f(params, stage);
    const auto eqs = finite_equilibria(f);
    r.equilibria = static_cast<int>(eqs.size());

    auto tally = [&](const Found& found, std::optional<Nest> expect) {
      if (found.continuum) add_event(r, "continuum");
      if (found.grazes) add_event(r, "graze");
      for (const auto& cy : found.cycles) {
        const Nest n = nest_of(cy, eqs);
        if (expect && n != *expect) {
          if (n != Nest::outer) add_event(r, "unassigned_cycle");
          continue;
        }
        if (cy.stability == CycleStability::semi_stable_candidate)
          add_event(r, "semi_stable_candidate");
        switch (n) {
          case Nest::o: ++r.nests.around_o; r.multipliers_o.push_back(cy.multiplier_ds); break;
          case Nest::a: ++r.nests.around_a; r.multipliers_a.push_back(cy.multiplier_ds); break;
          case Nest::outer:
            ++r.nests.outer;
            r.multipliers_outer.push_back(cy.multiplier_ds);
            break;
          case Nest::other: add_event(r, "unassigned_cycle"); break;
        }
      }
    };

    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const auto& e = eqs[i];
      if (!is_antisaddle(e.kind)) continue;
      Vec2 dir{1.0, 0.0};
      double hi = s.outer_radius;
      if (eqs.size() > 1) {
        double best = 1e300;
        for (std::size_t j = 0; j < eqs.size(); ++j) {
          if (j == i) continue;
          const double d = distance(eqs[j].location, e.location);
          if (d < best) {
            best = d;
            dir = eqs[j].location - e.location;
          }
        }
        hi = 0.999 * best;
      }
      if (!(hi > s.s_min)) continue;
      const auto sec = section_towards(f, e.location, dir);
      if (!sec) {
        add_event(r, "section_failed");
        continue;
      }
      const Nest expect = eqs.size() == 1 || e.label == EquilibriumLabel::O ? Nest::o : Nest::a;
      tally(search(f, *sec, s.s_min, hi, s), expect);
    }

    if (eqs.size() > 1) {
      Vec2 centroid{};
      for (const auto& e : eqs) centroid += e.location / static_cast<double>(eqs.size());
      Vec2 far = eqs.front().location;
      for (const auto& e : eqs)
        if (distance(e.location, centroid) > distance(far, centroid)) far = e.location;
      const double spread = distance(far, centroid);
      const auto sec = section_towards(f, centroid, far - centroid);
      if (!sec) {
        add_event(r, "section_failed");
      } else {
        const double lo = spread * 1.02 + s.s_min;
        const double hi = std::max(s.outer_radius, 5.0 * spread);
        tally(search(f, *sec, lo, hi, s), Nest::outer);
      }
    }
  } catch (const std::exception& ex) {
    r.failed = true;
    r.error = ex.what();
  }
  return r;
}

int resolve_jobs(long configured) {
  if (configured > 0) return static_cast<int>(configured);
  if (const char* env = std::getenv("FHN_BIFURC_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    throw usage_error("FHN_BIFURC_JOBS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepReport sweep(const SweepGrid& grid, const SweepSettings& s) {
  if (grid.slices.empty() || grid.size() == 0) throw usage_error("sweep: empty grid");
  for (const Span* sp : {&grid.a, &grid.c, &grid.gamma})
    if (!std::isfinite(sp->lo) || !std::isfinite(sp->hi) || sp->n < 1)
      throw usage_error("sweep: grid bounds must be finite");
  const auto t0 = std::chrono::steady_clock::now();
  SweepReport rep;
  rep.grid = grid;
  rep.nodes.resize(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      rep.nodes[i] = sweep_node(grid.node(i), grid.stage, s);
      rep.nodes[i].index = i;
    }
  };
  const int jobs = std::max(1, std::min<int>(s.jobs, static_cast<int>(grid.size())));
  {
    std::vector<std::jthread> pool;
    for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
    worker();
  }
  for (const auto& n : rep.nodes) {
    if (n.failed) ++rep.failed_nodes;
    rep.max_count = std::max(rep.max_count, n.nests.largest());
    rep.max_total = std::max(rep.max_total, n.nests.total());
    if (static_cast<int>(rep.count_histogram.size()) <= n.nests.total())
      rep.count_histogram.resize(static_cast<std::size_t>(n.nests.total()) + 1, 0);
    ++rep.count_histogram[static_cast<std::size_t>(n.nests.total())];
    if (n.nests.largest() > s.cycle_bound) rep.violations.push_back(n.index);
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SweepGrid grid_from(const Config& cfg) {
  SweepGrid g;
  g.stage = cfg.stage();
  const std::string& mode = cfg.str("grid");
  if (mode == "default") return g;
  if (mode != "config") throw usage_error("grid must be 'default' or 'config'");
  g.a = parse_span(cfg.str("sweep_a"), "sweep_a");
  g.c = parse_span(cfg.str("sweep_c"), "sweep_c");
  g.gamma = parse_span(cfg.str("sweep_gamma"), "sweep_gamma");
  g.slices = parse_slices(cfg.str("slices"), "slices");
  return g;
}

SweepSettings settings_from(const Config& cfg) {
  SweepSettings s;
  s.cycle.crossing.integrator.tol = 1e-10;
  s.cycle.max_return_time = 200.0;
  s.n_scan = static_cast<int>(cfg.integer("sweep_n_scan"));
  s.s_min = cfg.num("sweep_s_min");
  s.outer_radius = cfg.num("sweep_outer");
  s.cycle_bound = static_cast<int>(cfg.integer("cycle_bound"));
  s.jobs = resolve_jobs(cfg.integer("jobs"));
  if (s.n_scan < 3 || !(s.s_min > 0.0) || !(s.outer_radius > s.s_min))
    throw usage_error("sweep: invalid scan settings");
  return s;
}

namespace {

nlohmann::ordered_json node_json(const NodeResult& n) {
  nlohmann::ordered_json j;
  j["index"] = n.index;
  j["a"] = n.params.a;
  j["b"] = n.params.b;
  j["c"] = n.params.c;
  j["gamma"] = n.params.gamma;
  j["delta"] = n.params.delta;
  j["equilibria"] = n.equilibria;
  j["count"] = n.nests.total();
  j["around_O"] = n.nests.around_o;
  j["around_A"] = n.nests.around_a;
  j["outer"] = n.nests.outer;
  j["multipliers_O"] = n.multipliers_o;
  j["multipliers_A"] = n.multipliers_a;
  j["multipliers_outer"] = n.multipliers_outer;
  j["events"] = n.events;
  j["failed"] = n.failed;
  if (n.failed) j["error"] = n.error;
  return j;
}

nlohmann::ordered_json summary(const SweepReport& r) {
  nlohmann::ordered_json j;
  auto span = [](const Span& s) { return nlohmann::ordered_json{{"lo", s.lo}, {"hi", s.hi}, {"n", s.n}}; };
  nlohmann::ordered_json slices = nlohmann::ordered_json::array();
  for (const auto& [b, d] : r.grid.slices) slices.push_back({{"b", b}, {"delta", d}});
  j["grid"] = {{"a", span(r.grid.a)},
               {"c", span(r.grid.c)},
               {"gamma", span(r.grid.gamma)},
               {"slices", slices},
               {"stage", std::string(to_string(r.grid.stage))}};
  j["nodes"] = r.nodes.size();
  j["failed_nodes"] = r.failed_nodes;
  j["max_count"] = r.max_count;
  j["max_total"] = r.max_total;
  j["count_histogram"] = r.count_histogram;
  nlohmann::ordered_json v = nlohmann::ordered_json::array();
  for (auto i : r.violations) v.push_back(node_json(r.nodes[i]));
  j["violations"] = v;
  return j;
}

}  // namespace

std::string sweep_jsonl(const SweepReport& r) {
  std::string out;
  for (const auto& n : r.nodes) {
    out += node_json(n).dump();
    out += '\n';
  }
  nlohmann::ordered_json s;
  s["summary"] = summary(r);
  out += s.dump();
  out += '\n';
  return out;
}

std::string sweep_summary_json(const SweepReport& r) { return summary(r).dump(2) + "\n"; }

}  // namespace fhn::cli
