#include "fhn/cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhn/continuation.hpp"
#include "fhn/cycles.hpp"
#include "fhn/equilibria.hpp"
#include "fhn/errors.hpp"
#include "fhn/odeint.hpp"
#include "fhn/separatrix.hpp"
#include "fhn/cli/config.hpp"
#include "fhn/cli/report.hpp"
#include "fhn/cli/sweep.hpp"
#include "fhn/cli/verify.hpp"

namespace fhn::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Context {
  Config cfg;
  std::ostream& out;
  std::ostream& err;
  fs::path dir() const { return fs::path(cfg.str("out")); }
};

std::string f17(double v) { return format_double(v); }

PlanarField field_of(const Config& cfg) { return PlanarField(cfg.params(), cfg.stage()); }

Section section_of(const Config& cfg, const PlanarField& f) {
  const std::string& anchor = cfg.str("anchor");
  Vec2 at{};
  if (anchor == "O") {
    at = {0.0, 0.0};
  } else if (anchor == "A" || anchor == "S") {
    const auto e = find_labeled(finite_equilibria(f),
                                anchor == "A" ? EquilibriumLabel::A : EquilibriumLabel::S);
    if (!e) throw usage_error("no equilibrium " + anchor + " for these parameters");
    at = e->location;
  } else {
    const auto comma = anchor.find(',');
    if (comma == std::string::npos) throw usage_error("anchor must be O, A, S or x,y");
    Config tmp;
    tmp.set("a", anchor.substr(0, comma));
    tmp.set("b", anchor.substr(comma + 1));
    at = {tmp.num("a"), tmp.num("b")};
  }
  return make_section(f, at, rotated({1.0, 0.0}, cfg.num("direction")));
}

CycleOptions cycle_options(const Config& cfg) {
  CycleOptions o;
  o.crossing.integrator.tol = cfg.num("tol");
  o.max_return_time = cfg.num("max_return_time");
  if (!(o.crossing.integrator.tol > 0.0) || !(o.max_return_time > 0.0))
    throw usage_error("tol and max_return_time must be positive");
  return o;
}

CycleSearch scan_cycles(const Config& cfg, const PlanarField& f, const Section& sec) {
  return find_cycles(f, sec, cfg.num("s_min"), cfg.num("s_max"),
                     static_cast<int>(cfg.integer("n_scan")), cycle_options(cfg));
}

int cmd_equilibria(Context& c) {
  const PlanarField f = field_of(c.cfg);
  const auto eqs = finite_equilibria(f);
  CsvTable t({"index", "label", "kind", "x", "y", "trace", "det", "eig1_re", "eig1_im", "eig2_re",
              "eig2_im", "poincare_index"});
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const auto& e = eqs[i];
    t.add({std::to_string(i), std::string(to_string(e.label)), std::string(to_string(e.kind)),
           f17(e.location.x), f17(e.location.y), f17(e.jacobian.trace()), f17(e.jacobian.det()),
           f17(e.eigenvalues[0].real()), f17(e.eigenvalues[0].imag()),
           f17(e.eigenvalues[1].real()), f17(e.eigenvalues[1].imag()), std::to_string(e.index)});
  }
  write_text(c.dir() / "equilibria.csv", t.str());
  c.out << eqs.size() << " equilibria -> " << (c.dir() / "equilibria.csv").string() << "\n";
  return exit_ok;
}

void cycles_csv(const Context& c, const std::vector<LimitCycle>& cycles) {
  CsvTable t({"index", "s0", "period", "amplitude", "multiplier", "stability", "orientation",
              "anchor_x", "anchor_y", "direction_x", "direction_y"});
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& cy = cycles[i];
    t.add({std::to_string(i), f17(cy.s0), f17(cy.period), f17(cy.amplitude),
           f17(cy.multiplier_ds), std::string(to_string(cy.stability)),
           std::to_string(cy.orientation), f17(cy.section.anchor.x), f17(cy.section.anchor.y),
           f17(cy.section.direction.x), f17(cy.section.direction.y)});
  }
  write_text(c.dir() / "cycles.csv", t.str());
}

int cmd_cycles(Context& c) {
  const PlanarField f = field_of(c.cfg);
  const Section sec = section_of(c.cfg, f);
  const auto cs = scan_cycles(c.cfg, f, sec);
  cycles_csv(c, cs.cycles);
  c.out << cs.cycles.size() << " cycles";
  if (cs.continuum) c.out << " (period annulus: d vanishes on the whole scan)";
  if (!cs.grazes.empty()) c.out << ", " << cs.grazes.size() << " graze candidates";
  c.out << " -> " << (c.dir() / "cycles.csv").string() << "\n";
  return exit_ok;
}

std::vector<Vec2> sampled(const Trajectory& tr) {
  std::vector<Vec2> pts;
  if (!tr.states.empty()) pts.push_back(tr.states.front());
  for (const auto& ds : tr.dense)
    for (int k = 1; k <= 4; ++k) {
      const auto y = ds.at_theta(k / 4.0);
      pts.push_back({y[0], y[1]});
    }
  return pts;
}

int cmd_portrait(Context& c) {
  const PlanarField f = field_of(c.cfg);
  const Interval xr{c.cfg.num("x_min"), c.cfg.num("x_max")};
  const Interval yr{c.cfg.num("y_min"), c.cfg.num("y_max")};
  SvgPortrait svg(xr, yr);

  const long n = c.cfg.integer("trajectories");
  const double t_end = c.cfg.num("traj_time");
  if (n < 0 || !(t_end > 0.0)) throw usage_error("trajectories >= 0 and traj_time > 0 required");
  const int k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  IntegratorOptions io;
  io.tol = 1e-9;
  io.escape_radius = 10.0 * std::max({std::abs(xr.lo), std::abs(xr.hi), std::abs(yr.lo),
                                      std::abs(yr.hi)});
  int drawn = 0;
  for (int i = 0; i < k && drawn < n; ++i)
    for (int j = 0; j < k && drawn < n; ++j, ++drawn) {
      const Vec2 seed{xr.lo + xr.width() * (i + 0.5) / k, yr.lo + yr.width() * (j + 0.5) / k};
      for (bool back : {false, true}) {
        io.backward = back;
        try {
          svg.trajectory(sampled(integrate(f, seed, t_end, io)));
        } catch (const IntegrationError& e) {
          svg.trajectory(sampled(e.partial()));
        }
      }
    }

  const auto nc = nullclines(f, xr, 400, yr);
  for (const auto& curve : nc.v_curves) svg.nullcline(curve);
  for (const auto& curve : nc.w_curves) svg.nullcline(curve);

  int cycles = 0;
  for (const auto& cy : scan_cycles(c.cfg, f, section_of(c.cfg, f)).cycles) {
    svg.cycle(cy.polyline(600), cy.stability == CycleStability::stable);
    ++cycles;
  }
  const auto eqs = finite_equilibria(f);
  for (const auto& e : eqs) svg.equilibrium(e.location, e.kind);

  write_text(c.dir() / "portrait.svg", svg.str());
  c.out << drawn << " seeds, " << cycles << " cycles, " << eqs.size() << " equilibria -> "
        << (c.dir() / "portrait.svg").string() << "\n";
  return exit_ok;
}

json fold_json(const FoldPoint& fp) {
  return {{"s", fp.s}, {"mu", fp.mu}, {"d", fp.d}, {"ds", fp.ds}, {"dss", fp.dss},
          {"converged", fp.converged}};
}

int cmd_continue(Context& c) {
  const PlanarField f = field_of(c.cfg);
  const Section sec = section_of(c.cfg, f);
  const auto cs = scan_cycles(c.cfg, f, sec);
  const long which = c.cfg.integer("cycle");
  if (which < 0 || which >= static_cast<long>(cs.cycles.size()))
    throw numerical_error("no starting cycle " + std::to_string(which) + " (found " +
                          std::to_string(cs.cycles.size()) + ")");
  ContinuationOptions o;
  o.cycle = cycle_options(c.cfg);
  o.step_init = c.cfg.num("step");
  o.step_max = c.cfg.num("step_max");
  o.max_points = static_cast<int>(c.cfg.integer("max_points"));
  o.period_cap = c.cfg.num("period_cap");
  o.direction = static_cast<int>(c.cfg.integer("cont_direction"));
  const Param p = c.cfg.param("param");
  const auto b = continue_branch(cs.cycles[static_cast<std::size_t>(which)], p,
                                 {c.cfg.num("range_lo"), c.cfg.num("range_hi")}, o);

  CsvTable t({"index", "mu", "s0", "period", "amplitude", "multiplier", "d_a", "d_b", "d_c",
              "d_gamma", "d_delta", "saddle_gap"});
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const auto& q = b.points[i];
    t.add({std::to_string(i), f17(q.mu), f17(q.s0), f17(q.period), f17(q.amplitude),
           f17(q.multiplier), f17(q.sensitivities[0]), f17(q.sensitivities[1]),
           f17(q.sensitivities[2]), f17(q.sensitivities[3]), f17(q.sensitivities[4]),
           f17(q.saddle_gap)});
  }
  write_text(c.dir() / "branch.csv", t.str());

  std::string log;
  for (const auto& e : b.events) {
    json j{{"event", std::string(to_string(e.kind))}, {"mu", e.mu}, {"s0", e.s0},
           {"at_point", e.at_point}};
    if (e.fold) j["fold"] = fold_json(*e.fold);
    log += j.dump() + "\n";
  }
  const auto rep = classify_termination(b);
  log += json{{"termination", std::string(to_string(b.termination))},
              {"classification", std::string(to_string(rep.kind))},
              {"end_mu", rep.end_mu},
              {"possible_cyclic", b.possible_cyclic},
              {"diagnostic", b.diagnostic}}
             .dump() +
         "\n";
  write_text(c.dir() / "events.jsonl", log);
  c.out << b.points.size() << " points, " << b.events.size() << " events, termination "
        << to_string(b.termination) << " -> " << (c.dir() / "branch.csv").string() << "\n";
  return exit_ok;
}

int cmd_surface(Context& c) {
  const PlanarField f = field_of(c.cfg);
  const Section sec = section_of(c.cfg, f);
  const CycleOptions co = cycle_options(c.cfg);
  FoldSurfaceGrid g;
  g.p1 = c.cfg.param("p1");
  g.p2 = c.cfg.param("p2");
  g.fold_param = c.cfg.param("fold_param");
  const Span s1 = parse_span(c.cfg.str("p1_range"), "p1_range");
  const Span s2 = parse_span(c.cfg.str("p2_range"), "p2_range");
  g.range1 = {s1.lo, s1.hi};
  g.n1 = s1.n;
  g.range2 = {s2.lo, s2.hi};
  g.n2 = s2.n;
  const auto seed = solve_fold(f, sec, g.fold_param, c.cfg.num("fold_s"), c.cfg.num("fold_mu"), co);
  if (!seed.converged) throw numerical_error("seed fold did not converge");
  const auto surf = trace_fold_surface(f.with(g.fold_param, seed.mu), sec, seed, g, co);
  CsvTable t({"i", "j", std::string(to_string(g.p1)), std::string(to_string(g.p2)),
              std::string(to_string(g.fold_param)), "s0", "residual_d", "residual_ds", "present"});
  int present = 0;
  for (std::size_t k = 0; k < surf.samples.size(); ++k) {
    const auto& x = surf.samples[k];
    present += x.present ? 1 : 0;
    t.add({std::to_string(k / static_cast<std::size_t>(g.n2)),
           std::to_string(k % static_cast<std::size_t>(g.n2)), f17(x.p1), f17(x.p2), f17(x.mu),
           f17(x.s0), f17(x.residual_d), f17(x.residual_ds), x.present ? "1" : "0"});
  }
  write_text(c.dir() / "surface.csv", t.str());
  c.out << present << "/" << surf.samples.size() << " fold nodes -> "
        << (c.dir() / "surface.csv").string() << "\n";
  return exit_ok;
}

LoopKind loop_kind(const std::string& s) {
  for (LoopKind k : {LoopKind::small_O, LoopKind::small_A, LoopKind::big, LoopKind::eight_loop})
    if (to_string(k) == s) return k;
  throw usage_error("loop must be small_O, small_A, big or eight_loop");
}

int cmd_homoclinic(Context& c) {
  HomoclinicOptions o;
  o.offset = c.cfg.num("offset");
  o.n_samples = static_cast<int>(c.cfg.integer("n_samples"));
  const auto det = find_homoclinic(c.cfg.params(), {c.cfg.num("gamma_lo"), c.cfg.num("gamma_hi")},
                                   loop_kind(c.cfg.str("loop")), o);
  CsvTable t({"gamma", "splitting", "defined"});
  for (const auto& x : det.splitting)
    t.add({f17(x.gamma), f17(x.value), x.defined ? "1" : "0"});
  write_text(c.dir() / "homoclinic.csv", t.str());
  json j{{"kind", std::string(to_string(det.kind))},
         {"gamma_lo", det.gamma_bracket.lo},
         {"gamma_hi", det.gamma_bracket.hi},
         {"unstable_side", det.unstable_side},
         {"stable_side", det.stable_side},
         {"diagnostic", det.diagnostic}};
  if (det.second_bracket) j["second_bracket"] = {det.second_bracket->lo, det.second_bracket->hi};
  write_text(c.dir() / "events.jsonl", j.dump() + "\n");
  c.out << to_string(det.kind);
  if (det.kind != LoopKind::none)
    c.out << " in [" << f17(det.gamma_bracket.lo) << ", " << f17(det.gamma_bracket.hi) << "]";
  else
    c.out << ": " << det.diagnostic;
  c.out << "\n";
  return exit_ok;
}

int cmd_sweep(Context& c) {
  const auto grid = grid_from(c.cfg);
  const auto settings = settings_from(c.cfg);
  const auto rep = sweep(grid, settings);
  write_text(c.dir() / "sweep.jsonl", sweep_jsonl(rep));
  c.out << sweep_summary_json(rep);
  c.err << rep.nodes.size() << " nodes in " << rep.seconds << " s on " << settings.jobs
        << " threads\n";
  return rep.violations.empty() ? exit_ok : exit_violation;
}

int cmd_verify(Context& c) {
  VerifySettings s;
  s.seed = static_cast<std::uint64_t>(c.cfg.integer("seed"));
  s.rotation_samples = c.cfg.integer("samples");
  s.multistarts = static_cast<int>(c.cfg.integer("multistarts"));
  s.search_budget = static_cast<int>(c.cfg.integer("search_budget"));
  const std::string& suite = c.cfg.str("suite");
  std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  bool ok = true;
  std::string log;
  for (const auto& n : names) {
    const auto r = run_suite(n, s);
    ok = ok && r.passed;
    c.out << r.name << ": " << (r.passed ? "pass" : "FAIL") << " (" << r.detail << ")\n";
    log += json{{"suite", r.name}, {"passed", r.passed}, {"checked", r.checked},
                {"failures", r.failures}, {"detail", r.detail}}
               .dump() +
           "\n";
  }
  write_text(c.dir() / "verify.jsonl", log);
  return ok ? exit_ok : exit_violation;
}

struct Command {
  std::string_view name;
  std::string_view help;
  std::function<int(Context&)> fn;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds{
      {"equilibria", "finite equilibria and their types -> equilibria.csv", cmd_equilibria},
      {"portrait", "phase portrait -> portrait.svg", cmd_portrait},
      {"cycles", "limit cycles on a section -> cycles.csv", cmd_cycles},
      {"continue", "continue a cycle in one parameter -> branch.csv, events.jsonl", cmd_continue},
      {"surface", "fold surface over two parameters -> surface.csv", cmd_surface},
      {"homoclinic", "separatrix loop in gamma -> homoclinic.csv, events.jsonl", cmd_homoclinic},
      {"sweep", "cycle counts over a parameter grid -> sweep.jsonl", cmd_sweep},
      {"verify", "structural property suites -> verify.jsonl", cmd_verify},
  };
  return cmds;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bifurcation analysis of the FitzHugh-Nagumo system", "fhn-bifurc"};
  app.require_subcommand(1);
  std::map<std::string, std::pair<CLI::App*, std::map<std::string, CLI::Option*>>> subs;
  std::map<std::string, std::string> values;
  std::string config_file;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(std::string(cmd.name), std::string(cmd.help));
    sub->add_option("--config", config_file, "key=value file; flags override it");
    std::map<std::string, CLI::Option*> opts;
    for (const auto& k : config_keys()) {
      const std::string key(k.name);
      opts[key] = sub->add_option(
          "--" + key, values[key], std::string(k.help) + " [" + std::string(k.fallback) + "]");
    }
    subs[std::string(cmd.name)] = {sub, std::move(opts)};
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ExtrasError& e) {
    err << "usage error: " << e.what() << "; " << valid_keys_message() << "\n";
    return exit_usage;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  }

  for (const auto& cmd : commands()) {
    auto& [sub, opts] = subs[std::string(cmd.name)];
    if (!sub->parsed()) continue;
    try {
      Context ctx{Config{}, out, err};
      if (!config_file.empty()) ctx.cfg.load_file(config_file);
      for (const auto& [key, opt] : opts)
        if (opt->count() > 0) ctx.cfg.set(key, values[key]);
      return cmd.fn(ctx);
    } catch (const usage_error& e) {
      err << "usage error: " << e.what() << "\n";
      return exit_usage;
    } catch (const std::domain_error& e) {
      err << "usage error: " << e.what() << "\n";
      return exit_usage;
    } catch (const std::exception& e) {
      err << "numerical failure: " << e.what() << "\n";
      return exit_numerical;
    }
  }
  err << "usage error: no subcommand\n";
  return exit_usage;
}

}  // namespace fhn::cli
