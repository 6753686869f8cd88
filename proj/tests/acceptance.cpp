// One line per acceptance criterion; exit status 1 when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fhn/continuation.hpp"
#include "fhn/cycles.hpp"
#include "fhn/equilibria.hpp"
#include "fhn/cli/search.hpp"
#include "fhn/cli/sweep.hpp"
#include "fhn/cli/verify.hpp"

using namespace fhn;
using namespace fhn::cli;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Section ray(const PlanarField& f, Vec2 dir = {1.0, 0.0}) { return make_section(f, {0, 0}, dir); }

struct Sample {
  PlanarField field;
  Section section;
  LimitCycle cycle;
};

// Hyperbolic cycles on the Lienard stage and in the two-cycle nest.
std::vector<Sample> test_cycles() {
  std::vector<Sample> out;
  for (double e : {0.05, 0.1, 0.3, 0.6}) {
    const PlanarField f({0.0, 0.0, 1.0, e, 0.0}, Stage::cubic_lienard);
    const Section sec = ray(f);
    for (const auto& c : find_cycles(f, sec, 0.02, 4.0, 30).cycles) out.push_back({f, sec, c});
  }
  const PlanarField g(kTwoCycleFixture);
  const Section sec = ray(g);
  for (const auto& c : find_cycles(g, sec, 0.005, 3.0, 60).cycles) out.push_back({g, sec, c});
  return out;
}

double fd_s(const Sample& x, double h = 1e-5) {
  const auto p = displacement(x.field, x.section, x.cycle.s0 + h);
  const auto m = displacement(x.field, x.section, x.cycle.s0 - h);
  return p.returned && m.returned ? (p.d - m.d) / (2.0 * h) : NAN;
}

double fd_mu(const Sample& x, Param which, double h = 1e-5) {
  const double v = x.field.params().get(which);
  const auto p = displacement(x.field.with(which, v + h), x.section, x.cycle.s0);
  const auto m = displacement(x.field.with(which, v - h), x.section, x.cycle.s0);
  return p.returned && m.returned ? (p.d - m.d) / (2.0 * h) : NAN;
}

Outcome suite(const std::string& name) {
  const auto r = run_suite(name, VerifySettings{});
  return {r.passed, r.detail};
}

Outcome multiplier_oracle() {
  const auto cases = test_cycles();
  int ok = 0;
  double worst = 0.0;
  for (const auto& x : cases) {
    const double fd = fd_s(x), m = cycle_multiplier(x.cycle);
    worst = std::max(worst, std::abs(m - fd) / std::abs(fd));
    ok += close_rel(m, fd, 1e-4);
  }
  return {cases.size() >= 5 && ok == static_cast<int>(cases.size()),
          std::to_string(ok) + "/" + std::to_string(cases.size()) + " cycles, worst rel " +
              sci(worst)};
}

// Does the gamma sensitivity of d keep one sign along the branch?
bool one_sign(const Branch& b) {
  int sign = 0;
  for (const auto& p : b.points) {
    const double g = p.sensitivities[3];
    if (g == 0.0) return false;
    const int s = g > 0 ? 1 : -1;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return !b.points.empty();
}

Outcome sensitivity_oracle() {
  const auto cases = test_cycles();
  int ok = 0;
  double worst = 0.0;
  for (const auto& x : cases) {
    bool good = true;
    for (Param p : {Param::gamma, Param::a}) {
      const double fd = fd_mu(x, p), an = parameter_sensitivity(x.cycle, p);
      worst = std::max(worst, std::abs(an - fd) / std::abs(fd));
      good = good && close_rel(an, fd, 1e-3);
    }
    ok += good;
  }
  // Branches: Lienard family in gamma, both two-cycle arms in c.
  const PlanarField f({0.0, 0.0, 1.0, 0.3, 0.0}, Stage::cubic_lienard);
  ContinuationOptions down;
  down.direction = -1;
  const auto lb = continue_branch(find_cycles(f, ray(f), 0.02, 3.0, 30).cycles.at(0), Param::gamma,
                                  {0.0, 1.0}, down);
  const PlanarField g(kTwoCycleFixture);
  const auto nest = find_cycles(g, ray(g), 0.005, 3.0, 60).cycles;
  int signed_branches = one_sign(lb);
  for (const auto& c : nest) signed_branches += one_sign(continue_branch(c, Param::c, {0.05, 0.5}));
  const bool pass = ok == static_cast<int>(cases.size()) && nest.size() == 2 && signed_branches == 3;
  return {pass, std::to_string(ok) + "/" + std::to_string(cases.size()) + " cycles, worst rel " +
                    sci(worst) + ", " + std::to_string(signed_branches) +
                    "/3 branches keep the gamma sign"};
}

Outcome two_cycles() {
  const auto found = search_two_cycles(TwoCycleBox{}, 400, 1);
  const PlanarField fixture(kTwoCycleFixture);
  const bool frozen = is_two_cycle_nest(fixture, ray(fixture));
  char buf[200];
  std::snprintf(buf, sizeof buf, "search %s after %d candidates, frozen fixture %s",
                found.found ? "found" : "failed", found.tried, frozen ? "holds" : "lost");
  return {found.found && frozen, buf};
}

struct FoldRun {
  std::vector<Branch> branches;
  std::vector<FoldPoint> folds;
};

FoldRun fold_runs() {
  FoldRun r;
  const PlanarField g(kTwoCycleFixture);
  for (const auto& c : find_cycles(g, ray(g), 0.005, 3.0, 60).cycles) {
    r.branches.push_back(continue_branch(c, Param::c, {0.05, 0.5}));
    for (const auto& e : r.branches.back().events)
      if (e.kind == BranchEventKind::fold && e.fold) r.folds.push_back(*e.fold);
  }
  return r;
}

Outcome fold_in_c(const FoldRun& run) {
  const PlanarField g(kTwoCycleFixture);
  if (run.folds.empty()) return {false, "no fold event"};
  bool ok = true;
  double worst = 0.0;
  for (const auto& fp : run.folds) {
    worst = std::max({worst, std::abs(fp.d), std::abs(fp.ds)});
    ok = ok && fp.converged && std::abs(fp.d) <= 1e-8 && std::abs(fp.ds) <= 1e-8;
  }
  const double mu = run.folds.front().mu;
  const auto past = find_cycles(g.with(Param::c, mu + 1e-3), ray(g), 0.005, 3.0, 60);
  ok = ok && past.cycles.empty();
  char buf[200];
  std::snprintf(buf, sizeof buf, "c* = %.10f, worst residual %.2e, %zu cycles beyond", mu, worst,
                past.cycles.size());
  return {ok, buf};
}

Outcome monotone_families(const FoldRun& run) {
  int segments = 0, good = 0;
  for (const auto& b : run.branches) {
    std::vector<std::size_t> cuts{0};
    for (const auto& e : b.events) cuts.push_back(e.at_point);
    cuts.push_back(b.points.size());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const std::size_t from = cuts[k], to = cuts[k + 1];
      if (to - from < 2) continue;
      ++segments;
      int sign = 0;
      bool mono = true;
      for (std::size_t i = from + 1; i < to; ++i) {
        const double dmu = b.points[i].mu - b.points[i - 1].mu;
        const double da = b.points[i].amplitude - b.points[i - 1].amplitude;
        if (dmu == 0.0 || da == 0.0) {
          mono = false;
          break;
        }
        const int s = (dmu > 0) == (da > 0) ? 1 : -1;
        mono = mono && (sign == 0 || s == sign);
        sign = s;
      }
      good += mono;
    }
  }
  return {segments > 0 && good == segments,
          std::to_string(good) + "/" + std::to_string(segments) + " segments strictly monotone"};
}

Outcome sweep_bound() {
  SweepSettings s;
  s.cycle.crossing.integrator.tol = 1e-10;
  s.cycle.max_return_time = 200.0;
  s.jobs = resolve_jobs(0);
  const auto rep = sweep(SweepGrid{}, s);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu nodes on %d threads, max_count %d, %d failed, %zu violations",
                rep.nodes.size(), s.jobs, rep.max_count, rep.failed_nodes, rep.violations.size());
  return {rep.nodes.size() == 5082 && rep.max_count <= 2 && rep.violations.empty(), buf};
}

Outcome section_invariance() {
  int checks = 0, ok = 0;
  auto compare = [&](const PlanarField& f, double s_min, double s_max, int n,
                     std::vector<double> angles) {
    const auto base = find_cycles(f, ray(f), s_min, s_max, n).cycles;
    for (double angle : angles) {
      const auto turned = find_cycles(f, ray(f, rotated({1, 0}, angle)), s_min, s_max, n).cycles;
      ++checks;
      bool good = !base.empty() && base.size() == turned.size();
      for (std::size_t i = 0; good && i < base.size(); ++i)
        good = close_rel(turned[i].period, base[i].period, 1e-6) &&
               close_rel(turned[i].amplitude, base[i].amplitude, 1e-5);
      ok += good;
    }
  };
  for (double e : {0.1, 0.4, 0.8})
    compare(PlanarField({0.0, 0.0, 1.0, e, 0.0}, Stage::cubic_lienard), 0.02, 4.0, 40,
            {0.7, 1.9, 3.3, 5.1});
  compare(PlanarField(kTwoCycleFixture), 0.005, 3.0, 60, {-0.5, -0.25, 3.0});
  return {ok == checks, std::to_string(ok) + "/" + std::to_string(checks) + " rotated sections"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;  // 0 when there is no runtime bound
    std::function<Outcome()> run;
  };
  FoldRun folds;
  const std::vector<Criterion> all{
      {"C1 rotation determinant signs", 5.0, [] { return suite("rotation"); }},
      {"C2 multiplier vs finite differences", 60.0, multiplier_oracle},
      {"C3 parameter sensitivities vs finite differences", 120.0, sensitivity_oracle},
      {"C4 Hopf locus a = gamma", 0.0, [] { return suite("hopf"); }},
      {"C5 index balance and additivity", 0.0, [] { return suite("index"); }},
      {"C6 singular points at infinity", 0.0, [] { return suite("infinity"); }},
      {"C7 two nested cycles", 0.0, two_cycles},
      {"C8 fold of cycles in c", 0.0,
       [&] {
         folds = fold_runs();
         return fold_in_c(folds);
       }},
      {"C9 monotone families", 0.0, [&] { return monotone_families(folds); }},
      {"C10 no triple cycle in 200 multistarts", 0.0, [] { return suite("cusp"); }},
      {"C11 default sweep max_count <= 2", 1800.0, sweep_bound},
      {"C12 section invariance", 0.0, section_invariance},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s  %-50s %8.2f s  %s%s\n", pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str(),
                in_time ? "" : " (over time limit)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
