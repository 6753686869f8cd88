#include "fhn/cli/verify.hpp"

#include <cmath>
#include <random>

#include "fhn/continuation.hpp"
#include "fhn/cycles.hpp"
#include "fhn/equilibria.hpp"
#include "fhn/errors.hpp"
#include "fhn/cli/search.hpp"

namespace fhn::cli {

namespace {

struct Tally {
  SuiteResult r;
  explicit Tally(std::string name) { r.name = std::move(name); }
  void check(bool ok, const std::string& what) {
    ++r.checked;
    if (ok) return;
    if (r.failures++ < 5) r.detail += (r.detail.empty() ? "" : "; ") + what;
  }
  SuiteResult done() {
    r.passed = r.failures == 0 && r.checked > 0;
    if (r.passed && r.detail.empty()) r.detail = std::to_string(r.checked) + " checks";
    return r;
  }
};

std::string show(const FhnParams& p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g, %.6g, %.6g)", p.a, p.b, p.c, p.gamma, p.delta);
  return buf;
}

SuiteResult rotation(const VerifySettings& s) {
  Tally t("rotation");
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0), x(-5.0, 5.0);
  for (long i = 0; i < s.rotation_samples; ++i) {
    const FhnParams p{u(rng), u(rng), u(rng), u(rng), u(rng)};
    Vec2 q{x(rng), x(rng)};
    if (i % 10 == 0) q.x = p.delta * q.y;
    const PlanarField full(p);
    const double dg = rotation_determinant(full, Param::gamma, q);
    t.check(dg <= 0.0 && (dg == 0.0) == (full.velocity(q).y == 0.0), "gamma at " + show(p));
    if (i % 10 == 1) q.x = 0.0;
    const PlanarField lienard(p, Stage::cubic_lienard);
    const double da = rotation_determinant(lienard, Param::a, q);
    const double dc = rotation_determinant(lienard, Param::c, q);
    t.check(da >= 0.0 && (da == 0.0) == (q.x == 0.0), "a at " + show(p));
    t.check(dc >= 0.0 && (dc == 0.0) == (q.x == 0.0), "c at " + show(p));
  }
  return t.done();
}

FhnParams nonnegative(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0), uc(0.05, 2.0), ud(0.05, 1.5);
  FhnParams p;
  p.a = u(rng);
  p.b = 3.0 * u(rng);
  p.c = uc(rng);
  p.gamma = u(rng);
  p.delta = ud(rng);
  return p;
}

bool simple(const std::vector<Equilibrium>& eqs) {
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    if (std::abs(eqs[i].jacobian.det()) <= 1e-6 ||
        eqs[i].kind == EquilibriumKind::center_candidate)
      return false;
    for (std::size_t j = i + 1; j < eqs.size(); ++j)
      if (distance(eqs[i].location, eqs[j].location) < 1e-3) return false;
  }
  return true;
}

SuiteResult index(const VerifySettings& s) {
  Tally t("index");
  std::mt19937_64 rng(s.seed);
  int tested = 0;
  while (tested < 500) {
    const FhnParams p = nonnegative(rng);
    const PlanarField f(p);
    const auto eqs = finite_equilibria(f);
    if (!simple(eqs)) continue;
    ++tested;
    const auto bal = index_balance(p);
    t.check(bal.applicable && bal.holds, "balance at " + show(p));
    double sep = 1.0, reach = 0.0;
    Vec2 centroid{};
    for (const auto& e : eqs) centroid += e.location / static_cast<double>(eqs.size());
    for (std::size_t i = 0; i < eqs.size(); ++i)
      for (std::size_t j = i + 1; j < eqs.size(); ++j)
        sep = std::min(sep, distance(eqs[i].location, eqs[j].location));
    for (const auto& e : eqs) reach = std::max(reach, distance(e.location, centroid));
    int sum = 0;
    for (const auto& e : eqs) {
      const int j = poincare_index(f, Circle{e.location, 0.25 * sep});
      t.check(j == e.index, "local index at " + show(p));
      sum += j;
    }
    t.check(poincare_index(f, Circle{centroid, reach + 1.0}) == sum, "additivity at " + show(p));
  }
  return t.done();
}

SuiteResult infinity(const VerifySettings& s) {
  Tally t("infinity");
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    FhnParams p{u(rng), u(rng), u(rng), u(rng), u(rng)};
    if (p.c == 0.0) p.c = 1.0;
    const auto inf = infinite_singularities(p);
    const bool ok = !inf.degraded && inf.points.size() == 2 &&
                    inf.points[0].chart == InfiniteChart::u_chart &&
                    inf.points[0].location == 0.0 &&
                    inf.points[0].kind == InfiniteKind::simple_node &&
                    inf.points[1].chart == InfiniteChart::v_chart &&
                    inf.points[1].location == 0.0 &&
                    inf.points[1].kind == InfiniteKind::triple_saddle;
    t.check(ok, "at " + show(p));
  }
  return t.done();
}

SuiteResult hopf(const VerifySettings& s) {
  Tally t("hopf");
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double gamma = u(rng);
    const PlanarField f(FhnParams{0.0, 1.0, 0.0, gamma, 0.0}, Stage::hopf_quadratic);
    const auto scan = hopf_scan(f, Param::a, {0.0, 2.0 * gamma + 0.1}, EquilibriumLabel::O);
    t.check(scan.critical_values.size() == 1 &&
                std::abs(scan.critical_values[0] - gamma) <= 1e-8,
            "gamma " + std::to_string(gamma));
  }
  return t.done();
}

SuiteResult section(const VerifySettings&) {
  Tally t("section");
  for (double excitation : {0.1, 0.4, 0.8}) {
    const PlanarField f(FhnParams{0.0, 0.0, 1.0, excitation, 0.0}, Stage::cubic_lienard);
    const auto ref = find_cycles(f, make_section(f, {0, 0}, {1, 0}), 0.02, 4.0, 40);
    t.check(ref.cycles.size() == 1, "reference cycle at " + std::to_string(excitation));
    if (ref.cycles.size() != 1) continue;
    for (double angle : {0.7, 1.9, 3.3, 5.1}) {
      const auto c = find_cycles(f, make_section(f, {0, 0}, rotated({1, 0}, angle)), 0.02, 4.0, 40);
      const bool ok = c.cycles.size() == 1 &&
                      std::abs(c.cycles[0].period - ref.cycles[0].period) <=
                          1e-6 * ref.cycles[0].period &&
                      std::abs(c.cycles[0].amplitude - ref.cycles[0].amplitude) <=
                          1e-5 * ref.cycles[0].amplitude;
      t.check(ok, "rotation " + std::to_string(angle));
    }
  }
  return t.done();
}

SuiteResult cusp(const VerifySettings& s) {
  Tally t("cusp");
  CuspSearchOptions o;
  o.multistarts = s.multistarts;
  o.seed = s.seed;
  const auto res = search_cusp(FhnParams{0.0, 1.0, 0.1, 0.0, 0.2}, CuspBox{}, {1.0, 0.0}, o);
  for (const auto& c : res.candidates) {
    const bool verified = c.reproduced && c.residuals[0] <= 1e-8 && c.residuals[1] <= 1e-8 &&
                          c.residuals[2] <= 1e-8;
    t.check(!verified, "verified triple cycle at " + show(c.params));
  }
  t.check(true, "");
  auto r = t.done();
  r.detail = std::to_string(s.multistarts) + " starts, " + std::to_string(res.starts_with_cycles) +
             " with cycles, " + std::to_string(res.candidates.size()) + " candidates" +
             (r.passed ? "" : "; " + r.detail);
  return r;
}

SuiteResult twocycle(const VerifySettings& s) {
  Tally t("twocycle");
  const auto found = search_two_cycles(TwoCycleBox{}, s.search_budget, s.seed);
  t.check(found.found, "no two-cycle nest within " + std::to_string(s.search_budget) + " candidates");
  const PlanarField fixture(kTwoCycleFixture);
  t.check(is_two_cycle_nest(fixture, make_section(fixture, {0, 0}, {1, 0})),
          "fixture " + show(kTwoCycleFixture) + " lost its two cycles");
  auto r = t.done();
  if (found.found)
    r.detail = "found " + show(found.params) + " after " + std::to_string(found.tried) +
               " candidates" + (r.passed ? "" : "; " + r.detail);
  return r;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"rotation", "index", "infinity", "hopf", "section", "cusp", "twocycle"};
}

SuiteResult run_suite(const std::string& name, const VerifySettings& s) {
  if (name == "rotation") return rotation(s);
  if (name == "index") return index(s);
  if (name == "infinity") return infinity(s);
  if (name == "hopf") return hopf(s);
  if (name == "section") return section(s);
  if (name == "cusp") return cusp(s);
  if (name == "twocycle") return twocycle(s);
  std::string msg = "unknown suite '" + name + "'; valid suites: all";
  for (const auto& n : suite_names()) msg += ", " + n;
  throw usage_error(msg);
}

}  // namespace fhn::cli
