#include <doctest.h>

#include <cmath>

#include "fhn/continuation.hpp"
#include "fhn/equilibria.hpp"
#include "fhn/errors.hpp"

using namespace fhn;

namespace {

PlanarField lienard(double excitation = 0.1) {
  return PlanarField({0.0, 0.0, 1.0, excitation, 0.0}, Stage::cubic_lienard);
}

// Small unstable cycle nested in a stable one around O.
PlanarField two_cycle() { return PlanarField({0.302, 1.0, 0.1, 0.5, 0.2}); }

// Saddle S beyond O with a subcritical Hopf point of O at gamma = 0.2.
PlanarField homoclinic(double gamma) { return PlanarField({0.0, 3.0, 0.3, gamma, 0.2}); }

Section ray(const PlanarField& f, Vec2 dir = {1.0, 0.0}) { return make_section(f, {0.0, 0.0}, dir); }

LimitCycle first_cycle(const PlanarField& f, const Section& sec, std::size_t k = 0) {
  const auto found = find_cycles(f, sec, 0.02, 3.0, 60);
  REQUIRE(found.cycles.size() > k);
  return found.cycles[k];
}

const BranchEvent* find_event(const Branch& b, BranchEventKind kind) {
  for (const auto& e : b.events)
    if (e.kind == kind) return &e;
  return nullptr;
}

// Points strictly between two event indices, as (mu, amplitude) monotonicity.
bool amplitude_monotone(const Branch& b, std::size_t from, std::size_t to) {
  int sign = 0;
  for (std::size_t i = from + 1; i < to; ++i) {
    const double dmu = b.points[i].mu - b.points[i - 1].mu;
    const double da = b.points[i].amplitude - b.points[i - 1].amplitude;
    if (dmu == 0.0 || da == 0.0) return false;
    const int sg = (dmu > 0) == (da > 0) ? 1 : -1;
    if (sign != 0 && sg != sign) return false;
    sign = sg;
  }
  return true;
}

}  // namespace

TEST_CASE("Lienard family grows monotonically up to the scan edge") {
  const auto f = lienard();
  const auto c = first_cycle(f, ray(f));
  const auto b = continue_branch(c, Param::gamma, {0.0, 1.0});
  CHECK(b.termination == BranchEventKind::open_edge_of_scan);
  CHECK(b.points.back().mu == doctest::Approx(1.0));
  CHECK(b.points.size() > 10);
  CHECK(amplitude_monotone(b, 0, b.points.size()));
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    CHECK(b.points[i].mu > b.points[i - 1].mu);
    CHECK(b.points[i].amplitude > b.points[i - 1].amplitude);
  }
  const int sign = b.points.front().sensitivities[3] > 0 ? 1 : -1;
  for (const auto& p : b.points) CHECK(p.sensitivities[3] * sign > 0.0);
  const auto rep = classify_termination(b);
  CHECK(rep.kind == TerminationKind::open);
}

TEST_CASE("Lienard family shrinks onto O at its Hopf point") {
  const auto f = lienard();
  ContinuationOptions o;
  o.direction = -1;
  const auto b = continue_branch(first_cycle(f, ray(f)), Param::gamma, {-0.5, 1.0}, o);
  REQUIRE(b.termination == BranchEventKind::amplitude_to_zero);
  const auto* e = find_event(b, BranchEventKind::amplitude_to_zero);
  REQUIRE(e);
  CHECK(std::abs(e->mu) <= 1e-6);
  CHECK(amplitude_monotone(b, 0, b.points.size()));
  CHECK(classify_termination(b).kind == TerminationKind::singular_point);
}

TEST_CASE("Hopf endpoint of a branch agrees with the trace scan") {
  const auto f = homoclinic(0.19);
  const auto S = find_labeled(finite_equilibria(f), EquilibriumLabel::S);
  REQUIRE(S);
  const auto sec = ray(f, S->location);
  const auto b = continue_branch(first_cycle(f, sec), Param::gamma, {0.0, 0.3});
  REQUIRE(b.termination == BranchEventKind::amplitude_to_zero);
  const auto scan = hopf_scan(f, Param::gamma, {0.15, 0.25}, EquilibriumLabel::O);
  REQUIRE(scan.critical_values.size() == 1);
  CHECK(std::abs(b.events.back().mu - scan.critical_values[0]) <= 1e-6);
}

TEST_CASE("two-cycle nest folds in c") {
  const auto f = two_cycle();
  const auto sec = ray(f);
  const auto inner = first_cycle(f, sec, 0);
  const auto b = continue_branch(inner, Param::c, {0.05, 0.5});
  const auto* e = find_event(b, BranchEventKind::fold);
  REQUIRE(e);
  REQUIRE(e->fold);
  const FoldPoint& fp = *e->fold;
  CHECK(fp.converged);
  CHECK(std::abs(fp.d) <= 1e-8);
  CHECK(std::abs(fp.ds) <= 1e-8);
  CHECK(std::abs(fp.dss) > 1e-3);

  const auto m = multiplicity(f.with(Param::c, fp.mu), sec, fp.s, 1e-6);
  CHECK(m.m == Multiplicity::double_fold);

  // Beyond the fold the nest is empty; just before it both cycles remain.
  const auto past = find_cycles(f.with(Param::c, fp.mu + 1e-3), sec, 0.02, 3.0, 60);
  CHECK(past.cycles.empty());
  const auto before = find_cycles(f.with(Param::c, fp.mu - 1e-3), sec, 0.02, 3.0, 60);
  REQUIRE(before.cycles.size() == 2);
  CHECK(before.cycles[0].multiplier_ds * before.cycles[1].multiplier_ds < 0.0);

  // The arms on either side of the fold have opposite stability and each
  // is monotone in amplitude.
  const std::size_t k = e->at_point;
  REQUIRE(k >= 2);
  REQUIRE(k + 1 < b.points.size());
  CHECK(b.points[k - 1].multiplier * b.points[k].multiplier < 0.0);
  CHECK(amplitude_monotone(b, 0, k));
  CHECK(amplitude_monotone(b, k, b.points.size()));

  // The outer cycle reaches the same fold.
  const auto outer = continue_branch(first_cycle(f, sec, 1), Param::c, {0.05, 0.5});
  const auto* e2 = find_event(outer, BranchEventKind::fold);
  REQUIRE(e2);
  REQUIRE(e2->fold);
  CHECK(e2->fold->converged);
  CHECK(e2->fold->mu == doctest::Approx(fp.mu).epsilon(1e-9));
}

TEST_CASE("solve_fold does not collapse onto a Hopf point") {
  const auto f = two_cycle();
  const auto sec = ray(f);
  // A poor guess near the Hopf line gamma = a + delta.
  const auto fp = solve_fold(f, sec, Param::gamma, 0.56, 0.4752);
  if (fp.converged) CHECK(fp.s > 0.1);
}

TEST_CASE("unstable family ends in a small loop through the saddle") {
  const auto f = homoclinic(0.19);
  const auto S = find_labeled(finite_equilibria(f), EquilibriumLabel::S);
  REQUIRE(S);
  const auto sec = ray(f, S->location);
  ContinuationOptions o;
  o.direction = -1;
  const auto b = continue_branch(first_cycle(f, sec), Param::gamma, {0.0, 0.3}, o);
  REQUIRE(b.termination == BranchEventKind::period_blowup);
  const auto* e = find_event(b, BranchEventKind::period_blowup);
  REQUIRE(e);
  // Where the saddle's unstable branch switches from O to A.
  CHECK(e->mu > 0.120);
  CHECK(e->mu < 0.125);
  CHECK(b.points.back().period > 2.0 * b.points.front().period);
  CHECK(amplitude_monotone(b, 0, b.points.size()));
  const auto rep = classify_termination(b, Interval{0.120, 0.125});
  CHECK(rep.kind == TerminationKind::separatrix_cycle);
  CHECK(rep.confirmed_by_separatrix);
  CHECK_FALSE(classify_termination(b, Interval{0.15, 0.16}).confirmed_by_separatrix);
}

TEST_CASE("continuation is deterministic") {
  const auto f = two_cycle();
  const auto c = first_cycle(f, ray(f), 0);
  const auto a = continue_branch(c, Param::c, {0.05, 0.5});
  const auto b = continue_branch(c, Param::c, {0.05, 0.5});
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].mu == b.points[i].mu);
    CHECK(a.points[i].s0 == b.points[i].s0);
    CHECK(a.points[i].period == b.points[i].period);
  }
  CHECK(a.events.size() == b.events.size());
}

TEST_CASE("continue_branch rejects bad input") {
  const auto f = lienard();
  const auto c = first_cycle(f, ray(f));
  CHECK_THROWS_AS(continue_branch(c, Param::delta, {0.0, 1.0}), usage_error);
  CHECK_THROWS_AS(continue_branch(c, Param::gamma, {0.5, 1.0}), usage_error);
  ContinuationOptions o;
  o.direction = 0;
  CHECK_THROWS_AS(continue_branch(c, Param::gamma, {0.0, 1.0}, o), usage_error);
}

TEST_CASE("fold surface over (a, c)") {
  const PlanarField base({0.302, 1.0, 0.145, 0.4987, 0.2});
  const auto sec = ray(base);
  const auto seed = solve_fold(base, sec, Param::gamma, 0.5787, 0.4987);
  REQUIRE(seed.converged);
  FoldSurfaceGrid g;
  g.range1 = {0.298, 0.306};
  g.n1 = 3;
  g.range2 = {0.143, 0.147};
  g.n2 = 3;
  const auto surf = trace_fold_surface(base.with(Param::gamma, seed.mu), sec, seed, g);
  REQUIRE(surf.samples.size() == 9);
  int present = 0;
  for (const auto& x : surf.samples) {
    if (!x.present) continue;
    ++present;
    CHECK(x.residual_d <= 1e-8);
    CHECK(x.residual_ds <= 1e-8);
    const PlanarField q({x.p1, 1.0, x.p2, x.mu, 0.2});
    const auto again = displacement(q, sec, x.s0);
    REQUIRE(again.returned);
    CHECK(std::abs(again.d) <= std::max(10.0 * x.residual_d, 1e-12));
    CHECK(std::abs(again.slope) <= std::max(10.0 * x.residual_ds, 1e-10));

    // Two cycles on one side of the surface, none on the other.
    const double eps = 1e-4;
    const auto above = find_cycles(q.with(Param::gamma, x.mu + eps), sec, 0.02, 3.0, 60);
    const auto below = find_cycles(q.with(Param::gamma, x.mu - eps), sec, 0.02, 3.0, 60);
    const auto n_above = above.cycles.size(), n_below = below.cycles.size();
    CHECK(std::max(n_above, n_below) - std::min(n_above, n_below) == 2);
  }
  CHECK(present == 9);
  // The fold moves with the parameters, so the nodes differ.
  CHECK(surf.samples.front().mu != surf.samples.back().mu);
}

TEST_CASE("fold surface needs a converged seed") {
  FoldPoint none;
  FoldSurfaceGrid g;
  g.range1 = {0.29, 0.31};
  g.range2 = {0.14, 0.15};
  const auto f = two_cycle();
  const auto surf = trace_fold_surface(f, ray(f), none, g);
  CHECK_FALSE(surf.diagnostic.empty());
  for (const auto& x : surf.samples) CHECK_FALSE(x.present);
  g.n1 = 0;
  CHECK_THROWS_AS(trace_fold_surface(f, ray(f), none, g), usage_error);
}

TEST_CASE("cusp search finds no triple cycle and is reproducible") {
  CuspSearchOptions o;
  o.multistarts = 20;
  const FhnParams base{0.0, 1.0, 0.1, 0.0, 0.2};
  const auto a = search_cusp(base, CuspBox{}, {1.0, 0.0}, o);
  CHECK(a.candidates.empty());
  CHECK(a.newton_runs >= a.starts_with_cycles);
  const auto b = search_cusp(base, CuspBox{}, {1.0, 0.0}, o);
  CHECK(a.starts_with_cycles == b.starts_with_cycles);
  CHECK(a.newton_runs == b.newton_runs);
  CHECK(a.candidates.size() == b.candidates.size());
}

TEST_CASE("termination taxonomy") {
  Branch b;
  b.points.push_back({});
  b.points.back().mu = 0.7;
  b.termination = BranchEventKind::escaped;
  b.events.push_back({BranchEventKind::escaped, 0.65, 1.0, 1, std::nullopt});
  auto r = classify_termination(b);
  CHECK(r.kind == TerminationKind::unbounded);
  CHECK(r.end_mu == 0.65);
  b.termination = BranchEventKind::truncated;
  CHECK(classify_termination(b).kind == TerminationKind::truncated);
  b.termination = BranchEventKind::open_edge_of_scan;
  b.possible_cyclic = true;
  r = classify_termination(b);
  CHECK(r.kind == TerminationKind::open);
  CHECK(r.possible_cyclic);
  CHECK(r.end_mu == 0.7);
  b.termination = BranchEventKind::amplitude_to_zero;
  CHECK_FALSE(classify_termination(b, Interval{0.6, 0.8}).confirmed_by_separatrix);
}
