#include <doctest.h>

#include <cmath>

#include "fhn/cycles.hpp"
#include "fhn/equilibria.hpp"
#include "fhn/errors.hpp"

using namespace fhn;

namespace {

PlanarField lienard(double excitation = 0.1) {
  return PlanarField({0.0, 0.0, 1.0, excitation, 0.0}, Stage::cubic_lienard);
}

// One equilibrium at O with a small unstable cycle inside a stable one.
PlanarField two_cycle() { return PlanarField({0.302, 1.0, 0.1, 0.5, 0.2}); }

Section ray_from_origin(const PlanarField& f, Vec2 dir = {1.0, 0.0}) {
  return make_section(f, {0.0, 0.0}, dir);
}

double fd_slope(const PlanarField& f, const Section& sec, double s, double h = 1e-5) {
  const auto p = displacement(f, sec, s + h), m = displacement(f, sec, s - h);
  REQUIRE(p.returned);
  REQUIRE(m.returned);
  return (p.d - m.d) / (2.0 * h);
}

double fd_param(const PlanarField& f, const Section& sec, double s, Param which,
                double h = 1e-5) {
  const double v = f.params().get(which);
  const auto p = displacement(f.with(which, v + h), sec, s);
  const auto m = displacement(f.with(which, v - h), sec, s);
  REQUIRE(p.returned);
  REQUIRE(m.returned);
  return (p.d - m.d) / (2.0 * h);
}

bool close_rel(double a, double b, double rel, double abs_floor = 1e-8) {
  return std::abs(a - b) <= std::max(rel * std::abs(b), abs_floor);
}

}  // namespace

TEST_CASE("displacement vanishes on centers") {
  const PlanarField rev({0.0, 1.0, 0.0, 0.0, 0.0}, Stage::reversible_quadratic);
  const auto sec = ray_from_origin(rev);
  const auto x = displacement(rev, sec, 0.3);
  REQUIRE(x.returned);
  CHECK(std::abs(x.d) <= 1e-7);
  CHECK(x.d == x.h - x.s);

  const PlanarField harmonic({0.5, 0.0, 0.0, 0.5, 0.0}, Stage::hopf_quadratic);
  for (double s : {0.1, 0.5, 0.9}) {
    const auto y = displacement(harmonic, ray_from_origin(harmonic), s);
    REQUIRE(y.returned);
    CHECK(std::abs(y.d) <= 1e-9);
    CHECK(y.return_time == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
  }
}

TEST_CASE("displacement contracts outside the Lienard cycle") {
  const auto f = lienard();
  const auto sec = ray_from_origin(f);
  const auto x = displacement(f, sec, 5.0);
  REQUIRE(x.returned);
  CHECK(x.d < 0.0);
  const auto inner = displacement(f, sec, 0.05);
  REQUIRE(inner.returned);
  CHECK(inner.d > 0.0);
}

TEST_CASE("displacement reports missing returns") {
  // Stable node at O: nothing comes back around.
  const PlanarField node({3.0, 0.0, 1.0, 0.0, 0.0}, Stage::cubic_lienard);
  const auto sec = make_section(node, {0, 0}, {0.0, 1.0});
  const auto x = displacement(node, sec, 0.5);
  CHECK_FALSE(x.returned);
}

TEST_CASE("Lienard stage has exactly one stable cycle") {
  const auto f = lienard();
  const auto found = find_cycles(f, ray_from_origin(f), 0.02, 3.0, 30);
  REQUIRE(found.cycles.size() == 1);
  const auto& c = found.cycles[0];
  CHECK_FALSE(found.continuum);
  CHECK(c.stability == CycleStability::stable);
  CHECK(c.multiplier_ds < 0.0);
  CHECK(std::abs(displacement(f, c.section, c.s0).d) <= 1e-10);
  CHECK(distance(c.at(c.period), c.at(0.0)) <= 1e-7);
  CHECK(c.orientation == 1);
  CHECK(c.amplitude >= c.s0);
  CHECK(c.amplitude == doctest::Approx(0.365).epsilon(0.02));
}

TEST_CASE("reversible stage is a continuum, not cycles") {
  const PlanarField rev({0.0, 1.0, 0.0, 0.0, 0.0}, Stage::reversible_quadratic);
  const auto found = find_cycles(rev, ray_from_origin(rev), 0.05, 0.4, 12);
  CHECK(found.continuum);
  CHECK(found.cycles.empty());
  const auto m = multiplicity(rev, ray_from_origin(rev), 0.2, 1e-6);
  CHECK(m.m == Multiplicity::inconclusive);
}

TEST_CASE("two nested cycles of opposite stability") {
  const auto f = two_cycle();
  const auto sec = ray_from_origin(f);
  const auto found = find_cycles(f, sec, 0.02, 3.0, 60);
  REQUIRE(found.cycles.size() == 2);
  const auto& in = found.cycles[0];
  const auto& out = found.cycles[1];
  CHECK(in.stability == CycleStability::unstable);
  CHECK(out.stability == CycleStability::stable);
  CHECK(in.amplitude < out.amplitude);
  // Inner orbit lies inside the outer one, and both wind around O.
  const auto outer_loop = out.polyline(400);
  for (const auto& p : in.polyline(50)) CHECK(winding_number(outer_loop, p) != 0);
  CHECK(winding_number(in.polyline(400), {0, 0}) != 0);
}

TEST_CASE("a cycle completed in reversed time describes the forward cycle") {
  const auto f = two_cycle();
  const auto sec = ray_from_origin(f);
  const auto found = find_cycles(f, sec, 0.02, 3.0, 60);
  REQUIRE(found.cycles.size() == 2);
  const auto& fwd = found.cycles[0];
  CycleOptions back;
  back.crossing.integrator.backward = true;
  const auto rev = complete_cycle(f, sec, fwd.s0, back);
  CHECK(rev.reversed);
  CHECK(rev.period == doctest::Approx(fwd.period).epsilon(1e-9));
  CHECK(rev.amplitude == doctest::Approx(fwd.amplitude).epsilon(1e-9));
  CHECK(rev.orientation == fwd.orientation);
  CHECK(rev.multiplier_ds == doctest::Approx(fwd.multiplier_ds).epsilon(1e-7));
  for (double t : {0.0, 0.3, 0.5, 0.9}) CHECK(distance(rev.at(t * fwd.period), fwd.at(t * fwd.period)) < 1e-7);
  const auto a = parameter_sensitivities(fwd), b = parameter_sensitivities(rev);
  for (std::size_t k = 0; k < 5; ++k) CHECK(close_rel(b[k], a[k], 1e-7));
}

TEST_CASE("multiplier agrees with finite differences") {
  const auto f = lienard();
  for (double e : {0.05, 0.1, 0.3}) {
    const auto fe = lienard(e);
    const auto sec = ray_from_origin(fe);
    const auto found = find_cycles(fe, sec, 0.02, 3.0, 30);
    REQUIRE(found.cycles.size() == 1);
    const auto& c = found.cycles[0];
    CHECK(close_rel(cycle_multiplier(c), fd_slope(fe, sec, c.s0), 1e-4));
    CHECK(close_rel(displacement(fe, sec, c.s0).slope, c.multiplier_ds, 1e-6));
  }
  (void)f;
}

TEST_CASE("analytic slope matches finite differences away from cycles") {
  const auto f = two_cycle();
  const auto sec = ray_from_origin(f);
  for (double s : {0.1, 0.4, 0.9}) {
    const auto x = displacement(f, sec, s);
    REQUIRE(x.returned);
    CHECK(close_rel(x.slope, fd_slope(f, sec, s), 1e-5));
  }
}

TEST_CASE("parameter sensitivities agree with finite differences") {
  const auto f = lienard();
  const auto sec = ray_from_origin(f);
  const auto c = find_cycles(f, sec, 0.02, 3.0, 30).cycles.at(0);
  for (Param p : {Param::gamma, Param::a, Param::c}) {
    const double analytic = parameter_sensitivity(c, p);
    CHECK(close_rel(analytic, fd_param(f, sec, c.s0, p), 1e-3));
  }
  CHECK(parameter_sensitivity(c, Param::gamma) > 0.0);
  CHECK(parameter_sensitivity(c, Param::delta) == 0.0);

  const auto g = two_cycle();
  const auto gsec = ray_from_origin(g);
  for (const auto& cyc : find_cycles(g, gsec, 0.02, 3.0, 60).cycles) {
    for (Param p : {Param::gamma, Param::a, Param::b, Param::c, Param::delta})
      CHECK(close_rel(parameter_sensitivity(cyc, p), fd_param(g, gsec, cyc.s0, p), 1e-3));
  }
}

TEST_CASE("cycles do not depend on the section direction") {
  // The big outer cycle is not star-shaped; rays between roughly 25 and 65
  // degrees meet it twice in the same direction, so turn the other way.
  auto compare = [](const PlanarField& f, double angle, double s_max, int n) {
    const auto base = find_cycles(f, ray_from_origin(f), 0.02, s_max, n);
    const auto turned = find_cycles(f, ray_from_origin(f, rotated({1, 0}, angle)), 0.02, s_max, n);
    REQUIRE(!base.cycles.empty());
    REQUIRE(base.cycles.size() == turned.cycles.size());
    for (std::size_t i = 0; i < base.cycles.size(); ++i) {
      CHECK(close_rel(turned.cycles[i].period, base.cycles[i].period, 1e-6, 0.0));
      CHECK(std::abs(turned.cycles[i].amplitude - base.cycles[i].amplitude) <= 1e-5);
    }
  };
  compare(two_cycle(), -M_PI / 6, 3.0, 60);
  compare(lienard(), M_PI / 6, 3.0, 30);
}

TEST_CASE("multiplicity of a hyperbolic cycle is one") {
  const auto f = lienard();
  const auto sec = ray_from_origin(f);
  const auto c = find_cycles(f, sec, 0.02, 3.0, 30).cycles.at(0);
  CHECK(multiplicity(f, sec, c.s0, 1e-6).m == Multiplicity::simple);
}

TEST_CASE("winding and area helpers") {
  std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(sq) == doctest::Approx(1.0));
  CHECK(winding_number(sq, {0.5, 0.5}) == 1);
  CHECK(winding_number(sq, {2, 2}) == 0);
  std::reverse(sq.begin(), sq.end());
  CHECK(signed_area(sq) == doctest::Approx(-1.0));
  CHECK(winding_number(sq, {0.5, 0.5}) == -1);
}

TEST_CASE("find_cycles rejects bad ranges") {
  const auto f = lienard();
  CHECK_THROWS_AS(find_cycles(f, ray_from_origin(f), 0.0, 1.0, 10), usage_error);
  CHECK_THROWS_AS(find_cycles(f, ray_from_origin(f), 0.5, 0.4, 10), usage_error);
  CHECK_THROWS_AS(complete_cycle(PlanarField({3.0, 0, 1, 0, 0}, Stage::cubic_lienard),
                                 make_section(PlanarField({3.0, 0, 1, 0, 0}, Stage::cubic_lienard),
                                              {0, 0}, {0, 1}),
                                 0.5),
                  numerical_error);
}
