#include "fhn/cli/search.hpp"

#include <random>

#include "fhn/errors.hpp"

namespace fhn::cli {

bool is_two_cycle_nest(const PlanarField& field, const Section& sec,
                       std::vector<LimitCycle>* cycles) {
  CycleOptions opt;
  opt.max_return_time = 200.0;
  const auto cs = find_cycles(field, sec, 0.005, 3.0, 60, opt);
  if (cycles) *cycles = cs.cycles;
  if (cs.cycles.size() != 2 || cs.continuum) return false;
  const double m0 = cs.cycles[0].multiplier_ds, m1 = cs.cycles[1].multiplier_ds;
  return (m0 < 0.0) != (m1 < 0.0) && m0 != 0.0 && m1 != 0.0;
}

TwoCycleResult search_two_cycles(const TwoCycleBox& box, int budget, std::uint64_t seed) {
  if (budget <= 0) throw usage_error("search_two_cycles: budget must be positive");
  std::mt19937_64 rng(seed);
  auto draw = [&rng](Interval i) { return std::uniform_real_distribution<double>(i.lo, i.hi)(rng); };
  TwoCycleResult out;
  for (int k = 0; k < budget; ++k) {
    ++out.tried;
    FhnParams p;
    p.a = draw(box.a);
    p.b = draw(box.b);
    p.c = draw(box.c);
    p.delta = box.delta;
    p.gamma = p.a + p.delta - draw(box.hopf_gap);
    if (p.gamma < 0.0) continue;
    const PlanarField f(p);
    try {
      const Section sec = make_section(f, {0.0, 0.0}, {1.0, 0.0});
      std::vector<LimitCycle> cycles;
      if (!is_two_cycle_nest(f, sec, &cycles)) continue;
      out.found = true;
      out.params = p;
      out.section = sec;
      out.cycles = std::move(cycles);
      return out;
    } catch (const std::exception&) {
    }
  }
  return out;
}

}  // namespace fhn::cli
