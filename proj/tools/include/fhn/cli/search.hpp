#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fhn/cycles.hpp"

namespace fhn::cli {

struct TwoCycleBox {
  Interval a{0.0, 0.5};
  Interval b{0.0, 2.0};
  Interval c{0.05, 0.5};
  /// gamma sits this far below the Hopf line gamma = a + delta of O.
  Interval hopf_gap{1e-3, 2e-2};
  double delta = 0.2;
};

struct TwoCycleResult {
  bool found = false;
  FhnParams params;
  Section section;
  std::vector<LimitCycle> cycles;
  int tried = 0;
};

/// Exactly two cycles on the section, with multipliers of opposite sign.
bool is_two_cycle_nest(const PlanarField& field, const Section& sec,
                       std::vector<LimitCycle>* cycles = nullptr);

/// Random candidates just below the Hopf line of O, where a subcritical Hopf
/// point leaves a small unstable cycle inside a stable one, tested on the ray
/// from O along +x. Deterministic for a given seed.
TwoCycleResult search_two_cycles(const TwoCycleBox& box, int budget, std::uint64_t seed);

/// Two-cycle configuration from the search region, kept as a regression fixture.
inline constexpr FhnParams kTwoCycleFixture{0.302, 1.0, 0.1, 0.5, 0.2};

}  // namespace fhn::cli
