#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fhn/cycles.hpp"
#include "fhn/equilibria.hpp"
#include "fhn/cli/config.hpp"

namespace fhn::cli {

struct SweepGrid {
  Span a{0.0, 1.0, 11};
  Span c{0.1, 1.1, 11};
  Span gamma{0.0, 1.0, 21};
  std::vector<std::pair<double, double>> slices{{1.0, 0.2}, {3.0, 0.2}};
  Stage stage = Stage::full;

  std::size_t size() const noexcept {
    return slices.size() * static_cast<std::size_t>(a.n) * static_cast<std::size_t>(c.n) *
           static_cast<std::size_t>(gamma.n);
  }
  /// Node index order: slice, a, c, gamma (gamma fastest).
  FhnParams node(std::size_t i) const;
};

struct SweepSettings {
  CycleOptions cycle{};
  int n_scan = 40;
  double s_min = 1e-3;
  /// Outer scans reach at least this far from the equilibrium centroid.
  double outer_radius = 50.0;
  int cycle_bound = 2;
  int jobs = 1;
};

struct NestCount {
  int around_o = 0;
  int around_a = 0;
  int outer = 0;
  int total() const noexcept { return around_o + around_a + outer; }
  int largest() const noexcept { return std::max({around_o, around_a, outer}); }
};

struct NodeResult {
  std::size_t index = 0;
  FhnParams params;
  int equilibria = 0;
  NestCount nests;
  /// Cycle multipliers per nest, innermost first.
  std::vector<double> multipliers_o, multipliers_a, multipliers_outer;
  std::vector<std::string> events;
  bool failed = false;
  std::string error;
};

struct SweepReport {
  SweepGrid grid;
  std::vector<NodeResult> nodes;  ///< sorted by index
  int max_count = 0;              ///< largest count in one nest
  int max_total = 0;
  int failed_nodes = 0;
  std::vector<int> count_histogram;  ///< nodes by total count
  std::vector<std::size_t> violations;
  double seconds = 0.0;
};

/// Cycles around every antisaddle (section towards its nearest neighbour)
/// and around all equilibria (ray from their centroid), each cycle assigned
/// to a nest by its winding numbers.
NodeResult sweep_node(const FhnParams& params, Stage stage, const SweepSettings& s);

/// Runs every node on up to s.jobs threads. Failures are logged per node.
SweepReport sweep(const SweepGrid& grid, const SweepSettings& s);

SweepGrid grid_from(const Config& cfg);
SweepSettings settings_from(const Config& cfg);

/// Thread count: the jobs key when positive, else FHN_BIFURC_JOBS, else the
/// hardware concurrency.
int resolve_jobs(long configured);

/// One JSON object per node, then a summary line, newline terminated.
std::string sweep_jsonl(const SweepReport& r);
/// The summary object alone.
std::string sweep_summary_json(const SweepReport& r);

}  // namespace fhn::cli
