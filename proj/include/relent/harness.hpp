#pragma once

#include <map>
#include <string>
#include <vector>

#include "relent/io.hpp"

namespace relent {

// Seeded randomized verification campaign over a dimension/rank grid.
// Identical campaigns produce byte-identical reports: every sample draws
// from a substream keyed by (seed, check, cell, sample index), so neither
// execution order nor other checks can perturb it.
struct Campaign {
  std::uint64_t seed = 1;
  std::vector<int> d_a_grid{2, 3};
  std::vector<int> d_b_grid{2, 3};
  std::vector<std::string> rank_modes{"full", "deficient"};
  int samples_per_cell = 100;
  std::vector<std::string> checks = default_checks();
  std::map<std::string, double> tolerance_overrides;

  static std::vector<std::string> default_checks();
  static Campaign from_json(const Json& j);
  Json to_json() const;
};

struct CellStats {
  int d_a = 0;
  int d_b = 0;
  std::string rank_mode;
  long pass = 0;
  long fail = 0;
  double worst_defect = 0.0;
};

struct CheckStats {
  std::string check;
  long pass = 0;
  long fail = 0;
  double worst_defect = 0.0;
  std::vector<CellStats> cells;
  Json witness;  // first failing instance, replayable; null when clean
};

struct Report {
  std::uint64_t seed = 0;
  std::vector<CheckStats> checks;
  long total_failures() const;
  Json to_json() const;
};

// Cells execute independently on their own substreams; with jobs > 1 they
// run concurrently and merge in fixed cell order, so the report is
// byte-identical regardless of parallelism.
Report run_campaign(const Campaign& campaign, int jobs = 1);

// Re-executes exactly one serialized failing (or passing) instance and
// returns verbose per-step defects.
Json replay_witness(const Json& witness);

}  // namespace relent
