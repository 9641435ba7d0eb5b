#pragma once

#include <vector>

#include "kwl/analysis.hpp"
#include "kwl/solver.hpp"

namespace kwl {

/// One coupling of the concentration study.
struct ConcentrationRow {
  double coupling = 0.0;
  double energy_value = 0.0;
  double grad_norm = 0.0;
  double defect = 0.0;
  double mass_outside = 0.0;   // L^2 fraction outside the plateau
  double h1_dist_rel = 0.0;    // relative H^1 distance to the limit solution
  double well_energy = 0.0;    // int coupling * a * u^2
  int flagged = 0;             // 0 ok, 1 below the guaranteed regime, 2 solver failure
};

struct SweepOptions {
  SolverOptions solver;
  bool warm_start = true;
  double guaranteed_coupling = 0.0;  // rows below it are flagged informationally
};

struct SweepResult {
  std::vector<ConcentrationRow> rows;
  SolutionRecord limit_record;
  std::vector<SolutionRecord> records;  // one per non-failed coupling, in order
};

/// Solves the full problem along an increasing coupling list (warm-started by
/// default), solves the plateau limit problem once, and reports localization
/// statistics per coupling. Solver failures flag the row and the sweep
/// continues.
SweepResult concentration_sweep(const Grid& grid, const PotentialWell& well_template,
                                const ProblemParams& params,
                                const std::vector<double>& couplings,
                                const SweepOptions& options = {});

}  // namespace kwl
