#pragma once

#include <string>

#include "kwl/config.hpp"

namespace kwl {

struct RunOptions {
  std::string out_dir;   // overrides [output] dir when nonempty
  std::string stage;     // run through this stage; empty or "all" runs everything
  int threads = 0;       // overrides [run] threads when positive
};

/// Executes the configured pipeline stages in order
///   validate -> assemble -> dirichlet -> wellflow -> geometry -> solve -> sweep
/// writing per-stage CSV tables, SVG plots and a manifest into the output
/// directory. Returns the process exit code: 0 on success, 1 when an
/// invariant check failed, 2 on configuration errors, 3 when a solver did
/// not converge. Partial outputs are kept next to a FAILED marker.
int run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace kwl
