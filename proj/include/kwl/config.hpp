#pragma once

#include <string>
#include <vector>

#include "kwl/grid.hpp"
#include "kwl/well.hpp"

namespace kwl {

/// Flat sectioned key-value experiment description. Parsing is total: any
/// unknown section/key, malformed number or missing required key throws
/// ConfigError with file:line:column diagnostics.
struct ExperimentConfig {
  // [domain]
  int dim = 1;
  double halfwidth = 0.0;
  int points = 0;

  // [well]
  double well_halfwidth = 0.0;
  double ramp_width = 0.0;
  double cap = 0.0;
  double tail_floor = 0.0;
  double offset = 0.0;
  double coupling = 1.0;

  // [problem]
  double p = 5.0;
  double alpha = 1.0;
  bool alpha_auto_half_cap = false;  // alpha = auto_half_cap: use coupling_cap/2

  // [spectrum]
  int count = 12;
  int m_max = 2;

  // [sweep]
  std::vector<double> sweep_couplings;

  // [solver]
  double tol = 1e-8;
  long max_iters = 100000;
  std::string method = "auto";  // auto|nehari|mountain_pass|linking|limit|none

  // [constants]
  std::string sobolev_mode = "discrete";  // discrete|talenti|value
  double sobolev_value = 0.0;
  std::string sobolev_p_mode = "discrete";  // discrete|value
  double sobolev_p_value = 0.0;

  // [output]
  std::string out_dir = "out";
  bool emit_svg = true;
  bool dump_matrices = false;

  // [run]
  unsigned seed = 1234;
  int threads = 1;

  // Raw text for the manifest echo.
  std::string source_path;
  std::string source_text;

  Grid make_grid() const;
  PotentialWell make_well() const;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& display_path);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace kwl
