#include "kwl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "kwl/analysis.hpp"
#include "kwl/report.hpp"
#include "kwl/solver.hpp"
#include "kwl/spectrum.hpp"
#include "kwl/sweep.hpp"

namespace kwl {

namespace {

const std::vector<std::string> kStageOrder = {"validate", "assemble", "dirichlet", "wellflow",
                                              "geometry", "solve",    "sweep"};

int stage_rank(const std::string& stage) {
  if (stage.empty() || stage == "all") return static_cast<int>(kStageOrder.size()) - 1;
  for (std::size_t i = 0; i < kStageOrder.size(); ++i)
    if (kStageOrder[i] == stage) return static_cast<int>(i);
  fail(ErrorCode::ConfigError, "unknown stage '" + stage + "'");
}

std::vector<std::string> record_csv_row(const SolutionRecord& rec) {
  return {to_string(rec.method),
          format_number(rec.alpha),
          format_number(rec.coupling),
          format_number(rec.p),
          format_number(rec.energy_value),
          format_number(rec.grad_norm),
          format_number(rec.defect),
          format_number(rec.norm_lambda),
          format_number(rec.mass_outside),
          std::to_string(rec.iterations)};
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const int last_stage = stage_rank(options.stage);
  const auto wants = [&](const std::string& stage) {
    return stage_rank(stage) <= last_stage;
  };

  const std::string out_dir = options.out_dir.empty() ? cfg.out_dir : options.out_dir;
  std::filesystem::create_directories(out_dir);
  const auto path_in_out = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  Manifest manifest;
  manifest.set_config(cfg.source_path, cfg.source_text);
  const int threads = options.threads > 0 ? options.threads : cfg.threads;

  try {
    const PotentialWell well = cfg.make_well();
    const Grid grid = cfg.make_grid();
    const ProblemParams params_raw(cfg.p, cfg.alpha_auto_half_cap ? 1.0 : cfg.alpha);

    std::vector<SolutionRecord> records;

    // ---- validate ----------------------------------------------------
    const ValidationReport report = validate_well(well);
    for (const auto& c : report.checks) manifest.add_check("hypothesis_" + c.name, c.passed, c.detail);
    for (const auto& n : report.notes) manifest.add_note(n);
    manifest.add_constant("tail_set_measure", report.tail_set_measure, "analytic, box ramp family");
    manifest.add_constant("finite_measure_threshold", report.finite_measure_threshold,
                          "analytic: -offset/cap for negative offset");
    manifest.add_constant("negative_set_measure", measure_negative_set(well),
                          "analytic at the base coupling");

    if (!wants("assemble")) {
      manifest.write(path_in_out("manifest.txt"));
      return manifest.all_passed() ? 0 : 1;
    }

    // ---- assemble ----------------------------------------------------
    const OperatorSet ops = assemble(grid, well);
    {
      // Split consistency: M+ - M- must equal the directly assembled signed mass.
      double max_diff = 0.0;
      for (Eigen::Index i = 0; i < ops.size(); ++i) {
        const double direct = grid.cell_volume() * well.shifted_potential(grid.coordinate(i));
        max_diff = std::max(max_diff, std::abs(ops.mass_plus[i] - ops.mass_minus[i] - direct));
      }
      manifest.add_check("mass_split_consistency", max_diff <= 1e-14,
                         "max deviation " + format_number(max_diff));
    }
    if (cfg.dump_matrices) ops.write_coordinate_format(path_in_out("operators.txt"));

    // ---- dirichlet ---------------------------------------------------
    std::optional<DirichletSpectrum> spectrum;
    std::optional<int> k0;
    if (wants("dirichlet")) {
      if (well.offset() == 0.0) {
        manifest.add_note("dirichlet stage skipped: offset is zero");
      } else {
        spectrum = dirichlet_spectrum(grid, well, cfg.count);
        CsvWriter csv(path_in_out("spectrum.csv"));
        csv.row({"level", "gamma", "multiplicity", "residual"});
        for (int i = 0; i < spectrum->level_count(); ++i)
          csv.row({std::to_string(i + 1), format_number(spectrum->value(i)),
                   std::to_string(spectrum->levels[static_cast<std::size_t>(i)].multiplicity()),
                   format_number(spectrum->levels[static_cast<std::size_t>(i)].residual)});
        manifest.add_constant("gamma_1", spectrum->value(0), "plateau Dirichlet eigensolve");
        try {
          k0 = threshold_index(*spectrum);
          manifest.add_constant("threshold_index", *k0, "first level above 1");
        } catch (const Error& e) {
          manifest.add_note(std::string("threshold index unavailable: ") + e.what());
        }
      }
    }

    // ---- wellflow ----------------------------------------------------
    if (wants("wellflow") && well.offset() < 0.0 && !cfg.sweep_couplings.empty()) {
      const auto rows = well_spectrum_flow(grid, well, cfg.sweep_couplings, cfg.m_max, threads);
      CsvWriter csv(path_in_out("wellflow.csv"));
      csv.row({"lambda", "m", "beta_m", "gamma_m_disc", "subspace_dist", "iters"});
      for (const auto& row : rows)
        csv.row({format_number(row.coupling), std::to_string(row.level),
                 format_number(row.value), format_number(row.dirichlet_value),
                 format_number(row.subspace_distance), std::to_string(row.iterations)});

      bool monotone = true, ordered = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
          if (rows[i].level == rows[j].level && rows[i].level == 1 &&
              rows[j].coupling > rows[i].coupling)
            monotone = monotone && rows[j].value >= rows[i].value - 1e-12;
        }
        if (i + 1 < rows.size() && rows[i + 1].coupling == rows[i].coupling)
          ordered = ordered && rows[i + 1].value >= rows[i].value - 1e-12;
      }
      manifest.add_check("wellflow_ground_level_monotone", monotone);
      manifest.add_check("wellflow_levels_ordered", ordered);

      if (cfg.emit_svg) {
        std::vector<PlotSeries> series(static_cast<std::size_t>(cfg.m_max));
        for (int m = 0; m < cfg.m_max; ++m) series[static_cast<std::size_t>(m)].label = "level " + std::to_string(m + 1);
        for (const auto& row : rows) {
          auto& s = series[static_cast<std::size_t>(row.level - 1)];
          s.x.push_back(std::log10(row.coupling));
          s.y.push_back(row.value);
        }
        write_line_plot(path_in_out("wellflow.svg"), "well spectrum flow", "log10 lambda",
                        "beta_m", series);
      }
    } else if (wants("wellflow") && well.offset() >= 0.0) {
      manifest.add_note("wellflow stage skipped: definite case");
    }

    // ---- geometry ----------------------------------------------------
    std::optional<LinkingGeometry> geometry;
    std::optional<EmbeddingConstants> consts;
    double alpha_resolved = cfg.alpha;
    PsMonitorParams ps;
    if (wants("geometry") && spectrum && k0) {
      const double coupling_floor =
          cfg.sweep_couplings.empty() ? cfg.coupling : cfg.sweep_couplings.front();
      const double coupling_min = std::max(0.0, -well.offset() / well.tail_floor());
      if (coupling_floor > coupling_min) {
        double sobolev;
        std::string sobolev_prov;
        if (cfg.sobolev_mode == "value") {
          sobolev = cfg.sobolev_value;
          sobolev_prov = "configured";
        } else if (cfg.sobolev_mode == "talenti") {
          if (cfg.dim != 3)
            fail(ErrorCode::ConfigError, "sobolev_mode=talenti requires dim=3");
          sobolev = talenti_sobolev_constant();
          sobolev_prov = "analytic Talenti bubble";
        } else {
          sobolev = discrete_tail_embedding_constant(ops, grid, well);
          sobolev_prov = "derived: discrete tail-set Rayleigh minimum";
        }
        double sobolev_p;
        std::string sobolev_p_prov;
        if (cfg.sobolev_p_mode == "value") {
          sobolev_p = cfg.sobolev_p_value;
          sobolev_p_prov = "configured";
        } else {
          sobolev_p = discrete_p_embedding_constant(ops, grid, cfg.p, cfg.seed);
          sobolev_p_prov = "derived: discrete H1->Lp Rayleigh minimum, 1% safety shave";
        }
        manifest.add_constant("sobolev", sobolev, sobolev_prov);
        manifest.add_constant("sobolev_p", sobolev_p, sobolev_p_prov);

        consts = embedding_constants(well, coupling_floor, sobolev, sobolev_p);
        manifest.add_constant("l2_embedding_factor", consts->l2_factor,
                              "derived at the coupling floor " + format_number(coupling_floor));
        geometry = linking_geometry(*consts, *spectrum, params_raw, coupling_floor, cfg.seed);
        manifest.add_constant("sphere_radius", geometry->sphere_radius,
                              "derived: bracket halved at the sphere");
        manifest.add_constant("energy_floor", geometry->energy_floor, "derived from sphere_radius");
        manifest.add_constant("boundary_radius", geometry->boundary_radius,
                              "derived: smallest radius closing the boundary estimate");
        manifest.add_constant("coupling_cap", geometry->coupling_cap,
                              "derived: 2*energy_floor/boundary_radius^4");
        manifest.add_constant("min_p_norm", geometry->min_p_norm,
                              "derived: seeded sphere sampling with polish");

        if (cfg.alpha_auto_half_cap) {
          alpha_resolved = 0.5 * geometry->coupling_cap;
          manifest.add_constant("alpha", alpha_resolved, "derived: coupling_cap/2");
        } else {
          manifest.add_constant("alpha", alpha_resolved, "configured");
        }

        const double gamma = geometry->gamma_threshold;
        const double bracket_cap = 0.25 * alpha_resolved * std::pow(geometry->boundary_radius, 4.0) +
                                   0.5 * (1.0 - 1.0 / gamma) * geometry->boundary_radius *
                                       geometry->boundary_radius;
        const double ps_B = ps_bound(alpha_resolved, bracket_cap, std::abs(well.offset()),
                                     well.tail_set_measure(), sobolev, cfg.p);
        manifest.add_constant("ps_bound_at_bracket", ps_B,
                              "derived: norm bound at the bracket energy cap");
        const double lambda_min =
            nontriviality_threshold(cfg.p, sobolev, well.offset(), well.tail_floor(), ps_B);
        manifest.add_constant("nontriviality_coupling", lambda_min,
                              "derived: closed-form inversion with safety factor 2");

        ps.enabled = true;
        ps.offset_abs = std::abs(well.offset());
        ps.tail_measure = well.tail_set_measure();
        ps.sobolev = sobolev;
      } else {
        manifest.add_note("geometry stage skipped: coupling floor below the embedding threshold");
      }
    }
    if (cfg.alpha_auto_half_cap && !geometry)
      fail(ErrorCode::ConfigError,
           "problem.alpha = auto_half_cap requires the geometry stage to run");

    const ProblemParams params(cfg.p, alpha_resolved);

    // ---- solve ---------------------------------------------------------
    if (wants("solve") && cfg.method != "none") {
      SolverOptions solver_opts;
      solver_opts.tol = cfg.tol;
      solver_opts.max_iters = cfg.max_iters;
      solver_opts.ps = ps;
      if (geometry) {
        solver_opts.boundary_radius = geometry->boundary_radius;
        solver_opts.coupling_cap = geometry->coupling_cap;
      }

      std::string method = cfg.method;
      if (method == "auto") {
        if (well.offset() >= 0.0 || (spectrum && spectrum->value(0) > 1.0))
          method = "nehari";
        else
          method = "linking";
      }

      const auto make_seed = [&]() -> Vector {
        if (spectrum) return spectrum->levels.front().vectors.col(0);
        Vector bump(ops.size());
        const double sigma = 0.25 * grid.halfwidth();
        for (Eigen::Index i = 0; i < ops.size(); ++i) {
          const auto x = grid.coordinate(i);
          double r2 = 0.0;
          for (int d = 0; d < grid.dim(); ++d)
            r2 += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
          bump[i] = std::exp(-0.5 * r2 / (sigma * sigma));
        }
        return bump;
      };

      SolutionRecord rec;
      if (method == "nehari") {
        rec = nehari_solve(ops, params, make_seed(), solver_opts);
      } else if (method == "mountain_pass") {
        Vector endpoint = make_seed();
        int guard = 0;
        while (energy(ops, params, endpoint) > 0.0 && guard++ < 60) endpoint *= 2.0;
        rec = mountain_pass_solve(ops, params, endpoint, solver_opts);
      } else if (method == "linking") {
        if (!spectrum || !k0)
          fail(ErrorCode::ConfigError, "linking requires the plateau spectrum");
        const WellSpectrum wspec = well_spectrum(ops, well, std::max(cfg.m_max, *k0));
        rec = linking_solve(ops, params, wspec, *spectrum, solver_opts);
      } else {  // limit
        rec = limit_problem_solve(grid, well, params, solver_opts);
      }
      if (rec.method != SolveMethod::limit) {
        rec.coupling = well.coupling();
        rec.mass_outside = mass_outside_plateau(grid, well, rec.u);
      }

      manifest.add_check("solution_gradient", rec.grad_norm <= cfg.tol,
                         "dual norm " + format_number(rec.grad_norm));
      manifest.add_check("solution_nontrivial", rec.norm_lambda >= 1e-6,
                         "norm " + format_number(rec.norm_lambda));
      manifest.add_check("solution_stationarity", rec.defect <= 1e-6,
                         "defect " + format_number(rec.defect));
      if (method == "linking" && geometry) {
        const double gamma = geometry->gamma_threshold;
        const double upper = 0.25 * params.alpha * std::pow(geometry->boundary_radius, 4.0) +
                             0.5 * (1.0 - 1.0 / gamma) * geometry->boundary_radius *
                                 geometry->boundary_radius;
        manifest.add_check(
            "linking_energy_bracket",
            rec.energy_value >= geometry->energy_floor && rec.energy_value <= upper,
            format_number(geometry->energy_floor) + " <= " + format_number(rec.energy_value) +
                " <= " + format_number(upper));
      }
      records.push_back(std::move(rec));
    }

    // ---- sweep ---------------------------------------------------------
    if (wants("sweep") && !cfg.sweep_couplings.empty() && cfg.method != "none") {
      SweepOptions sweep_opts;
      sweep_opts.solver.tol = cfg.tol;
      sweep_opts.solver.max_iters = cfg.max_iters;
      sweep_opts.solver.ps = ps;
      const auto result = concentration_sweep(grid, well, params, cfg.sweep_couplings, sweep_opts);

      CsvWriter csv(path_in_out("sweep.csv"));
      csv.row({"lambda", "energy", "grad_norm", "nehari_defect", "mass_outside", "h1_dist_rel",
               "well_energy", "flagged"});
      for (const auto& row : result.rows)
        csv.row({format_number(row.coupling), format_number(row.energy_value),
                 format_number(row.grad_norm), format_number(row.defect),
                 format_number(row.mass_outside), format_number(row.h1_dist_rel),
                 format_number(row.well_energy), std::to_string(row.flagged)});

      const auto& rows = result.rows;
      const bool any_failed =
          std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.flagged == 2; });
      manifest.add_check("sweep_all_solves_converged", !any_failed);
      if (!any_failed && rows.size() >= 2) {
        manifest.add_check("sweep_mass_outside_decreased",
                           rows.back().mass_outside < rows.front().mass_outside,
                           format_number(rows.front().mass_outside) + " -> " +
                               format_number(rows.back().mass_outside));
        manifest.add_check("sweep_localized", rows.back().mass_outside < 1e-2,
                           "final " + format_number(rows.back().mass_outside));
        manifest.add_check("sweep_limit_distance", rows.back().h1_dist_rel < 0.05,
                           "final " + format_number(rows.back().h1_dist_rel));
        manifest.add_check("sweep_well_energy_trend",
                           rows.back().well_energy <= rows[rows.size() - 2].well_energy,
                           format_number(rows[rows.size() - 2].well_energy) + " -> " +
                               format_number(rows.back().well_energy));
      }

      if (cfg.emit_svg) {
        PlotSeries mass{"mass_outside", {}, {}};
        for (const auto& row : rows) {
          if (row.flagged == 2) continue;
          mass.x.push_back(std::log10(row.coupling));
          mass.y.push_back(row.mass_outside);
        }
        write_line_plot(path_in_out("concentration.svg"), "concentration", "log10 lambda",
                        "mass outside plateau", {mass});
      }
      records.push_back(result.limit_record);
    }

    if (!records.empty()) {
      CsvWriter csv(path_in_out("solution.csv"));
      csv.row({"method", "alpha", "lambda", "p", "energy", "grad_norm", "nehari_defect",
               "norm_lambda", "mass_outside", "iterations"});
      for (const auto& rec : records) csv.row(record_csv_row(rec));
    }

    manifest.write(path_in_out("manifest.txt"));
    return manifest.all_passed() ? 0 : 1;
  } catch (const Error& e) {
    manifest.add_check("pipeline", false, e.what());
    manifest.write(path_in_out("manifest.txt"));
    std::ofstream marker(path_in_out("FAILED"));
    marker << e.what() << "\n";
    if (e.code() == ErrorCode::ConfigError) return 2;
    if (e.code() == ErrorCode::MaxItersExceeded || e.code() == ErrorCode::TrivialSolution)
      return 3;
    return 1;
  }
}

}  // namespace kwl
