#include "kwl/sweep.hpp"

#include <cmath>

namespace kwl {

namespace {

double h1_distance_rel(const OperatorSet& ops, const Vector& u, const Vector& ref) {
  // Solutions are determined up to sign; align before measuring.
  const double overlap = u.dot(ops.stiffness * ref) + ops.quad_weight * u.dot(ref);
  const Vector diff = overlap >= 0.0 ? Vector(u - ref) : Vector(u + ref);
  return std::sqrt(ops.h1_norm_sq(diff) / ops.h1_norm_sq(ref));
}

double well_energy_term(const Grid& grid, const PotentialWell& well, const OperatorSet& ops,
                        const Vector& u) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    s += well.coupling() * well.potential(grid.coordinate(i)) * u[i] * u[i];
  return ops.quad_weight * s;
}

}  // namespace

SweepResult concentration_sweep(const Grid& grid, const PotentialWell& well_template,
                                const ProblemParams& params,
                                const std::vector<double>& couplings,
                                const SweepOptions& options) {
  for (std::size_t i = 1; i < couplings.size(); ++i)
    if (!(couplings[i] > couplings[i - 1]))
      fail(ErrorCode::InvalidParameter, "coupling list must be strictly increasing");

  SweepResult result;
  result.limit_record = limit_problem_solve(grid, well_template, params, options.solver);

  const bool indefinite = well_template.offset() < 0.0;
  Vector warm;
  for (double coupling : couplings) {
    const PotentialWell well = well_template.with_coupling(coupling);
    const OperatorSet ops = assemble(grid, well);

    ConcentrationRow row;
    row.coupling = coupling;
    if (coupling < options.guaranteed_coupling) row.flagged = 1;

    SolverOptions solver_opts = options.solver;
    if (options.warm_start && warm.size() == ops.size()) solver_opts.warm_start = warm;

    try {
      SolutionRecord rec;
      if (indefinite) {
        const WellSpectrum wspec = well_spectrum(ops, well, 8);
        const DirichletSpectrum spec = dirichlet_spectrum(grid, well, 16);
        rec = linking_solve(ops, params, wspec, spec, solver_opts);
      } else {
        // Seed from the plateau profile (zero-extended) unless warm-started.
        const Vector seed = solver_opts.warm_start.size() == ops.size()
                                ? solver_opts.warm_start
                                : result.limit_record.u;
        rec = nehari_solve(ops, params, seed, solver_opts);
      }
      rec.coupling = coupling;
      rec.mass_outside = mass_outside_plateau(grid, well, rec.u);

      row.energy_value = rec.energy_value;
      row.grad_norm = rec.grad_norm;
      row.defect = rec.defect;
      row.mass_outside = rec.mass_outside;
      row.h1_dist_rel = h1_distance_rel(ops, rec.u, result.limit_record.u);
      row.well_energy = well_energy_term(grid, well, ops, rec.u);

      warm = rec.u;
      result.records.push_back(std::move(rec));
    } catch (const Error&) {
      row.flagged = 2;
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace kwl
