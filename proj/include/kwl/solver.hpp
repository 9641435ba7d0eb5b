#pragma once

#include <limits>
#include <string>

#include "kwl/operators.hpp"
#include "kwl/spectrum.hpp"

namespace kwl {

enum class SolveMethod { nehari, mountain_pass, linking, limit };

const char* to_string(SolveMethod method);

/// A converged critical point with its certificate quantities. Records are
/// only emitted when the gradient norm, the Nehari defect and the
/// nontriviality floor all pass.
struct SolutionRecord {
  Vector u;
  double alpha = 0.0;
  double coupling = 0.0;  // +inf for the plateau limit problem
  double p = 0.0;
  double energy_value = 0.0;
  double grad_norm = 0.0;    // dual norm ||G^{-1/2} grad J||
  double defect = 0.0;       // |<J'(u),u>| / max(1, ||u||^2)
  double norm_lambda = 0.0;  // ||u||_lambda
  double mass_outside = 0.0; // fraction of L^2 mass outside the plateau
  long iterations = 0;
  SolveMethod method = SolveMethod::nehari;
};

/// A-priori norm monitor: tracks the running energy cap along the iteration
/// and aborts when an iterate escapes the bound
///   alpha ||grad u||^4 + ||u||_lambda^2 <= B(alpha, cap, ...).
struct PsMonitorParams {
  bool enabled = false;
  double offset_abs = 0.0;
  double tail_measure = 0.0;
  double sobolev = 1.0;
};

struct SolverOptions {
  double tol = 1e-8;                  // dual gradient norm target
  long max_iters = 100000;            // outer iteration cap
  double newton_switch = 1e-3;        // dual norm at which Newton polish starts
  int path_points = 33;               // mountain-pass path discretization
  double boundary_radius = std::numeric_limits<double>::infinity();  // linking escape check
  double coupling_cap = std::numeric_limits<double>::infinity();     // geometry's alpha range
  PsMonitorParams ps;
  Vector warm_start;                  // optional initial iterate (empty = unused)
};

/// Ray-constrained minimization for the definite regime: minimizes the fiber
/// value J(t*(v) v) over directions v, where t*(v) is the unique positive
/// solution of alpha t^2 A^2 + B = t^{p-2} C on each ray. Requires the
/// effective quadratic form ||v||^2 - D(v,v) to be positive along the
/// iteration. Throws SeedZero / NoCrossing.
SolutionRecord nehari_solve(const OperatorSet& ops, const ProblemParams& params,
                            const Vector& seed, const SolverOptions& options = {});

/// Path-deformation saddle search: discretizes the segment 0 -> endpoint,
/// repeatedly relocates the maximum-energy path node along a preconditioned
/// descent step and rebalances the path, until the max node is critical.
/// Requires J(endpoint) <= 0 with endpoint != 0.
SolutionRecord mountain_pass_solve(const OperatorSet& ops, const ProblemParams& params,
                                   const Vector& endpoint, const SolverOptions& options = {});

/// Local minimax for the indefinite regime: maximizes J over the expanding
/// set {v + t e : v in the span of sub-threshold well levels, t >= 0} exactly
/// (small dense Newton) while descending in the complementary directions.
/// Throws GeometryViolated when the inner maximizer escapes the configured
/// ball.
SolutionRecord linking_solve(const OperatorSet& ops, const ProblemParams& params,
                             const WellSpectrum& wspec, const DirichletSpectrum& spectrum,
                             const SolverOptions& options = {});

/// Solves the plateau limit problem on the subgrid of nodes inside the well,
/// choosing the method by the sign of the offset and the position of the
/// ground Dirichlet eigenvalue; the returned vector is zero-extended to the
/// full grid and tagged with an infinite coupling.
SolutionRecord limit_problem_solve(const Grid& grid, const PotentialWell& well,
                                   const ProblemParams& params,
                                   const SolverOptions& options = {});

/// Fraction of the discrete L^2 mass outside the closed plateau box.
double mass_outside_plateau(const Grid& grid, const PotentialWell& well, const Vector& u);

}  // namespace kwl
