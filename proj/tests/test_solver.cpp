#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "kwl/analysis.hpp"
#include "kwl/solver.hpp"
#include "kwl/sweep.hpp"
#include "oracles/shooting.hpp"

using namespace kwl;
using kwl_test::kPi;

namespace {

// Shooting oracle values for the plateau (-pi/2, pi/2), p = 5, alpha = 0.01,
// RK4 step-converged to ~1e-12.
constexpr double kOracleEnergyOffset0 = 0.594485201326;
constexpr double kOracleEnergyOffset1 = 1.793576284727;

Vector ground_seed(const Grid& grid, const PotentialWell& well) {
  const auto spec = dirichlet_spectrum(grid, well, 1);
  return spec.levels.front().vectors.col(0);
}

}  // namespace

TEST_CASE("shooting oracle reproduces its frozen values") {
  const auto r0 = kwl_test::shoot_ground_state(kPi, 0.0, 0.01, 5.0);
  CHECK(r0.energy == doctest::Approx(kOracleEnergyOffset0).epsilon(1e-8));
  const auto r1 = kwl_test::shoot_ground_state(kPi, 1.0, 0.01, 5.0);
  CHECK(r1.energy == doctest::Approx(kOracleEnergyOffset1).epsilon(1e-8));
}

TEST_CASE("limit problem matches the 1D shooting oracle") {
  const Grid grid = kwl_test::aligned_grid(383);
  const ProblemParams params(5.0, 0.01);
  // offset 0: pure gradient problem on the plateau
  const auto rec0 = limit_problem_solve(grid, kwl_test::pi_well(0.0, 1.0), params);
  CHECK(std::abs(rec0.energy_value - kOracleEnergyOffset0) / kOracleEnergyOffset0 <= 1e-3);
  CHECK(rec0.method == SolveMethod::limit);
  CHECK(std::isinf(rec0.coupling));
  CHECK(rec0.mass_outside == 0.0);
  // offset +1
  const auto rec1 = limit_problem_solve(grid, kwl_test::pi_well(1.0, 1.0), params);
  CHECK(std::abs(rec1.energy_value - kOracleEnergyOffset1) / kOracleEnergyOffset1 <= 1e-3);
}

TEST_CASE("limit problem energies increase with the Kirchhoff coupling") {
  const Grid grid = kwl_test::aligned_grid(191);
  const auto well = kwl_test::pi_well(0.0, 1.0);
  double prev = 0.0;
  for (double alpha : {0.005, 0.01, 0.02}) {
    const auto rec = limit_problem_solve(grid, well, ProblemParams(5.0, alpha));
    CHECK(rec.energy_value > prev);
    prev = rec.energy_value;
  }
}

TEST_CASE("nehari: accepted record satisfies all certificates") {
  const Grid grid = kwl_test::aligned_grid(191);
  const auto well = kwl_test::pi_well(1.0, 10.0);
  const auto ops = assemble(grid, well);
  const ProblemParams params(5.0, 0.01);
  const auto rec = nehari_solve(ops, params, ground_seed(grid, well));

  CHECK(rec.grad_norm <= 1e-8);
  CHECK(rec.defect <= 1e-6);
  CHECK(rec.norm_lambda >= 1e-6);

  // On the constraint set the ray scale of the solution itself is 1.
  const double a = ops.dirichlet_energy(rec.u);
  const double b = ops.lambda_norm_sq(rec.u);
  const double c = ops.p_mass(rec.u, params.p);
  CHECK(std::abs(params.alpha * a * a + b - c) <= 1e-10 * std::max(1.0, b));

  // Ray behavior: positive just off zero, negative past the barrier.
  CHECK(energy(ops, params, 0.01 * rec.u) > 0.0);
  CHECK(energy(ops, params, 3.0 * rec.u) < 0.0);
}

TEST_CASE("nehari: error paths") {
  const Grid grid = kwl_test::aligned_grid(95);
  const auto well = kwl_test::pi_well(1.0, 10.0);
  const auto ops = assemble(grid, well);
  const ProblemParams params(5.0, 0.01);
  CHECK_THROWS_WITH_AS(nehari_solve(ops, params, Vector::Zero(ops.size())),
                       doctest::Contains("SeedZero"), Error);

  // Indefinite quadratic form along the seed direction is refused.
  const auto indef = kwl_test::indefinite_well(1e4);
  const Grid grid2 = kwl_test::offset_grid(199);
  const auto ops2 = assemble(grid2, indef);
  const auto wspec = well_spectrum(ops2, indef, 1);
  CHECK_THROWS_AS(nehari_solve(ops2, ProblemParams(5.0, 0.01), wspec.minimizer(0)), Error);
}

TEST_CASE("mountain pass agrees with nehari in the definite regime") {
  const Grid grid = kwl_test::aligned_grid(191);
  const auto well = kwl_test::pi_well(1.0, 10.0);
  const auto ops = assemble(grid, well);
  const ProblemParams params(5.0, 0.01);
  const auto nehari_rec = nehari_solve(ops, params, ground_seed(grid, well));

  const Vector endpoint = 2.0 * nehari_rec.u;
  CHECK(energy(ops, params, endpoint) < 0.0);
  const auto mp_rec = mountain_pass_solve(ops, params, endpoint);
  CHECK(mp_rec.grad_norm <= 1e-8);
  CHECK(std::abs(mp_rec.energy_value - nehari_rec.energy_value) /
            std::abs(nehari_rec.energy_value) <=
        1e-4);

  CHECK_THROWS_WITH_AS(mountain_pass_solve(ops, params, nehari_rec.u),
                       doctest::Contains("EndpointNotBelowZero"), Error);
}

TEST_CASE("linking: indefinite 1D well solves inside the energy bracket") {
  const Grid grid = kwl_test::offset_grid(199);
  const auto well = kwl_test::indefinite_well(1e4);
  const auto ops = assemble(grid, well);
  const auto spec = dirichlet_spectrum(grid, well, 8);
  REQUIRE(threshold_index(spec) == 2);
  const auto wspec = well_spectrum(ops, well, 4);

  const double sobolev = discrete_tail_embedding_constant(ops, grid, well);
  const double sobolev_p = discrete_p_embedding_constant(ops, grid, 5.0, 7);
  const auto consts = embedding_constants(well, 1e4, sobolev, sobolev_p);
  const ProblemParams probe(5.0, 1.0);
  const auto geo = linking_geometry(consts, spec, probe, 1e4, 7, 2000);

  const ProblemParams params(5.0, 0.5 * geo.coupling_cap);
  SolverOptions opts;
  opts.boundary_radius = geo.boundary_radius;
  opts.ps.enabled = true;
  opts.ps.offset_abs = std::abs(well.offset());
  opts.ps.tail_measure = well.tail_set_measure();
  opts.ps.sobolev = sobolev;
  const auto rec = linking_solve(ops, params, wspec, spec, opts);

  CHECK(rec.grad_norm <= 1e-8);
  CHECK(rec.defect <= 1e-6);
  CHECK(rec.norm_lambda >= 1e-6);
  const double upper = 0.25 * params.alpha * std::pow(geo.boundary_radius, 4.0) +
                       0.5 * (1.0 - 1.0 / geo.gamma_threshold) * geo.boundary_radius *
                           geo.boundary_radius;
  CHECK(rec.energy_value >= geo.energy_floor);
  CHECK(rec.energy_value <= upper);

  // The solution genuinely uses the expanding direction.
  const Vector e = wspec.minimizer(1);
  const double proj = (rec.u.dot(ops.stiffness * e) +
                       rec.u.dot(ops.mass_plus.asDiagonal() * e)) /
                      std::sqrt(ops.lambda_norm_sq(rec.u) * ops.lambda_norm_sq(e));
  CHECK(std::abs(proj) >= 1e-3);
}

TEST_CASE("linking: an oversized Kirchhoff coupling breaks the geometry") {
  const Grid grid = kwl_test::offset_grid(199);
  const auto well = kwl_test::indefinite_well(1e4);
  const auto ops = assemble(grid, well);
  const auto spec = dirichlet_spectrum(grid, well, 8);
  const auto wspec = well_spectrum(ops, well, 4);
  const double sobolev = discrete_tail_embedding_constant(ops, grid, well);
  const double sobolev_p = discrete_p_embedding_constant(ops, grid, 5.0, 7);
  const auto consts = embedding_constants(well, 1e4, sobolev, sobolev_p);
  const auto geo = linking_geometry(consts, spec, ProblemParams(5.0, 1.0), 1e4, 7, 2000);

  // Above the certified coupling range the precondition check fires.
  {
    const ProblemParams params(5.0, 50.0 * geo.coupling_cap);
    SolverOptions opts;
    opts.boundary_radius = geo.boundary_radius;
    opts.coupling_cap = geo.coupling_cap;
    CHECK_THROWS_WITH_AS(linking_solve(ops, params, wspec, spec, opts),
                         doctest::Contains("GeometryViolated"), Error);
  }
  // Without the declared cap, a sufficiently large coupling still trips the
  // escape check on the expanding-set ball.
  {
    const ProblemParams params(5.0, 1e4 * geo.coupling_cap);
    SolverOptions opts;
    opts.boundary_radius = geo.boundary_radius;
    bool geometry_violated = false;
    bool bracket_failed = false;
    const double upper = 0.25 * params.alpha * std::pow(geo.boundary_radius, 4.0) +
                         0.5 * (1.0 - 1.0 / geo.gamma_threshold) * geo.boundary_radius *
                             geo.boundary_radius;
    try {
      const auto rec = linking_solve(ops, params, wspec, spec, opts);
      bracket_failed = rec.energy_value < geo.energy_floor || rec.energy_value > upper;
    } catch (const Error& e) {
      geometry_violated = e.code() == ErrorCode::GeometryViolated;
    }
    CHECK((geometry_violated || bracket_failed));
  }
}

TEST_CASE("linking solution concentrates on the plateau solution") {
  const Grid grid = kwl_test::offset_grid(199);
  const auto well = kwl_test::indefinite_well(1e6);
  const auto ops = assemble(grid, well);
  const auto spec = dirichlet_spectrum(grid, well, 8);
  const auto wspec = well_spectrum(ops, well, 4);
  const ProblemParams params(5.0, 0.02);

  const auto rec = linking_solve(ops, params, wspec, spec);
  const auto limit = limit_problem_solve(grid, well, params);
  const double overlap =
      rec.u.dot(ops.stiffness * limit.u) + ops.quad_weight * rec.u.dot(limit.u);
  const Vector diff = overlap >= 0.0 ? Vector(rec.u - limit.u) : Vector(rec.u + limit.u);
  CHECK(std::sqrt(ops.h1_norm_sq(diff) / ops.h1_norm_sq(limit.u)) <= 0.05);
  CHECK(mass_outside_plateau(grid, well, rec.u) <= 1e-2);
}

TEST_CASE("concentration sweep: localization trend on a short ladder") {
  const Grid grid = kwl_test::offset_grid(199);
  const auto well = kwl_test::indefinite_well(1.0);
  const ProblemParams params(5.0, 0.02);
  SweepOptions opts;
  const auto result = concentration_sweep(grid, well, params, {1e2, 1e4, 1e6}, opts);
  REQUIRE(result.rows.size() == 3);
  for (const auto& row : result.rows) CHECK(row.flagged != 2);
  CHECK(result.rows.back().mass_outside < result.rows.front().mass_outside);
  CHECK(result.rows.back().mass_outside < 1e-2);
  CHECK(result.rows.back().h1_dist_rel < 0.05);
  CHECK(result.rows.back().well_energy <= result.rows[1].well_energy);
}
