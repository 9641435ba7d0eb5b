#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "kwl/operators.hpp"

using namespace kwl;
using kwl_test::kPi;

TEST_CASE("stiffness: 1D three-point star with Dirichlet ends") {
  const Grid grid(1, 0.5 * kPi, 9);
  const PotentialWell well(1, 0.8, 0.6, 2.0, 1.0, 0.0, 1.0);
  const auto ops = assemble(grid, well);
  const double h = grid.spacing();
  for (int i = 0; i < 9; ++i) {
    CHECK(ops.stiffness.coeff(i, i) == doctest::Approx(2.0 / h).epsilon(1e-14));
    if (i > 0) CHECK(ops.stiffness.coeff(i, i - 1) == doctest::Approx(-1.0 / h).epsilon(1e-14));
    if (i < 8) CHECK(ops.stiffness.coeff(i, i + 1) == doctest::Approx(-1.0 / h).epsilon(1e-14));
  }
}

TEST_CASE("stiffness: cosine interpolant energy converges to pi/2 at order 2") {
  const PotentialWell well(1, 0.8, 0.6, 2.0, 1.0, 0.0, 1.0);
  const auto energy_of = [&](int n) {
    const Grid grid(1, 0.5 * kPi, n);
    const auto ops = assemble(grid, well);
    Vector u(grid.node_count());
    for (std::int64_t i = 0; i < grid.node_count(); ++i)
      u[i] = std::cos(grid.coordinate(i)[0]);
    return ops.dirichlet_energy(u);
  };
  const double e1 = std::abs(energy_of(127) - 0.5 * kPi);
  const double e2 = std::abs(energy_of(255) - 0.5 * kPi);
  const double order = std::log2(e1 / e2);
  CHECK(order == doctest::Approx(2.0).epsilon(0.1));
  CHECK(energy_of(255) == doctest::Approx(0.5 * kPi).epsilon(1e-4));
}

TEST_CASE("box smaller than the ramp is rejected") {
  const Grid grid(1, 1.0, 16);
  const PotentialWell well(1, 0.8, 0.6, 2.0, 1.0, 0.0, 1.0);
  CHECK_THROWS_WITH_AS(assemble(grid, well), doctest::Contains("BoxTooSmall"), Error);
}

TEST_CASE("negative form vanishes for nonnegative offsets") {
  const Grid grid = kwl_test::aligned_grid(95);
  const auto ops = assemble(grid, kwl_test::pi_well(0.5, 2.0));
  CHECK(ops.mass_minus.cwiseAbs().maxCoeff() == 0.0);
  std::mt19937_64 rng(3);
  const Vector u = kwl_test::random_vector(ops.size(), rng);
  CHECK(ops.negative_form(u, u) == 0.0);
}

TEST_CASE("mass split equals the signed weighted mass exactly") {
  const Grid grid = kwl_test::offset_grid(99);
  const auto well = kwl_test::indefinite_well(7.5);
  const auto ops = assemble(grid, well);
  for (Eigen::Index i = 0; i < ops.size(); ++i) {
    const double direct = grid.cell_volume() * well.shifted_potential(grid.coordinate(i));
    CHECK(ops.mass_plus[i] - ops.mass_minus[i] == doctest::Approx(direct).epsilon(1e-15));
    CHECK(ops.mass_plus[i] >= 0.0);
    CHECK(ops.mass_minus[i] >= 0.0);
  }
}

TEST_CASE("lambda norm is positive definite") {
  const Grid grid = kwl_test::offset_grid(99);
  const auto ops = assemble(grid, kwl_test::indefinite_well(3.0));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const Vector u = kwl_test::random_vector(ops.size(), rng);
    CHECK(ops.lambda_norm_sq(u) > 0.0);
  }
  CHECK(ops.lambda_norm_sq(Vector::Zero(ops.size())) == 0.0);
}

TEST_CASE("energy: single-node arithmetic") {
  OperatorSet ops;
  ops.dim = 1;
  ops.spacing = 1.0;
  ops.quad_weight = 1.0;
  ops.stiffness.resize(1, 1);
  ops.stiffness.insert(0, 0) = 2.0;
  ops.mass_plus = Vector::Zero(1);
  ops.mass_minus = Vector::Zero(1);
  Vector u(1);
  u[0] = 1.0;
  const ProblemParams params(5.0, 1.0);
  CHECK(energy(ops, params, u) == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(energy(ops, params, Vector::Zero(1)) == 0.0);
}

TEST_CASE("energy: ray scaling follows the polynomial structure") {
  const Grid grid = kwl_test::offset_grid(99);
  const auto ops = assemble(grid, kwl_test::indefinite_well(5.0));
  const ProblemParams params(4.7, 0.3);
  std::mt19937_64 rng(5);
  const Vector u = kwl_test::random_vector(ops.size(), rng);
  const double a = ops.dirichlet_energy(u);
  const double b = ops.lambda_norm_sq(u) - ops.negative_form(u, u);
  const double c = ops.p_mass(u, params.p);
  for (double t : {0.5, 2.0}) {
    const double expected = 0.25 * params.alpha * std::pow(t, 4.0) * a * a +
                            0.5 * t * t * b - std::pow(t, params.p) * c / params.p;
    CHECK(energy(ops, params, t * u) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("gradient: vanishes at the origin and isolates the linear part") {
  const Grid grid = kwl_test::offset_grid(99);
  const auto ops = assemble(grid, kwl_test::indefinite_well(5.0));
  const ProblemParams params(5.0, 0.7);
  CHECK(gradient(ops, params, Vector::Zero(ops.size())).norm() == 0.0);

  std::mt19937_64 rng(17);
  const Vector u = kwl_test::random_vector(ops.size(), rng);
  Vector g = gradient(ops, params, u);
  for (Eigen::Index i = 0; i < u.size(); ++i)
    g[i] += ops.quad_weight * std::pow(std::abs(u[i]), params.p - 2.0) * u[i];
  const double coeff = params.alpha * ops.dirichlet_energy(u) + 1.0;
  const Vector linear = coeff * (ops.stiffness * u) + ops.mass_plus.asDiagonal() * u -
                        ops.mass_minus.asDiagonal() * u;
  CHECK((g - linear).cwiseAbs().maxCoeff() <= 1e-12 * linear.cwiseAbs().maxCoeff());
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(23);
  const auto check_config = [&](const Grid& grid, const PotentialWell& well, double p,
                                double alpha) {
    const auto ops = assemble(grid, well);
    const ProblemParams params(p, alpha);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector u = kwl_test::random_vector(ops.size(), rng);
      const Vector v = kwl_test::random_vector(ops.size(), rng);
      const double eps = 1e-6;
      const double fd =
          (energy(ops, params, u + eps * v) - energy(ops, params, u - eps * v)) / (2.0 * eps);
      const double an = gradient(ops, params, u).dot(v);
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  };
  check_config(kwl_test::aligned_grid(95), kwl_test::pi_well(1.0, 10.0), 5.0, 0.01);
  check_config(kwl_test::offset_grid(99), kwl_test::indefinite_well(100.0), 4.5, 1.0);
  check_config(Grid(2, 4.0, 15), PotentialWell(2, 1.5, 1.0, 2.0, 1.0, -1.0, 30.0), 5.5, 0.2);
}

TEST_CASE("hessian product matches finite-differenced gradients") {
  const Grid grid = kwl_test::offset_grid(99);
  const auto ops = assemble(grid, kwl_test::indefinite_well(20.0));
  const ProblemParams params(5.0, 0.4);
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector u = kwl_test::random_vector(ops.size(), rng);
    const Vector v = kwl_test::random_vector(ops.size(), rng);
    const double eps = 1e-6;
    const Vector fd =
        (gradient(ops, params, u + eps * v) - gradient(ops, params, u - eps * v)) / (2.0 * eps);
    const Vector hv = hessian_product(ops, params, u, v);
    CHECK((fd - hv).norm() <= 2e-5 * std::max(1.0, hv.norm()));
  }
}

TEST_CASE("embedding constants: exact arithmetic example") {
  // Tail measure exactly 1: cutoff inverse of 1/2 is 1/2, so the sublevel box
  // has halfwidth 0.25 + 0.5*0.5 = 0.5.
  const PotentialWell well(1, 0.25, 0.5, 2.0, 1.0, -1.0, 2.0);
  CHECK(well.tail_set_measure() == doctest::Approx(1.0).epsilon(1e-14));
  const auto ec = embedding_constants(well, 2.0, 5.0, 1.0);
  CHECK(ec.l2_factor == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ec.lp_factor == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  // Large couplings leave only the tail branch.
  const auto far = embedding_constants(well, 1e12, 5.0, 1.0);
  CHECK(far.l2_factor == doctest::Approx(std::sqrt(0.2)).epsilon(1e-9));

  // At offset + tail_floor * coupling = 0 the embedding fails.
  CHECK_THROWS_WITH_AS(embedding_constants(well, 1.0, 5.0, 1.0),
                       doctest::Contains("LambdaBelowThreshold"), Error);
}

TEST_CASE("discrete embedding constants make the L2 and Lp bounds exact") {
  const Grid grid = kwl_test::offset_grid(199);
  const auto well = kwl_test::indefinite_well(5.0);
  const auto ops = assemble(grid, well);
  const double sobolev = discrete_tail_embedding_constant(ops, grid, well);
  const double sobolev_p = discrete_p_embedding_constant(ops, grid, 5.0, 99);
  const auto ec = embedding_constants(well, well.coupling(), sobolev, sobolev_p);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector u = kwl_test::random_vector(ops.size(), rng);
    const double norm_lambda = std::sqrt(ops.lambda_norm_sq(u));
    CHECK(std::sqrt(ops.l2_sq(u)) <= ec.l2_factor * norm_lambda * (1.0 + 1e-12));
    CHECK(std::pow(ops.p_mass(u, 5.0), 0.2) <= ec.lp_factor * norm_lambda * (1.0 + 1e-12));
  }
}

TEST_CASE("negative form bounded by the offset mass on the tail set") {
  const Grid grid = kwl_test::offset_grid(199);
  const auto well = kwl_test::indefinite_well(4.0);  // above -offset/tail_floor = 1
  const auto ops = assemble(grid, well);
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector u = kwl_test::random_vector(ops.size(), rng);
    double tail_mass = 0.0;
    for (Eigen::Index i = 0; i < ops.size(); ++i)
      if (well.potential(grid.coordinate(i)) < well.tail_floor())
        tail_mass += ops.quad_weight * u[i] * u[i];
    CHECK(ops.negative_form(u, u) <= std::abs(well.offset()) * tail_mass * (1.0 + 1e-12));
  }
}

TEST_CASE("restriction preserves the quadratic form of zero extensions") {
  const Grid grid = kwl_test::offset_grid(99);
  const auto well = kwl_test::indefinite_well(5.0);
  const auto ops = assemble(grid, well);
  std::vector<int> nodes;
  for (int i = 20; i < 60; ++i) nodes.push_back(i);
  const auto sub = restrict_to_nodes(ops, nodes);
  std::mt19937_64 rng(43);
  const Vector z = kwl_test::random_vector(sub.size(), rng);
  Vector full = Vector::Zero(ops.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) full[nodes[i]] = z[static_cast<Eigen::Index>(i)];
  CHECK(sub.dirichlet_energy(z) == doctest::Approx(ops.dirichlet_energy(full)).epsilon(1e-13));
  CHECK(sub.lambda_norm_sq(z) == doctest::Approx(ops.lambda_norm_sq(full)).epsilon(1e-13));
  CHECK(sub.negative_form(z, z) == doctest::Approx(ops.negative_form(full, full)).epsilon(1e-13));
}
