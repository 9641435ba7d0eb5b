#pragma once

// Shared fixtures for the test suites: the two canonical 1D wells (plateau
// eigenvalues near i^2 and near i^2/2) and seeded random vectors.

#include <cmath>
#include <random>

#include "kwl/grid.hpp"
#include "kwl/operators.hpp"
#include "kwl/well.hpp"

namespace kwl_test {

inline constexpr double kPi = 3.14159265358979323846;

/// Grid whose lattice hits +-pi/2 exactly when (n+1) is divisible by 3, so
/// the plateau subproblem of `pi_well` sees the interval (-pi/2, pi/2) with
/// no boundary offset.
inline kwl::Grid aligned_grid(int points) { return kwl::Grid(1, 1.5 * kPi, points); }

/// Plateau (-pi/2, pi/2): Dirichlet values i^2/|offset|.
inline kwl::PotentialWell pi_well(double offset, double coupling) {
  return kwl::PotentialWell(1, 0.5 * kPi, 1.0, 2.0, 1.0, offset, coupling);
}

/// Plateau (-pi/sqrt2, pi/sqrt2) with offset -1: Dirichlet values near
/// {0.5, 2.0, 4.5, ...}, threshold index 2. Pair with `offset_grid`, whose
/// lattice avoids the plateau boundary, so the constrained spectrum and the
/// plateau spectrum share the same node set for large couplings.
inline kwl::PotentialWell indefinite_well(double coupling) {
  return kwl::PotentialWell(1, kPi / std::sqrt(2.0), 1.0, 2.0, 1.0, -1.0, coupling);
}

inline kwl::Grid offset_grid(int points = 399) { return kwl::Grid(1, 4.0, points); }

inline kwl::Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  kwl::Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

}  // namespace kwl_test
