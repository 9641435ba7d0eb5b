#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "kwl/grid.hpp"
#include "kwl/well.hpp"

namespace kwl {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Discrete operators of one (grid, well, coupling) configuration: stiffness,
/// nodal mass and the split weighted masses of (coupling*a + offset)^+/-.
/// All zeroth-order matrices are diagonal (lumped nodal quadrature), stored as
/// their diagonals including the cell volume factor. Immutable after assembly.
struct OperatorSet {
  int dim = 0;
  double spacing = 0.0;
  double quad_weight = 0.0;  // h^dim
  SparseMatrix stiffness;    // K, SPD on the interior nodes
  Vector mass_plus;          // diag of the (.)^+ weighted mass
  Vector mass_minus;         // diag of the (.)^- weighted mass
  std::vector<int> negative_nodes;  // nodes where coupling*a + offset < 0

  Eigen::Index size() const { return stiffness.rows(); }
  bool indefinite() const { return !negative_nodes.empty(); }

  /// u^T K u, the squared gradient seminorm.
  double dirichlet_energy(const Vector& u) const;
  /// ||u||_lambda^2 = u^T (K + M^+) u.
  double lambda_norm_sq(const Vector& u) const;
  /// D(u,v) = u^T M^- v, the negative-part form.
  double negative_form(const Vector& u, const Vector& v) const;
  /// h^dim * sum u_i^2.
  double l2_sq(const Vector& u) const;
  /// h^dim * sum |u_i|^p.
  double p_mass(const Vector& u, double p) const;
  /// u^T (K + h^dim I) u, the grid H^1 norm squared.
  double h1_norm_sq(const Vector& u) const;

  /// Coordinate-format text dump (row col value per line) for debugging.
  void write_coordinate_format(const std::string& path) const;
};

/// Second-order consistent finite-difference assembly on the grid.
/// Requires the grid box to contain the full ramp of the well.
OperatorSet assemble(const Grid& grid, const PotentialWell& well);

/// Restriction of an operator set to a node subset, with zero Dirichlet data
/// on the discarded nodes. Used for the plateau subproblem.
OperatorSet restrict_to_nodes(const OperatorSet& ops, const std::vector<int>& nodes);

/// J(u) = (alpha/4)(u^T K u)^2 + 1/2 ||u||_lambda^2 - 1/2 D(u,u) - (1/p) h^d sum|u_i|^p.
double energy(const OperatorSet& ops, const ProblemParams& params, const Vector& u);

/// Exact Frechet derivative of `energy`.
Vector gradient(const OperatorSet& ops, const ProblemParams& params, const Vector& u);

/// Action of the second derivative of `energy` at u on v.
Vector hessian_product(const OperatorSet& ops, const ProblemParams& params, const Vector& u,
                       const Vector& v);

/// |<J'(u), u>| / max(1, ||u||_lambda^2); zero at critical points.
double nehari_defect(const OperatorSet& ops, const ProblemParams& params, const Vector& u);

/// Continuous-embedding bookkeeping: the L^2 and L^p bound coefficients in
/// terms of the Sobolev constants and the tail-set measure.
struct EmbeddingConstants {
  double sobolev = 0.0;       // S: gradient -> L^6 constant
  double sobolev_p = 0.0;     // S_p: H^1 -> L^p constant
  double l2_factor = 0.0;     // d_lambda
  double lp_factor = 0.0;     // S_p^{-1/2} (1 + d_lambda^2)^{1/2}
};

/// d_lambda = sqrt(max{|A_inf|^{2/3}/S, 1/(offset + tail_floor*coupling)}).
/// Defined only for coupling > max{0, -offset/tail_floor}.
EmbeddingConstants embedding_constants(const PotentialWell& well, double coupling, double sobolev,
                                       double sobolev_p);

/// Best Sobolev constant of the gradient -> L^6 embedding in three dimensions,
/// attained by the Talenti bubble (1+|x|^2)^{-1/2}: 3 (pi^2/4)^{2/3}.
double talenti_sobolev_constant();

/// Smallest discrete Rayleigh quotient u^T K u / (h^d sum_{tail set} u_i^2)
/// over the grid, reported as the equivalent Sobolev-form constant S with
/// |A_inf|^{2/3} S^{-1} = 1/c. Makes the discrete L^2 embedding exact.
double discrete_tail_embedding_constant(const OperatorSet& ops, const Grid& grid,
                                        const PotentialWell& well);

/// Discrete H^1 -> L^p constant of the grid: minimum of
/// (u^T K u + h^d sum u^2) / (h^d sum |u|^p)^{2/p}, found by preconditioned
/// projected descent from a deterministic bump plus seeded restarts. The
/// result is shaved by `safety` so downstream bounds stay valid against
/// residual optimization error.
double discrete_p_embedding_constant(const OperatorSet& ops, const Grid& grid, double p,
                                     unsigned seed, double safety = 0.99);

}  // namespace kwl
