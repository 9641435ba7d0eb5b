#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kwl/operators.hpp"

namespace kwl {

/// Eigenpairs of the degenerate symmetric pencil G u = beta W u with G SPD and
/// W = diag(weights) PSD. The finite eigenvalues live on the G-orthogonal
/// complement of the nodal span where the weights vanish; they are computed by
/// eliminating that span (sparse Cholesky Schur complement on the supported
/// nodes) and solving the reduced dense symmetric problem.
struct PencilEigenpairs {
  Eigen::VectorXd values;   // ascending, W-normalized: u^T W u = 1
  Eigen::MatrixXd vectors;  // full-length columns; mutually G- and W-orthogonal
  double max_residual = 0.0;  // max_k ||G u_k - beta_k W u_k||_inf
};

/// Computes min(max_pairs, #supported nodes) smallest finite eigenpairs.
/// Vector signs are fixed so the largest-magnitude entry is positive.
PencilEigenpairs constrained_pencil(const SparseMatrix& G, const Vector& weights, int max_pairs);

}  // namespace kwl
