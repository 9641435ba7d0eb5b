#pragma once

// Test-only dense route for the constrained well spectrum: instead of the
// production elimination + Schur reduction, solve the swapped dense pencil
//   M^- v = mu (K + M^+) v
// with a generalized symmetric solver (the right side is SPD) and read the
// finite quotient levels off as beta = 1/mu for the positive mu, ascending.

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "kwl/operators.hpp"

namespace kwl_test {

inline Eigen::VectorXd dense_well_values(const kwl::OperatorSet& ops, int count) {
  const Eigen::Index n = ops.size();
  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) weight(i, i) = ops.mass_minus[i];
  Eigen::MatrixXd metric = Eigen::MatrixXd(ops.stiffness);
  for (Eigen::Index i = 0; i < n; ++i) metric(i, i) += ops.mass_plus[i];

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(weight, metric);
  std::vector<double> betas;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = eig.eigenvalues()[i];
    if (mu > 1e-14) betas.push_back(1.0 / mu);
  }
  std::sort(betas.begin(), betas.end());
  Eigen::VectorXd out(std::min<std::size_t>(betas.size(), static_cast<std::size_t>(count)));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = betas[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace kwl_test
