#include "kwl/pencil.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <vector>

#include "kwl/errors.hpp"

namespace kwl {

namespace {

void fix_column_signs(Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index imax = 0;
    m.col(c).cwiseAbs().maxCoeff(&imax);
    if (m(imax, c) < 0.0) m.col(c) = -m.col(c);
  }
}

}  // namespace

PencilEigenpairs constrained_pencil(const SparseMatrix& G, const Vector& weights, int max_pairs) {
  const Eigen::Index n = G.rows();
  if (weights.size() != n)
    fail(ErrorCode::InvalidParameter, "pencil weights size mismatch");

  std::vector<int> supported, vanished;
  supported.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    ((weights[i] > 0.0) ? supported : vanished).push_back(static_cast<int>(i));
  if (supported.empty())
    fail(ErrorCode::InvalidParameter, "pencil weights vanish identically");

  const int ni = static_cast<int>(supported.size());
  const int pairs = std::min(max_pairs, ni);

  // Reduced matrix on the supported nodes: the Schur complement of the
  // vanished block, realized through sparse Cholesky solves column by column.
  Eigen::MatrixXd reduced(ni, ni);
  Eigen::MatrixXd extension;  // rows: vanished nodes, cols: supported nodes
  if (vanished.empty()) {
    for (int c = 0; c < ni; ++c)
      for (int r = 0; r < ni; ++r) reduced(r, c) = G.coeff(supported[r], supported[c]);
  } else {
    const int no = static_cast<int>(vanished.size());
    std::vector<int> pos_of(static_cast<std::size_t>(n), -1);
    for (int k = 0; k < no; ++k) pos_of[static_cast<std::size_t>(vanished[k])] = k;

    SparseMatrix Goo(no, no);
    {
      std::vector<Eigen::Triplet<double>> trips;
      for (int k = 0; k < no; ++k) {
        const int col = vanished[static_cast<std::size_t>(k)];
        for (SparseMatrix::InnerIterator it(G, col); it; ++it) {
          const int rp = pos_of[static_cast<std::size_t>(it.row())];
          if (rp >= 0) trips.emplace_back(rp, k, it.value());
        }
      }
      Goo.setFromTriplets(trips.begin(), trips.end());
    }
    Eigen::SimplicialLLT<SparseMatrix> llt(Goo);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::InvalidParameter, "pencil elimination block is not SPD");

    Eigen::MatrixXd Goi(no, ni);
    Goi.setZero();
    for (int c = 0; c < ni; ++c) {
      const int col = supported[static_cast<std::size_t>(c)];
      for (SparseMatrix::InnerIterator it(G, col); it; ++it) {
        const int rp = pos_of[static_cast<std::size_t>(it.row())];
        if (rp >= 0) Goi(rp, c) = it.value();
      }
    }
    extension = -llt.solve(Goi);
    for (int c = 0; c < ni; ++c)
      for (int r = 0; r < ni; ++r) reduced(r, c) = G.coeff(supported[r], supported[c]);
    reduced.noalias() += Goi.transpose() * extension;
    reduced = 0.5 * (reduced + reduced.transpose()).eval();
  }

  // Symmetric reduction by the diagonal weight: W^{-1/2} S W^{-1/2}.
  Vector wsqrt(ni), winv(ni);
  for (int k = 0; k < ni; ++k) {
    wsqrt[k] = std::sqrt(weights[supported[static_cast<std::size_t>(k)]]);
    winv[k] = 1.0 / wsqrt[k];
  }
  Eigen::MatrixXd sym = winv.asDiagonal() * reduced * winv.asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success)
    fail(ErrorCode::InvalidParameter, "pencil eigensolver failed");

  PencilEigenpairs out;
  out.values = eig.eigenvalues().head(pairs);
  out.vectors.resize(n, pairs);
  out.vectors.setZero();
  for (int k = 0; k < pairs; ++k) {
    const Vector z = winv.asDiagonal() * eig.eigenvectors().col(k);
    for (int r = 0; r < ni; ++r) out.vectors(supported[static_cast<std::size_t>(r)], k) = z[r];
    if (extension.size() > 0) {
      const Vector ext = extension * z;
      for (std::size_t r = 0; r < vanished.size(); ++r)
        out.vectors(vanished[r], k) = ext[static_cast<Eigen::Index>(r)];
    }
  }
  fix_column_signs(out.vectors);

  for (int k = 0; k < pairs; ++k) {
    const Vector u = out.vectors.col(k);
    const Vector res = G * u - out.values[k] * (weights.asDiagonal() * u);
    out.max_residual = std::max(out.max_residual, res.cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace kwl
