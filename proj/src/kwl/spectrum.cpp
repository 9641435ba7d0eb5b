#include "kwl/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "kwl/pencil.hpp"

namespace kwl {

namespace {

constexpr double kClusterTol = 1e-6;
constexpr double kTieTol = 1e-9;

/// Groups ascending values into clusters by relative gap.
std::vector<std::pair<int, int>> cluster_ranges(const Eigen::VectorXd& values, double tol) {
  std::vector<std::pair<int, int>> ranges;
  int start = 0;
  for (int i = 1; i <= values.size(); ++i) {
    if (i == values.size() ||
        values[i] - values[start] > tol * std::max(1.0, std::abs(values[i]))) {
      ranges.emplace_back(start, i);
      start = i;
    }
  }
  return ranges;
}

void fix_column_signs(Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index imax = 0;
    m.col(c).cwiseAbs().maxCoeff(&imax);
    if (m(imax, c) < 0.0) m.col(c) = -m.col(c);
  }
}

}  // namespace

std::vector<int> plateau_subgrid(const Grid& grid, const PotentialWell& well) {
  // Nodes within a snap tolerance of the plateau boundary belong to the
  // Dirichlet boundary of the subproblem, not to the subgrid.
  const double snap = 1e-9 * grid.spacing();
  std::vector<int> nodes;
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    if (grid.max_abs_coordinate(i) < well.well_halfwidth() - snap)
      nodes.push_back(static_cast<int>(i));
  return nodes;
}

DirichletSpectrum dirichlet_spectrum(const Grid& grid, const PotentialWell& well, int count) {
  if (well.offset() == 0.0)
    fail(ErrorCode::ZeroOffset, "the plateau eigenproblem requires a nonzero offset");
  if (count < 1) fail(ErrorCode::InvalidParameter, "count must be >= 1");

  DirichletSpectrum spec;
  spec.plateau_nodes = plateau_subgrid(grid, well);
  if (spec.plateau_nodes.empty())
    fail(ErrorCode::InvalidParameter, "plateau subgrid is empty; refine the grid");
  spec.quad_weight = grid.cell_volume();
  spec.offset_abs = std::abs(well.offset());
  spec.cluster_tol = kClusterTol;

  const OperatorSet full = assemble(grid, well);
  const OperatorSet sub = restrict_to_nodes(full, spec.plateau_nodes);
  const int m = static_cast<int>(sub.size());

  // K phi = gamma |a0| M phi with M = h^d I reduces to a scaled standard
  // symmetric problem; the subgrid is small at desk scale, solve densely.
  const double mass = spec.offset_abs * spec.quad_weight;
  Eigen::MatrixXd dense = Eigen::MatrixXd(sub.stiffness) / mass;
  dense = 0.5 * (dense + dense.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  if (eig.info() != Eigen::Success)
    fail(ErrorCode::InvalidParameter, "plateau eigensolver failed");

  const auto ranges = cluster_ranges(eig.eigenvalues(), kClusterTol);
  const double vec_scale = 1.0 / std::sqrt(mass);
  for (const auto& [lo, hi] : ranges) {
    if (lo >= count) break;
    SpectralLevel level;
    level.value = eig.eigenvalues()[lo];
    level.vectors.resize(full.size(), hi - lo);
    level.vectors.setZero();
    for (int c = lo; c < hi; ++c) {
      const Vector phi = vec_scale * eig.eigenvectors().col(c);
      level.residual = std::max(
          level.residual,
          (sub.stiffness * phi - level.value * mass * phi).cwiseAbs().maxCoeff());
      for (std::size_t r = 0; r < spec.plateau_nodes.size(); ++r)
        level.vectors(spec.plateau_nodes[r], c - lo) = phi[static_cast<Eigen::Index>(r)];
    }
    fix_column_signs(level.vectors);
    spec.levels.push_back(std::move(level));
    if (hi >= m) break;
  }

  if (spec.levels.empty()) fail(ErrorCode::InvalidParameter, "no eigenvalues computed");
  if (spec.levels.front().multiplicity() != 1)
    fail(ErrorCode::InvalidParameter, "ground Dirichlet eigenvalue is not simple");
  return spec;
}

int threshold_index(const DirichletSpectrum& spectrum) {
  for (int i = 0; i < spectrum.level_count(); ++i) {
    const double v = spectrum.value(i);
    if (std::abs(v - 1.0) <= kTieTol)
      fail(ErrorCode::DegenerateThreshold,
           "an eigenvalue lies within the tie tolerance of 1");
    if (v > 1.0 + kTieTol) return i + 1;
  }
  fail(ErrorCode::SpectrumTooShort, "no eigenvalue above 1 in the computed range");
}

WellSpectrum well_levels_from_pencil(const SparseMatrix& G, const Vector& weights, int m_max,
                                     double coupling_tag) {
  if (m_max < 1) fail(ErrorCode::InvalidParameter, "m_max must be >= 1");
  int supported = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) ++supported;
  if (supported == 0)
    fail(ErrorCode::InvalidParameter, "no nodes carry the negative part on this grid");

  int request = std::min(supported, std::max(4 * m_max + 8, 16));

  WellSpectrum wspec;
  wspec.coupling = coupling_tag;
  wspec.cluster_tol = kClusterTol;
  for (;;) {
    const PencilEigenpairs pairs = constrained_pencil(G, weights, request);
    wspec.levels.clear();
    wspec.max_residual = pairs.max_residual;
    const auto ranges = cluster_ranges(pairs.values, kClusterTol);
    bool truncated = false;
    for (const auto& [lo, hi] : ranges) {
      if (static_cast<int>(wspec.levels.size()) == m_max) break;
      if (hi == pairs.values.size() && request < supported) {
        truncated = true;  // cluster may continue past the computed window
        break;
      }
      SpectralLevel level;
      level.value = pairs.values[lo];
      level.vectors = pairs.vectors.middleCols(lo, hi - lo);
      level.residual = pairs.max_residual;
      wspec.levels.push_back(std::move(level));
    }
    if (static_cast<int>(wspec.levels.size()) >= m_max || (!truncated && request >= supported))
      break;
    if (request >= supported) break;
    request = std::min(supported, 2 * request);
  }
  return wspec;
}

WellSpectrum well_spectrum(const OperatorSet& ops, const PotentialWell& well, int m_max) {
  if (well.offset() >= 0.0)
    fail(ErrorCode::DefiniteCase,
         "the negative-part form vanishes for offset >= 0; the quotient is undefined");
  if (well.coupling() <= well.finite_measure_threshold())
    fail(ErrorCode::LambdaBelowLambda0,
         "coupling must exceed the finite-measure threshold");

  SparseMatrix G = ops.stiffness;
  for (Eigen::Index i = 0; i < ops.size(); ++i)
    if (ops.mass_plus[i] != 0.0) G.coeffRef(i, i) += ops.mass_plus[i];
  G.makeCompressed();
  return well_levels_from_pencil(G, ops.mass_minus, m_max, well.coupling());
}

namespace {

/// Relative H^1 distance from u to the span of the given full-grid columns.
double subspace_distance_h1(const OperatorSet& ops, const Vector& u,
                            const Eigen::MatrixXd& basis) {
  const auto inner = [&](const Vector& a, const Vector& b) {
    return a.dot(ops.stiffness * b) + ops.quad_weight * a.dot(b);
  };
  const int k = static_cast<int>(basis.cols());
  Eigen::MatrixXd gram(k, k);
  Vector rhs(k);
  for (int i = 0; i < k; ++i) {
    rhs[i] = inner(basis.col(i), u);
    for (int j = i; j < k; ++j) {
      gram(i, j) = inner(basis.col(i), basis.col(j));
      gram(j, i) = gram(i, j);
    }
  }
  const Vector coef = gram.ldlt().solve(rhs);
  const double norm_sq = inner(u, u);
  const double dist_sq = std::max(0.0, norm_sq - rhs.dot(coef));
  return std::sqrt(dist_sq / norm_sq);
}

}  // namespace

std::vector<FlowRow> well_spectrum_flow(const Grid& grid, const PotentialWell& well,
                                        const std::vector<double>& couplings, int m_max,
                                        int threads) {
  for (std::size_t i = 1; i < couplings.size(); ++i)
    if (!(couplings[i] > couplings[i - 1]))
      fail(ErrorCode::InvalidParameter, "coupling list must be strictly increasing");

  const DirichletSpectrum spec = dirichlet_spectrum(grid, well, 4 * m_max + 8);
  if (spec.level_count() < m_max)
    fail(ErrorCode::InvalidParameter, "plateau spectrum has fewer levels than m_max");

  std::vector<FlowRow> rows(couplings.size() * static_cast<std::size_t>(m_max));
  const auto compute = [&](std::size_t ci) {
    const PotentialWell w = well.with_coupling(couplings[ci]);
    const OperatorSet ops = assemble(grid, w);
    const WellSpectrum wspec = well_spectrum(ops, w, m_max);
    for (int m = 0; m < m_max; ++m) {
      FlowRow row;
      row.coupling = couplings[ci];
      row.level = m + 1;
      row.value = wspec.value(m);
      row.dirichlet_value = spec.value(m);
      row.subspace_distance = subspace_distance_h1(
          ops, wspec.minimizer(m), spec.levels[static_cast<std::size_t>(m)].vectors);
      row.iterations = wspec.iterations;
      rows[ci * static_cast<std::size_t>(m_max) + static_cast<std::size_t>(m)] = row;
    }
  };

  if (threads <= 1) {
    for (std::size_t ci = 0; ci < couplings.size(); ++ci) compute(ci);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    const int used = std::min<int>(threads, static_cast<int>(couplings.size()));
    for (int t = 0; t < used; ++t)
      pool.emplace_back([&] {
        for (std::size_t ci = next.fetch_add(1); ci < couplings.size(); ci = next.fetch_add(1))
          compute(ci);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

CoercivityCheck coercivity_split(const WellSpectrum& wspec, const DirichletSpectrum& spectrum,
                                 const OperatorSet& ops, const Vector& u, SubspaceSide side) {
  const int k0 = threshold_index(spectrum);
  CoercivityCheck out;

  if (side == SubspaceSide::low && k0 == 1) {
    // No levels below the threshold: the low-side bound is vacuously true.
    out.holds = true;
    out.vacuous = true;
    return out;
  }
  if (wspec.level_count() < k0)
    fail(ErrorCode::InvalidParameter, "well spectrum has fewer levels than the threshold index");

  // E_lambda-orthonormal basis of the span of levels below the threshold.
  std::vector<Vector> low_basis;
  for (int m = 0; m < k0 - 1; ++m) {
    const auto& level = wspec.levels[static_cast<std::size_t>(m)];
    for (int c = 0; c < level.multiplicity(); ++c)
      low_basis.push_back(level.vectors.col(c) / std::sqrt(level.value));
  }

  const auto lambda_inner = [&](const Vector& a, const Vector& b) {
    return a.dot(ops.stiffness * b) + a.dot(ops.mass_plus.asDiagonal() * b);
  };
  const double norm_sq = ops.lambda_norm_sq(u);
  if (!(norm_sq > 0.0)) fail(ErrorCode::InvalidParameter, "u must be nonzero");

  double in_low_sq = 0.0;
  for (const auto& b : low_basis) {
    const double c = lambda_inner(b, u);
    in_low_sq += c * c;
  }
  const double rel_tol = 1e-8;
  if (side == SubspaceSide::low) {
    const double out_sq = std::max(0.0, norm_sq - in_low_sq);
    if (std::sqrt(out_sq) > rel_tol * std::sqrt(norm_sq))
      fail(ErrorCode::SubspaceMismatch, "u has components outside the low span");
  } else {
    if (std::sqrt(in_low_sq) > rel_tol * std::sqrt(norm_sq))
      fail(ErrorCode::SubspaceMismatch, "u has components inside the low span");
  }

  out.lhs = norm_sq - ops.negative_form(u, u);
  const double gamma = side == SubspaceSide::low ? spectrum.value(k0 - 2) : spectrum.value(k0 - 1);
  out.rhs = 0.5 * (1.0 - 1.0 / gamma) * norm_sq;
  const double slack = 1e-10 * std::max(1.0, norm_sq);
  out.holds = side == SubspaceSide::low ? (out.lhs <= out.rhs + slack) : (out.lhs >= out.rhs - slack);
  return out;
}

}  // namespace kwl
