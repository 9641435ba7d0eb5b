#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kwl/grid.hpp"
#include "kwl/operators.hpp"
#include "kwl/well.hpp"

namespace kwl {

/// One distinct eigenvalue with its full multiplicity. Vectors are stored on
/// the full grid (zero-extended where applicable), one column per eigenvector.
struct SpectralLevel {
  double value = 0.0;
  Eigen::MatrixXd vectors;
  double residual = 0.0;

  int multiplicity() const { return static_cast<int>(vectors.cols()); }
};

/// Spectrum of the plateau Dirichlet problem K phi = gamma |offset| M phi on
/// the subgrid of nodes strictly inside the plateau box, clustered into
/// distinct levels. Eigenvectors satisfy |offset| * phi^T M phi = 1 and are
/// mutually |offset|*M-orthogonal; the largest-magnitude entry is positive.
struct DirichletSpectrum {
  std::vector<int> plateau_nodes;  // flat indices of the subgrid
  double quad_weight = 0.0;
  double offset_abs = 0.0;
  double cluster_tol = 0.0;
  std::vector<SpectralLevel> levels;

  double value(int level) const { return levels.at(static_cast<std::size_t>(level)).value; }
  int level_count() const { return static_cast<int>(levels.size()); }
};

/// Node subset strictly inside the plateau box; nodes within a snap tolerance
/// of the boundary count as Dirichlet boundary.
std::vector<int> plateau_subgrid(const Grid& grid, const PotentialWell& well);

/// Computes the `count` smallest Dirichlet eigenpairs on the plateau subgrid.
/// Throws ZeroOffset when the well offset vanishes.
DirichletSpectrum dirichlet_spectrum(const Grid& grid, const PotentialWell& well, int count);

/// Smallest 1-based level index with value > 1 + 1e-9. DegenerateThreshold if
/// a level sits within 1e-9 of 1, SpectrumTooShort if all levels are below.
int threshold_index(const DirichletSpectrum& spectrum);

/// Constrained well spectrum: levels m = 1.. of the quotient
/// ||u||_lambda^2 / D(u,u) on the orthogonal complement of the span of nodes
/// outside the negativity set, with minimizers normalized by D(e,e) = 1 and
/// mutually E_lambda-orthogonal. Clustered eigenlevels are captured whole.
struct WellSpectrum {
  double coupling = 0.0;
  double cluster_tol = 0.0;
  std::vector<SpectralLevel> levels;
  double max_residual = 0.0;
  int iterations = 0;  // 0 for the direct dense path

  double value(int level) const { return levels.at(static_cast<std::size_t>(level)).value; }
  int level_count() const { return static_cast<int>(levels.size()); }
  /// Representative minimizer of level m (0-based).
  Vector minimizer(int level) const {
    return levels.at(static_cast<std::size_t>(level)).vectors.col(0);
  }
};

/// Computes the first m_max well-spectrum levels for the operator set's
/// coupling. Throws DefiniteCase when offset >= 0 and LambdaBelowLambda0 when
/// the coupling does not exceed the finite-measure threshold.
WellSpectrum well_spectrum(const OperatorSet& ops, const PotentialWell& well, int m_max);

/// Core of well_spectrum on an explicit pencil: levels of G u = beta W u with
/// G = K + M^+ and W the negative-part weights. Used directly by the plateau
/// limit problem, where the pencil degenerates to the Dirichlet one.
WellSpectrum well_levels_from_pencil(const SparseMatrix& G, const Vector& weights, int m_max,
                                     double coupling_tag);

struct FlowRow {
  double coupling = 0.0;
  int level = 0;  // 1-based m
  double value = 0.0;
  double dirichlet_value = 0.0;
  double subspace_distance = 0.0;  // relative H^1 distance to the matching eigenspace
  int iterations = 0;
};

/// Sweeps the well spectrum over an increasing coupling list and reports the
/// per-level values together with the distance from each minimizer to the
/// matching Dirichlet eigenspace. Couplings are independent; `threads` > 1
/// computes them concurrently with results identical to the serial order.
std::vector<FlowRow> well_spectrum_flow(const Grid& grid, const PotentialWell& well,
                                        const std::vector<double>& couplings, int m_max,
                                        int threads = 1);

enum class SubspaceSide { low, high };

struct CoercivityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool vacuous = false;
};

/// Evaluates the quadratic-form split bound on u: for side low (u in the span
/// of levels below the threshold index) checks
///   ||u||^2 - D(u,u) <= 1/2 (1 - 1/gamma_{k0*-1}) ||u||^2,
/// for side high (u E_lambda-orthogonal to that span) checks the reverse
/// inequality with gamma_{k0*}. Throws SubspaceMismatch when u has a relative
/// component above 1e-8 outside the designated subspace.
CoercivityCheck coercivity_split(const WellSpectrum& wspec, const DirichletSpectrum& spectrum,
                                 const OperatorSet& ops, const Vector& u, SubspaceSide side);

}  // namespace kwl
