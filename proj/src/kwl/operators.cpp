#include "kwl/operators.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include "kwl/pencil.hpp"

namespace kwl {

double OperatorSet::dirichlet_energy(const Vector& u) const { return u.dot(stiffness * u); }

double OperatorSet::lambda_norm_sq(const Vector& u) const {
  return dirichlet_energy(u) + u.dot(mass_plus.asDiagonal() * u);
}

double OperatorSet::negative_form(const Vector& u, const Vector& v) const {
  return u.dot(mass_minus.asDiagonal() * v);
}

double OperatorSet::l2_sq(const Vector& u) const { return quad_weight * u.squaredNorm(); }

double OperatorSet::p_mass(const Vector& u, double p) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), p);
  return quad_weight * s;
}

double OperatorSet::h1_norm_sq(const Vector& u) const { return dirichlet_energy(u) + l2_sq(u); }

void OperatorSet::write_coordinate_format(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path);
  out.precision(17);
  for (int k = 0; k < stiffness.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(stiffness, k); it; ++it)
      out << "K " << it.row() << " " << it.col() << " " << it.value() << "\n";
  for (Eigen::Index i = 0; i < mass_plus.size(); ++i)
    if (mass_plus[i] != 0.0) out << "M+ " << i << " " << i << " " << mass_plus[i] << "\n";
  for (Eigen::Index i = 0; i < mass_minus.size(); ++i)
    if (mass_minus[i] != 0.0) out << "M- " << i << " " << i << " " << mass_minus[i] << "\n";
}

OperatorSet assemble(const Grid& grid, const PotentialWell& well) {
  if (grid.dim() != well.dim())
    fail(ErrorCode::InvalidParameter, "grid and well dimension mismatch");
  if (grid.halfwidth() < well.well_halfwidth() + well.ramp_width())
    fail(ErrorCode::BoxTooSmall, "grid box must contain the full ramp");

  OperatorSet ops;
  ops.dim = grid.dim();
  ops.spacing = grid.spacing();
  ops.quad_weight = grid.cell_volume();

  const int n = grid.points_per_axis();
  const auto size = static_cast<Eigen::Index>(grid.node_count());
  const double scale = ops.quad_weight / (grid.spacing() * grid.spacing());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(size) * (2 * grid.dim() + 1));
  for (std::int64_t flat = 0; flat < size; ++flat) {
    const auto multi = grid.multi_index(flat);
    trips.emplace_back(flat, flat, 2.0 * grid.dim() * scale);
    for (int d = 0; d < grid.dim(); ++d) {
      for (int step : {-1, 1}) {
        auto nb = multi;
        nb[static_cast<std::size_t>(d)] += step;
        if (nb[static_cast<std::size_t>(d)] < 0 || nb[static_cast<std::size_t>(d)] >= n)
          continue;  // Dirichlet boundary
        trips.emplace_back(flat, grid.flat_index(nb), -scale);
      }
    }
  }
  ops.stiffness.resize(size, size);
  ops.stiffness.setFromTriplets(trips.begin(), trips.end());
  ops.stiffness.makeCompressed();

  ops.mass_plus.resize(size);
  ops.mass_minus.resize(size);
  for (std::int64_t flat = 0; flat < size; ++flat) {
    const double v = well.shifted_potential(grid.coordinate(flat));
    ops.mass_plus[flat] = ops.quad_weight * std::max(v, 0.0);
    ops.mass_minus[flat] = ops.quad_weight * std::max(-v, 0.0);
    if (v < 0.0) ops.negative_nodes.push_back(static_cast<int>(flat));
  }
  return ops;
}

OperatorSet restrict_to_nodes(const OperatorSet& ops, const std::vector<int>& nodes) {
  OperatorSet sub;
  sub.dim = ops.dim;
  sub.spacing = ops.spacing;
  sub.quad_weight = ops.quad_weight;

  const auto m = static_cast<Eigen::Index>(nodes.size());
  std::vector<int> pos_of(static_cast<std::size_t>(ops.size()), -1);
  for (Eigen::Index k = 0; k < m; ++k) pos_of[static_cast<std::size_t>(nodes[k])] = static_cast<int>(k);

  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index c = 0; c < m; ++c) {
    const int col = nodes[static_cast<std::size_t>(c)];
    for (SparseMatrix::InnerIterator it(ops.stiffness, col); it; ++it) {
      const int rp = pos_of[static_cast<std::size_t>(it.row())];
      if (rp >= 0) trips.emplace_back(rp, c, it.value());
    }
  }
  sub.stiffness.resize(m, m);
  sub.stiffness.setFromTriplets(trips.begin(), trips.end());
  sub.stiffness.makeCompressed();

  sub.mass_plus.resize(m);
  sub.mass_minus.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    sub.mass_plus[k] = ops.mass_plus[nodes[static_cast<std::size_t>(k)]];
    sub.mass_minus[k] = ops.mass_minus[nodes[static_cast<std::size_t>(k)]];
    if (sub.mass_minus[k] > 0.0) sub.negative_nodes.push_back(static_cast<int>(k));
  }
  return sub;
}

double energy(const OperatorSet& ops, const ProblemParams& params, const Vector& u) {
  const double grad_sq = ops.dirichlet_energy(u);
  return 0.25 * params.alpha * grad_sq * grad_sq + 0.5 * grad_sq +
         0.5 * u.dot(ops.mass_plus.asDiagonal() * u) -
         0.5 * u.dot(ops.mass_minus.asDiagonal() * u) - ops.p_mass(u, params.p) / params.p;
}

Vector gradient(const OperatorSet& ops, const ProblemParams& params, const Vector& u) {
  const double grad_sq = ops.dirichlet_energy(u);
  Vector g = (params.alpha * grad_sq + 1.0) * (ops.stiffness * u);
  g += ops.mass_plus.asDiagonal() * u;
  g -= ops.mass_minus.asDiagonal() * u;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    g[i] -= ops.quad_weight * std::pow(std::abs(u[i]), params.p - 2.0) * u[i];
  return g;
}

Vector hessian_product(const OperatorSet& ops, const ProblemParams& params, const Vector& u,
                       const Vector& v) {
  const double grad_sq = ops.dirichlet_energy(u);
  const Vector ku = ops.stiffness * u;
  Vector hv = (params.alpha * grad_sq + 1.0) * (ops.stiffness * v);
  hv += 2.0 * params.alpha * ku.dot(v) * ku;
  hv += ops.mass_plus.asDiagonal() * v;
  hv -= ops.mass_minus.asDiagonal() * v;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    hv[i] -= (params.p - 1.0) * ops.quad_weight * std::pow(std::abs(u[i]), params.p - 2.0) * v[i];
  return hv;
}

double nehari_defect(const OperatorSet& ops, const ProblemParams& params, const Vector& u) {
  const double grad_sq = ops.dirichlet_energy(u);
  const double norm_sq = ops.lambda_norm_sq(u);
  const double pairing = params.alpha * grad_sq * grad_sq + norm_sq - ops.negative_form(u, u) -
                         ops.p_mass(u, params.p);
  return std::abs(pairing) / std::max(1.0, norm_sq);
}

EmbeddingConstants embedding_constants(const PotentialWell& well, double coupling, double sobolev,
                                       double sobolev_p) {
  if (!(sobolev > 0.0) || !(sobolev_p > 0.0))
    fail(ErrorCode::InvalidParameter, "Sobolev constants must be positive");
  const double denom = well.offset() + well.tail_floor() * coupling;
  if (!(coupling > 0.0) || !(denom > 0.0))
    fail(ErrorCode::LambdaBelowThreshold,
         "coupling must exceed max{0, -offset/tail_floor} for the embedding to hold");
  EmbeddingConstants ec;
  ec.sobolev = sobolev;
  ec.sobolev_p = sobolev_p;
  const double tail_branch = std::pow(well.tail_set_measure(), 2.0 / 3.0) / sobolev;
  ec.l2_factor = std::sqrt(std::max(tail_branch, 1.0 / denom));
  ec.lp_factor = std::sqrt((1.0 + ec.l2_factor * ec.l2_factor) / sobolev_p);
  return ec;
}

double talenti_sobolev_constant() {
  const double pi = 3.14159265358979323846;
  return 3.0 * std::pow(pi * pi / 4.0, 2.0 / 3.0);
}

double discrete_tail_embedding_constant(const OperatorSet& ops, const Grid& grid,
                                        const PotentialWell& well) {
  Vector weights(ops.size());
  for (Eigen::Index i = 0; i < ops.size(); ++i) {
    const double a = well.potential(grid.coordinate(i));
    weights[i] = (a < well.tail_floor()) ? ops.quad_weight : 0.0;
  }
  const PencilEigenpairs pairs = constrained_pencil(ops.stiffness, weights, 1);
  const double c = pairs.values[0];  // min u^T K u / int_{tail set} u^2
  return c * std::pow(well.tail_set_measure(), 2.0 / 3.0);
}

double discrete_p_embedding_constant(const OperatorSet& ops, const Grid& grid, double p,
                                     unsigned seed, double safety) {
  SparseMatrix H1 = ops.stiffness;
  for (Eigen::Index i = 0; i < ops.size(); ++i) H1.coeffRef(i, i) += ops.quad_weight;
  Eigen::SimplicialLLT<SparseMatrix> llt(H1);

  const auto quotient = [&](const Vector& u) {
    return (ops.dirichlet_energy(u) + ops.l2_sq(u)) / std::pow(ops.p_mass(u, p), 2.0 / p);
  };
  const auto minimize_from = [&](Vector u) {
    u /= std::pow(ops.p_mass(u, p), 1.0 / p);
    double q = quotient(u);
    for (int iter = 0; iter < 400; ++iter) {
      Vector g = 2.0 * (ops.stiffness * u) + 2.0 * ops.quad_weight * u;
      for (Eigen::Index i = 0; i < u.size(); ++i)
        g[i] -= 2.0 * q * ops.quad_weight * std::pow(std::abs(u[i]), p - 2.0) * u[i];
      const Vector dir = llt.solve(g);
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        Vector cand = u - step * dir;
        const double pm = ops.p_mass(cand, p);
        if (pm > 0.0) {
          cand /= std::pow(pm, 1.0 / p);
          const double qc = quotient(cand);
          if (qc < q - 1e-15 * std::abs(q)) {
            u = cand;
            q = qc;
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    return q;
  };

  // Deterministic bump start, then seeded random restarts.
  Vector bump(ops.size());
  const double sigma = 0.25 * grid.halfwidth();
  for (Eigen::Index i = 0; i < ops.size(); ++i) {
    const auto x = grid.coordinate(i);
    double r2 = 0.0;
    for (int d = 0; d < grid.dim(); ++d) r2 += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
    bump[i] = std::exp(-0.5 * r2 / (sigma * sigma));
  }
  double best = minimize_from(bump);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int restart = 0; restart < 2; ++restart) {
    Vector u(ops.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = bump[i] * (1.0 + 0.3 * gauss(rng));
    best = std::min(best, minimize_from(u));
  }
  return safety * best;
}

}  // namespace kwl
