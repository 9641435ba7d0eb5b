#include "kwl/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace kwl {

namespace {

/// Minimum of the discrete L^p norm over {u in span(levels 0..top), grad
/// seminorm 1}. The gradient Gram of the eigenvectors is diagonal with the
/// eigenvalues on it, so the sphere is an ellipsoid in coefficient space.
double sampled_min_p_norm(const DirichletSpectrum& spectrum, int top_level, double p,
                          unsigned seed, int samples) {
  std::vector<const Eigen::MatrixXd*> blocks;
  std::vector<double> gram_diag;
  for (int lev = 0; lev <= top_level; ++lev) {
    const auto& level = spectrum.levels[static_cast<std::size_t>(lev)];
    blocks.push_back(&level.vectors);
    for (int c = 0; c < level.multiplicity(); ++c) gram_diag.push_back(level.value);
  }
  const int k = static_cast<int>(gram_diag.size());
  const Eigen::Index n = blocks.front()->rows();

  const auto assemble_u = [&](const Vector& coef) {
    Vector u = Vector::Zero(n);
    int idx = 0;
    for (const auto* block : blocks)
      for (int c = 0; c < block->cols(); ++c) u += coef[idx++] * block->col(c);
    return u;
  };
  const auto normalize = [&](Vector& coef) {
    double q = 0.0;
    for (int i = 0; i < k; ++i) q += gram_diag[static_cast<std::size_t>(i)] * coef[i] * coef[i];
    coef /= std::sqrt(q);
  };
  const auto p_norm = [&](const Vector& coef) {
    const Vector u = assemble_u(coef);
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), p);
    return std::pow(spectrum.quad_weight * s, 1.0 / p);
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector best = Vector::Zero(k);
  double best_val = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vector coef(k);
    for (int i = 0; i < k; ++i) coef[i] = gauss(rng);
    normalize(coef);
    const double val = p_norm(coef);
    if (val < best_val) {
      best_val = val;
      best = coef;
    }
  }

  // Local polish: projected finite-difference descent on the ellipsoid.
  double step = 0.1;
  for (int iter = 0; iter < 200 && step > 1e-10; ++iter) {
    Vector grad(k);
    const double fd = 1e-6;
    for (int i = 0; i < k; ++i) {
      Vector cp = best, cm = best;
      cp[i] += fd;
      cm[i] -= fd;
      normalize(cp);
      normalize(cm);
      grad[i] = (p_norm(cp) - p_norm(cm)) / (2.0 * fd);
    }
    Vector cand = best - step * grad;
    normalize(cand);
    const double val = p_norm(cand);
    if (val < best_val) {
      best_val = val;
      best = cand;
      step *= 1.3;
    } else {
      step *= 0.5;
    }
  }
  return best_val;
}

}  // namespace

LinkingGeometry linking_geometry(const EmbeddingConstants& consts,
                                 const DirichletSpectrum& spectrum, const ProblemParams& params,
                                 double coupling_floor, unsigned seed, int samples) {
  int k0 = 0;
  try {
    k0 = threshold_index(spectrum);
  } catch (const Error&) {
    fail(ErrorCode::GammaBelowOne,
         "no eigenvalue strictly above 1 in the computed spectrum");
  }
  const double gamma = spectrum.value(k0 - 1);
  if (!(gamma > 1.0)) fail(ErrorCode::GammaBelowOne, "threshold eigenvalue must exceed 1");

  LinkingGeometry geo;
  geo.gamma_threshold = gamma;
  geo.sobolev = consts.sobolev;
  geo.sobolev_p = consts.sobolev_p;
  geo.l2_factor = consts.l2_factor;
  geo.p = params.p;
  geo.coupling_floor = coupling_floor;

  const double floor_coeff = 1.0 - 1.0 / gamma;
  const double lp_pow = std::pow(consts.lp_factor, params.p);  // S_p^{-p/2}(1+d^2)^{p/2}
  geo.sphere_radius = std::pow(floor_coeff / (8.0 * lp_pow), 1.0 / (params.p - 2.0));
  geo.energy_floor = geo.sphere_radius * geo.sphere_radius / 8.0 * floor_coeff;

  geo.min_p_norm = sampled_min_p_norm(spectrum, k0 - 1, params.p, seed, samples);
  geo.boundary_radius = std::pow(
      params.p * floor_coeff / (2.0 * std::pow(geo.min_p_norm, params.p)),
      1.0 / (params.p - 2.0));
  if (!(geo.boundary_radius > geo.sphere_radius))
    fail(ErrorCode::InvalidParameter,
         "geometry collapsed: the boundary radius does not exceed the sphere radius");
  geo.coupling_cap = 2.0 * geo.energy_floor / std::pow(geo.boundary_radius, 4.0);
  return geo;
}

double ps_bound(double alpha, double energy_cap, double offset, double tail_measure,
                double sobolev, double p) {
  if (!(p > 4.0) || !(p < 6.0)) fail(ErrorCode::BadExponent, "requires 4 < p < 6");
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidParameter, "alpha must be positive");
  const double young_term = 2.0 * (p - 2.0) * (p - 2.0) * offset * offset *
                            std::pow(tail_measure, 4.0 / 3.0) /
                            (sobolev * sobolev * alpha * (p - 4.0) * p);
  return 8.0 * p / (p - 4.0) * (energy_cap + young_term);
}

double nontriviality_threshold(double p, double sobolev, double offset, double tail_floor,
                               double ps_B) {
  if (!(p > 4.0) || !(p < 6.0)) fail(ErrorCode::BadExponent, "requires 4 < p < 6");
  if (!(tail_floor > 0.0)) fail(ErrorCode::InvalidParameter, "tail_floor must be positive");
  const double lhs = 2.0 * std::pow(sobolev, -3.0 * (p - 2.0) / 4.0) *
                     std::pow(ps_B, (5.0 * p - 10.0) / 8.0);
  const double bracket = std::pow(lhs, 4.0 / (6.0 - p));
  return std::max(0.0, (bracket - offset) / tail_floor);
}

}  // namespace kwl
