#include "kwl/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "kwl/analysis.hpp"
#include "kwl/pencil.hpp"

namespace kwl {

const char* to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::nehari: return "nehari";
    case SolveMethod::mountain_pass: return "mountain_pass";
    case SolveMethod::linking: return "linking";
    case SolveMethod::limit: return "limit";
  }
  return "unknown";
}

namespace {

// Armijo acceptance with this constant makes every accepted outer step
// strictly nonincreasing in J; the descent-safety invariant holds by
// construction.
constexpr double kArmijo = 1e-4;

/// Shared solver state: the E_lambda metric, its Cholesky factor, and the
/// running a-priori norm monitor.
struct Workspace {
  const OperatorSet& ops;
  const ProblemParams& params;
  const SolverOptions& options;
  SparseMatrix metric;  // G = K + M^+
  Eigen::SimplicialLLT<SparseMatrix> factor;
  double energy_cap = -std::numeric_limits<double>::infinity();

  Workspace(const OperatorSet& ops_, const ProblemParams& params_, const SolverOptions& opts)
      : ops(ops_), params(params_), options(opts) {
    metric = ops.stiffness;
    for (Eigen::Index i = 0; i < ops.size(); ++i)
      if (ops.mass_plus[i] != 0.0) metric.coeffRef(i, i) += ops.mass_plus[i];
    metric.makeCompressed();
    factor.compute(metric);
    if (factor.info() != Eigen::Success)
      fail(ErrorCode::InvalidParameter, "energy metric is not SPD");
  }

  Vector precondition(const Vector& g) const { return factor.solve(g); }

  double dual_norm(const Vector& g) const { return std::sqrt(g.dot(factor.solve(g))); }

  double metric_inner(const Vector& a, const Vector& b) const { return a.dot(metric * b); }

  void monitor(const Vector& u, double value) {
    if (!options.ps.enabled) return;
    energy_cap = std::max(energy_cap, value);
    const double bound = ps_bound(params.alpha, energy_cap, options.ps.offset_abs,
                                  options.ps.tail_measure, options.ps.sobolev, params.p);
    const double grad_sq = ops.dirichlet_energy(u);
    const double lhs = params.alpha * grad_sq * grad_sq + ops.lambda_norm_sq(u);
    if (lhs > bound + 1e-9 * std::max(1.0, std::abs(bound))) {
      std::ostringstream oss;
      oss << "iterate escaped the a-priori norm bound: " << lhs << " > " << bound
          << " at energy cap " << energy_cap;
      fail(ErrorCode::PsBoundViolated, oss.str());
    }
  }
};

/// Damped Newton on grad J = 0. The Hessian is a sparse stencil matrix plus
/// the rank-one Kirchhoff coupling, inverted by Sherman-Morrison on top of a
/// sparse LU. Returns false when the iteration cannot reduce the residual.
bool newton_polish(Workspace& ws, Vector& u, long& iterations) {
  const OperatorSet& ops = ws.ops;
  const double p = ws.params.p;
  double res = ws.dual_norm(gradient(ops, ws.params, u));
  for (int step = 0; step < 60; ++step) {
    if (res <= ws.options.tol) return true;
    const double grad_sq = ops.dirichlet_energy(u);
    SparseMatrix H = (ws.params.alpha * grad_sq + 1.0) * ops.stiffness;
    for (Eigen::Index i = 0; i < ops.size(); ++i) {
      double diag = ops.mass_plus[i] - ops.mass_minus[i] -
                    (p - 1.0) * ops.quad_weight * std::pow(std::abs(u[i]), p - 2.0);
      if (diag != 0.0) H.coeffRef(i, i) += diag;
    }
    H.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu(H);
    if (lu.info() != Eigen::Success) return false;

    const Vector g = gradient(ops, ws.params, u);
    const Vector k = ops.stiffness * u;
    const Vector x = lu.solve(g);
    const Vector y = lu.solve(k);
    const double c = 2.0 * ws.params.alpha;
    const double denom = 1.0 + c * k.dot(y);
    if (denom == 0.0) return false;
    const Vector dir = x - (c * k.dot(x) / denom) * y;

    bool accepted = false;
    double trial = 1.0;
    for (int ls = 0; ls < 8; ++ls) {
      const Vector cand = u - trial * dir;
      const double cand_res = ws.dual_norm(gradient(ops, ws.params, cand));
      if (cand_res < res) {
        u = cand;
        res = cand_res;
        accepted = true;
        ++iterations;
        ws.monitor(u, energy(ops, ws.params, u));
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) return false;
  }
  return res <= ws.options.tol;
}

SolutionRecord finalize(Workspace& ws, const Vector& u, long iterations, SolveMethod method,
                        double coupling) {
  SolutionRecord rec;
  rec.u = u;
  rec.alpha = ws.params.alpha;
  rec.coupling = coupling;
  rec.p = ws.params.p;
  rec.energy_value = energy(ws.ops, ws.params, u);
  rec.grad_norm = ws.dual_norm(gradient(ws.ops, ws.params, u));
  rec.defect = nehari_defect(ws.ops, ws.params, u);
  rec.norm_lambda = std::sqrt(ws.ops.lambda_norm_sq(u));
  rec.iterations = iterations;
  rec.method = method;

  if (rec.grad_norm > ws.options.tol)
    fail(ErrorCode::MaxItersExceeded,
         "gradient norm " + std::to_string(rec.grad_norm) + " above tolerance");
  if (rec.norm_lambda < 1e-6)
    fail(ErrorCode::TrivialSolution, "solver collapsed to the trivial point");
  if (rec.defect > 1e-6)
    fail(ErrorCode::InvalidParameter, "stationarity defect above the acceptance floor");
  return rec;
}

/// Unique positive root of alpha A^2 t^2 + B = C t^{p-2} (the ray-maximizer
/// scale). B must be positive, C positive.
double fiber_scale(double alpha, double grad_sq, double quad_form, double p_term, double p) {
  const double a2 = alpha * grad_sq * grad_sq;
  const auto f = [&](double t) {
    return a2 * t * t + quad_form - p_term * std::pow(t, p - 2.0);
  };
  double hi = 1.0;
  int guard = 0;
  while (f(hi) > 0.0 && guard++ < 400) hi *= 2.0;
  if (f(hi) > 0.0) fail(ErrorCode::NoCrossing, "ray equation has no positive root");
  double lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double fv = f(t);
    const double df = 2.0 * a2 * t - (p - 2.0) * p_term * std::pow(t, p - 3.0);
    if (df == 0.0) break;
    const double next = t - fv / df;
    if (next > lo && next < hi) t = next;
  }
  return t;
}

/// Nehari fiber point of the ray through v; requires the effective quadratic
/// form on v to be positive.
Vector fiber_point(const OperatorSet& ops, const ProblemParams& params, const Vector& v) {
  const double grad_sq = ops.dirichlet_energy(v);
  const double quad_form = ops.lambda_norm_sq(v) - ops.negative_form(v, v);
  const double p_term = ops.p_mass(v, params.p);
  if (!(p_term > 0.0)) fail(ErrorCode::NoCrossing, "p-mass vanished; assembly corrupted");
  if (!(quad_form > 0.0))
    fail(ErrorCode::InvalidParameter,
         "quadratic form is not positive along the ray; the definite-regime solver "
         "does not apply");
  return fiber_scale(params.alpha, grad_sq, quad_form, p_term, params.p) * v;
}

}  // namespace

SolutionRecord nehari_solve(const OperatorSet& ops, const ProblemParams& params,
                            const Vector& seed, const SolverOptions& options) {
  if (seed.size() != ops.size() || seed.norm() == 0.0)
    fail(ErrorCode::SeedZero, "seed must be a nonzero grid vector");

  Workspace ws(ops, params, options);
  Vector v = seed / std::sqrt(ops.lambda_norm_sq(seed));
  Vector u = fiber_point(ops, params, v);
  double value = energy(ops, params, u);
  ws.monitor(u, value);

  long iterations = 0;
  for (; iterations < options.max_iters; ++iterations) {
    const Vector g = gradient(ops, params, u);
    const Vector d = ws.precondition(g);
    const double slope = g.dot(d);
    const double res = std::sqrt(std::max(0.0, slope));
    if (res <= options.tol) break;
    if (res <= options.newton_switch) {
      Vector polished = u;
      if (newton_polish(ws, polished, iterations))
        return finalize(ws, polished, iterations, SolveMethod::nehari, 0.0);
    }

    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      const Vector cand_dir = u - step * d;
      if (cand_dir.norm() == 0.0) {
        step *= 0.5;
        continue;
      }
      const Vector cand = fiber_point(ops, params, cand_dir);
      const double cand_value = energy(ops, params, cand);
      if (cand_value <= value - kArmijo * step * slope) {
        u = cand;
        value = cand_value;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      Vector polished = u;
      if (newton_polish(ws, polished, iterations))
        return finalize(ws, polished, iterations, SolveMethod::nehari, 0.0);
      fail(ErrorCode::MaxItersExceeded, "line search stagnated before tolerance");
    }
    ws.monitor(u, value);
  }
  if (iterations >= options.max_iters)
    fail(ErrorCode::MaxItersExceeded, "nehari outer iteration limit reached");
  return finalize(ws, u, iterations, SolveMethod::nehari, 0.0);
}

namespace {

/// Even arclength (in the E_lambda metric) resampling of a polyline, keeping
/// both endpoints.
std::vector<Vector> resample_polyline(const Workspace& ws, const std::vector<Vector>& pts,
                                      int segments) {
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vector diff = pts[i] - pts[i - 1];
    cum[i] = cum[i - 1] + std::sqrt(std::max(0.0, ws.ops.lambda_norm_sq(diff)));
  }
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(segments) + 1);
  out.push_back(pts.front());
  const double total = cum.back();
  std::size_t seg = 1;
  for (int k = 1; k < segments; ++k) {
    const double target = total * k / segments;
    while (seg + 1 < pts.size() && cum[seg] < target) ++seg;
    const double lo = cum[seg - 1], hi = cum[seg];
    const double w = hi > lo ? (target - lo) / (hi - lo) : 0.0;
    out.push_back((1.0 - w) * pts[seg - 1] + w * pts[seg]);
  }
  out.push_back(pts.back());
  return out;
}

}  // namespace

SolutionRecord mountain_pass_solve(const OperatorSet& ops, const ProblemParams& params,
                                   const Vector& endpoint, const SolverOptions& options) {
  if (endpoint.size() != ops.size() || endpoint.norm() == 0.0)
    fail(ErrorCode::SeedZero, "endpoint must be a nonzero grid vector");
  if (energy(ops, params, endpoint) > 0.0)
    fail(ErrorCode::EndpointNotBelowZero, "path endpoint must have nonpositive energy");

  Workspace ws(ops, params, options);
  const int segments = std::max(8, options.path_points - 1);
  std::vector<Vector> path(static_cast<std::size_t>(segments) + 1);
  for (int j = 0; j <= segments; ++j)
    path[static_cast<std::size_t>(j)] = (static_cast<double>(j) / segments) * endpoint;

  long iterations = 0;
  for (; iterations < options.max_iters; ++iterations) {
    int jmax = 0;
    double vmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= segments; ++j) {
      const double vj = energy(ops, params, path[static_cast<std::size_t>(j)]);
      if (vj > vmax) {
        vmax = vj;
        jmax = j;
      }
    }
    if (jmax == 0 || jmax == segments)
      fail(ErrorCode::MaxItersExceeded, "path maximum migrated to an endpoint");

    Vector u = path[static_cast<std::size_t>(jmax)];
    ws.monitor(u, vmax);
    const Vector g = gradient(ops, params, u);
    const Vector d = ws.precondition(g);
    const double slope = g.dot(d);
    const double res = std::sqrt(std::max(0.0, slope));
    if (res <= options.tol)
      return finalize(ws, u, iterations, SolveMethod::mountain_pass, 0.0);
    if (res <= options.newton_switch) {
      Vector polished = u;
      if (newton_polish(ws, polished, iterations))
        return finalize(ws, polished, iterations, SolveMethod::mountain_pass, 0.0);
    }

    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      const Vector cand = u - step * d;
      const double cand_value = energy(ops, params, cand);
      if (cand_value <= vmax - kArmijo * step * slope) {
        path[static_cast<std::size_t>(jmax)] = cand;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved)
      fail(ErrorCode::MaxItersExceeded, "max-node descent stagnated before tolerance");

    // Rebalance both halves around the relocated node.
    std::vector<Vector> left(path.begin(), path.begin() + jmax + 1);
    std::vector<Vector> right(path.begin() + jmax, path.end());
    const auto left_rs = resample_polyline(ws, left, jmax);
    const auto right_rs = resample_polyline(ws, right, segments - jmax);
    for (int j = 0; j <= jmax; ++j) path[static_cast<std::size_t>(j)] = left_rs[static_cast<std::size_t>(j)];
    for (int j = jmax; j <= segments; ++j)
      path[static_cast<std::size_t>(j)] = right_rs[static_cast<std::size_t>(j - jmax)];
  }
  fail(ErrorCode::MaxItersExceeded, "mountain pass iteration limit reached");
}

namespace {

/// The affine expanding set of the minimax iteration: an E_lambda-orthonormal
/// basis whose last column is the expanding direction (coefficient kept >= 0).
struct ExpandingSet {
  Eigen::MatrixXd basis;  // columns b_1..b_q, e
  int q = 0;              // number of sub-threshold columns
};

struct InnerMaxResult {
  Vector coef;
  Vector point;  // w + basis * coef
  double value = 0.0;
  bool at_boundary = false;
};

/// Exact small-dimension maximization of J over {w + basis c : c_last >= 0}
/// by damped Newton with a gradient-ascent fallback.
InnerMaxResult inner_maximize(Workspace& ws, const ExpandingSet& set, const Vector& w,
                              Vector coef) {
  const int k = static_cast<int>(set.basis.cols());
  const auto point_of = [&](const Vector& c) -> Vector { return w + set.basis * c; };
  const auto value_of = [&](const Vector& c) { return energy(ws.ops, ws.params, point_of(c)); };

  double value = value_of(coef);
  for (int iter = 0; iter < 120; ++iter) {
    const Vector u = point_of(coef);
    const Vector g = gradient(ws.ops, ws.params, u);
    Vector grad_small(k);
    for (int i = 0; i < k; ++i) grad_small[i] = g.dot(set.basis.col(i));
    // Active bound: ignore the ascent component pushing t below zero.
    if (coef[k - 1] <= 0.0 && grad_small[k - 1] < 0.0) grad_small[k - 1] = 0.0;
    if (grad_small.norm() <= 1e-11 * std::max(1.0, std::abs(value))) break;

    Eigen::MatrixXd hess(k, k);
    for (int i = 0; i < k; ++i) {
      const Vector hv = hessian_product(ws.ops, ws.params, u, set.basis.col(i));
      for (int j = 0; j < k; ++j) hess(i, j) = set.basis.col(j).dot(hv);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    Vector dir;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> he(hess);
    if (he.eigenvalues().maxCoeff() < -1e-14) {
      dir = -hess.ldlt().solve(grad_small);  // Newton ascent step
    } else {
      dir = grad_small;  // not concave here; plain ascent
    }
    if (dir.dot(grad_small) <= 0.0) dir = grad_small;

    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vector cand = coef + step * dir;
      if (cand[k - 1] < 0.0) cand[k - 1] = 0.0;
      const double cand_value = value_of(cand);
      if (cand_value > value + kArmijo * step * dir.dot(grad_small)) {
        coef = cand;
        value = cand_value;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }

  InnerMaxResult out;
  out.coef = coef;
  out.point = point_of(coef);
  out.value = value;
  out.at_boundary = coef[k - 1] <= 0.0;
  return out;
}

}  // namespace

SolutionRecord linking_solve(const OperatorSet& ops, const ProblemParams& params,
                             const WellSpectrum& wspec, const DirichletSpectrum& spectrum,
                             const SolverOptions& options) {
  const int k0 = threshold_index(spectrum);
  if (wspec.level_count() < k0)
    fail(ErrorCode::InvalidParameter, "well spectrum has fewer levels than the threshold index");
  if (k0 > 1 && !(spectrum.value(k0 - 2) < 1.0))
    fail(ErrorCode::InvalidParameter, "sub-threshold eigenvalue must lie below 1");
  if (params.alpha >= options.coupling_cap)
    fail(ErrorCode::GeometryViolated,
         "Kirchhoff coupling exceeds the range the linking geometry certifies");

  Workspace ws(ops, params, options);

  ExpandingSet set;
  std::vector<Vector> cols;
  for (int m = 0; m < k0 - 1; ++m) {
    const auto& level = wspec.levels[static_cast<std::size_t>(m)];
    for (int c = 0; c < level.multiplicity(); ++c)
      cols.push_back(level.vectors.col(c) / std::sqrt(level.value));
  }
  set.q = static_cast<int>(cols.size());
  cols.push_back(wspec.minimizer(k0 - 1) / std::sqrt(wspec.value(k0 - 1)));
  set.basis.resize(ops.size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) set.basis.col(static_cast<Eigen::Index>(c)) = cols[c];
  const int k = static_cast<int>(cols.size());

  // Initial expanding coordinate: coarse scan of the ray through the
  // expanding direction, then exact inner maximization.
  Vector w = Vector::Zero(ops.size());
  Vector coef = Vector::Zero(k);
  if (options.warm_start.size() == ops.size() && options.warm_start.norm() > 0.0) {
    Vector u0 = options.warm_start;
    for (int i = 0; i < k; ++i) coef[i] = ws.metric_inner(set.basis.col(i), u0);
    w = u0 - set.basis * coef;
    if (coef[k - 1] < 1e-8) coef[k - 1] = 1e-3;
  } else {
    double best_t = 0.1, best_v = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < 80; ++s) {
      const double t = 0.05 * std::pow(1.15, s);
      Vector c = Vector::Zero(k);
      c[k - 1] = t;
      const double v = energy(ops, params, set.basis * c);
      if (v > best_v) {
        best_v = v;
        best_t = t;
      }
    }
    coef[k - 1] = best_t;
  }

  long iterations = 0;
  InnerMaxResult inner = inner_maximize(ws, set, w, coef);
  if (inner.at_boundary) {
    // Tie-break toward a genuinely expanding point.
    inner.coef[k - 1] = 1e-3;
    inner = inner_maximize(ws, set, w, inner.coef);
  }
  ws.monitor(inner.point, inner.value);
  if (std::sqrt(ws.ops.lambda_norm_sq(inner.point)) >
      options.boundary_radius * (1.0 + 1e-9))
    fail(ErrorCode::GeometryViolated,
         "inner maximizer escaped the expanding-set ball; the Kirchhoff coupling is too "
         "large for this geometry");

  for (; iterations < options.max_iters; ++iterations) {
    const Vector u = inner.point;
    const Vector g = gradient(ops, params, u);
    Vector d = ws.precondition(g);
    for (int i = 0; i < k; ++i) d -= ws.metric_inner(set.basis.col(i), d) * set.basis.col(i);
    const double slope = g.dot(d);
    const double res = ws.dual_norm(g);
    if (res <= options.tol) return finalize(ws, u, iterations, SolveMethod::linking, wspec.coupling);
    if (res <= options.newton_switch) {
      Vector polished = u;
      if (newton_polish(ws, polished, iterations))
        return finalize(ws, polished, iterations, SolveMethod::linking, wspec.coupling);
    }

    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      const Vector w_cand = w - step * d;
      InnerMaxResult cand = inner_maximize(ws, set, w_cand, inner.coef);
      if (cand.value <= inner.value - kArmijo * step * slope) {
        w = w_cand;
        inner = cand;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      Vector polished = u;
      if (newton_polish(ws, polished, iterations))
        return finalize(ws, polished, iterations, SolveMethod::linking, wspec.coupling);
      fail(ErrorCode::MaxItersExceeded, "minimax descent stagnated before tolerance");
    }
    if (inner.at_boundary) {
      inner.coef[k - 1] = 1e-3;
      inner = inner_maximize(ws, set, w, inner.coef);
    }
    ws.monitor(inner.point, inner.value);
    if (std::sqrt(ws.ops.lambda_norm_sq(inner.point)) >
        options.boundary_radius * (1.0 + 1e-9))
      fail(ErrorCode::GeometryViolated,
           "inner maximizer escaped the expanding-set ball; the Kirchhoff coupling is too "
           "large for this geometry");
  }
  fail(ErrorCode::MaxItersExceeded, "linking iteration limit reached");
}

SolutionRecord limit_problem_solve(const Grid& grid, const PotentialWell& well,
                                   const ProblemParams& params, const SolverOptions& options) {
  const std::vector<int> nodes = plateau_subgrid(grid, well);
  if (nodes.empty()) fail(ErrorCode::InvalidParameter, "plateau subgrid is empty");
  const OperatorSet full = assemble(grid, well);
  const OperatorSet sub = restrict_to_nodes(full, nodes);

  SolverOptions opts = options;
  if (options.warm_start.size() == full.size()) {
    opts.warm_start.resize(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
      opts.warm_start[static_cast<Eigen::Index>(i)] = options.warm_start[nodes[i]];
  }

  const Vector unit_weights = Vector::Constant(sub.size(), sub.quad_weight);
  SolutionRecord rec;
  if (well.offset() >= 0.0) {
    const PencilEigenpairs ground = constrained_pencil(sub.stiffness, unit_weights, 1);
    const Vector seed =
        opts.warm_start.size() == sub.size() ? opts.warm_start : ground.vectors.col(0);
    rec = nehari_solve(sub, params, seed, opts);
  } else {
    const double mass = std::abs(well.offset()) * sub.quad_weight;
    WellSpectrum pencil = well_levels_from_pencil(
        sub.stiffness, Vector::Constant(sub.size(), mass), 8,
        std::numeric_limits<double>::infinity());

    DirichletSpectrum spec_sub;
    spec_sub.plateau_nodes.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      spec_sub.plateau_nodes[i] = static_cast<int>(i);
    spec_sub.quad_weight = sub.quad_weight;
    spec_sub.offset_abs = std::abs(well.offset());
    spec_sub.cluster_tol = pencil.cluster_tol;
    spec_sub.levels = pencil.levels;

    if (spec_sub.value(0) > 1.0) {
      const Vector seed = opts.warm_start.size() == sub.size()
                              ? opts.warm_start
                              : Vector(pencil.minimizer(0));
      rec = nehari_solve(sub, params, seed, opts);
    } else {
      rec = linking_solve(sub, params, pencil, spec_sub, opts);
    }
  }

  Vector extended = Vector::Zero(full.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    extended[nodes[i]] = rec.u[static_cast<Eigen::Index>(i)];
  rec.u = extended;
  rec.coupling = std::numeric_limits<double>::infinity();
  rec.method = SolveMethod::limit;
  rec.mass_outside = 0.0;
  return rec;
}

double mass_outside_plateau(const Grid& grid, const PotentialWell& well, const Vector& u) {
  const double snap = 1e-9 * grid.spacing();
  double inside = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double v = u[i] * u[i];
    total += v;
    if (grid.max_abs_coordinate(i) <= well.well_halfwidth() + snap) inside += v;
  }
  return total > 0.0 ? (total - inside) / total : 0.0;
}

}  // namespace kwl
