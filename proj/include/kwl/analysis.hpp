#pragma once

#include "kwl/operators.hpp"
#include "kwl/spectrum.hpp"

namespace kwl {

/// The explicit linking geometry: sphere radius, energy floor, expanding-set
/// radius and coupling cap, together with the inputs they were derived from.
struct LinkingGeometry {
  double sphere_radius = 0.0;    // rho
  double energy_floor = 0.0;     // d0
  double boundary_radius = 0.0;  // R0
  double coupling_cap = 0.0;     // alpha0

  // Inputs echoed for the manifest.
  double gamma_threshold = 0.0;  // eigenvalue at the threshold index
  double sobolev = 0.0;
  double sobolev_p = 0.0;
  double l2_factor = 0.0;  // d_lambda at the coupling floor
  double p = 0.0;
  double coupling_floor = 0.0;
  double min_p_norm = 0.0;  // sampled minimum M of the L^p norm on the span sphere

  // Construction choices, recorded for reproducibility.
  double bracket_split = 0.5;   // the sphere radius halves the quadratic floor term
  double cap_split = 0.5;       // (alpha0/4) R0^4 equals half the energy floor
};

/// Derives (rho, d0, R0, alpha0) from the embedding constants at the coupling
/// floor and the plateau spectrum. The sphere radius makes the quadratic
/// bound's bracket equal half its first term; R0 is the smallest radius at
/// which the boundary estimate turns nonpositive with the quartic term
/// dropped; alpha0 = 2 d0 / R0^4. The sampled constant M is the minimum L^p
/// norm over the unit gradient sphere of the span of levels up to the
/// threshold (seeded sampling plus local polish).
LinkingGeometry linking_geometry(const EmbeddingConstants& consts,
                                 const DirichletSpectrum& spectrum, const ProblemParams& params,
                                 double coupling_floor, unsigned seed = 1234,
                                 int samples = 10000);

/// Upper bound for alpha ||grad u||^4 + ||u||_lambda^2 along bounded-energy
/// near-critical sequences at level <= energy_cap:
///   B = (8p/(p-4)) (cap + 2 (p-2)^2 offset^2 |A_inf|^{4/3} S^{-2} / (alpha (p-4) p)).
double ps_bound(double alpha, double energy_cap, double offset, double tail_measure,
                double sobolev, double p);

/// Smallest coupling at which the vanishing-solution estimate
///   S^{-3(p-2)/4} B^{(5p-10)/8} (offset + tail_floor * coupling)^{-(6-p)/4} < 1/2
/// fails to admit the trivial limit, solved in closed form. The factor 2 is a
/// safety margin; ps_B plays the norm-bound constant.
double nontriviality_threshold(double p, double sobolev, double offset, double tail_floor,
                               double ps_B);

}  // namespace kwl
