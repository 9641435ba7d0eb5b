#pragma once

#include <array>
#include <string>
#include <vector>

#include "kwl/errors.hpp"

namespace kwl {

/// Monotone C^1 cutoff s(t) = t^2 (3 - 2t) on [0,1], clamped outside.
double smoothstep(double t);
/// Inverse of the cutoff on [0,1], exact to machine precision.
double smoothstep_inverse(double y);

/// Box-plateau potential family: a(x) = 0 on the open box of halfwidth
/// `well_halfwidth`, rises along a smoothstep ramp of width `ramp_width`
/// (box distance), and equals `cap` beyond. Together with the constant
/// offset and the coupling this defines the potential coupling*a(x)+offset.
/// Immutable after construction.
class PotentialWell {
 public:
  PotentialWell(int dim, double well_halfwidth, double ramp_width, double cap,
                double tail_floor, double offset, double coupling);

  int dim() const { return dim_; }
  double well_halfwidth() const { return well_halfwidth_; }
  double ramp_width() const { return ramp_width_; }
  double cap() const { return cap_; }
  /// The floor threshold a_inf defining the sublevel set of finite measure.
  double tail_floor() const { return tail_floor_; }
  double offset() const { return offset_; }
  double coupling() const { return coupling_; }

  PotentialWell with_coupling(double coupling) const;

  /// Bare potential a(x) >= 0. Exactly zero on the closed plateau box.
  double potential(const std::array<double, 3>& x) const;
  /// Box distance from x to the plateau: max(0, max_k|x_k| - well_halfwidth).
  double plateau_distance(const std::array<double, 3>& x) const;
  /// coupling*a(x) + offset.
  double shifted_potential(const std::array<double, 3>& x) const;

  /// Volume of the open box {a < level}; +infinity when level > cap.
  double sublevel_measure(double level) const;
  /// |{a < tail_floor}|, the finite-measure hypothesis set.
  double tail_set_measure() const { return sublevel_measure(tail_floor_); }
  /// |Omega| = (2 well_halfwidth)^dim.
  double plateau_measure() const;

  /// Coupling threshold below which {coupling*a + offset < 0} has infinite
  /// measure: -offset/cap for offset < 0, zero otherwise.
  double finite_measure_threshold() const;

 private:
  int dim_;
  double well_halfwidth_;
  double ramp_width_;
  double cap_;
  double tail_floor_;
  double offset_;
  double coupling_;
};

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  bool passed = false;
  std::vector<HypothesisCheck> checks;
  double tail_set_measure = 0.0;        // |A_inf|
  double finite_measure_threshold = 0.0;
  std::vector<std::string> notes;       // modeling deviations worth recording

  std::string summary() const;
};

/// Checks the admissibility hypotheses on the potential family and reports
/// the analytic quantities the rest of the pipeline consumes.
/// Throws NonPositiveCap / ThresholdOrder for the two hard violations.
ValidationReport validate_well(const PotentialWell& well);

/// Exact Lebesgue measure of {coupling*a + offset < 0}. Returns +infinity
/// when offset < 0 and coupling <= finite_measure_threshold, 0 when
/// offset >= 0.
double measure_negative_set(const PotentialWell& well);

/// Exponent window and Kirchhoff coupling of the problem.
struct ProblemParams {
  double p;
  double alpha;

  ProblemParams(double p_, double alpha_) : p(p_), alpha(alpha_) {
    if (!(p > 4.0) || !(p < 6.0))
      fail(ErrorCode::InvalidParameter, "exponent p must satisfy 4 < p < 6");
    if (!(alpha > 0.0)) fail(ErrorCode::InvalidParameter, "alpha must be positive");
  }
};

}  // namespace kwl
