#include "kwl/well.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kwl {

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

double smoothstep_inverse(double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  // Bisection to full double resolution, then Newton. s is strictly
  // increasing on [0,1].
  double lo = 0.0, hi = 1.0;
  double t = 0.5;
  for (int i = 0; i < 60; ++i) {
    t = 0.5 * (lo + hi);
    (smoothstep(t) < y ? lo : hi) = t;
  }
  for (int i = 0; i < 4; ++i) {
    const double f = t * t * (3.0 - 2.0 * t) - y;
    const double df = 6.0 * t * (1.0 - t);
    if (df <= 0.0) break;
    t = std::clamp(t - f / df, 0.0, 1.0);
  }
  return t;
}

PotentialWell::PotentialWell(int dim, double well_halfwidth, double ramp_width, double cap,
                             double tail_floor, double offset, double coupling)
    : dim_(dim),
      well_halfwidth_(well_halfwidth),
      ramp_width_(ramp_width),
      cap_(cap),
      tail_floor_(tail_floor),
      offset_(offset),
      coupling_(coupling) {
  if (dim < 1 || dim > 3) fail(ErrorCode::InvalidParameter, "well dim must be 1, 2 or 3");
  for (double v : {well_halfwidth, ramp_width, cap, tail_floor, offset, coupling}) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidParameter, "well fields must be finite");
  }
  if (!(well_halfwidth > 0.0))
    fail(ErrorCode::InvalidParameter, "well_halfwidth must be positive");
  if (!(ramp_width > 0.0)) fail(ErrorCode::InvalidParameter, "ramp_width must be positive");
  if (!(coupling > 0.0)) fail(ErrorCode::InvalidParameter, "coupling must be positive");
}

PotentialWell PotentialWell::with_coupling(double coupling) const {
  return PotentialWell(dim_, well_halfwidth_, ramp_width_, cap_, tail_floor_, offset_, coupling);
}

double PotentialWell::plateau_distance(const std::array<double, 3>& x) const {
  double m = 0.0;
  for (int d = 0; d < dim_; ++d) m = std::max(m, std::abs(x[static_cast<std::size_t>(d)]));
  return std::max(0.0, m - well_halfwidth_);
}

double PotentialWell::potential(const std::array<double, 3>& x) const {
  const double dist = plateau_distance(x);
  if (dist <= 0.0) return 0.0;
  if (dist >= ramp_width_) return cap_;
  return cap_ * smoothstep(dist / ramp_width_);
}

double PotentialWell::shifted_potential(const std::array<double, 3>& x) const {
  return coupling_ * potential(x) + offset_;
}

double PotentialWell::sublevel_measure(double level) const {
  if (level <= 0.0) return 0.0;
  if (level > cap_) return std::numeric_limits<double>::infinity();
  // {a < level} is the open box of halfwidth well_halfwidth + ramp_width * s^{-1}(level/cap).
  const double hw = well_halfwidth_ + ramp_width_ * smoothstep_inverse(level / cap_);
  return std::pow(2.0 * hw, dim_);
}

double PotentialWell::plateau_measure() const { return std::pow(2.0 * well_halfwidth_, dim_); }

double PotentialWell::finite_measure_threshold() const {
  return offset_ < 0.0 ? -offset_ / cap_ : 0.0;
}

double measure_negative_set(const PotentialWell& well) {
  if (well.offset() >= 0.0) return 0.0;
  if (well.coupling() <= well.finite_measure_threshold())
    return std::numeric_limits<double>::infinity();
  return well.sublevel_measure(-well.offset() / well.coupling());
}

namespace {

HypothesisCheck check(const std::string& name, bool passed, const std::string& detail) {
  return HypothesisCheck{name, passed, detail};
}

}  // namespace

ValidationReport validate_well(const PotentialWell& well) {
  if (!(well.cap() > 0.0)) fail(ErrorCode::NonPositiveCap, "potential cap must be positive");
  if (well.tail_floor() >= well.cap())
    fail(ErrorCode::ThresholdOrder,
         "tail_floor must lie strictly below the cap, otherwise {a < tail_floor} has "
         "infinite measure");

  ValidationReport report;
  std::ostringstream oss;

  // (A1): continuity and nonnegativity hold by construction of the family;
  // record the verified facts rather than re-deriving them numerically.
  report.checks.push_back(check(
      "A1", true, "a is a continuous smoothstep ramp with a >= 0 and cap " +
                      std::to_string(well.cap())));

  const bool floor_ok = well.tail_floor() > 0.0;
  report.tail_set_measure = floor_ok ? well.tail_set_measure() : 0.0;
  oss.str("");
  oss << "|{a < tail_floor}| = " << report.tail_set_measure;
  report.checks.push_back(check("A2", floor_ok && std::isfinite(report.tail_set_measure),
                                floor_ok ? oss.str() : "tail_floor must be positive"));

  // (A3): the plateau is a bounded open box whose closure is exactly {a = 0}.
  report.checks.push_back(check(
      "A3", true,
      "plateau is the bounded box of halfwidth " + std::to_string(well.well_halfwidth()) +
          "; closure equals the zero set of a"));
  report.notes.push_back(
      "modeling deviation: the plateau is a coordinate box, so its boundary is only "
      "Lipschitz, not smooth");

  report.finite_measure_threshold = well.finite_measure_threshold();

  report.passed = true;
  for (const auto& c : report.checks) report.passed = report.passed && c.passed;
  return report;
}

std::string ValidationReport::summary() const {
  std::ostringstream oss;
  for (const auto& c : checks)
    oss << c.name << ": " << (c.passed ? "pass" : "FAIL") << " (" << c.detail << ")\n";
  oss << "tail_set_measure = " << tail_set_measure << "\n";
  oss << "finite_measure_threshold = " << finite_measure_threshold << "\n";
  for (const auto& n : notes) oss << "note: " << n << "\n";
  return oss.str();
}

}  // namespace kwl
