#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kwl/errors.hpp"

namespace kwl {

/// Tensor lattice of interior nodes on the open box (-halfwidth, halfwidth)^dim
/// with homogeneous Dirichlet truncation: nodes sit at -R + (i+1)*h along each
/// axis, i = 0..n-1, h = 2R/(n+1). The box boundary carries no unknowns.
class Grid {
 public:
  Grid(int dim, double halfwidth, int points_per_axis);

  int dim() const { return dim_; }
  double halfwidth() const { return halfwidth_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return h_; }
  /// h^dim, the nodal quadrature weight.
  double cell_volume() const { return cell_volume_; }
  std::int64_t node_count() const { return node_count_; }

  /// Flat index from per-axis indices (unused axes must be 0).
  std::int64_t flat_index(const std::array<int, 3>& multi) const;
  std::array<int, 3> multi_index(std::int64_t flat) const;
  std::array<double, 3> coordinate(std::int64_t flat) const;

  /// Largest |x_k| over the axes of node `flat` (distance scale to the origin
  /// in the box metric the potential family uses).
  double max_abs_coordinate(std::int64_t flat) const;

 private:
  int dim_;
  double halfwidth_;
  int n_;
  double h_;
  double cell_volume_;
  std::int64_t node_count_;
};

}  // namespace kwl
