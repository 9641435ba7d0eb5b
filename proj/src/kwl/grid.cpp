#include "kwl/grid.hpp"

#include <cmath>

namespace kwl {

Grid::Grid(int dim, double halfwidth, int points_per_axis)
    : dim_(dim), halfwidth_(halfwidth), n_(points_per_axis) {
  if (dim < 1 || dim > 3) fail(ErrorCode::InvalidParameter, "grid dim must be 1, 2 or 3");
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth))
    fail(ErrorCode::InvalidParameter, "grid halfwidth must be positive and finite");
  if (n_ < 8) fail(ErrorCode::InvalidParameter, "points_per_axis must be >= 8");
  h_ = 2.0 * halfwidth_ / static_cast<double>(n_ + 1);
  cell_volume_ = 1.0;
  node_count_ = 1;
  for (int d = 0; d < dim_; ++d) {
    cell_volume_ *= h_;
    node_count_ *= n_;
  }
}

std::int64_t Grid::flat_index(const std::array<int, 3>& multi) const {
  std::int64_t flat = 0;
  for (int d = dim_ - 1; d >= 0; --d) flat = flat * n_ + multi[static_cast<std::size_t>(d)];
  return flat;
}

std::array<int, 3> Grid::multi_index(std::int64_t flat) const {
  std::array<int, 3> multi{0, 0, 0};
  for (int d = 0; d < dim_; ++d) {
    multi[static_cast<std::size_t>(d)] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return multi;
}

std::array<double, 3> Grid::coordinate(std::int64_t flat) const {
  const auto multi = multi_index(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d)
    x[static_cast<std::size_t>(d)] =
        -halfwidth_ + (multi[static_cast<std::size_t>(d)] + 1) * h_;
  return x;
}

double Grid::max_abs_coordinate(std::int64_t flat) const {
  const auto x = coordinate(flat);
  double m = 0.0;
  for (int d = 0; d < dim_; ++d) m = std::max(m, std::abs(x[static_cast<std::size_t>(d)]));
  return m;
}

}  // namespace kwl
