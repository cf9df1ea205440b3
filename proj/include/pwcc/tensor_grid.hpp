#pragma once

#include <cstddef>
#include <vector>

#include "pwcc/core.hpp"

namespace pwcc {

/// Cartesian product of per-axis coordinate lists, enumerated in
/// lexicographic order (axis 0 varies slowest).
class TensorGrid {
 public:
  explicit TensorGrid(std::vector<std::vector<double>> axes);

  /// `points_per_axis` evenly spaced coordinates per axis, corners included.
  static TensorGrid uniform(const Box& box, std::size_t points_per_axis);

  std::size_t dimension() const noexcept { return axes_.size(); }
  /// Product of axis lengths; saturates at SIZE_MAX.
  std::size_t size() const noexcept { return size_; }
  const std::vector<std::vector<double>>& axes() const noexcept { return axes_; }

  /// Writes point number `flat` into `out` (resized to the dimension).
  void point(std::size_t flat, std::vector<double>& out) const;

 private:
  std::vector<std::vector<double>> axes_;
  std::size_t size_;
};

/// `count` >= 2 evenly spaced values from lo to hi, both ends exact.
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace pwcc
