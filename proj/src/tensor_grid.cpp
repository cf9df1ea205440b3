#include "pwcc/tensor_grid.hpp"

#include <limits>
#include <stdexcept>
#include <utility>

namespace pwcc {

TensorGrid::TensorGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)), size_(1) {
  if (axes_.empty()) throw std::invalid_argument("tensor grid needs at least one axis");
  for (const auto& axis : axes_) {
    if (axis.empty()) throw std::invalid_argument("tensor grid axis is empty");
    if (size_ > std::numeric_limits<std::size_t>::max() / axis.size()) {
      size_ = std::numeric_limits<std::size_t>::max();
    } else {
      size_ *= axis.size();
    }
  }
}

TensorGrid TensorGrid::uniform(const Box& box, std::size_t points_per_axis) {
  std::vector<std::vector<double>> axes;
  axes.reserve(box.dimension());
  for (std::size_t j = 0; j < box.dimension(); ++j) {
    axes.push_back(linspace(box.lower(j), box.upper(j), points_per_axis));
  }
  return TensorGrid(std::move(axes));
}

void TensorGrid::point(std::size_t flat, std::vector<double>& out) const {
  out.resize(axes_.size());
  for (std::size_t j = axes_.size(); j-- > 0;) {
    const auto& axis = axes_[j];
    out[j] = axis[flat % axis.size()];
    flat /= axis.size();
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) throw std::invalid_argument("linspace needs at least two points");
  std::vector<double> v(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k + 1 < count; ++k) v[k] = lo + static_cast<double>(k) * step;
  v.back() = hi;
  return v;
}

}  // namespace pwcc
