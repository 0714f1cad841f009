#include "bohmlab/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace bohmlab {

std::string_view to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::free: return "free";
    case PotentialKind::box: return "box";
    case PotentialKind::double_slit_barrier: return "double-slit-barrier";
    case PotentialKind::table: return "table";
  }
  return "free";
}

Potential::Potential(PotentialKind kind, Grid grid, std::vector<double> values)
    : kind_(kind), grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DimensionMismatch("Potential: value count does not match grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Potential: values must be finite");
  }
}

Potential Potential::free(const Grid& grid) {
  return Potential(PotentialKind::free, grid, std::vector<double>(grid.size(), 0.0));
}

Potential Potential::box(const Grid& grid, std::span<const double> lower, std::span<const double> upper,
                         double wall) {
  if (lower.size() != grid.rank() || upper.size() != grid.rank()) {
    throw DimensionMismatch("Potential::box: bounds rank does not match grid");
  }
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t f = 0; f < grid.size(); ++f) {
    for (std::size_t d = 0; d < grid.rank(); ++d) {
      const double x = grid.coordinate(f, d);
      if (x < lower[d] || x > upper[d]) {
        v[f] = wall;
        break;
      }
    }
  }
  return Potential(PotentialKind::box, grid, std::move(v));
}

Potential Potential::double_slit(const Grid& grid, const DoubleSlitBarrier& b) {
  if (b.normal_axis >= grid.rank() || b.slit_axis >= grid.rank() || b.normal_axis == b.slit_axis) {
    throw std::invalid_argument("Potential::double_slit: needs two distinct coordinates");
  }
  std::vector<double> v(grid.size(), 0.0);
  const double half_sep = 0.5 * b.slit_separation;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const double n = grid.coordinate(f, b.normal_axis);
    if (std::abs(n - b.wall_position) > 0.5 * b.wall_thickness) continue;
    const double s = grid.coordinate(f, b.slit_axis);
    const bool open = std::abs(s - half_sep) <= 0.5 * b.slit_width || std::abs(s + half_sep) <= 0.5 * b.slit_width;
    if (!open) v[f] = b.height;
  }
  return Potential(PotentialKind::double_slit_barrier, grid, std::move(v));
}

Potential Potential::table(const Grid& grid, std::vector<double> values) {
  return Potential(PotentialKind::table, grid, std::move(values));
}

Potential Potential::restricted(std::span<const std::size_t> coords) const {
  std::vector<Axis> axes;
  for (auto c : coords) {
    if (c >= grid_.rank()) throw std::invalid_argument("Potential::restricted: coordinate out of range");
    axes.push_back(grid_.axis(c));
  }
  Grid sub(axes);
  std::vector<double> v(sub.size());
  std::vector<std::size_t> full(grid_.rank(), 0);
  for (std::size_t f = 0; f < sub.size(); ++f) {
    const auto idx = sub.multi_index(f);
    for (std::size_t i = 0; i < coords.size(); ++i) full[coords[i]] = idx[i];
    v[f] = values_[grid_.flat_index(full)];
  }
  return Potential(kind_ == PotentialKind::free ? PotentialKind::free : PotentialKind::table, sub, std::move(v));
}

}  // namespace bohmlab
