#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "bohmlab/grid.hpp"

namespace bohmlab {

/// Four periodic grid indices and Catmull-Rom weights for one coordinate.
/// The interpolant is C1 and reproduces quadratics exactly.
struct CubicStencil {
  std::array<std::size_t, 4> index{};
  std::array<double, 4> weight{};
};

CubicStencil cubic_stencil(const Axis& axis, double x);

/// Separable cubic interpolation of a grid field at an off-grid point.
Complex interpolate(const Grid& grid, std::span<const Complex> field, std::span<const double> q);

/// Interpolates several fields sharing one grid at the same point.
void interpolate_many(const Grid& grid, std::span<const std::span<const Complex>> fields,
                      std::span<const double> q, std::span<Complex> out);

}  // namespace bohmlab
