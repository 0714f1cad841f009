#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "bohmlab/grid.hpp"

namespace bohmlab {

/// Height used for "infinite" walls inside the periodic domain.
inline constexpr double kWallHeight = 1e4;

enum class PotentialKind { free, box, double_slit_barrier, table };

std::string_view to_string(PotentialKind k);

/// Parameters of a two-slit barrier: a wall of given thickness normal to
/// coordinate `normal_axis`, with two openings along `slit_axis`.
struct DoubleSlitBarrier {
  std::size_t normal_axis = 0;
  std::size_t slit_axis = 1;
  double wall_position = 0.0;
  double wall_thickness = 0.2;
  double slit_separation = 4.0;
  double slit_width = 1.0;
  double height = kWallHeight;
};

/// Real potential energy tabulated on a grid.
class Potential {
 public:
  static Potential free(const Grid& grid);
  /// Zero inside [lower, upper] in every coordinate, `wall` elsewhere.
  static Potential box(const Grid& grid, std::span<const double> lower, std::span<const double> upper,
                       double wall = kWallHeight);
  static Potential double_slit(const Grid& grid, const DoubleSlitBarrier& barrier);
  static Potential table(const Grid& grid, std::vector<double> values);

  PotentialKind kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t flat) const { return values_[flat]; }

  /// V(x, y) = V_x(x) + V_y(y) restricted to the given coordinates, taking the
  /// other coordinates at their first grid point. Meaningful for separable potentials.
  Potential restricted(std::span<const std::size_t> coords) const;

 private:
  Potential(PotentialKind kind, Grid grid, std::vector<double> values);

  PotentialKind kind_ = PotentialKind::free;
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace bohmlab
