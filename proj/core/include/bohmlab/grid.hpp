#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohmlab/finite_state.hpp"

namespace bohmlab {

/// Grid wave functions are normalized to this tolerance (Riemann-sum quadrature).
inline constexpr double kGridTolerance = 1e-10;

/// Real position tuple, one entry per grid coordinate.
using Configuration = std::vector<double>;

/// Uniform periodic axis: points origin + i * spacing for i in [0, points).
struct Axis {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t points = 1;

  /// n points covering [lo, hi) with spacing (hi - lo) / n.
  static Axis periodic(double lo, double hi, std::size_t n);

  double at(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  double period() const { return static_cast<double>(points) * spacing; }
  double last() const { return at(points - 1); }
  /// Maps x into [origin, origin + period).
  double wrap(double x) const;
  /// Index of the grid point nearest to x (periodic).
  std::size_t nearest(double x) const;

  bool operator==(const Axis&) const = default;
};

void to_json(nlohmann::json& j, const Axis& a);
void from_json(const nlohmann::json& j, Axis& a);

/// Which side of a subsystem split a coordinate belongs to.
enum class CoordinateRole { subsystem, environment };

/// Cartesian product of axes, row-major: axis 0 is the slowest index.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Axis> axes);

  std::size_t rank() const { return axes_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(std::size_t d) const { return axes_[d]; }
  std::size_t stride(std::size_t d) const { return strides_[d]; }
  double cell_volume() const { return cell_volume_; }

  std::size_t flat_index(std::span<const std::size_t> idx) const;
  std::vector<std::size_t> multi_index(std::size_t flat) const;
  Configuration point(std::size_t flat) const;
  /// Coordinate d of the flat index.
  double coordinate(std::size_t flat, std::size_t d) const;
  /// Nearest grid point to q, wrapping periodically.
  std::size_t nearest_flat(std::span<const double> q) const;

  bool operator==(const Grid& o) const { return axes_ == o.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  double cell_volume_ = 1.0;
};

/// Complex amplitudes over a grid. Amplitudes are not forced to unit norm;
/// operations that need a normalized state say so.
class GridWaveFunction {
 public:
  GridWaveFunction() = default;
  GridWaveFunction(Grid grid, std::vector<Complex> amplitudes);
  GridWaveFunction(Grid grid, std::vector<Complex> amplitudes, std::vector<CoordinateRole> roles);

  const Grid& grid() const { return grid_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }
  std::vector<Complex>& data() { return amplitudes_; }
  const std::vector<Complex>& data() const { return amplitudes_; }
  const std::vector<CoordinateRole>& roles() const { return roles_; }
  void set_roles(std::vector<CoordinateRole> roles);

  Complex operator[](std::size_t i) const { return amplitudes_[i]; }

  GridWaveFunction normalized() const;
  GridWaveFunction scaled(Complex factor) const;
  /// Largest-modulus amplitude rotated onto the positive real axis.
  GridWaveFunction phase_fixed() const;
  double max_modulus() const;

 private:
  Grid grid_;
  std::vector<Complex> amplitudes_;
  std::vector<CoordinateRole> roles_;
};

/// sqrt(sum |psi|^2 * cell volume)
double grid_norm(const GridWaveFunction& w);
/// |psi|^2 pointwise.
std::vector<double> born_density(const GridWaveFunction& w);
/// |psi|^2 * cell volume per cell; sums to the squared norm.
std::vector<double> cell_masses(const GridWaveFunction& w);

/// sum conj(a) b dV. Grids must agree.
Complex grid_inner(const GridWaveFunction& a, const GridWaveFunction& b);
double l2_distance(const GridWaveFunction& a, const GridWaveFunction& b);
/// L2 distance after normalizing both and aligning the global phase optimally.
double l2_distance_up_to_phase(const GridWaveFunction& a, const GridWaveFunction& b);

/// Separable Gaussian packet. `sigma` is the position standard deviation of
/// |psi|^2 per coordinate: psi ~ exp(-(x - c)^2 / (4 sigma^2) + i k x).
struct GaussianPacket {
  Configuration center;
  std::vector<double> sigma;
  std::vector<double> momentum;
  Complex weight{1.0, 0.0};
};

void to_json(nlohmann::json& j, const GaussianPacket& g);
void from_json(const nlohmann::json& j, GaussianPacket& g);

/// Normalized superposition of Gaussian packets evaluated on the grid.
GridWaveFunction gaussian_superposition(const Grid& grid, std::span<const GaussianPacket> packets);
GridWaveFunction gaussian(const Grid& grid, const GaussianPacket& packet);

/// Normalized plane wave exp(i k . x) on the full periodic grid.
GridWaveFunction plane_wave(const Grid& grid, std::span<const double> wavevector);

/// Mean and variance of |psi|^2 along coordinate d (normalized w).
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments density_moments(const GridWaveFunction& w, std::size_t d);

}  // namespace bohmlab
