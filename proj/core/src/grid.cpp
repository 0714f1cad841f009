#include "bohmlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bohmlab {

Axis Axis::periodic(double lo, double hi, std::size_t n) {
  if (n == 0 || !(hi > lo)) throw std::invalid_argument("Axis::periodic: need hi > lo and n > 0");
  return Axis{lo, (hi - lo) / static_cast<double>(n), n};
}

double Axis::wrap(double x) const {
  const double p = period();
  double r = std::fmod(x - origin, p);
  if (r < 0.0) r += p;
  if (r >= p) r = 0.0;
  return origin + r;
}

std::size_t Axis::nearest(double x) const {
  const double r = (wrap(x) - origin) / spacing;
  auto i = static_cast<std::size_t>(std::llround(r));
  return i % points;
}

void to_json(nlohmann::json& j, const Axis& a) {
  j = nlohmann::json{{"origin", a.origin}, {"spacing", a.spacing}, {"points", a.points}};
}

void from_json(const nlohmann::json& j, Axis& a) {
  a.origin = j.at("origin").get<double>();
  a.spacing = j.at("spacing").get<double>();
  a.points = j.at("points").get<std::size_t>();
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("Grid: at least one axis required");
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t d = axes_.size(); d-- > 0;) {
    const auto& a = axes_[d];
    if (a.points == 0 || !(a.spacing > 0.0) || !std::isfinite(a.origin)) {
      throw std::invalid_argument("Grid: axis " + std::to_string(d) +
                                  " must have positive spacing and at least one point");
    }
    strides_[d] = size_;
    size_ *= a.points;
    cell_volume_ *= a.spacing;
  }
}

std::size_t Grid::flat_index(std::span<const std::size_t> idx) const {
  std::size_t f = 0;
  for (std::size_t d = 0; d < axes_.size(); ++d) f += idx[d] * strides_[d];
  return f;
}

std::vector<std::size_t> Grid::multi_index(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    idx[d] = flat / strides_[d];
    flat %= strides_[d];
  }
  return idx;
}

Configuration Grid::point(std::size_t flat) const {
  Configuration q(axes_.size());
  for (std::size_t d = 0; d < axes_.size(); ++d) q[d] = coordinate(flat, d);
  return q;
}

double Grid::coordinate(std::size_t flat, std::size_t d) const {
  return axes_[d].at((flat / strides_[d]) % axes_[d].points);
}

std::size_t Grid::nearest_flat(std::span<const double> q) const {
  std::size_t f = 0;
  for (std::size_t d = 0; d < axes_.size(); ++d) f += axes_[d].nearest(q[d]) * strides_[d];
  return f;
}

GridWaveFunction::GridWaveFunction(Grid grid, std::vector<Complex> amplitudes)
    : GridWaveFunction(std::move(grid), std::move(amplitudes), {}) {}

GridWaveFunction::GridWaveFunction(Grid grid, std::vector<Complex> amplitudes,
                                   std::vector<CoordinateRole> roles)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != grid_.size()) {
    throw DimensionMismatch("GridWaveFunction: " + std::to_string(amplitudes_.size()) +
                            " amplitudes for a grid of " + std::to_string(grid_.size()) + " points");
  }
  set_roles(std::move(roles));
}

void GridWaveFunction::set_roles(std::vector<CoordinateRole> roles) {
  if (roles.empty()) roles.assign(grid_.rank(), CoordinateRole::subsystem);
  if (roles.size() != grid_.rank()) throw DimensionMismatch("GridWaveFunction: one role per coordinate");
  roles_ = std::move(roles);
}

GridWaveFunction GridWaveFunction::normalized() const {
  const double n = grid_norm(*this);
  if (!(n > 0.0)) throw std::invalid_argument("GridWaveFunction::normalized: zero wave function");
  return scaled(1.0 / n);
}

GridWaveFunction GridWaveFunction::scaled(Complex factor) const {
  GridWaveFunction out = *this;
  for (auto& a : out.amplitudes_) a *= factor;
  return out;
}

GridWaveFunction GridWaveFunction::phase_fixed() const {
  std::size_t best = 0;
  double best_mod = -1.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    const double m = std::abs(amplitudes_[i]);
    if (m > best_mod) {
      best_mod = m;
      best = i;
    }
  }
  if (!(best_mod > 0.0)) return *this;
  return scaled(std::conj(amplitudes_[best]) / best_mod);
}

double GridWaveFunction::max_modulus() const {
  double m = 0.0;
  for (const auto& a : amplitudes_) m = std::max(m, std::abs(a));
  return m;
}

double grid_norm(const GridWaveFunction& w) {
  double s = 0.0;
  for (const auto& a : w.amplitudes()) s += std::norm(a);
  return std::sqrt(s * w.grid().cell_volume());
}

std::vector<double> born_density(const GridWaveFunction& w) {
  std::vector<double> rho;
  rho.reserve(w.grid().size());
  for (const auto& a : w.amplitudes()) rho.push_back(std::norm(a));
  return rho;
}

std::vector<double> cell_masses(const GridWaveFunction& w) {
  auto m = born_density(w);
  const double dv = w.grid().cell_volume();
  for (auto& v : m) v *= dv;
  return m;
}

Complex grid_inner(const GridWaveFunction& a, const GridWaveFunction& b) {
  if (!(a.grid() == b.grid())) throw DimensionMismatch("grid_inner: grids differ");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.grid().size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc * a.grid().cell_volume();
}

double l2_distance(const GridWaveFunction& a, const GridWaveFunction& b) {
  if (!(a.grid() == b.grid())) throw DimensionMismatch("l2_distance: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

double l2_distance_up_to_phase(const GridWaveFunction& a, const GridWaveFunction& b) {
  const auto na = a.normalized();
  const auto nb = b.normalized();
  const Complex ov = grid_inner(na, nb);
  const double m = std::abs(ov);
  if (!(m > 0.0)) return std::sqrt(2.0);
  // Aligning b by the phase of <a|b> minimizes the distance.
  const auto aligned = nb.scaled(std::conj(ov) / m);
  return l2_distance(na, aligned);
}

void to_json(nlohmann::json& j, const GaussianPacket& g) {
  j = nlohmann::json{{"center", g.center},
                     {"sigma", g.sigma},
                     {"momentum", g.momentum},
                     {"weight", {g.weight.real(), g.weight.imag()}}};
}

void from_json(const nlohmann::json& j, GaussianPacket& g) {
  g.center = j.at("center").get<std::vector<double>>();
  g.sigma = j.at("sigma").get<std::vector<double>>();
  g.momentum = j.contains("momentum") ? j.at("momentum").get<std::vector<double>>()
                                      : std::vector<double>(g.center.size(), 0.0);
  g.weight = Complex{1.0, 0.0};
  if (j.contains("weight")) {
    const auto& w = j.at("weight");
    g.weight = w.is_array() ? Complex{w[0].get<double>(), w[1].get<double>()} : Complex{w.get<double>(), 0.0};
  }
}

GridWaveFunction gaussian_superposition(const Grid& grid, std::span<const GaussianPacket> packets) {
  std::vector<Complex> amps(grid.size(), Complex{0.0, 0.0});
  for (const auto& p : packets) {
    if (p.center.size() != grid.rank() || p.sigma.size() != grid.rank() ||
        p.momentum.size() != grid.rank()) {
      throw DimensionMismatch("gaussian packet rank does not match grid rank");
    }
    for (double s : p.sigma) {
      if (!(s > 0.0)) throw std::invalid_argument("gaussian packet sigma must be positive");
    }
    double prefactor = 1.0;
    for (double s : p.sigma) prefactor *= std::pow(2.0 * std::numbers::pi * s * s, -0.25);
    for (std::size_t f = 0; f < grid.size(); ++f) {
      double expo = 0.0;
      double phase = 0.0;
      for (std::size_t d = 0; d < grid.rank(); ++d) {
        const double dx = grid.coordinate(f, d) - p.center[d];
        expo -= dx * dx / (4.0 * p.sigma[d] * p.sigma[d]);
        phase += p.momentum[d] * dx;
      }
      amps[f] += p.weight * prefactor * std::exp(expo) * std::polar(1.0, phase);
    }
  }
  return GridWaveFunction(grid, std::move(amps)).normalized();
}

GridWaveFunction gaussian(const Grid& grid, const GaussianPacket& packet) {
  return gaussian_superposition(grid, std::span<const GaussianPacket>(&packet, 1));
}

GridWaveFunction plane_wave(const Grid& grid, std::span<const double> wavevector) {
  if (wavevector.size() != grid.rank()) throw DimensionMismatch("plane_wave: wavevector rank");
  std::vector<Complex> amps(grid.size());
  for (std::size_t f = 0; f < grid.size(); ++f) {
    double phase = 0.0;
    for (std::size_t d = 0; d < grid.rank(); ++d) phase += wavevector[d] * grid.coordinate(f, d);
    amps[f] = std::polar(1.0, phase);
  }
  return GridWaveFunction(grid, std::move(amps)).normalized();
}

Moments density_moments(const GridWaveFunction& w, std::size_t d) {
  const auto masses = cell_masses(w);
  double total = 0.0, mean = 0.0;
  for (std::size_t f = 0; f < masses.size(); ++f) {
    total += masses[f];
    mean += masses[f] * w.grid().coordinate(f, d);
  }
  mean /= total;
  double var = 0.0;
  for (std::size_t f = 0; f < masses.size(); ++f) {
    const double dx = w.grid().coordinate(f, d) - mean;
    var += masses[f] * dx * dx;
  }
  return {mean, var / total};
}

}  // namespace bohmlab
