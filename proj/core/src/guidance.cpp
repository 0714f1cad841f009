#include "bohmlab/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bohmlab/interpolation.hpp"

namespace bohmlab {
namespace {

// values[0] = psi, values[1 + d] = d_d psi.
VelocitySample velocity_from(std::span<const Complex> values, double threshold) {
  VelocitySample s;
  const Complex psi = values[0];
  if (std::abs(psi) < threshold || !(std::abs(psi) > 0.0)) {
    s.near_node = true;
    return s;
  }
  s.velocity.resize(values.size() - 1);
  for (std::size_t d = 0; d + 1 < values.size(); ++d) s.velocity[d] = (values[d + 1] / psi).imag();
  return s;
}

}  // namespace

VelocitySample guiding_velocity(const GridWaveFunction& w, std::span<const double> q, double node_fraction) {
  const Grid& g = w.grid();
  if (q.size() != g.rank()) throw DimensionMismatch("guiding_velocity: configuration rank");
  std::vector<std::vector<Complex>> grads;
  for (std::size_t d = 0; d < g.rank(); ++d) grads.push_back(spectral_derivative(g, w.amplitudes(), d));
  std::vector<std::span<const Complex>> fields{w.amplitudes()};
  for (const auto& gr : grads) fields.emplace_back(gr);
  std::vector<Complex> values(fields.size());
  interpolate_many(g, fields, q, values);
  return velocity_from(values, node_fraction * w.max_modulus());
}

GuidanceField::GuidanceField(const WaveHistory& history, double node_fraction)
    : history_(&history), node_fraction_(node_fraction) {
  if (!history.has_gradients()) throw std::invalid_argument("GuidanceField: history was built without gradients");
}

void GuidanceField::sample_frame(std::size_t frame, std::span<const double> q, std::span<Complex> out) const {
  const auto& fr = history_->frame(frame);
  const std::size_t rank = history_->grid().rank();
  std::span<const Complex> fields[9];
  std::vector<std::span<const Complex>> heap;
  std::span<const std::span<const Complex>> view;
  if (rank + 1 <= 9) {
    fields[0] = fr.psi;
    for (std::size_t d = 0; d < rank; ++d) fields[d + 1] = fr.gradient[d];
    view = std::span<const std::span<const Complex>>(fields, rank + 1);
  } else {
    heap.emplace_back(fr.psi);
    for (const auto& g : fr.gradient) heap.emplace_back(g);
    view = heap;
  }
  interpolate_many(history_->grid(), view, q, out);
}

VelocitySample GuidanceField::velocity_at_frame(std::span<const double> q, std::size_t frame) const {
  const std::size_t rank = history_->grid().rank();
  std::vector<Complex> values(rank + 1);
  sample_frame(frame, q, values);
  return velocity_from(values, node_fraction_ * history_->frame(frame).max_modulus);
}

VelocitySample GuidanceField::velocity(std::span<const double> q, double t) const {
  const std::size_t rank = history_->grid().rank();
  const double h = history_->step();
  const std::size_t last = history_->size() - 1;
  double r = t / h;
  auto k = static_cast<std::size_t>(std::clamp(std::floor(r), 0.0, static_cast<double>(last)));
  if (k == last) {
    if (last == 0) return velocity_at_frame(q, 0);
    k = last - 1;
  }
  double s = std::clamp(r - static_cast<double>(k), 0.0, 1.0);
  if (s == 0.0) return velocity_at_frame(q, k);
  if (s == 1.0) return velocity_at_frame(q, k + 1);

  std::vector<Complex> a(rank + 1), b(rank + 1);
  sample_frame(k, q, a);
  sample_frame(k + 1, q, b);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (1.0 - s) * a[i] + s * b[i];
  const double max_mod = (1.0 - s) * history_->frame(k).max_modulus + s * history_->frame(k + 1).max_modulus;
  return velocity_from(a, node_fraction_ * max_mod);
}

}  // namespace bohmlab
