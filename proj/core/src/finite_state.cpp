#include "bohmlab/finite_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bohmlab {

FiniteState::FiniteState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty()) throw std::invalid_argument("FiniteState: empty amplitude vector");
  double norm2 = 0.0;
  for (const auto& a : amplitudes_) norm2 += std::norm(a);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw std::invalid_argument("FiniteState: zero or non-finite amplitude vector");
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& a : amplitudes_) a *= scale;
}

Complex FiniteState::inner(const FiniteState& other) const {
  if (other.dimension() != dimension()) {
    throw DimensionMismatch("inner product of states with dimensions " +
                            std::to_string(dimension()) + " and " +
                            std::to_string(other.dimension()));
  }
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) acc += std::conj(amplitudes_[i]) * other.amplitudes_[i];
  return acc;
}

double FiniteState::squared_norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

FiniteState superpose(std::initializer_list<std::pair<Complex, FiniteState>> terms) {
  if (terms.size() == 0) throw std::invalid_argument("superpose: no terms");
  const std::size_t d = terms.begin()->second.dimension();
  std::vector<Complex> out(d, Complex{0.0, 0.0});
  for (const auto& [c, s] : terms) {
    if (s.dimension() != d) throw DimensionMismatch("superpose: mixed dimensions");
    for (std::size_t i = 0; i < d; ++i) out[i] += c * s[i];
  }
  return FiniteState(std::move(out));
}

FiniteState tensor(const FiniteState& a, const FiniteState& b) {
  std::vector<Complex> out;
  out.reserve(a.dimension() * b.dimension());
  for (const auto& x : a.amplitudes())
    for (const auto& y : b.amplitudes()) out.push_back(x * y);
  return FiniteState(std::move(out));
}

double born_probability(const FiniteState& state, const FiniteState& outcome) {
  return std::norm(outcome.inner(state));
}

double gram_deviation(std::span<const FiniteState> vectors) {
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      const Complex g = vectors[i].inner(vectors[j]);
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - target));
    }
  }
  return worst;
}

ProjectiveMeasurement::ProjectiveMeasurement(std::vector<FiniteState> basis, double tolerance)
    : basis_(std::move(basis)) {
  if (basis_.empty()) throw std::invalid_argument("ProjectiveMeasurement: empty basis");
  const std::size_t d = basis_.front().dimension();
  for (const auto& b : basis_) {
    if (b.dimension() != d) throw DimensionMismatch("ProjectiveMeasurement: mixed dimensions");
  }
  if (basis_.size() != d) {
    throw std::invalid_argument("ProjectiveMeasurement: basis of " + std::to_string(basis_.size()) +
                                " vectors is not complete in dimension " + std::to_string(d));
  }
  const double dev = bohmlab::gram_deviation(basis_);
  if (dev > tolerance) {
    throw std::invalid_argument("ProjectiveMeasurement: basis not orthonormal (Gram deviation " +
                                std::to_string(dev) + ")");
  }
}

double ProjectiveMeasurement::gram_deviation() const { return bohmlab::gram_deviation(basis_); }

std::vector<double> measurement_distribution(const FiniteState& state, const ProjectiveMeasurement& m) {
  if (state.dimension() != m.dimension()) {
    throw DimensionMismatch("measurement_distribution: state dimension " +
                            std::to_string(state.dimension()) + " vs measurement dimension " +
                            std::to_string(m.dimension()));
  }
  std::vector<double> probs;
  probs.reserve(m.outcome_count());
  for (const auto& b : m.basis()) probs.push_back(born_probability(state, b));
  return probs;
}

ProjectiveMeasurement computational_basis(std::size_t dimension) {
  std::vector<FiniteState> basis;
  basis.reserve(dimension);
  for (std::size_t k = 0; k < dimension; ++k) {
    std::vector<Complex> e(dimension, Complex{0.0, 0.0});
    e[k] = 1.0;
    basis.emplace_back(std::move(e));
  }
  return ProjectiveMeasurement(std::move(basis));
}

namespace qubit {
FiniteState zero() { return FiniteState{1.0, 0.0}; }
FiniteState one() { return FiniteState{0.0, 1.0}; }
FiniteState plus() { return FiniteState{std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0}; }
FiniteState minus() { return FiniteState{std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0}; }
}  // namespace qubit

bool same_ray(const FiniteState& a, const FiniteState& b, double tol) {
  if (a.dimension() != b.dimension()) return false;
  return std::norm(a.inner(b)) >= 1.0 - tol;
}

nlohmann::json complex_array_to_json(std::span<const Complex> values) {
  auto arr = nlohmann::json::array();
  for (const auto& v : values) arr.push_back({v.real(), v.imag()});
  return arr;
}

std::vector<Complex> complex_array_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of [re, im] pairs");
  std::vector<Complex> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (e.is_number()) {
      out.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2) {
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      throw std::invalid_argument("complex entry must be a number or a [re, im] pair");
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const FiniteState& s) { j = complex_array_to_json(s.amplitudes()); }

FiniteState finite_state_from_json(const nlohmann::json& j) { return FiniteState(complex_array_from_json(j)); }

}  // namespace bohmlab
