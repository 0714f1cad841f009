#include "bohmlab/box_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bohmlab {
namespace {

constexpr double kPi = std::numbers::pi;

// Antiderivative of 2 sin(a pi x) sin(b pi x) on [0, 1].
double product_primitive(std::size_t a, std::size_t b, double x) {
  const double da = static_cast<double>(a), db = static_cast<double>(b);
  if (a == b) return x - std::sin(2.0 * da * kPi * x) / (2.0 * da * kPi);
  return std::sin((da - db) * kPi * x) / ((da - db) * kPi) - std::sin((da + db) * kPi * x) / ((da + db) * kPi);
}

std::vector<double> cell_integrals(std::size_t a, std::size_t b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = static_cast<double>(j) / static_cast<double>(n);
    const double hi = static_cast<double>(j + 1) / static_cast<double>(n);
    out[j] = product_primitive(a, b, hi) - product_primitive(a, b, lo);
  }
  return out;
}

std::vector<double> renormalized(std::vector<double> p) {
  double s = 0.0;
  for (auto& v : p) {
    v = std::max(v, 0.0);
    s += v;
  }
  for (auto& v : p) v /= s;
  return p;
}

std::vector<std::string> cell_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < n; ++j) labels.push_back("x" + std::to_string(j));
  return labels;
}

std::vector<double> cell_centres(std::size_t n) {
  std::vector<double> x;
  for (std::size_t j = 0; j < n; ++j) x.push_back((static_cast<double>(j) + 0.5) / static_cast<double>(n));
  return x;
}

}  // namespace

std::vector<double> box_energies(std::size_t n_levels) {
  std::vector<double> e;
  for (std::size_t l = 1; l <= n_levels; ++l) e.push_back(static_cast<double>(l * l) * kPi * kPi / 2.0);
  return e;
}

std::vector<double> box_eigenstate_cell_masses(std::size_t level, std::size_t n_positions) {
  if (level == 0 || n_positions == 0) throw std::invalid_argument("box_eigenstate_cell_masses: level and cells start at 1");
  return renormalized(cell_integrals(level, level, n_positions));
}

OntologicalModel build_box_nomological_model(std::size_t n_levels, std::size_t n_positions) {
  if (n_levels < 2) throw std::invalid_argument("build_box_nomological_model: need at least two levels");
  if (n_positions < 1) throw std::invalid_argument("build_box_nomological_model: need at least one position cell");
  std::vector<NamedState> states;
  std::vector<std::vector<double>> preparations;
  for (std::size_t e = 1; e <= n_levels; ++e) {
    std::vector<Complex> amps(n_levels, Complex{0.0, 0.0});
    amps[e - 1] = 1.0;
    states.push_back({"E" + std::to_string(e), FiniteState(std::move(amps))});
    preparations.push_back(box_eigenstate_cell_masses(e, n_positions));
  }
  ResponseTable responses(1);
  for (std::size_t e = 0; e < n_levels; ++e) {
    std::vector<double> certain(n_levels, 0.0);
    certain[e] = 1.0;
    responses[0].push_back(std::vector<std::vector<double>>(n_positions, certain));
  }
  return OntologicalModel::revised(cell_labels(n_positions), std::move(states),
                                   {{"energy", computational_basis(n_levels)}}, std::move(preparations),
                                   std::move(responses))
      .with_positions(cell_centres(n_positions));
}

OntologicalModel box_style_qubit_model(std::size_t n_positions) {
  if (n_positions < 1) throw std::invalid_argument("box_style_qubit_model: need at least one position cell");
  std::vector<NamedState> states = {{"0", qubit::zero()}, {"+", qubit::plus()}};
  // |(psi_1 + psi_2)/sqrt2|^2 = (psi_1^2 + psi_2^2)/2 + psi_1 psi_2.
  const auto p11 = cell_integrals(1, 1, n_positions);
  const auto p22 = cell_integrals(2, 2, n_positions);
  const auto p12 = cell_integrals(1, 2, n_positions);
  std::vector<double> superposed(n_positions);
  for (std::size_t j = 0; j < n_positions; ++j) superposed[j] = 0.5 * (p11[j] + p22[j]) + p12[j];
  std::vector<std::vector<double>> preparations = {renormalized(p11), renormalized(superposed)};

  std::vector<NamedMeasurement> measurements = {
      {"Z", computational_basis(2)},
      {"X", ProjectiveMeasurement({qubit::plus(), qubit::minus()})}};
  ResponseTable responses;
  for (const auto& m : measurements) {
    std::vector<std::vector<std::vector<double>>> per_state;
    for (const auto& s : states) {
      per_state.push_back(std::vector<std::vector<double>>(n_positions, measurement_distribution(s.state, m.measurement)));
    }
    responses.push_back(std::move(per_state));
  }
  return OntologicalModel::revised(cell_labels(n_positions), std::move(states), std::move(measurements),
                                   std::move(preparations), std::move(responses))
      .with_positions(cell_centres(n_positions));
}

}  // namespace bohmlab
