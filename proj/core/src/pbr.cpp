#include "bohmlab/pbr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace bohmlab {
namespace {

constexpr std::array<const char*, 4> kPreparationNames = {"|0>|0>", "|0>|+>", "|+>|0>", "|+>|+>"};

FiniteState pair_state(const FiniteState& a, const FiniteState& b, const FiniteState& c, const FiniteState& d) {
  const double h = std::numbers::sqrt2 / 2.0;
  return superpose({{h, tensor(a, b)}, {h, tensor(c, d)}});
}

}  // namespace

std::string_view to_string(PbrVerdictKind k) {
  return k == PbrVerdictKind::contradiction ? "contradiction" : "not-derivable";
}

PbrSetup build_pbr_states() {
  using namespace qubit;
  std::array<FiniteState, 4> states = {tensor(zero(), zero()), tensor(zero(), plus()), tensor(plus(), zero()),
                                       tensor(plus(), plus())};
  ProjectiveMeasurement m({pair_state(zero(), one(), one(), zero()), pair_state(zero(), minus(), one(), plus()),
                           pair_state(plus(), one(), minus(), zero()), pair_state(plus(), minus(), minus(), plus())});
  PbrSetup s{states, std::move(m), {}};
  for (std::size_t j = 0; j < 4; ++j) {
    const auto p = measurement_distribution(s.states[j], s.measurement);
    for (std::size_t i = 0; i < 4; ++i) s.born[i][j] = p[i];
  }
  return s;
}

double PbrSetup::max_paired_probability() const {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, born[i][i]);
  return m;
}

double PbrSetup::max_column_sum_deviation() const {
  double m = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += born[i][j];
    m = std::max(m, std::abs(s - 1.0));
  }
  return m;
}

void to_json(nlohmann::json& j, const PbrSetup& s) {
  auto states = nlohmann::json::array();
  for (const auto& st : s.states) states.push_back(st);
  auto basis = nlohmann::json::array();
  for (const auto& b : s.measurement.basis()) basis.push_back(b);
  auto born = nlohmann::json::array();
  for (const auto& row : s.born) born.push_back(std::vector<double>(row.begin(), row.end()));
  j = nlohmann::json{{"preparations", states},
                     {"preparation_names", kPreparationNames},
                     {"measurement_basis", basis},
                     {"born_matrix", born},
                     {"gram_deviation", s.gram_deviation()},
                     {"max_paired_probability", s.max_paired_probability()},
                     {"max_column_sum_deviation", s.max_column_sum_deviation()}};
}

void to_json(nlohmann::json& j, const PbrVerdict& v) {
  j = nlohmann::json{{"verdict", std::string(to_string(v.kind))}, {"witness_count", v.witness_count}, {"trace", v.trace}};
  if (v.witness) j["witness"] = *v.witness;
  if (v.witness_labels) j["witness_labels"] = *v.witness_labels;
  if (v.outcome_mass_bound) j["outcome_mass_bound"] = *v.outcome_mass_bound;
  if (v.double_sum_diagnostic) j["double_sum_diagnostic"] = *v.double_sum_diagnostic;
}

PbrVerdict pbr_contradiction(const OntologicalModel& model, double tol) {
  const auto i0 = model.find_state(qubit::zero());
  const auto ip = model.find_state(qubit::plus());
  if (!i0 || !ip) throw std::invalid_argument("pbr_contradiction: model must contain |0> and |+>");

  const auto setup = build_pbr_states();
  const std::size_t n = model.ontic_count();
  // Single-system preparation feeding each copy of each product preparation.
  const std::array<std::array<std::size_t, 2>, 4> factors = {
      {{*i0, *i0}, {*i0, *ip}, {*ip, *i0}, {*ip, *ip}}};
  auto composite = [&](std::size_t a, std::size_t l1, std::size_t l2) {
    return model.preparation(factors[a][0])[l1] * model.preparation(factors[a][1])[l2];
  };

  PbrVerdict v;
  v.trace.push_back(fmt::format("single-system model: {} ontic states, {} mode", n, to_string(model.mode())));
  v.trace.push_back(fmt::format("composite preparations are products on {}x{} ontic pairs", n, n));
  v.trace.push_back(fmt::format("antidistinguishing measurement: max paired Born probability {:.3e}",
                                setup.max_paired_probability()));

  std::vector<std::array<std::size_t, 2>> support;
  for (std::size_t l1 = 0; l1 < n; ++l1) {
    for (std::size_t l2 = 0; l2 < n; ++l2) {
      bool all = true;
      for (std::size_t a = 0; a < 4 && all; ++a) all = composite(a, l1, l2) > tol;
      if (all) support.push_back({l1, l2});
    }
  }
  v.trace.push_back(fmt::format("common support of all four preparations: {} ontic pairs", support.size()));

  if (model.mode() == ResponseMode::revised) {
    // Exhibit p(k | pair, Psi_a, M) = Born(k | Psi_a): zero on the paired
    // outcome and normalized for each preparation separately.
    double worst_norm = 0.0, worst_zero = 0.0, double_sum = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
      double col = 0.0;
      for (std::size_t k = 0; k < 4; ++k) col += setup.born[k][a];
      worst_norm = std::max(worst_norm, std::abs(col - 1.0));
      worst_zero = std::max(worst_zero, setup.born[a][a]);
      double_sum += col;
    }
    v.kind = PbrVerdictKind::not_derivable;
    v.double_sum_diagnostic = double_sum;
    v.trace.push_back("revised mode: responses p(k|lambda,psi,M) are normalized separately for each prepared state");
    v.trace.push_back(fmt::format("response assignment p(k|pair,Psi_a,M) = Born(k|Psi_a): paired zero within {:.3e}, "
                                  "per-state normalization within {:.3e}",
                                  worst_zero, worst_norm));
    v.trace.push_back("each zero condition constrains a different per-state response; no normalization is violated");
    v.trace.push_back(fmt::format("literal double sum over states and outcomes at a common pair: {}", double_sum));
    v.trace.push_back("verdict: not-derivable");
    return v;
  }

  std::vector<std::size_t> all_measurements(model.measurements().size());
  for (std::size_t m = 0; m < all_measurements.size(); ++m) all_measurements[m] = m;
  const auto consistency = check_consistency(model, tol, all_measurements);
  if (!consistency.pass) {
    throw std::invalid_argument(
        fmt::format("pbr_contradiction: model is not consistent (max deviation {:.3e})", consistency.max_deviation));
  }
  v.trace.push_back(fmt::format("single-system consistency on {} measurements: max deviation {:.3e}",
                                model.measurements().size(), consistency.max_deviation));

  for (const auto& pair : support) {
    // p(a|pair) P_a(pair) <= sum over pairs = B_aa, hence p(a|pair) <= B_aa / P_a(pair).
    double bound = 0.0;
    for (std::size_t a = 0; a < 4; ++a) bound += setup.born[a][a] / composite(a, pair[0], pair[1]);
    if (bound < 1.0) {
      ++v.witness_count;
      if (!v.witness) {
        v.witness = pair;
        v.witness_labels = std::array<std::string, 2>{model.labels()[pair[0]], model.labels()[pair[1]]};
        v.outcome_mass_bound = bound;
      }
    }
  }
  if (v.witness) {
    v.kind = PbrVerdictKind::contradiction;
    const auto& w = *v.witness;
    for (std::size_t a = 0; a < 4; ++a) {
      v.trace.push_back(fmt::format("witness ({}, {}): P[{}] = {:.6g}, paired Born {:.3e}, so p(phi_{}|pair) <= {:.3e}",
                                    (*v.witness_labels)[0], (*v.witness_labels)[1], kPreparationNames[a],
                                    composite(a, w[0], w[1]), setup.born[a][a], a + 1,
                                    setup.born[a][a] / composite(a, w[0], w[1])));
    }
    v.trace.push_back(fmt::format("outcome probabilities at the witness sum to at most {:.3e} < 1", *v.outcome_mass_bound));
    v.trace.push_back(fmt::format("verdict: contradiction ({} witness pairs)", v.witness_count));
  } else {
    v.kind = PbrVerdictKind::not_derivable;
    v.trace.push_back("verdict: not-derivable (no ontic pair forces all four outcome probabilities to vanish)");
  }
  return v;
}

}  // namespace bohmlab
