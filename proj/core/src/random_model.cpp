#include "bohmlab/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bohmlab/random.hpp"

namespace bohmlab {
namespace {

// Ontic state with deterministic Z and X outcomes (0 = |0> / |+>).
struct ZxAtom {
  int z = 0;
  int x = 0;
  double mass_zero = 0.0;
  double mass_plus = 0.0;
};

std::string zx_label(const ZxAtom& a, std::size_t index) {
  return std::string("z") + std::to_string(a.z) + (a.x == 0 ? "+" : "-") + "#" + std::to_string(index);
}

// Moves random fractions of existing atoms into new atoms of the same type.
// Both masses of a parent are split with the same fraction so min-sums are kept.
void split_atoms(std::vector<ZxAtom>& atoms, std::size_t target, Rng& rng) {
  while (atoms.size() < target) {
    const auto parent = static_cast<std::size_t>(rng.uniform() * static_cast<double>(atoms.size()));
    const double f = 0.1 + 0.8 * rng.uniform();
    ZxAtom child = atoms[parent];
    child.mass_zero *= f;
    child.mass_plus *= f;
    atoms[parent].mass_zero -= child.mass_zero;
    atoms[parent].mass_plus -= child.mass_plus;
    atoms.push_back(child);
  }
}

std::vector<std::vector<double>> deterministic_table(std::size_t outcomes, const std::vector<int>& answers) {
  std::vector<std::vector<double>> t;
  for (int a : answers) {
    std::vector<double> row(outcomes, 0.0);
    row[static_cast<std::size_t>(a)] = 1.0;
    t.push_back(std::move(row));
  }
  return t;
}

// Exact renormalization so that rounding in the splits cannot break the invariants.
void normalize(std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s += v;
  for (auto& v : p) v /= s;
}

}  // namespace

double max_feasible_overlap(DeclaredMeasurements declared) {
  return declared == DeclaredMeasurements::z_and_x ? 0.5 : 1.0;
}

std::size_t minimum_ontic_count(double o, DeclaredMeasurements declared) {
  if (!(o >= 0.0)) throw InfeasibleTarget("overlap target must be nonnegative");
  if (declared == DeclaredMeasurements::z_and_x) {
    if (o > 0.5) throw InfeasibleTarget("overlap above 1/2 is incompatible with Z and X statistics of |0> and |+>");
    if (o == 0.0) return 4;
    return o == 0.5 ? 3 : 5;
  }
  if (!(o < 1.0)) throw InfeasibleTarget("overlap must be below 1 for distinct states");
  return o == 0.0 ? 2 : 3;
}

OntologicalModel random_epistemic_model(double o, std::size_t n_ontic, std::uint64_t seed,
                                        DeclaredMeasurements declared) {
  const std::size_t needed = minimum_ontic_count(o, declared);
  if (n_ontic < needed) {
    throw InfeasibleTarget("overlap target " + std::to_string(o) + " needs at least " + std::to_string(needed) +
                           " ontic states");
  }
  Rng rng(mix64(seed));
  std::vector<ZxAtom> atoms;
  if (declared == DeclaredMeasurements::z_and_x) {
    // |0>: Z = 0 surely, X fair. |+>: X = + surely, Z fair. Shared atoms must be (0, +).
    if (o > 0.0) atoms.push_back({0, 0, o, o});
    if (o < 0.5) {
      atoms.push_back({0, 0, 0.5 - o, 0.0});
      atoms.push_back({0, 0, 0.0, 0.5 - o});
    }
    atoms.push_back({0, 1, 0.5, 0.0});
    atoms.push_back({1, 0, 0.0, 0.5});
  } else {
    if (o > 0.0) atoms.push_back({0, 0, o, o});
    atoms.push_back({0, 0, 1.0 - o, 0.0});
    atoms.push_back({0, 0, 0.0, 1.0 - o});
  }
  split_atoms(atoms, n_ontic, rng);

  std::vector<std::string> labels;
  std::vector<double> p0, pp;
  std::vector<int> z, x;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    labels.push_back(zx_label(atoms[i], i));
    p0.push_back(atoms[i].mass_zero);
    pp.push_back(atoms[i].mass_plus);
    z.push_back(atoms[i].z);
    x.push_back(atoms[i].x);
  }
  normalize(p0);
  normalize(pp);

  std::vector<NamedMeasurement> measurements;
  std::vector<std::vector<std::vector<double>>> responses;
  if (declared == DeclaredMeasurements::z_and_x) {
    measurements = {{"Z", computational_basis(2)}, {"X", ProjectiveMeasurement({qubit::plus(), qubit::minus()})}};
    responses = {deterministic_table(2, z), deterministic_table(2, x)};
  }
  return OntologicalModel(std::move(labels), {{"0", qubit::zero()}, {"+", qubit::plus()}}, std::move(measurements),
                          {std::move(p0), std::move(pp)}, std::move(responses));
}

OntologicalModel random_consistent_model(std::vector<NamedState> states, std::vector<NamedMeasurement> measurements,
                                         std::size_t copies, std::uint64_t seed) {
  if (measurements.empty()) throw std::invalid_argument("random_consistent_model: need at least one measurement");
  if (copies == 0) throw std::invalid_argument("random_consistent_model: copies must be positive");
  std::vector<std::size_t> extent;
  std::size_t tuples = 1;
  for (const auto& m : measurements) {
    extent.push_back(m.measurement.outcome_count());
    tuples *= extent.back();
  }
  auto outcome_of = [&](std::size_t t, std::size_t m) {
    for (std::size_t i = measurements.size(); i-- > m + 1;) t /= extent[i];
    return t % extent[m];
  };

  Rng rng(mix64(seed));
  std::vector<std::vector<double>> preparations;
  for (const auto& s : states) {
    std::vector<std::vector<double>> targets;
    for (const auto& m : measurements) targets.push_back(measurement_distribution(s.state, m.measurement));
    std::vector<double> joint(tuples);
    for (auto& v : joint) v = 0.05 + rng.uniform();
    for (int sweep = 0; sweep < 10000; ++sweep) {
      double err = 0.0;
      for (std::size_t m = 0; m < measurements.size(); ++m) {
        std::vector<double> marginal(extent[m], 0.0);
        for (std::size_t t = 0; t < tuples; ++t) marginal[outcome_of(t, m)] += joint[t];
        for (std::size_t k = 0; k < extent[m]; ++k) err = std::max(err, std::abs(marginal[k] - targets[m][k]));
        for (std::size_t t = 0; t < tuples; ++t) {
          const auto k = outcome_of(t, m);
          joint[t] = marginal[k] > 0.0 ? joint[t] * targets[m][k] / marginal[k] : 0.0;
        }
      }
      if (err < 1e-15) break;
    }
    std::vector<double> prep;
    for (std::size_t t = 0; t < tuples; ++t) {
      double remaining = joint[t];
      for (std::size_t c = 0; c + 1 < copies; ++c) {
        const double part = remaining * rng.uniform();
        prep.push_back(part);
        remaining -= part;
      }
      prep.push_back(remaining);
    }
    normalize(prep);
    preparations.push_back(std::move(prep));
  }

  std::vector<std::string> labels;
  std::vector<std::vector<std::vector<double>>> responses(measurements.size());
  for (std::size_t t = 0; t < tuples; ++t) {
    std::string base = "t";
    for (std::size_t m = 0; m < measurements.size(); ++m) base += std::to_string(outcome_of(t, m));
    for (std::size_t c = 0; c < copies; ++c) {
      labels.push_back(base + "#" + std::to_string(c));
      for (std::size_t m = 0; m < measurements.size(); ++m) {
        std::vector<double> row(extent[m], 0.0);
        row[outcome_of(t, m)] = 1.0;
        responses[m].push_back(std::move(row));
      }
    }
  }
  return OntologicalModel(std::move(labels), std::move(states), std::move(measurements), std::move(preparations),
                          std::move(responses));
}

}  // namespace bohmlab
