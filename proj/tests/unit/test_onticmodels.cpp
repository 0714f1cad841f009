#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "bohmlab/box_model.hpp"
#include "bohmlab/ontic_model.hpp"
#include "bohmlab/pbr.hpp"
#include "bohmlab/random_model.hpp"

using namespace bohmlab;

namespace {

const ProjectiveMeasurement kZ = computational_basis(2);
const ProjectiveMeasurement kX({qubit::plus(), qubit::minus()});

std::vector<NamedState> four_states() {
  return {{"0", qubit::zero()}, {"1", qubit::one()}, {"+", qubit::plus()}, {"-", qubit::minus()}};
}

std::vector<NamedMeasurement> zx() { return {{"Z", kZ}, {"X", kX}}; }

OntologicalModel half_overlap_model() {
  return OntologicalModel({"a", "b", "c"}, {{"0", qubit::zero()}, {"+", qubit::plus()}}, {},
                          {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}}, {});
}

// |0>, |1> sharing ontic state "b" while Z separates them.
OntologicalModel injected_overlap_model() {
  return OntologicalModel({"a", "b", "c"}, {{"0", qubit::zero()}, {"1", qubit::one()}}, {{"Z", kZ}},
                          {{0.9, 0.1, 0.0}, {0.0, 0.1, 0.9}}, {{{1, 0}, {1, 0}, {0, 1}}});
}

double midpoint_cell_mass(std::size_t level, double a, double b) {
  const int n = 4000;
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a + (i + 0.5) * h;
    s += 2.0 * std::pow(std::sin(static_cast<double>(level) * std::numbers::pi * x), 2);
  }
  return s * h;
}

}  // namespace

TEST(OntologicalModel, RejectsInvalidDistributions) {
  EXPECT_THROW(OntologicalModel({"a", "b"}, {{"0", qubit::zero()}}, {}, {{0.6, 0.5}}, {}), std::invalid_argument);
  EXPECT_THROW(OntologicalModel({"a", "b"}, {{"0", qubit::zero()}}, {}, {{1.1, -0.1}}, {}), std::invalid_argument);
  EXPECT_THROW(OntologicalModel({"a", "a"}, {{"0", qubit::zero()}}, {}, {{0.5, 0.5}}, {}), std::invalid_argument);
  EXPECT_THROW(OntologicalModel({"a"}, {{"0", qubit::zero()}}, {{"Z", kZ}}, {{1.0}}, {{{0.5, 0.6}}}),
               std::invalid_argument);
  EXPECT_THROW(OntologicalModel({"a", "b"}, {{"0", qubit::zero()}}, {}, {{1.0}}, {}), DimensionMismatch);
}

TEST(OntologicalModel, LookupsAndJsonRoundTrip) {
  const auto m = trivial_psi_ontic_model(four_states(), zx());
  EXPECT_EQ(m.ontic_count(), 4u);
  EXPECT_EQ(m.find_state(FiniteState{Complex(0, 1), Complex(0)}), 0u);
  EXPECT_EQ(m.find_state("-"), 3u);
  EXPECT_FALSE(m.find_state(FiniteState{Complex(0.6), Complex(0.8)}));
  EXPECT_EQ(m.find_measurement("X"), 1u);
  nlohmann::json j = m;
  const auto back = ontological_model_from_json(j);
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(Consistency, TrivialModelIsExact) {
  const auto r = check_consistency(trivial_psi_ontic_model(four_states(), zx()));
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_deviation, 1e-15);
  EXPECT_EQ(r.entries.size(), 4u * 2u * 2u);
}

TEST(Consistency, CorruptedResponseIsLocated) {
  auto j = nlohmann::json(trivial_psi_ontic_model(four_states(), zx()));
  // X response at lambda_0 shifted by 0.1 between outcomes, keeping it normalized.
  j["responses"][1][0] = {0.6, 0.4};
  const auto m = ontological_model_from_json(j);
  const auto r = check_consistency(m);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.max_deviation, 0.1, 1e-14);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->state, 0u);
  EXPECT_EQ(r.witness->measurement, 1u);
  ASSERT_TRUE(r.witness_lambda);
  EXPECT_EQ(*r.witness_lambda, 0u);
  const std::size_t only_z[] = {0};
  EXPECT_TRUE(check_consistency(m, kOnticTolerance, only_z).pass);
}

TEST(Classify, OverlapByHand) {
  EXPECT_NEAR(distribution_overlap(std::vector<double>{0.2, 0.8}, std::vector<double>{0.5, 0.5}), 0.7, 1e-15);
  const auto m = half_overlap_model();
  const auto c = classify(m, qubit::zero(), qubit::plus());
  EXPECT_EQ(c.kind, PairClass::epistemic_pair);
  EXPECT_NEAR(c.overlap, 0.5, 1e-15);
  const auto t = classify(trivial_psi_ontic_model(four_states(), zx()), 0, 2);
  EXPECT_EQ(t.kind, PairClass::ontic_pair);
  EXPECT_EQ(t.overlap, 0.0);
  EXPECT_THROW(classify(m, qubit::zero(), qubit::one()), std::invalid_argument);
}

TEST(Distinctness, TrivialModelConfirmsZeroOverlap) {
  const auto r = orthogonal_distinctness_check(trivial_psi_ontic_model(four_states(), zx()));
  EXPECT_EQ(r.verdict, DistinctnessVerdict::zero_overlap_confirmed);
  EXPECT_EQ(r.pairs.size(), 2u);
}

TEST(Distinctness, InjectedOverlapIsRejectedWithWitness) {
  const auto r = orthogonal_distinctness_check(injected_overlap_model());
  ASSERT_EQ(r.verdict, DistinctnessVerdict::violation);
  ASSERT_EQ(r.pairs.size(), 1u);
  const auto& p = r.pairs[0];
  EXPECT_NEAR(p.overlap, 0.1, 1e-15);
  ASSERT_TRUE(p.lambda);
  EXPECT_EQ(*p.lambda, 1u);
  ASSERT_TRUE(p.violation);
  EXPECT_NEAR(p.violation->deviation, 0.1, 1e-15);
  EXPECT_FALSE(r.message.empty());
}

TEST(Distinctness, NoOrthogonalPairIsNotApplicable) {
  EXPECT_EQ(orthogonal_distinctness_check(half_overlap_model()).verdict, DistinctnessVerdict::not_applicable);
}

TEST(Pbr, MeasurementMatchesHandBasis) {
  const double r2 = 1.0 / std::sqrt(2.0);
  const std::array<FiniteState, 4> phi{FiniteState{0.0, r2, r2, 0.0}, FiniteState{0.5, -0.5, 0.5, 0.5},
                                       FiniteState{0.5, 0.5, -0.5, 0.5}, FiniteState{r2, 0.0, 0.0, -r2}};
  const std::array<FiniteState, 4> psi{tensor(qubit::zero(), qubit::zero()), tensor(qubit::zero(), qubit::plus()),
                                       tensor(qubit::plus(), qubit::zero()), tensor(qubit::plus(), qubit::plus())};
  const auto s = build_pbr_states();
  EXPECT_LE(s.gram_deviation(), 1e-12);
  EXPECT_LE(s.max_paired_probability(), 1e-12);
  EXPECT_LE(s.max_column_sum_deviation(), 1e-12);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_TRUE(same_ray(s.states[i], psi[i]));
    EXPECT_TRUE(same_ray(s.measurement.basis()[i], phi[i], 1e-12)) << i;
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(s.born[i][j], std::norm(phi[i].inner(psi[j])), 1e-15);
  }
}

TEST(Pbr, EpistemicModelsYieldWitness) {
  for (double o : {0.1, 0.25, 0.5}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto m = random_epistemic_model(o, 8, seed);
      const auto v = pbr_contradiction(m);
      EXPECT_EQ(v.kind, PbrVerdictKind::contradiction) << o;
      ASSERT_TRUE(v.witness);
      EXPECT_GE(v.witness_count, 1u);
      ASSERT_TRUE(v.outcome_mass_bound);
      EXPECT_LT(*v.outcome_mass_bound, 1.0);
      // Witness pair carries mass under both preparations.
      EXPECT_GT(m.preparation(0)[(*v.witness)[0]], 0.0);
      EXPECT_GT(m.preparation(1)[(*v.witness)[1]], 0.0);
    }
  }
}

TEST(Pbr, PsiOnticModelIsNotDerivable) {
  const auto v = pbr_contradiction(trivial_psi_ontic_model(four_states(), zx()));
  EXPECT_EQ(v.kind, PbrVerdictKind::not_derivable);
  EXPECT_EQ(v.witness_count, 0u);
}

TEST(Pbr, RevisedModeIsNotDerivable) {
  const auto v = pbr_contradiction(box_style_qubit_model(16));
  EXPECT_EQ(v.kind, PbrVerdictKind::not_derivable);
  ASSERT_TRUE(v.double_sum_diagnostic);
  EXPECT_NEAR(*v.double_sum_diagnostic, 4.0, 1e-12);
  EXPECT_FALSE(v.trace.empty());
}

TEST(Pbr, PreconditionsAreEnforced) {
  EXPECT_THROW(pbr_contradiction(injected_overlap_model()), std::invalid_argument);
  auto j = nlohmann::json(random_epistemic_model(0.25, 6, 1));
  j["responses"][0][0] = {0.5, 0.5};
  EXPECT_THROW(pbr_contradiction(ontological_model_from_json(j)), std::invalid_argument);
}

TEST(BoxModel, EnergiesAndCellMasses) {
  const auto e = box_energies(3);
  for (std::size_t n = 1; n <= 3; ++n) EXPECT_NEAR(e[n - 1], n * n * std::numbers::pi * std::numbers::pi / 2, 1e-12);
  for (std::size_t level : {1u, 2u, 3u}) {
    const auto m = box_eigenstate_cell_masses(level, 10);
    double s = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_NEAR(m[j], midpoint_cell_mass(level, j / 10.0, (j + 1) / 10.0), 1e-7);
      s += m[j];
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  EXPECT_THROW(box_eigenstate_cell_masses(0, 4), std::invalid_argument);
}

TEST(BoxModel, RevisedModelIsConsistentAndEpistemic) {
  const auto m = build_box_nomological_model(3, 16);
  EXPECT_EQ(m.mode(), ResponseMode::revised);
  const auto r = check_consistency(m);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_deviation, 1e-12);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      const auto c = classify(m, a, b);
      EXPECT_EQ(c.kind, PairClass::epistemic_pair);
      const auto ma = box_eigenstate_cell_masses(a + 1, 16), mb = box_eigenstate_cell_masses(b + 1, 16);
      double o = 0.0;
      for (std::size_t j = 0; j < 16; ++j) o += std::min(ma[j], mb[j]);
      EXPECT_NEAR(c.overlap, o, 1e-14);
    }
  }
  EXPECT_EQ(orthogonal_distinctness_check(m).verdict, DistinctnessVerdict::blocked_revised);
  EXPECT_FALSE(check_consistency(m.to_standard_mode()).pass);
  ASSERT_TRUE(m.positions());
  EXPECT_EQ(m.positions()->size(), 16u);
}

TEST(BoxModel, SingleCellMakesEveryPairCoincide) {
  const auto m = build_box_nomological_model(2, 1);
  EXPECT_NEAR(classify(m, 0, 1).overlap, 1.0, 1e-15);
  EXPECT_NEAR(classify(box_style_qubit_model(1), 0, 1).overlap, 1.0, 1e-15);
  EXPECT_THROW(build_box_nomological_model(1, 4), std::invalid_argument);
}

TEST(RandomModel, FeasibilityBounds) {
  EXPECT_EQ(max_feasible_overlap(DeclaredMeasurements::z_and_x), 0.5);
  EXPECT_EQ(minimum_ontic_count(0.0, DeclaredMeasurements::z_and_x), 4u);
  EXPECT_EQ(minimum_ontic_count(0.3, DeclaredMeasurements::z_and_x), 5u);
  EXPECT_EQ(minimum_ontic_count(0.5, DeclaredMeasurements::z_and_x), 3u);
  EXPECT_THROW(random_epistemic_model(0.6, 10, 1), InfeasibleTarget);
  EXPECT_THROW(random_epistemic_model(0.3, 4, 1), InfeasibleTarget);
  EXPECT_THROW(random_epistemic_model(-0.1, 10, 1), InfeasibleTarget);
  const auto m = random_epistemic_model(0.9, 3, 1, DeclaredMeasurements::none);
  EXPECT_NEAR(classify(m, 0, 1).overlap, 0.9, 1e-12);
  EXPECT_THROW(random_epistemic_model(1.0, 5, 1, DeclaredMeasurements::none), InfeasibleTarget);
}

TEST(RandomModel, HitsTargetAndStaysConsistent) {
  for (double o : {0.0, 0.1, 0.37, 0.5}) {
    for (std::size_t n : {5u, 7u, 12u}) {
      const auto m = random_epistemic_model(o, n, 42 + n);
      EXPECT_EQ(m.ontic_count(), n);
      EXPECT_NEAR(classify(m, 0, 1).overlap, o, 1e-12) << o << " " << n;
      EXPECT_LE(check_consistency(m).max_deviation, 1e-12);
    }
  }
}

TEST(RandomModel, SeedDeterminesModel) {
  EXPECT_EQ(nlohmann::json(random_epistemic_model(0.2, 9, 5)), nlohmann::json(random_epistemic_model(0.2, 9, 5)));
  EXPECT_NE(nlohmann::json(random_epistemic_model(0.2, 9, 5)), nlohmann::json(random_epistemic_model(0.2, 9, 6)));
}

TEST(RandomModel, ConsistentModelKeepsOrthogonalPairsApart) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto states = four_states();
    states.push_back({"y", FiniteState{Complex(1), Complex(0, 1)}});
    const auto m = random_consistent_model(states, zx(), 3, seed);
    EXPECT_LE(check_consistency(m).max_deviation, 1e-12);
    const auto d = orthogonal_distinctness_check(m);
    EXPECT_EQ(d.verdict, DistinctnessVerdict::zero_overlap_confirmed);
    EXPECT_EQ(classify(m, 0, 2).kind, PairClass::epistemic_pair);
  }
}
