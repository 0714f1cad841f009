#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "bohmlab/finite_state.hpp"
#include "bohmlab/grid.hpp"
#include "bohmlab/potential.hpp"

using namespace bohmlab;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST(FiniteState, NormalizesOnConstruction) {
  FiniteState s{Complex(3, 0), Complex(0, 4)};
  EXPECT_NEAR(s.squared_norm(), 1.0, 1e-15);
  EXPECT_NEAR(s[0].real(), 0.6, 1e-15);
  EXPECT_NEAR(s[1].imag(), 0.8, 1e-15);
}

TEST(FiniteState, RejectsEmptyAndZero) {
  EXPECT_THROW(FiniteState(std::vector<Complex>{}), std::invalid_argument);
  EXPECT_THROW((FiniteState{Complex(0), Complex(0)}), std::invalid_argument);
  EXPECT_THROW((FiniteState{Complex(std::nan(""), 0)}), std::invalid_argument);
}

TEST(FiniteState, InnerProductConjugatesLeft) {
  FiniteState a{Complex(0, 1), Complex(0)};
  FiniteState b{Complex(1), Complex(0)};
  // <a|b> = conj(i) * 1 = -i
  EXPECT_NEAR(std::abs(a.inner(b) - Complex(0, -1)), 0.0, 1e-15);
}

TEST(FiniteState, QubitConstants) {
  EXPECT_NEAR(qubit::plus()[0].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(qubit::minus()[1].real(), -kInvSqrt2, 1e-15);
  EXPECT_NEAR(std::abs(qubit::plus().inner(qubit::minus())), 0.0, 1e-15);
  EXPECT_NEAR(born_probability(qubit::zero(), qubit::plus()), 0.5, 1e-15);
  EXPECT_NEAR(born_probability(qubit::one(), qubit::zero()), 0.0, 0.0);
}

TEST(FiniteState, TensorOrdering) {
  const auto s = tensor(qubit::zero(), qubit::one());
  ASSERT_EQ(s.dimension(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(s[i], Complex(i == 1 ? 1.0 : 0.0));
  const auto pp = tensor(qubit::plus(), qubit::plus());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(pp[i].real(), 0.5, 1e-15);
}

TEST(FiniteState, SuperposeMatchesHandSum) {
  const auto s = superpose({{1.0, qubit::zero()}, {Complex(0, 1), qubit::one()}});
  EXPECT_NEAR(s[0].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(s[1].imag(), kInvSqrt2, 1e-15);
}

TEST(FiniteState, SameRayIgnoresGlobalPhase) {
  const Complex phase = std::polar(1.0, 0.7);
  FiniteState a{Complex(0.6), Complex(0.8)};
  FiniteState b{0.6 * phase, 0.8 * phase};
  EXPECT_TRUE(same_ray(a, b));
  EXPECT_FALSE(same_ray(a, FiniteState{Complex(0.8), Complex(0.6)}));
}

TEST(FiniteState, DimensionMismatchThrows) {
  EXPECT_THROW(born_probability(qubit::zero(), tensor(qubit::zero(), qubit::zero())), DimensionMismatch);
}

TEST(FiniteState, JsonRoundTrip) {
  FiniteState a{Complex(0.6, 0.1), Complex(-0.2, 0.7)};
  nlohmann::json j = a;
  const auto b = finite_state_from_json(j);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(ProjectiveMeasurement, AcceptsOrthonormalBases) {
  ProjectiveMeasurement x({qubit::plus(), qubit::minus()});
  EXPECT_EQ(x.outcome_count(), 2u);
  EXPECT_LE(x.gram_deviation(), 1e-15);
  EXPECT_EQ(computational_basis(5).outcome_count(), 5u);
}

TEST(ProjectiveMeasurement, RejectsIncompleteOrNonOrthogonal) {
  EXPECT_THROW(ProjectiveMeasurement({qubit::zero()}), std::invalid_argument);
  EXPECT_THROW(ProjectiveMeasurement({qubit::zero(), qubit::plus()}), std::invalid_argument);
  EXPECT_THROW(ProjectiveMeasurement({qubit::zero(), tensor(qubit::zero(), qubit::zero())}), std::exception);
}

TEST(ProjectiveMeasurement, DistributionSumsToOne) {
  const FiniteState s{Complex(0.3, 0.2), Complex(-0.5), Complex(0.1, 0.9)};
  const auto p = measurement_distribution(s, computational_basis(3));
  double sum = 0.0;
  for (double v : p) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-14);
  const double n2 = 0.09 + 0.04 + 0.25 + 0.01 + 0.81;
  EXPECT_NEAR(p[1], 0.25 / n2, 1e-15);
}

TEST(GramDeviation, DetectsNonOrthogonality) {
  std::vector<FiniteState> v{qubit::zero(), qubit::plus()};
  EXPECT_NEAR(gram_deviation(v), kInvSqrt2, 1e-15);
}

TEST(Axis, PeriodicLayout) {
  const auto a = Axis::periodic(-1.0, 1.0, 8);
  EXPECT_DOUBLE_EQ(a.spacing, 0.25);
  EXPECT_DOUBLE_EQ(a.period(), 2.0);
  EXPECT_DOUBLE_EQ(a.last(), 0.75);
  EXPECT_NEAR(a.wrap(1.1), -0.9, 1e-15);
  EXPECT_NEAR(a.wrap(-3.2), 0.8, 1e-15);
  EXPECT_EQ(a.nearest(0.9), 0u);  // wraps to -1
  EXPECT_EQ(a.nearest(0.12), 4u);
  EXPECT_THROW(Axis::periodic(1.0, 1.0, 4), std::invalid_argument);
  EXPECT_THROW(Axis::periodic(0.0, 1.0, 0), std::invalid_argument);
}

TEST(Grid, RowMajorIndexing) {
  Grid g({Axis::periodic(0, 1, 3), Axis::periodic(0, 2, 4), Axis::periodic(0, 1, 5)});
  EXPECT_EQ(g.size(), 60u);
  EXPECT_EQ(g.stride(0), 20u);
  EXPECT_EQ(g.stride(2), 1u);
  EXPECT_NEAR(g.cell_volume(), (1.0 / 3) * 0.5 * 0.2, 1e-15);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto idx = g.multi_index(f);
    EXPECT_EQ(g.flat_index(idx), f);
  }
  const std::vector<std::size_t> idx{2, 1, 3};
  EXPECT_EQ(g.flat_index(idx), 2u * 20 + 1u * 5 + 3u);
  EXPECT_DOUBLE_EQ(g.coordinate(g.flat_index(idx), 1), 0.5);
  const std::vector<double> q{0.7, 0.55, 0.61};
  EXPECT_EQ(g.nearest_flat(q), g.flat_index(idx));
}

TEST(GridWaveFunction, GaussianMomentsMatchParameters) {
  Grid g({Axis::periodic(-20, 20, 512)});
  GaussianPacket p{{1.5}, {0.8}, {2.0}};
  const auto w = gaussian(g, p);
  EXPECT_NEAR(grid_norm(w), 1.0, kGridTolerance);
  const auto m = density_moments(w, 0);
  EXPECT_NEAR(m.mean, 1.5, 1e-12);
  EXPECT_NEAR(m.variance, 0.64, 1e-12);
  // Phase gradient equals the momentum: psi(x+dx)/psi(x) has argument k dx.
  const std::size_t i = g.axis(0).nearest(1.5);
  EXPECT_NEAR(std::arg(w[i + 1] / w[i]), 2.0 * g.axis(0).spacing, 1e-12);
}

TEST(GridWaveFunction, TwoDimensionalGaussianIsSeparable) {
  Grid g({Axis::periodic(-10, 10, 64), Axis::periodic(-8, 8, 48)});
  const auto w = gaussian(g, GaussianPacket{{0.5, -1.0}, {1.0, 0.7}, {0.0, 0.0}});
  EXPECT_NEAR(density_moments(w, 0).variance, 1.0, 1e-10);
  EXPECT_NEAR(density_moments(w, 1).variance, 0.49, 1e-10);
  EXPECT_NEAR(density_moments(w, 1).mean, -1.0, 1e-10);
}

TEST(GridWaveFunction, PlaneWaveIsUniformAndNormalized) {
  Grid g({Axis::periodic(0, 2 * std::numbers::pi, 32)});
  const std::vector<double> k{3.0};
  const auto w = plane_wave(g, k);
  EXPECT_NEAR(grid_norm(w), 1.0, 1e-14);
  const auto d = born_density(w);
  for (double v : d) EXPECT_NEAR(v, d[0], 1e-14);
}

TEST(GridWaveFunction, DistanceUpToPhase) {
  Grid g({Axis::periodic(-10, 10, 128)});
  const auto a = gaussian(g, GaussianPacket{{0.0}, {1.0}, {1.0}});
  const auto b = a.scaled(std::polar(3.0, 1.1));
  EXPECT_NEAR(l2_distance_up_to_phase(a, b), 0.0, 1e-14);
  EXPECT_GT(l2_distance(a, b.normalized()), 0.5);
  const auto c = gaussian(g, GaussianPacket{{0.0}, {1.0}, {-1.0}});
  // Orthogonality-free oracle: |<a|c>| = exp(-2 sigma^2 k^2) for opposite momenta k.
  EXPECT_NEAR(std::abs(grid_inner(a, c)), std::exp(-2.0), 1e-12);
}

TEST(GridWaveFunction, PhaseFixedMakesPeakRealPositive) {
  Grid g({Axis::periodic(-10, 10, 64)});
  const auto w = gaussian(g, GaussianPacket{{0.0}, {1.0}, {0.5}}).scaled(Complex(0, -1)).phase_fixed();
  const std::size_t peak = g.axis(0).nearest(0.0);
  EXPECT_GT(w[peak].real(), 0.0);
  EXPECT_NEAR(w[peak].imag(), 0.0, 1e-15);
}

TEST(GridWaveFunction, RejectsMismatchedSizes) {
  Grid g({Axis::periodic(0, 1, 8)});
  EXPECT_THROW(GridWaveFunction(g, std::vector<Complex>(7)), std::exception);
}

TEST(Potential, BoxHasWallsOutsideInterval) {
  Grid g({Axis::periodic(-0.5, 1.5, 16)});
  const std::vector<double> lo{0.0}, hi{1.0};
  const auto v = Potential::box(g, lo, hi);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.axis(0).at(i);
    EXPECT_EQ(v[i], (x >= 0.0 && x <= 1.0) ? 0.0 : kWallHeight) << x;
  }
  EXPECT_EQ(v.kind(), PotentialKind::box);
}

TEST(Potential, DoubleSlitOpensTwoGaps) {
  Grid g({Axis::periodic(-4, 4, 80), Axis::periodic(-8, 8, 160)});
  DoubleSlitBarrier b;
  const auto v = Potential::double_slit(g, b);
  const auto at = [&](double x, double y) {
    const std::vector<double> q{x, y};
    return v[g.nearest_flat(q)];
  };
  EXPECT_EQ(at(0.0, 2.0), 0.0);
  EXPECT_EQ(at(0.0, -2.0), 0.0);
  EXPECT_EQ(at(0.0, 0.0), kWallHeight);
  EXPECT_EQ(at(0.0, 6.0), kWallHeight);
  EXPECT_EQ(at(2.0, 0.0), 0.0);
}

TEST(Potential, RestrictedKeepsSeparablePart) {
  Grid g({Axis::periodic(-1, 1, 8), Axis::periodic(-1, 1, 8)});
  std::vector<double> vals(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) vals[f] = g.coordinate(f, 0) * g.coordinate(f, 0) + 0.0;
  const auto p = Potential::table(g, vals);
  const std::vector<std::size_t> xs{0};
  const auto r = p.restricted(xs);
  ASSERT_EQ(r.grid().rank(), 1u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(r[i], std::pow(g.axis(0).at(i), 2));
}
