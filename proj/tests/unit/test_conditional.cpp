#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "bohmlab/conditional.hpp"
#include "bohmlab/grid.hpp"
#include "bohmlab/propagator.hpp"

using namespace bohmlab;

namespace {

const SubsystemSplit kSplit{{0}, {1}};

Complex packet(double x, double c, double s, double k) {
  return std::exp(Complex(-(x - c) * (x - c) / (4 * s * s), k * x));
}

struct Fixture {
  Grid full{{Axis::periodic(-10, 10, 64), Axis::periodic(-20, 20, 128)}};
  Grid gx{{full.axis(0)}};
  Grid gy{{full.axis(1)}};

  // sum_i a_i phi_i(x) g_i(y) with each factor normalized on its own grid.
  struct Term {
    Complex a;
    double xc, xs, xk, yc, ys, yk;
  };

  GridWaveFunction factor(const Grid& g, double c, double s, double k) const {
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = packet(g.axis(0).at(i), c, s, k);
    return GridWaveFunction(g, v).normalized();
  }

  GridWaveFunction build(const std::vector<Term>& terms) const {
    std::vector<Complex> v(full.size());
    for (const auto& t : terms) {
      const auto fx = factor(gx, t.xc, t.xs, t.xk);
      const auto fy = factor(gy, t.yc, t.ys, t.yk);
      for (std::size_t i = 0; i < gx.size(); ++i)
        for (std::size_t j = 0; j < gy.size(); ++j) v[i * gy.size() + j] += t.a * fx[i] * fy[j];
    }
    return GridWaveFunction(full, v);
  }
};

}  // namespace

TEST(Split, Validation) {
  EXPECT_NO_THROW(kSplit.validate(2));
  EXPECT_THROW((SubsystemSplit{{0}, {0}}.validate(2)), std::invalid_argument);
  EXPECT_THROW((SubsystemSplit{{0}, {}}.validate(2)), std::invalid_argument);
  EXPECT_THROW((SubsystemSplit{{0}, {2}}.validate(2)), std::invalid_argument);
}

TEST(Conditional, ProductStateGivesSubsystemFactor) {
  Fixture f;
  const auto psi = f.build({{1.0, -1.0, 1.2, 0.7, 2.0, 1.5, -0.4}});
  const auto phi = f.factor(f.gx, -1.0, 1.2, 0.7);
  for (double y : {0.0, 0.37, 2.9, -1.61}) {
    const std::vector<double> Y{y};
    const auto c = conditional_wavefunction(psi, kSplit, Y);
    ASSERT_EQ(c.status, ConditionalStatus::ok);
    EXPECT_LE(l2_distance_up_to_phase(c.wave, phi), 1e-10) << y;
    EXPECT_NEAR(grid_norm(c.wave), 1.0, 1e-12);
  }
}

TEST(Conditional, NullSliceIsReported) {
  Fixture f;
  const auto psi = f.build({{1.0, 0.0, 1.0, 0.0, -8.0, 1.0, 0.0}});
  const std::vector<double> Y{19.0};
  const auto c = conditional_wavefunction(psi, kSplit, Y);
  EXPECT_EQ(c.status, ConditionalStatus::zero_conditional);
  EXPECT_LT(c.slice_norm, kZeroSliceNorm);
  EXPECT_EQ(c.wave.max_modulus(), 0.0);
}

TEST(Branches, SchmidtValuesMatchDenseSvd) {
  Fixture f;
  const auto psi = f.build({{0.8, -2.0, 1.0, 0.5, -10.0, 1.0, 0.0}, {0.6, 2.0, 1.0, -1.0, 10.0, 1.0, 0.0}});
  Eigen::MatrixXcd m(f.gx.size(), f.gy.size());
  for (std::size_t i = 0; i < f.gx.size(); ++i)
    for (std::size_t j = 0; j < f.gy.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = psi[i * f.gy.size() + j] * std::sqrt(f.full.cell_volume());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto d = branch_decompose(psi, kSplit);
  ASSERT_GE(d.schmidt_values.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(d.schmidt_values[k], svd.singularValues()(static_cast<Eigen::Index>(k)), 1e-10);
}

TEST(Branches, DisjointSupportsGiveTwoBranches) {
  Fixture f;
  const auto psi = f.build({{0.6, -2.0, 1.0, 0.5, -10.0, 1.0, 0.0}, {0.8, 2.0, 0.8, -1.0, 10.0, 1.0, 0.3}});
  const auto d = branch_decompose(psi, kSplit);
  ASSERT_EQ(d.branches.size(), 2u);
  EXPECT_NEAR(std::abs(d.branches[0].weight), 0.8, 1e-10);
  EXPECT_NEAR(std::abs(d.branches[1].weight), 0.6, 1e-10);
  EXPECT_LE(l2_distance_up_to_phase(d.branches[0].x_factor, f.factor(f.gx, 2.0, 0.8, -1.0)), 1e-10);
  EXPECT_LE(l2_distance_up_to_phase(d.branches[1].x_factor, f.factor(f.gx, -2.0, 1.0, 0.5)), 1e-10);
  EXPECT_LT(d.overlap[0][1], kSupportEpsilon);
  EXPECT_NEAR(d.overlap[0][0], 1.0, 1e-12);

  EXPECT_LE(l2_distance(d.reconstruct(kSplit), psi), 1e-12);
  GridWaveFunction sum(psi.grid(), std::vector<Complex>(psi.grid().size()));
  for (const auto& b : d.branches) {
    const auto t = outer_product(b.x_factor.scaled(b.weight), b.y_factor, kSplit, psi.grid());
    for (std::size_t i = 0; i < sum.grid().size(); ++i) sum.data()[i] += t[i];
  }
  EXPECT_LE(l2_distance(sum, psi), 1e-8);
}

TEST(Branches, EffectiveWaveFunctionSelectsOccupiedBranch) {
  Fixture f;
  const auto psi = f.build({{0.6, -2.0, 1.0, 0.5, -10.0, 1.0, 0.0}, {0.8, 2.0, 0.8, -1.0, 10.0, 1.0, 0.3}});
  const std::vector<double> left{-9.6}, right{10.45};
  const auto a = detect_effective(psi, kSplit, left);
  ASSERT_EQ(a.status, EffectiveStatus::effective);
  EXPECT_LE(l2_distance_up_to_phase(a.wave, f.factor(f.gx, -2.0, 1.0, 0.5)), 1e-8);
  const auto b = detect_effective(psi, kSplit, right);
  ASSERT_EQ(b.status, EffectiveStatus::effective);
  EXPECT_LE(l2_distance_up_to_phase(b.wave, f.factor(f.gx, 2.0, 0.8, -1.0)), 1e-8);
  EXPECT_NE(a.branch, b.branch);
}

TEST(Branches, OverlappingSupportsAreConditionalOnly) {
  Fixture f;
  const auto psi = f.build({{0.6, -2.0, 1.0, 0.5, -1.0, 1.0, 0.0}, {0.8, 2.0, 0.8, -1.0, 1.0, 1.0, 0.0}});
  const std::vector<double> Y{0.0};
  const auto r = detect_effective(psi, kSplit, Y);
  EXPECT_EQ(r.status, EffectiveStatus::conditional_only);
  EXPECT_GE(r.worst_overlap, kSupportEpsilon);
  const auto c = conditional_wavefunction(psi, kSplit, Y);
  EXPECT_LE(l2_distance_up_to_phase(r.wave, c.wave), 1e-12);
}

TEST(Autonomy, SeparatedBranchEvolvesAutonomously) {
  Fixture f;
  const double ky = 1.5;
  const auto psi = f.build({{0.6, -2.0, 1.0, 0.5, -10.0, 1.0, ky}, {0.8, 2.0, 0.8, -1.0, 10.0, 1.0, -ky}});
  const auto pot = Potential::free(f.full);
  const auto h = WaveHistory::evolve(psi, pot, 0.01, 2.0, false);
  std::vector<Configuration> path;
  for (std::size_t k = 0; k < h.size(); ++k) path.push_back({-10.0 + ky * h.frame(k).time});
  const auto r = schrodinger_autonomy_check(h, pot, kSplit, path);
  EXPECT_TRUE(r.autonomous);
  EXPECT_LE(r.max_distance, 1e-4);
  EXPECT_EQ(r.times.size(), h.size());
  EXPECT_TRUE(r.null_slices.empty());
}

TEST(Autonomy, CrossingBranchesAreNotAutonomous) {
  Fixture f;
  const double ky = 2.0;
  const auto psi = f.build({{0.6, -2.0, 1.0, 0.5, -3.0, 1.0, ky}, {0.8, 2.0, 0.8, -1.0, 3.0, 1.0, -ky}});
  const auto pot = Potential::free(f.full);
  const auto h = WaveHistory::evolve(psi, pot, 0.01, 3.0, false);
  std::vector<Configuration> path;
  for (std::size_t k = 0; k < h.size(); ++k) path.push_back({-3.0 + ky * h.frame(k).time});
  const auto r = schrodinger_autonomy_check(h, pot, kSplit, path);
  EXPECT_FALSE(r.autonomous);
  EXPECT_GT(r.max_distance, 0.1);
}

TEST(Autonomy, RejectsNullStartAndShortPath) {
  Fixture f;
  const auto psi = f.build({{1.0, 0.0, 1.0, 0.0, -8.0, 1.0, 0.0}});
  const auto pot = Potential::free(f.full);
  const auto h = WaveHistory::evolve(psi, pot, 0.1, 0.2, false);
  std::vector<Configuration> path(h.size(), Configuration{19.0});
  EXPECT_THROW(schrodinger_autonomy_check(h, pot, kSplit, path), std::invalid_argument);
  path.pop_back();
  EXPECT_THROW(schrodinger_autonomy_check(h, pot, kSplit, path), std::exception);
}
