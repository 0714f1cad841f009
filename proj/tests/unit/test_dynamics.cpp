#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "bohmlab/duel.hpp"
#include "bohmlab/frame_io.hpp"
#include "bohmlab/guidance.hpp"
#include "bohmlab/interpolation.hpp"
#include "bohmlab/propagator.hpp"
#include "bohmlab/sampling.hpp"
#include "bohmlab/stationary.hpp"
#include "bohmlab/statistics.hpp"
#include "bohmlab/trajectory.hpp"

using namespace bohmlab;

namespace {

constexpr double kPi = std::numbers::pi;

double free_width(double sigma0, double t) { return sigma0 * std::sqrt(1.0 + std::pow(t / (2.0 * sigma0 * sigma0), 2)); }

Grid line(double lo, double hi, std::size_t n) { return Grid({Axis::periodic(lo, hi, n)}); }

// Dense spectral Hamiltonian assembled directly from the cosine series.
Eigen::MatrixXd dense_hamiltonian(const Grid& g, const std::vector<double>& v) {
  const auto& a = g.axis(0);
  const auto n = static_cast<Eigen::Index>(a.points);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      double s = 0.0;
      for (Eigen::Index m = 0; m < n; ++m) {
        const double mm = m <= n / 2 ? static_cast<double>(m) : static_cast<double>(m - n);
        const double k = 2.0 * kPi * mm / a.period();
        s += std::cos(k * a.spacing * static_cast<double>(j - l)) * 0.5 * k * k;
      }
      h(j, l) = s / static_cast<double>(n);
    }
    h(j, j) += v[static_cast<std::size_t>(j)];
  }
  return h;
}

}  // namespace

TEST(Propagator, NormConservedOverManySteps) {
  const auto g = line(-20, 20, 256);
  const auto w0 = gaussian(g, GaussianPacket{{-2.0}, {1.0}, {1.5}});
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = 0.05 * std::pow(g.axis(0).at(i), 2);
  const SplitStepPropagator prop(Potential::table(g, v), 0.01);
  auto w = w0;
  for (int s = 0; s < 1000; ++s) w = prop.step(w);
  EXPECT_LE(std::abs(grid_norm(w) - 1.0), 1e-10);
}

TEST(Propagator, PlaneWaveAcquiresExactPhase) {
  const auto g = line(0, 2 * kPi, 32);
  const std::vector<double> k{3.0};
  const auto w0 = plane_wave(g, k);
  const double dt = 0.37;
  const auto w1 = SplitStepPropagator(Potential::free(g), dt).step(w0);
  const Complex phase = std::polar(1.0, -0.5 * 9.0 * dt);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(w1[i] - phase * w0[i]), 0.0, 1e-14);
}

TEST(Propagator, FreeGaussianFollowsWidthLaw) {
  const auto g = line(-40, 40, 1024);
  const double s0 = 1.0, k = 1.0, t_end = 5.0;
  const auto h = WaveHistory::evolve(gaussian(g, GaussianPacket{{0.0}, {s0}, {k}}), Potential::free(g), 0.01, t_end, false);
  for (std::size_t f = 0; f < h.size(); f += 50) {
    const double t = h.frame(f).time;
    const auto m = density_moments(h.wave(f), 0);
    EXPECT_NEAR(std::sqrt(m.variance), free_width(s0, t), 1e-9 * free_width(s0, t)) << t;
    EXPECT_NEAR(m.mean, k * t, 1e-9) << t;
  }
}

TEST(Propagator, StrangErrorIsSecondOrder) {
  const auto g = line(-8, 8, 48);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = 0.5 * std::pow(g.axis(0).at(i), 2);
  const auto w0 = gaussian(g, GaussianPacket{{1.0}, {0.6}, {0.5}});

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian(g, v));
  const double t = 1.0;
  Eigen::VectorXcd c0(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) c0(static_cast<Eigen::Index>(i)) = w0[i];
  const Eigen::MatrixXcd u = es.eigenvectors().cast<Complex>();
  Eigen::VectorXcd phases = (es.eigenvalues().cast<Complex>() * Complex(0, -t)).array().exp();
  const Eigen::VectorXcd exact = u * phases.asDiagonal() * (u.adjoint() * c0);

  auto error_for = [&](double dt) {
    const auto h = WaveHistory::evolve(w0, Potential::table(g, v), dt, t, false);
    const auto& psi = h.frames().back().psi;
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e += std::norm(psi[i] - exact(static_cast<Eigen::Index>(i)));
    return std::sqrt(e * g.cell_volume());
  };
  const double e1 = error_for(0.02), e2 = error_for(0.01);
  EXPECT_LT(e1, 1e-3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(Propagator, HistoryStepDividesEndTime) {
  const auto g = line(-5, 5, 32);
  const auto h = WaveHistory::evolve(gaussian(g, GaussianPacket{{0.0}, {1.0}, {0.0}}), Potential::free(g), 0.03, 1.0, false);
  EXPECT_EQ(h.size(), 34u);  // round(1/0.03) = 33 steps
  EXPECT_NEAR(h.step(), 1.0 / 33.0, 1e-15);
  EXPECT_DOUBLE_EQ(h.end_time(), 1.0);
  EXPECT_EQ(h.frame_at(h.frame(10).time), 10u);
  EXPECT_THROW(h.frame_at(0.5), std::exception);
  EXPECT_FALSE(h.has_gradients());
}

TEST(Propagator, SpectralEdgeWarning) {
  const auto g = line(0, 2 * kPi, 32);
  Diagnostics d;
  const std::vector<double> near_cutoff{15.0};
  evolve_step(plane_wave(g, near_cutoff), Potential::free(g), 0.01, &d);
  EXPECT_FALSE(d.empty());
  d.clear();
  const std::vector<double> low{1.0};
  evolve_step(plane_wave(g, low), Potential::free(g), 0.01, &d);
  EXPECT_TRUE(d.empty());
}

TEST(Spectral, DerivativeOfSine) {
  const auto g = line(0, 2 * kPi, 32);
  std::vector<Complex> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::sin(3.0 * g.axis(0).at(i));
  const auto df = spectral_derivative(g, f, 0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(df[i] - 3.0 * std::cos(3.0 * g.axis(0).at(i))), 0.0, 1e-12);
}

TEST(Spectral, WavenumbersInFftOrder) {
  const auto k = fft_wavenumbers(Axis::periodic(0, 2 * kPi, 6));
  const std::vector<double> expected{0, 1, 2, -3, -2, -1};
  ASSERT_EQ(k.size(), expected.size());
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(std::abs(k[i]), std::abs(expected[i]), 1e-14);
}

TEST(Interpolation, ReproducesQuadratics) {
  const auto g = line(-4, 4, 64);
  std::vector<Complex> f(g.size());
  auto q = [](double x) { return Complex(1.0 + 0.5 * x - 0.25 * x * x, 2.0 * x); };
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = q(g.axis(0).at(i));
  for (double x : {-1.03, 0.0, 0.4999, 2.71}) {
    const std::vector<double> p{x};
    EXPECT_NEAR(std::abs(interpolate(g, f, p) - q(x)), 0.0, 1e-12) << x;
  }
  const auto st = cubic_stencil(g.axis(0), 0.3);
  double s = 0.0;
  for (double wgt : st.weight) s += wgt;
  EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(Guidance, PlaneWaveVelocityEqualsWavevector) {
  const auto g = line(0, 2 * kPi, 64);
  const std::vector<double> k{2.0};
  const auto w = plane_wave(g, k);
  for (double x : {0.1, 1.7, 5.9}) {
    const std::vector<double> q{x};
    const auto v = guiding_velocity(w, q);
    ASSERT_FALSE(v.near_node);
    EXPECT_NEAR(v.velocity[0], 2.0, 1e-10);
  }
}

TEST(Guidance, RealStateHasZeroVelocity) {
  const auto g = line(-10, 10, 128);
  const auto w = gaussian_superposition(
      g, std::vector<GaussianPacket>{{{-2.0}, {1.0}, {0.0}}, {{2.5}, {0.7}, {0.0}, Complex(-0.4, 0.0)}});
  for (double x : {-3.3, 0.0, 1.1, 2.4}) {
    const std::vector<double> q{x};
    const auto v = guiding_velocity(w, q);
    ASSERT_FALSE(v.near_node);
    EXPECT_EQ(v.velocity[0], 0.0);
  }
}

TEST(Guidance, NodeIsReported) {
  const auto g = line(-10, 10, 128);
  const auto w = gaussian_superposition(
      g, std::vector<GaussianPacket>{{{-3.0}, {1.0}, {0.0}}, {{3.0}, {1.0}, {0.0}, Complex(-1.0, 0.0)}});
  const std::vector<double> q{0.0};
  EXPECT_TRUE(guiding_velocity(w, q).near_node);
}

TEST(Trajectory, FreeGaussianMatchesAnalyticFlow) {
  const auto g = line(-40, 40, 1024);
  const double s0 = 1.0, k = 0.8, t_end = 3.0;
  const auto w0 = gaussian(g, GaussianPacket{{0.0}, {s0}, {k}});
  // Frames are interpolated linearly in time, so the error is second order in dt.
  auto max_error = [&](double x0, double dt) {
    const auto tr = integrate_trajectory(w0, Potential::free(g), Configuration{x0}, t_end, dt);
    EXPECT_FALSE(tr.truncated);
    double e = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double t = tr.times[i];
      e = std::max(e, std::abs(tr.configurations[i][0] - (k * t + x0 * free_width(s0, t) / s0)));
    }
    return e;
  };
  for (double x0 : {-1.2, 0.3, 2.0}) {
    const double coarse = max_error(x0, 0.02), fine = max_error(x0, 0.01);
    EXPECT_LT(fine, 1e-4) << x0;
    EXPECT_GT(coarse / fine, 3.0) << x0;
  }
}

TEST(Trajectory, RecordFramesSubset) {
  const auto g = line(-20, 20, 256);
  const auto h = WaveHistory::evolve(gaussian(g, GaussianPacket{{0.0}, {1.0}, {1.0}}), Potential::free(g), 0.05, 1.0, true);
  GuidanceField field(h);
  IntegratorOptions opt;
  opt.record_frames = {0, 10, 20};
  const auto sub = integrate_trajectory(field, Configuration{0.5}, opt);
  const auto all = integrate_trajectory(field, Configuration{0.5});
  ASSERT_EQ(sub.size(), 3u);
  EXPECT_EQ(sub.configurations[1], all.configurations[10]);
  EXPECT_EQ(sub.configurations[2], all.configurations[20]);
  opt.record_frames = {99};
  EXPECT_THROW(integrate_trajectory(field, Configuration{0.5}, opt), std::invalid_argument);
}

TEST(Trajectory, StartingOnNodeTruncates) {
  const auto g = line(-10, 10, 128);
  const auto w = gaussian_superposition(
      g, std::vector<GaussianPacket>{{{-3.0}, {1.0}, {0.0}}, {{3.0}, {1.0}, {0.0}, Complex(-1.0, 0.0)}});
  const auto tr = integrate_trajectory(w, Potential::free(g), Configuration{0.0}, 0.5, 0.05);
  EXPECT_TRUE(tr.truncated);
  EXPECT_FALSE(tr.diagnostic.empty());
  EXPECT_LT(tr.size(), 11u);
}

TEST(Trajectory, EnsembleIndependentOfThreadCount) {
  const auto g = line(-20, 20, 256);
  const auto h = WaveHistory::evolve(gaussian(g, GaussianPacket{{0.0}, {1.0}, {1.0}}), Potential::free(g), 0.05, 1.0, true);
  const auto a = bohm_ensemble(h, 40, 7, 1);
  const auto b = bohm_ensemble(h, 40, 7, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.members[i].seed, b.members[i].seed);
    EXPECT_EQ(a.members[i].configurations, b.members[i].configurations);
  }
}

TEST(Sampler, CellForFollowsCumulativeMass) {
  const auto g = line(0, 4, 4);
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  std::vector<Complex> amp(4);
  for (std::size_t i = 0; i < 4; ++i) amp[i] = std::sqrt(p[i]);
  const BornSampler s(GridWaveFunction(g, amp));
  EXPECT_EQ(s.cell_for(0.0), 0u);
  EXPECT_EQ(s.cell_for(0.0999), 0u);
  EXPECT_EQ(s.cell_for(0.1001), 1u);
  EXPECT_EQ(s.cell_for(0.5999), 2u);
  EXPECT_EQ(s.cell_for(0.6001), 3u);
  EXPECT_EQ(s.cell_for(0.999999), 3u);
}

TEST(Sampler, FrequenciesMatchMasses) {
  const auto g = line(0, 4, 4);
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  std::vector<Complex> amp(4);
  for (std::size_t i = 0; i < 4; ++i) amp[i] = std::polar(std::sqrt(p[i]), 0.3 * static_cast<double>(i));
  const BornSampler s(GridWaveFunction(g, amp));
  Rng rng(11);
  const std::size_t n = 40000;
  std::vector<std::size_t> count(4);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = s.sample(rng);
    ASSERT_GE(q[0], 0.0);
    ASSERT_LT(q[0], 4.0);
    ++count[g.nearest_flat(q)];
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const double sd = std::sqrt(n * p[i] * (1 - p[i]));
    EXPECT_NEAR(static_cast<double>(count[i]), n * p[i], 5 * sd);
  }
}

TEST(Sampler, DeterministicPerSeed) {
  const auto g = line(-5, 5, 64);
  const auto w = gaussian(g, GaussianPacket{{0.0}, {1.0}, {0.0}});
  EXPECT_EQ(born_sample(w, 5), born_sample(w, 5));
  EXPECT_NE(born_sample(w, 5), born_sample(w, 6));
  const auto u = uniform_sample(g, 100, 3);
  for (const auto& q : u) {
    EXPECT_GE(q[0], -5.0 - 0.5 * g.axis(0).spacing);
    EXPECT_LT(q[0], 5.0);
  }
}

TEST(Statistics, ChiSquareTwoDegreesOfFreedom) {
  const std::vector<std::size_t> obs{30, 50, 20};
  const std::vector<double> p{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double x2 = 0.0;
  for (auto o : obs) x2 += std::pow(static_cast<double>(o) - 100.0 / 3, 2) / (100.0 / 3);
  const auto r = chi_square_test(obs, p);
  EXPECT_EQ(r.degrees_of_freedom, 2u);
  EXPECT_NEAR(r.statistic, x2, 1e-12);
  EXPECT_NEAR(r.p_value, std::exp(-x2 / 2), 1e-12);
}

TEST(Statistics, ChiSquareImpossibleBin) {
  const std::vector<std::size_t> obs{5, 5};
  const std::vector<double> p{1.0, 0.0};
  EXPECT_EQ(chi_square_test(obs, p).p_value, 0.0);
}

TEST(Statistics, KolmogorovTailMatchesSeries) {
  for (std::size_t n : {50u, 400u, 10000u}) {
    for (double d : {0.02, 0.05, 0.1, 0.2}) {
      const double sn = std::sqrt(static_cast<double>(n));
      const double lam = (sn + 0.12 + 0.11 / sn) * d;
      double q = 0.0;
      for (int k = 1; k < 200; ++k) q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
      q = std::clamp(q, 0.0, 1.0);
      EXPECT_NEAR(kolmogorov_p_value(d, n), q, 1e-10) << n << " " << d;
    }
  }
}

TEST(Statistics, KsStatisticByHand) {
  const auto r = ks_test({0.7, 0.1, 0.4}, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_NEAR(r.statistic, 0.3, 1e-15);
}

TEST(Statistics, EquivarianceAcceptsBornRejectsUniform) {
  const auto g = line(-10, 10, 256);
  const auto w = gaussian(g, GaussianPacket{{1.0}, {1.0}, {0.0}});
  const BornSampler s(w);
  Rng rng(99);
  std::vector<Configuration> born;
  for (int i = 0; i < 3000; ++i) born.push_back(s.sample(rng));
  EXPECT_TRUE(equivariance_test(born, w, 0.0).pass);
  EXPECT_FALSE(equivariance_test(uniform_sample(g, 3000, 1), w, 0.0).pass);
  born.resize(kMinEnsemble - 1);
  EXPECT_THROW(equivariance_test(born, w, 0.0), std::invalid_argument);
}

TEST(Statistics, EqualProbabilityBinsCoverMass) {
  const auto g = line(-10, 10, 256);
  const auto w = gaussian(g, GaussianPacket{{0.0}, {1.0}, {0.0}});
  const auto b = BornBinning::equal_probability(w, 10);
  double s = 0.0;
  for (double p : b.bin_probability) {
    s += p;
    EXPECT_NEAR(p, 0.1, 0.03);
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
  const auto cdf = marginal_cdf(w, 0);
  EXPECT_NEAR(cdf(0.0), 0.5, 5e-3);
  EXPECT_NEAR(cdf(1.0), 0.5 * std::erfc(-1.0 / std::sqrt(2.0)), 5e-3);
}

TEST(Rdmp, IndependentDrawsAtEachTime) {
  const auto g = line(-10, 10, 128);
  const auto w = gaussian(g, GaussianPacket{{0.0}, {1.0}, {0.0}});
  const std::vector<double> times{0.0, 0.5, 1.0};
  const auto a = rdmp_trajectory(w, Potential::free(g), times, 4, 0.01);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a.times, times);
  EXPECT_NE(a.configurations[0], a.configurations[1]);
  const std::vector<double> bad{0.0, 0.5, 0.5};
  EXPECT_THROW(rdmp_trajectory(w, Potential::free(g), bad, 4, 0.01), std::invalid_argument);
}

TEST(Duel, IidSeparationOfGaussian) {
  const auto g = line(-15, 15, 1024);
  const double sigma = 1.3;
  const auto w = gaussian(g, GaussianPacket{{0.0}, {sigma}, {0.0}});
  EXPECT_NEAR(iid_mean_separation(w, 200000, 3), 2.0 * sigma / std::sqrt(kPi), 0.01 * sigma);
}

TEST(Duel, StationaryStateBohmRestsRdmpJumps) {
  const auto g = line(-0.5, 1.5, 128);
  const std::vector<double> lo{0.0}, hi{1.0};
  const auto pot = Potential::box(g, lo, hi);
  const double dt = 2.5e-5;
  const auto w0 = split_step_stationary_state(pot, 0, dt);
  const auto h = WaveHistory::evolve(w0, pot, dt, 0.005, true);
  IntegratorOptions opt;
  opt.record_frames = {0, 50, 100};
  const auto bohm = bohm_ensemble(h, 300, 1, 1, opt);
  const std::vector<std::size_t> frames{0, 50, 100};
  const auto rdmp = rdmp_ensemble(h, 300, 2, 1, frames);
  const auto r = compare_bohm_rdmp(h, bohm, rdmp);
  EXPECT_LE(r.bohm_max_step, 1e-10);
  EXPECT_NEAR(r.rdmp_mean_step, iid_mean_separation(w0, 20000, 5), 0.05);
  EXPECT_TRUE(r.marginals_agree);
}

TEST(Stationary, HarmonicOscillatorSpectrum) {
  const auto g = line(-10, 10, 128);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = 0.5 * std::pow(g.axis(0).at(i), 2);
  const auto e = hamiltonian_eigenstates(Potential::table(g, v), 4);
  ASSERT_EQ(e.size(), 4u);
  for (std::size_t n = 0; n < 4; ++n) EXPECT_NEAR(e[n].energy, n + 0.5, 1e-8);
  // Ground state is exp(-x^2/2): unit-variance-1/2 Gaussian.
  EXPECT_NEAR(density_moments(e[0].state, 0).variance, 0.5, 1e-8);
}

TEST(Stationary, SplitStepStateOnlyChangesPhase) {
  const auto g = line(-0.5, 1.5, 128);
  const std::vector<double> lo{0.0}, hi{1.0};
  const auto pot = Potential::box(g, lo, hi);
  const double dt = 2.5e-5;
  const auto exact = hamiltonian_eigenstates(pot, 2);
  for (std::size_t level : {0u, 1u}) {
    const auto w = split_step_stationary_state(pot, level, dt);
    const auto w1 = SplitStepPropagator(pot, dt).step(w);
    EXPECT_LE(l2_distance_up_to_phase(w, w1), 1e-12);
    EXPECT_LE(l2_distance_up_to_phase(w, exact[level].state), 1e-3);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(w[i].imag(), 0.0);
  }
}

TEST(Stationary, CoarseStepDistortsWallStates) {
  const auto g = line(-0.5, 1.5, 128);
  const std::vector<double> lo{0.0}, hi{1.0};
  const auto pot = Potential::box(g, lo, hi);
  const auto exact = hamiltonian_eigenstates(pot, 1)[0].state;
  EXPECT_GT(l2_distance_up_to_phase(split_step_stationary_state(pot, 0, 1e-3), exact), 1e-2);
}

TEST(FrameIo, RoundTripIsExact) {
  const auto dir = std::filesystem::temp_directory_path() / "bohmlab_frame_test";
  std::filesystem::create_directories(dir);
  Grid g({Axis::periodic(-2, 2, 8), Axis::periodic(0, 1, 4)});
  const auto w = gaussian(g, GaussianPacket{{0.1, 0.5}, {1.0, 0.3}, {0.7, -1.0}});
  const auto files = write_frame(dir / "f", w, 0.25);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(std::filesystem::file_size(dir / "f.bin"), 16u * g.size());
  const auto back = read_frame(dir / "f.json");
  EXPECT_EQ(back.time, 0.25);
  EXPECT_EQ(back.wave.grid(), g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.wave[i], w[i]);
  std::filesystem::remove_all(dir);
}

TEST(FrameIo, CsvLayoutAndNumberFormat) {
  Ensemble e;
  Trajectory t;
  t.times = {0.0, 0.5};
  t.configurations = {{0.1, -2.0}, {0.25, 3.0}};
  e.members = {t};
  std::ostringstream os;
  write_trajectories_csv(os, e);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  EXPECT_EQ(header, "trajectory_id,t,x1,x2");
  std::getline(is, row);
  EXPECT_EQ(row, "0,0,0.1,-2");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}
