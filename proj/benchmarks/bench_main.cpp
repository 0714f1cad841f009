#include <vector>

#include <benchmark/benchmark.h>

#include "bohmlab/conditional.hpp"
#include "bohmlab/pbr.hpp"
#include "bohmlab/propagator.hpp"
#include "bohmlab/random_model.hpp"
#include "bohmlab/sampling.hpp"
#include "bohmlab/trajectory.hpp"

using namespace bohmlab;

static void BM_SplitStep1D(benchmark::State& state) {
  const Grid g({Axis::periodic(-40, 40, static_cast<std::size_t>(state.range(0)))});
  const SplitStepPropagator prop(Potential::free(g), 0.01);
  auto w = gaussian(g, GaussianPacket{{0.0}, {1.0}, {1.0}});
  for (auto _ : state) {
    prop.step(w.amplitudes());
    benchmark::DoNotOptimize(w.data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SplitStep1D)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_SplitStep2D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g({Axis::periodic(-10, 10, n), Axis::periodic(-10, 10, n)});
  const SplitStepPropagator prop(Potential::free(g), 0.01);
  auto w = gaussian(g, GaussianPacket{{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}});
  for (auto _ : state) {
    prop.step(w.amplitudes());
    benchmark::DoNotOptimize(w.data().data());
  }
}
BENCHMARK(BM_SplitStep2D)->Arg(64)->Arg(128);

static void BM_BornSampler(benchmark::State& state) {
  const Grid g({Axis::periodic(-40, 40, 1024)});
  const BornSampler sampler(gaussian(g, GaussianPacket{{0.0}, {1.0}, {0.0}}));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
}
BENCHMARK(BM_BornSampler);

static void BM_BohmEnsemble(benchmark::State& state) {
  const Grid g({Axis::periodic(-20, 20, 512)});
  const auto h = WaveHistory::evolve(gaussian(g, GaussianPacket{{0.0}, {1.0}, {1.0}}), Potential::free(g), 0.01, 1.0, true);
  for (auto _ : state) benchmark::DoNotOptimize(bohm_ensemble(h, static_cast<std::size_t>(state.range(0)), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BohmEnsemble)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_BranchDecompose(benchmark::State& state) {
  const Grid gx({Axis::periodic(-10, 10, 64)}), gy({Axis::periodic(-20, 20, 128)});
  const Grid full({gx.axis(0), gy.axis(0)});
  const SubsystemSplit split{{0}, {1}};
  const auto a = gaussian(gx, GaussianPacket{{-2.0}, {1.0}, {0.5}});
  const auto b = gaussian(gx, GaussianPacket{{2.0}, {1.0}, {-1.0}});
  const auto ya = gaussian(gy, GaussianPacket{{-8.0}, {1.0}, {0.0}});
  const auto yb = gaussian(gy, GaussianPacket{{8.0}, {1.0}, {0.0}});
  auto psi = outer_product(a, ya, split, full);
  const auto second = outer_product(b, yb, split, full);
  for (std::size_t i = 0; i < full.size(); ++i) psi.data()[i] += second[i];
  for (auto _ : state) benchmark::DoNotOptimize(branch_decompose(psi, split));
}
BENCHMARK(BM_BranchDecompose)->Unit(benchmark::kMillisecond);

static void BM_PbrContradiction(benchmark::State& state) {
  const auto m = random_epistemic_model(0.25, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(pbr_contradiction(m));
}
BENCHMARK(BM_PbrContradiction)->Arg(6)->Arg(32)->Arg(128);
BENCHMARK_MAIN();
