#include "bohmlab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bohmlab/parallel.hpp"

namespace bohmlab {

BornSampler::BornSampler(const GridWaveFunction& w) : grid_(w.grid()) {
  const auto masses = cell_masses(w);
  cdf_.resize(masses.size());
  std::partial_sum(masses.begin(), masses.end(), cdf_.begin());
  const double total = cdf_.back();
  if (!(total > 0.0)) throw std::invalid_argument("BornSampler: zero wave function");
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::size_t BornSampler::cell_for(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
}

Configuration BornSampler::sample(Rng& rng) const {
  const std::size_t cell = cell_for(rng.uniform());
  Configuration q = grid_.point(cell);
  for (std::size_t d = 0; d < q.size(); ++d) {
    q[d] = grid_.axis(d).wrap(q[d] + (rng.uniform() - 0.5) * grid_.axis(d).spacing);
  }
  return q;
}

Configuration born_sample(const GridWaveFunction& w, std::uint64_t seed) {
  Rng rng(seed);
  return BornSampler(w).sample(rng);
}

std::vector<Configuration> uniform_sample(const Grid& grid, std::size_t count, std::uint64_t seed) {
  std::vector<Configuration> out(count, Configuration(grid.rank()));
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(member_seed(seed, i));
    for (std::size_t d = 0; d < grid.rank(); ++d) {
      const auto& a = grid.axis(d);
      out[i][d] = a.wrap(a.origin - 0.5 * a.spacing + rng.uniform() * a.period());
    }
  }
  return out;
}

Trajectory rdmp_trajectory(const GridWaveFunction& w0, const Potential& p, std::span<const double> sample_times,
                           std::uint64_t seed, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rdmp_trajectory: dt must be positive");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0 || (i > 0 && !(sample_times[i] > sample_times[i - 1]))) {
      throw std::invalid_argument("rdmp_trajectory: sample times must be nonnegative and strictly increasing");
    }
  }
  Trajectory tr;
  tr.seed = seed;
  Rng rng(seed);
  GridWaveFunction w = w0;
  double t = 0.0;
  for (double ts : sample_times) {
    const double span = ts - t;
    if (span > 0.0) {
      const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
      SplitStepPropagator prop(p, span / static_cast<double>(steps));
      for (std::size_t s = 0; s < steps; ++s) prop.step(w.amplitudes());
    }
    t = ts;
    tr.times.push_back(ts);
    tr.configurations.push_back(BornSampler(w).sample(rng));
  }
  return tr;
}

Ensemble rdmp_ensemble(const WaveHistory& history, std::size_t members, std::uint64_t seed, unsigned threads,
                       std::span<const std::size_t> frames) {
  std::vector<std::size_t> which(frames.begin(), frames.end());
  if (which.empty()) {
    which.resize(history.size());
    std::iota(which.begin(), which.end(), std::size_t{0});
  }
  std::vector<BornSampler> samplers;
  samplers.reserve(which.size());
  for (auto f : which) samplers.emplace_back(history.wave(f));

  Ensemble e;
  e.members.resize(members);
  parallel_for(members, threads, [&](std::size_t i) {
    const auto s = member_seed(seed, i);
    Rng rng(s);
    Trajectory tr;
    tr.seed = s;
    tr.times.reserve(which.size());
    tr.configurations.reserve(which.size());
    for (std::size_t j = 0; j < which.size(); ++j) {
      tr.times.push_back(history.frame(which[j]).time);
      tr.configurations.push_back(samplers[j].sample(rng));
    }
    e.members[i] = std::move(tr);
  });
  return e;
}

}  // namespace bohmlab
