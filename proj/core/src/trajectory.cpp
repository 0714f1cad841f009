#include "bohmlab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "bohmlab/parallel.hpp"
#include "bohmlab/random.hpp"
#include "bohmlab/sampling.hpp"

namespace bohmlab {
namespace {

Configuration wrapped(const Grid& g, Configuration q) {
  for (std::size_t d = 0; d < q.size(); ++d) q[d] = g.axis(d).wrap(q[d]);
  return q;
}

// One classical RK4 step; nullopt when any stage lands near a node.
std::optional<Configuration> rk4_step(const GuidanceField& field, const Configuration& q, double t, double h) {
  const std::size_t n = q.size();
  Configuration tmp(n);
  const auto k1 = field.velocity(q, t);
  if (k1.near_node) return std::nullopt;
  for (std::size_t d = 0; d < n; ++d) tmp[d] = q[d] + 0.5 * h * k1.velocity[d];
  const auto k2 = field.velocity(tmp, t + 0.5 * h);
  if (k2.near_node) return std::nullopt;
  for (std::size_t d = 0; d < n; ++d) tmp[d] = q[d] + 0.5 * h * k2.velocity[d];
  const auto k3 = field.velocity(tmp, t + 0.5 * h);
  if (k3.near_node) return std::nullopt;
  for (std::size_t d = 0; d < n; ++d) tmp[d] = q[d] + h * k3.velocity[d];
  const auto k4 = field.velocity(tmp, t + h);
  if (k4.near_node) return std::nullopt;
  Configuration out(n);
  for (std::size_t d = 0; d < n; ++d) {
    out[d] = q[d] + h / 6.0 * (k1.velocity[d] + 2.0 * k2.velocity[d] + 2.0 * k3.velocity[d] + k4.velocity[d]);
  }
  return out;
}

double distance(const Configuration& a, const Configuration& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

}  // namespace

std::vector<Configuration> Ensemble::positions_at(std::size_t i) const {
  std::vector<Configuration> out;
  out.reserve(members.size());
  for (const auto& m : members) {
    if (i < m.size()) out.push_back(m.configurations[i]);
  }
  return out;
}

Trajectory integrate_trajectory(const GuidanceField& field, const Configuration& q0, const IntegratorOptions& options) {
  const WaveHistory& hist = field.history();
  const Grid& g = hist.grid();
  if (q0.size() != g.rank()) throw DimensionMismatch("integrate_trajectory: configuration rank");

  std::vector<char> record(hist.size(), options.record_frames.empty() ? 1 : 0);
  for (auto f : options.record_frames) {
    if (f >= hist.size()) throw std::invalid_argument("integrate_trajectory: record frame out of range");
    record[f] = 1;
  }

  Trajectory tr;
  Configuration q = wrapped(g, q0);
  double t = hist.frame(0).time;
  if (record[0]) {
    tr.times.push_back(t);
    tr.configurations.push_back(q);
  }

  const double frame_step = hist.step();
  const double h_min = std::ldexp(frame_step, -options.max_halvings);
  for (std::size_t k = 0; k + 1 < hist.size(); ++k) {
    const double target = hist.frame(k + 1).time;
    double h = target - t;
    while (target - t > 1e-12 * frame_step) {
      h = std::min(h, target - t);
      auto next = rk4_step(field, q, t, h);
      if (!next) {
        h *= 0.5;
        if (h < h_min) {
          tr.truncated = true;
          tr.diagnostic = "step underflow near a node of the wave function at t = " + std::to_string(t);
          return tr;
        }
        continue;
      }
      q = wrapped(g, std::move(*next));
      t += h;
      h *= 2.0;
    }
    t = target;
    if (record[k + 1]) {
      tr.times.push_back(t);
      tr.configurations.push_back(q);
    }
  }
  return tr;
}

Trajectory integrate_trajectory(const GridWaveFunction& w0, const Potential& p, const Configuration& q0, double t_end,
                                double dt, const IntegratorOptions& options) {
  const auto history = WaveHistory::evolve(w0, p, dt, t_end, true);
  GuidanceField field(history, options.node_fraction);
  return integrate_trajectory(field, q0, options);
}

Ensemble bohm_ensemble(const WaveHistory& history, const std::vector<Configuration>& initial, unsigned threads,
                       const IntegratorOptions& options) {
  GuidanceField field(history, options.node_fraction);
  Ensemble e;
  e.members.resize(initial.size());
  parallel_for(initial.size(), threads,
               [&](std::size_t i) { e.members[i] = integrate_trajectory(field, initial[i], options); });
  return e;
}

Ensemble bohm_ensemble(const WaveHistory& history, std::size_t members, std::uint64_t seed, unsigned threads,
                       const IntegratorOptions& options) {
  const BornSampler sampler(history.wave(0));
  GuidanceField field(history, options.node_fraction);
  Ensemble e;
  e.members.resize(members);
  parallel_for(members, threads, [&](std::size_t i) {
    const auto s = member_seed(seed, i);
    Rng rng(s);
    e.members[i] = integrate_trajectory(field, sampler.sample(rng), options);
    e.members[i].seed = s;
  });
  return e;
}

double max_step(const Trajectory& t) {
  double m = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) m = std::max(m, distance(t.configurations[i], t.configurations[i - 1]));
  return m;
}

double mean_step(const Trajectory& t) {
  if (t.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += distance(t.configurations[i], t.configurations[i - 1]);
  return s / static_cast<double>(t.size() - 1);
}

}  // namespace bohmlab
