#include "bohmlab/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "bohmlab/interpolation.hpp"

namespace bohmlab {
namespace {

// Flat-index bookkeeping for the x|y factorization of a grid.
struct SplitLayout {
  Grid x_grid;
  Grid y_grid;
  std::vector<std::size_t> x_offset;  // contribution of each x cell to the full flat index
  std::vector<std::size_t> y_offset;

  SplitLayout(const Grid& full, const SubsystemSplit& split) {
    split.validate(full.rank());
    x_grid = sub_grid(full, split.x_coords);
    y_grid = sub_grid(full, split.y_coords);
    x_offset = offsets(full, x_grid, split.x_coords);
    y_offset = offsets(full, y_grid, split.y_coords);
  }

  std::size_t full_index(std::size_t a, std::size_t b) const { return x_offset[a] + y_offset[b]; }

  static Grid sub_grid(const Grid& full, const std::vector<std::size_t>& coords) {
    std::vector<Axis> axes;
    for (auto c : coords) axes.push_back(full.axis(c));
    return Grid(std::move(axes));
  }

  static std::vector<std::size_t> offsets(const Grid& full, const Grid& sub, const std::vector<std::size_t>& coords) {
    std::vector<std::size_t> out(sub.size());
    for (std::size_t f = 0; f < sub.size(); ++f) {
      const auto idx = sub.multi_index(f);
      std::size_t o = 0;
      for (std::size_t i = 0; i < coords.size(); ++i) o += idx[i] * full.stride(coords[i]);
      out[f] = o;
    }
    return out;
  }
};

// Cubic interpolation weights over the y grid at Y: pairs of (y cell, weight).
std::vector<std::pair<std::size_t, double>> y_weights(const Grid& y_grid, std::span<const double> y) {
  if (y.size() != y_grid.rank()) throw DimensionMismatch("environment configuration rank does not match split");
  std::vector<CubicStencil> st;
  for (std::size_t d = 0; d < y_grid.rank(); ++d) st.push_back(cubic_stencil(y_grid.axis(d), y[d]));
  std::size_t corners = 1;
  for (std::size_t d = 0; d < y_grid.rank(); ++d) corners *= 4;
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(corners);
  for (std::size_t c = 0; c < corners; ++c) {
    std::size_t rem = c, flat = 0;
    double w = 1.0;
    for (std::size_t d = y_grid.rank(); d-- > 0;) {
      const std::size_t o = rem % 4;
      rem /= 4;
      flat += st[d].index[o] * y_grid.stride(d);
      w *= st[d].weight[o];
    }
    out.emplace_back(flat, w);
  }
  return out;
}

double min_sum(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::min(a[i], b[i]);
  return s;
}

// Periodic axis-neighbour cells of a flat index.
std::vector<std::size_t> neighbours(const Grid& g, std::size_t flat) {
  std::vector<std::size_t> out;
  const auto idx = g.multi_index(flat);
  for (std::size_t d = 0; d < g.rank(); ++d) {
    const std::size_t n = g.axis(d).points;
    if (n < 2) continue;
    const std::size_t up = (idx[d] + 1) % n;
    const std::size_t down = (idx[d] + n - 1) % n;
    out.push_back(flat - idx[d] * g.stride(d) + up * g.stride(d));
    if (down != up) out.push_back(flat - idx[d] * g.stride(d) + down * g.stride(d));
  }
  return out;
}

// Region label per y cell: connected components above the support threshold,
// then every remaining cell joins the nearest component (breadth-first).
std::vector<int> support_regions(const Grid& y_grid, std::span<const double> density, double epsilon, int& count) {
  const double peak = *std::max_element(density.begin(), density.end());
  std::vector<int> label(density.size(), -1);
  count = 0;
  for (std::size_t start = 0; start < density.size(); ++start) {
    if (label[start] >= 0 || density[start] < epsilon * peak || !(density[start] > 0.0)) continue;
    std::deque<std::size_t> queue{start};
    label[start] = count;
    while (!queue.empty()) {
      const auto c = queue.front();
      queue.pop_front();
      for (auto nb : neighbours(y_grid, c)) {
        if (label[nb] < 0 && density[nb] >= epsilon * peak && density[nb] > 0.0) {
          label[nb] = count;
          queue.push_back(nb);
        }
      }
    }
    ++count;
  }
  std::deque<std::size_t> frontier;
  for (std::size_t c = 0; c < label.size(); ++c) {
    if (label[c] >= 0) frontier.push_back(c);
  }
  while (!frontier.empty()) {
    const auto c = frontier.front();
    frontier.pop_front();
    for (auto nb : neighbours(y_grid, c)) {
      if (label[nb] < 0) {
        label[nb] = label[c];
        frontier.push_back(nb);
      }
    }
  }
  return label;
}

std::vector<double> normalized_cell_density(const GridWaveFunction& w) {
  auto m = cell_masses(w);
  double total = 0.0;
  for (double v : m) total += v;
  if (total > 0.0) {
    for (auto& v : m) v /= total;
  }
  return m;
}

}  // namespace

void SubsystemSplit::validate(std::size_t rank) const {
  std::vector<int> seen(rank, 0);
  for (auto c : x_coords) {
    if (c >= rank) throw std::invalid_argument("SubsystemSplit: x coordinate out of range");
    ++seen[c];
  }
  for (auto c : y_coords) {
    if (c >= rank) throw std::invalid_argument("SubsystemSplit: y coordinate out of range");
    ++seen[c];
  }
  for (int s : seen) {
    if (s != 1) throw std::invalid_argument("SubsystemSplit: coordinates must be disjoint and exhaustive");
  }
  if (x_coords.empty() || y_coords.empty()) throw std::invalid_argument("SubsystemSplit: both sides must be nonempty");
}

SubsystemSplit SubsystemSplit::from_roles(const GridWaveFunction& w) {
  SubsystemSplit s;
  for (std::size_t d = 0; d < w.roles().size(); ++d) {
    (w.roles()[d] == CoordinateRole::subsystem ? s.x_coords : s.y_coords).push_back(d);
  }
  return s;
}

ConditionalResult conditional_wavefunction(const GridWaveFunction& psi, const SubsystemSplit& split,
                                           std::span<const double> environment) {
  const SplitLayout layout(psi.grid(), split);
  const auto weights = y_weights(layout.y_grid, environment);
  std::vector<Complex> slice(layout.x_grid.size(), Complex{0.0, 0.0});
  for (std::size_t a = 0; a < slice.size(); ++a) {
    for (const auto& [b, w] : weights) slice[a] += w * psi[layout.full_index(a, b)];
  }
  ConditionalResult r;
  r.wave = GridWaveFunction(layout.x_grid, std::move(slice));
  r.slice_norm = grid_norm(r.wave);
  if (r.slice_norm < kZeroSliceNorm) {
    r.status = ConditionalStatus::zero_conditional;
    r.wave = GridWaveFunction(layout.x_grid, std::vector<Complex>(layout.x_grid.size()));
    return r;
  }
  r.wave = r.wave.normalized().phase_fixed();
  return r;
}

GridWaveFunction outer_product(const GridWaveFunction& x, const GridWaveFunction& y, const SubsystemSplit& split,
                               const Grid& full) {
  const SplitLayout layout(full, split);
  if (!(layout.x_grid == x.grid()) || !(layout.y_grid == y.grid())) {
    throw DimensionMismatch("outer_product: factor grids do not match the split");
  }
  std::vector<Complex> amps(full.size());
  for (std::size_t a = 0; a < layout.x_grid.size(); ++a) {
    for (std::size_t b = 0; b < layout.y_grid.size(); ++b) amps[layout.full_index(a, b)] = x[a] * y[b];
  }
  return GridWaveFunction(full, std::move(amps));
}

GridWaveFunction BranchDecomposition::reconstruct(const SubsystemSplit& split) const {
  GridWaveFunction out = residual;
  for (const auto& br : branches) {
    const auto term = outer_product(br.x_factor, br.y_factor, split, residual.grid());
    for (std::size_t f = 0; f < out.grid().size(); ++f) out.data()[f] += br.weight * term[f];
  }
  return out;
}

void to_json(nlohmann::json& j, const BranchDecomposition& d) {
  auto weights = nlohmann::json::array();
  for (const auto& b : d.branches) weights.push_back({b.weight.real(), b.weight.imag()});
  j = nlohmann::json{{"branch_count", d.branches.size()},
                     {"weights", weights},
                     {"overlap", d.overlap},
                     {"residual_overlap", d.residual_overlap},
                     {"residual_norm", grid_norm(d.residual)},
                     {"schmidt_values", d.schmidt_values},
                     {"epsilon", d.epsilon}};
}

BranchDecomposition branch_decompose(const GridWaveFunction& psi, const SubsystemSplit& split, double epsilon) {
  const SplitLayout layout(psi.grid(), split);
  const std::size_t nx = layout.x_grid.size();
  const std::size_t ny = layout.y_grid.size();
  const double dvx = layout.x_grid.cell_volume();
  const double dvy = layout.y_grid.cell_volume();
  const double scale = std::sqrt(dvx * dvy);

  Eigen::MatrixXcd m(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t b = 0; b < ny; ++b) {
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = psi[layout.full_index(a, b)] * scale;
    }
  }

  BranchDecomposition out;
  out.epsilon = epsilon;
  {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) out.schmidt_values.push_back(sv(i));
  }

  std::vector<double> y_density(ny, 0.0);
  for (std::size_t b = 0; b < ny; ++b) {
    for (std::size_t a = 0; a < nx; ++a) y_density[b] += std::norm(m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
  }
  if (!(*std::max_element(y_density.begin(), y_density.end()) > 0.0)) {
    throw std::invalid_argument("branch_decompose: zero wave function");
  }
  int regions = 0;
  const auto label = support_regions(layout.y_grid, y_density, epsilon, regions);

  std::vector<Complex> residual(psi.amplitudes().begin(), psi.amplitudes().end());
  for (int r = 0; r < regions; ++r) {
    std::vector<std::size_t> cols;
    for (std::size_t b = 0; b < ny; ++b) {
      if (label[b] == r) cols.push_back(b);
    }
    Eigen::MatrixXcd block(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) block.col(static_cast<Eigen::Index>(c)) = m.col(static_cast<Eigen::Index>(cols[c]));
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s = svd.singularValues()(0);
    if (!(s > 0.0)) continue;

    std::vector<Complex> xf(nx), yf(ny, Complex{0.0, 0.0});
    for (std::size_t a = 0; a < nx; ++a) xf[a] = svd.matrixU()(static_cast<Eigen::Index>(a), 0) / std::sqrt(dvx);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      yf[cols[c]] = std::conj(svd.matrixV()(static_cast<Eigen::Index>(c), 0)) / std::sqrt(dvy);
    }
    GridWaveFunction x_factor(layout.x_grid, std::move(xf));
    const auto fixed = x_factor.phase_fixed();
    // Move the phase removed from x onto y so that weight stays real positive.
    Complex rotation{1.0, 0.0};
    for (std::size_t a = 0; a < nx; ++a) {
      if (std::abs(x_factor[a]) > 0.0) {
        rotation = x_factor[a] / fixed[a];
        break;
      }
    }
    GridWaveFunction y_factor = GridWaveFunction(layout.y_grid, std::move(yf)).scaled(rotation);
    Branch br{fixed, y_factor, Complex{s, 0.0}};
    for (std::size_t a = 0; a < nx; ++a) {
      for (std::size_t b : cols) residual[layout.full_index(a, b)] -= br.weight * br.x_factor[a] * br.y_factor[b];
    }
    out.branches.push_back(std::move(br));
  }
  std::stable_sort(out.branches.begin(), out.branches.end(),
                   [](const Branch& l, const Branch& r) { return std::abs(l.weight) > std::abs(r.weight); });
  out.residual = GridWaveFunction(psi.grid(), std::move(residual));

  // Overlaps are measured on y masses; the residual marginal is taken relative to |Psi|^2.
  double total_mass = 0.0;
  for (double v : y_density) total_mass += v;
  std::vector<double> residual_marginal(ny, 0.0);
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t b = 0; b < ny; ++b) residual_marginal[b] += std::norm(out.residual[layout.full_index(a, b)]) * dvx * dvy;
  }
  for (auto& v : residual_marginal) v /= total_mass;

  std::vector<std::vector<double>> y_masses;
  for (const auto& br : out.branches) y_masses.push_back(normalized_cell_density(br.y_factor));
  const std::size_t nb = out.branches.size();
  out.overlap.assign(nb, std::vector<double>(nb, 0.0));
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t k = 0; k < nb; ++k) out.overlap[i][k] = i == k ? 1.0 : min_sum(y_masses[i], y_masses[k]);
    out.residual_overlap.push_back(min_sum(y_masses[i], residual_marginal));
  }
  return out;
}

std::string_view to_string(EffectiveStatus s) {
  return s == EffectiveStatus::effective ? "effective" : "conditional-only";
}

EffectiveResult detect_effective(const GridWaveFunction& psi, const SubsystemSplit& split,
                                 std::span<const double> environment, double epsilon) {
  const auto decomposition = branch_decompose(psi, split, epsilon);
  EffectiveResult r;
  int best = -1;
  double best_amp = 0.0;
  for (std::size_t i = 0; i < decomposition.branches.size(); ++i) {
    const auto& y = decomposition.branches[i].y_factor;
    const auto weights = y_weights(y.grid(), environment);
    Complex at{0.0, 0.0};
    for (const auto& [b, w] : weights) at += w * y[b];
    const double peak = y.max_modulus();
    const double dens = std::norm(at);
    if (dens < epsilon * peak * peak) continue;
    const double amp = std::abs(decomposition.branches[i].weight) * std::sqrt(dens);
    if (amp > best_amp) {
      best_amp = amp;
      best = static_cast<int>(i);
    }
  }
  if (best >= 0) {
    const auto i = static_cast<std::size_t>(best);
    double worst = decomposition.residual_overlap[i];
    for (std::size_t k = 0; k < decomposition.branches.size(); ++k) {
      if (k != i) worst = std::max(worst, decomposition.overlap[i][k]);
    }
    r.worst_overlap = worst;
    if (worst < epsilon) {
      r.status = EffectiveStatus::effective;
      r.branch = best;
      r.wave = decomposition.branches[i].x_factor;
      return r;
    }
  } else {
    r.worst_overlap = std::numeric_limits<double>::infinity();
  }
  r.status = EffectiveStatus::conditional_only;
  r.wave = conditional_wavefunction(psi, split, environment).wave;
  return r;
}

void to_json(nlohmann::json& j, const AutonomyReport& r) {
  j = nlohmann::json{{"times", r.times},
                     {"distance", r.distance},
                     {"max_distance", r.max_distance},
                     {"tolerance", r.tolerance},
                     {"autonomous", r.autonomous},
                     {"null_slices", r.null_slices}};
}

AutonomyReport schrodinger_autonomy_check(const WaveHistory& frames, const Potential& potential,
                                          const SubsystemSplit& split,
                                          std::span<const Configuration> environment_path, double tolerance) {
  if (environment_path.size() != frames.size()) {
    throw std::invalid_argument("schrodinger_autonomy_check: need one environment configuration per frame");
  }
  split.validate(frames.grid().rank());
  const auto x_potential = potential.restricted(split.x_coords);
  const SplitStepPropagator prop(x_potential, frames.step());

  AutonomyReport r;
  r.tolerance = tolerance;
  GridWaveFunction evolved;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto cond = conditional_wavefunction(frames.wave(k), split, environment_path[k]);
    if (k == 0) {
      if (cond.status != ConditionalStatus::ok) {
        throw std::invalid_argument("schrodinger_autonomy_check: initial environment configuration lies in a null region");
      }
      evolved = cond.wave;
    } else {
      prop.step(evolved.amplitudes());
    }
    r.times.push_back(frames.frame(k).time);
    double d = std::sqrt(2.0);
    if (cond.status == ConditionalStatus::ok) {
      d = l2_distance_up_to_phase(cond.wave, evolved);
    } else {
      r.null_slices.push_back(frames.frame(k).time);
    }
    r.distance.push_back(d);
    r.max_distance = std::max(r.max_distance, d);
  }
  r.autonomous = r.max_distance <= tolerance;
  return r;
}

}  // namespace bohmlab
