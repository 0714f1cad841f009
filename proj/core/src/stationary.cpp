#include "bohmlab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "bohmlab/propagator.hpp"

namespace bohmlab {
namespace {

constexpr std::size_t kMaxDenseGrid = 4096;

Eigen::MatrixXd spectral_hamiltonian(const Potential& p) {
  const Grid& g = p.grid();
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<std::vector<double>> ks;
  for (const auto& a : g.axes()) ks.push_back(fft_wavenumbers(a));
  // Kinetic matrix is circulant per axis: T_jl = c_d[(j_d - l_d) mod n_d] when the
  // other indices agree, with c_d[m] = (1/n) sum_q (k_q^2 / 2) cos(2 pi q m / n).
  std::vector<std::vector<double>> circulant;
  for (std::size_t d = 0; d < g.rank(); ++d) {
    const auto& axis = g.axis(d);
    const auto m_count = static_cast<double>(axis.points);
    std::vector<double> c(axis.points, 0.0);
    for (std::size_t m = 0; m < axis.points; ++m) {
      for (std::size_t q = 0; q < axis.points; ++q) {
        const double k = ks[d][q];
        c[m] += 0.5 * k * k * std::cos(2.0 * std::numbers::pi * static_cast<double>(q * m % axis.points) / m_count);
      }
      c[m] /= m_count;
    }
    circulant.push_back(std::move(c));
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto ij = g.multi_index(static_cast<std::size_t>(j));
    for (Eigen::Index l = 0; l < n; ++l) {
      const auto il = g.multi_index(static_cast<std::size_t>(l));
      std::size_t differing = 0, axis = 0;
      for (std::size_t d = 0; d < g.rank(); ++d) {
        if (ij[d] != il[d]) {
          ++differing;
          axis = d;
        }
      }
      if (differing == 0) {
        for (std::size_t d = 0; d < g.rank(); ++d) h(j, l) += circulant[d][0];
      } else if (differing == 1) {
        const std::size_t n_axis = g.axis(axis).points;
        h(j, l) = circulant[axis][(ij[axis] + n_axis - il[axis]) % n_axis];
      }
    }
    h(j, j) += p[static_cast<std::size_t>(j)];
  }
  return h;
}

}  // namespace

std::vector<Eigenpair> hamiltonian_eigenstates(const Potential& potential, std::size_t count) {
  const Grid& g = potential.grid();
  if (g.size() > kMaxDenseGrid) throw std::invalid_argument("hamiltonian_eigenstates: grid too large for dense solve");
  if (count == 0 || count > g.size()) throw std::invalid_argument("hamiltonian_eigenstates: bad eigenpair count");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(spectral_hamiltonian(potential));
  if (solver.info() != Eigen::Success) throw std::runtime_error("hamiltonian_eigenstates: eigensolver failed");
  std::vector<Eigenpair> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto v = solver.eigenvectors().col(static_cast<Eigen::Index>(i));
    std::vector<Complex> amps(g.size());
    for (std::size_t f = 0; f < g.size(); ++f) amps[f] = v(static_cast<Eigen::Index>(f));
    out.push_back({solver.eigenvalues()(static_cast<Eigen::Index>(i)),
                   GridWaveFunction(g, std::move(amps)).normalized().phase_fixed()});
  }
  return out;
}

GridWaveFunction split_step_stationary_state(const Potential& potential, std::size_t index, double dt) {
  const Grid& g = potential.grid();
  if (g.size() > kMaxDenseGrid) throw std::invalid_argument("split_step_stationary_state: grid too large");
  const auto reference = hamiltonian_eigenstates(potential, index + 1).back().state;
  const auto n = static_cast<Eigen::Index>(g.size());
  SplitStepPropagator prop(potential, dt);
  Eigen::MatrixXcd u(n, n);
  std::vector<Complex> col(g.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), Complex{0.0, 0.0});
    col[static_cast<std::size_t>(j)] = 1.0;
    prop.step(col);
    for (Eigen::Index i = 0; i < n; ++i) u(i, j) = col[static_cast<std::size_t>(i)];
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(u);
  if (solver.info() != Eigen::Success) throw std::runtime_error("split_step_stationary_state: eigensolver failed");
  Eigen::VectorXcd ref(n);
  for (Eigen::Index i = 0; i < n; ++i) ref(i) = reference[static_cast<std::size_t>(i)];
  Eigen::Index best = 0;
  double best_overlap = -1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double ov = std::abs(solver.eigenvectors().col(k).normalized().dot(ref));
    if (ov > best_overlap) {
      best_overlap = ov;
      best = k;
    }
  }
  // U is complex symmetric, so a nondegenerate eigenvector is real up to a global phase.
  std::vector<Complex> amps(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) amps[f] = solver.eigenvectors()(static_cast<Eigen::Index>(f), best);
  const auto fixed = GridWaveFunction(g, std::move(amps)).normalized().phase_fixed();
  std::vector<Complex> real(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) real[f] = fixed[f].real();
  return GridWaveFunction(g, std::move(real)).normalized();
}

}  // namespace bohmlab
