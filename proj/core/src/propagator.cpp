#include "bohmlab/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace bohmlab {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

// In-place, unaligned complex DFT plans for one grid shape.
class FftPair {
 public:
  explicit FftPair(const Grid& grid) {
    std::vector<int> dims;
    for (const auto& a : grid.axes()) dims.push_back(static_cast<int>(a.points));
    std::vector<Complex> scratch(grid.size());
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), as_fftw(scratch.data()),
                             as_fftw(scratch.data()), FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), as_fftw(scratch.data()),
                              as_fftw(scratch.data()), FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");
  }
  ~FftPair() {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  void forward(std::span<Complex> a) const { fftw_execute_dft(forward_, as_fftw(a.data()), as_fftw(a.data())); }
  // Unnormalized inverse.
  void backward(std::span<Complex> a) const { fftw_execute_dft(backward_, as_fftw(a.data()), as_fftw(a.data())); }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// Sum over axes of k_d^2 for each flat spectral index.
std::vector<double> squared_wavenumbers(const Grid& grid) {
  std::vector<std::vector<double>> ks;
  for (const auto& a : grid.axes()) ks.push_back(fft_wavenumbers(a));
  std::vector<double> k2(grid.size(), 0.0);
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto idx = grid.multi_index(f);
    for (std::size_t d = 0; d < grid.rank(); ++d) k2[f] += ks[d][idx[d]] * ks[d][idx[d]];
  }
  return k2;
}


// Spectral gradient of a complex field computed from its real and imaginary
// parts separately with real-input transforms, so that a real field has an
// exactly real gradient.
class RealPartGradient {
 public:
  explicit RealPartGradient(const Grid& grid) : grid_(grid) {
    for (const auto& a : grid.axes()) dims_.push_back(static_cast<int>(a.points));
    last_half_ = grid.axes().back().points / 2 + 1;
    spectral_size_ = grid.size() / grid.axes().back().points * last_half_;
    for (const auto& a : grid.axes()) ks_.push_back(fft_wavenumbers(a));
    std::vector<double> real(grid.size());
    std::vector<Complex> spec(spectral_size_);
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c(static_cast<int>(dims_.size()), dims_.data(), real.data(), as_fftw(spec.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_c2r(static_cast<int>(dims_.size()), dims_.data(), as_fftw(spec.data()), real.data(),
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");
  }
  ~RealPartGradient() {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }
  RealPartGradient(const RealPartGradient&) = delete;
  RealPartGradient& operator=(const RealPartGradient&) = delete;

  std::vector<std::vector<Complex>> operator()(std::span<const Complex> psi) const {
    const std::size_t rank = grid_.rank();
    std::vector<std::vector<Complex>> out(rank, std::vector<Complex>(grid_.size()));
    std::vector<double> part(grid_.size());
    std::vector<Complex> spec(spectral_size_), scaled(spectral_size_);
    const double inv_n = 1.0 / static_cast<double>(grid_.size());
    for (int component = 0; component < 2; ++component) {
      bool zero = true;
      for (std::size_t f = 0; f < psi.size(); ++f) {
        part[f] = component == 0 ? psi[f].real() : psi[f].imag();
        zero = zero && part[f] == 0.0;
      }
      if (zero) continue;
      fftw_execute_dft_r2c(forward_, part.data(), as_fftw(spec.data()));
      for (std::size_t d = 0; d < rank; ++d) {
        for (std::size_t s = 0; s < spectral_size_; ++s) {
          const std::size_t m = spectral_index(s, d);
          const std::size_t n = grid_.axis(d).points;
          const bool nyquist = n % 2 == 0 && m == n / 2;
          scaled[s] = nyquist ? Complex{0.0, 0.0} : spec[s] * Complex{0.0, ks_[d][m] * inv_n};
        }
        fftw_execute_dft_c2r(backward_, as_fftw(scaled.data()), part.data());
        for (std::size_t f = 0; f < grid_.size(); ++f) {
          out[d][f] += component == 0 ? Complex{part[f], 0.0} : Complex{0.0, part[f]};
        }
      }
    }
    return out;
  }

 private:
  // Index along axis d of half-spectrum entry s (row-major, last axis halved).
  std::size_t spectral_index(std::size_t s, std::size_t d) const {
    const std::size_t rank = grid_.rank();
    if (d == rank - 1) return s % last_half_;
    std::size_t rest = s / last_half_;
    for (std::size_t a = rank - 1; a-- > d + 1;) rest /= grid_.axis(a).points;
    return rest % grid_.axis(d).points;
  }

  Grid grid_;
  std::vector<int> dims_;
  std::size_t last_half_ = 0;
  std::size_t spectral_size_ = 0;
  std::vector<std::vector<double>> ks_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace

struct SplitStepPropagator::Plans {
  explicit Plans(const Grid& g) : fft(g) {}
  FftPair fft;
};

std::vector<double> fft_wavenumbers(const Axis& axis) {
  const std::size_t n = axis.points;
  std::vector<double> k(n);
  const double base = 2.0 * std::numbers::pi / axis.period();
  for (std::size_t m = 0; m < n; ++m) {
    const auto signed_m = m < (n + 1) / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
    k[m] = base * signed_m;
  }
  return k;
}

SplitStepPropagator::SplitStepPropagator(const Potential& potential, double dt)
    : grid_(potential.grid()), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SplitStepPropagator: dt must be positive");
  half_potential_phase_.resize(grid_.size());
  for (std::size_t f = 0; f < grid_.size(); ++f) {
    half_potential_phase_[f] = std::polar(1.0, -0.5 * potential[f] * dt);
  }
  const auto k2 = squared_wavenumbers(grid_);
  kinetic_phase_.resize(grid_.size());
  const double inv_n = 1.0 / static_cast<double>(grid_.size());
  // The inverse-FFT normalization is folded into the kinetic phase.
  for (std::size_t f = 0; f < grid_.size(); ++f) kinetic_phase_[f] = std::polar(inv_n, -0.5 * k2[f] * dt);
  plans_ = std::make_unique<Plans>(grid_);
}

SplitStepPropagator::~SplitStepPropagator() = default;
SplitStepPropagator::SplitStepPropagator(SplitStepPropagator&&) noexcept = default;
SplitStepPropagator& SplitStepPropagator::operator=(SplitStepPropagator&&) noexcept = default;

void SplitStepPropagator::step(std::span<Complex> a) const {
  if (a.size() != grid_.size()) throw DimensionMismatch("SplitStepPropagator::step: size mismatch");
  for (std::size_t f = 0; f < a.size(); ++f) a[f] *= half_potential_phase_[f];
  plans_->fft.forward(a);
  for (std::size_t f = 0; f < a.size(); ++f) a[f] *= kinetic_phase_[f];
  plans_->fft.backward(a);
  for (std::size_t f = 0; f < a.size(); ++f) a[f] *= half_potential_phase_[f];
}

GridWaveFunction SplitStepPropagator::step(const GridWaveFunction& w) const {
  if (!(w.grid() == grid_)) throw DimensionMismatch("SplitStepPropagator::step: grid mismatch");
  GridWaveFunction out = w;
  step(out.amplitudes());
  return out;
}

double spectral_edge_fraction(const GridWaveFunction& w, double band) {
  const Grid& g = w.grid();
  std::vector<Complex> a(w.amplitudes().begin(), w.amplitudes().end());
  FftPair fft(g);
  fft.forward(a);
  double total = 0.0, edge = 0.0;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const double p = std::norm(a[f]);
    total += p;
    const auto idx = g.multi_index(f);
    bool near_edge = false;
    for (std::size_t d = 0; d < g.rank(); ++d) {
      const auto n = static_cast<double>(g.axis(d).points);
      const double m = static_cast<double>(idx[d]);
      const double signed_m = m < n / 2 ? m : m - n;
      if (std::abs(signed_m) >= (1.0 - band) * n / 2) near_edge = true;
    }
    if (near_edge) edge += p;
  }
  return total > 0.0 ? edge / total : 0.0;
}

GridWaveFunction evolve_step(const GridWaveFunction& w, const Potential& p, double dt, Diagnostics* diagnostics) {
  if (diagnostics) {
    const double edge = spectral_edge_fraction(w);
    if (edge > kSpectralEdgeWarning) {
      diagnostics->push_back({Severity::warning, "grid-too-coarse",
                              "momentum-space weight " + std::to_string(edge) +
                                  " near the grid cutoff; refine the grid"});
    }
  }
  SplitStepPropagator prop(p, dt);
  return prop.step(w);
}

std::vector<Complex> spectral_derivative(const Grid& grid, std::span<const Complex> amplitudes, std::size_t axis) {
  if (axis >= grid.rank()) throw std::invalid_argument("spectral_derivative: axis out of range");
  if (amplitudes.size() != grid.size()) throw DimensionMismatch("spectral_derivative: size mismatch");
  RealPartGradient gradient(grid);
  return std::move(gradient(amplitudes)[axis]);
}

WaveHistory WaveHistory::evolve(const GridWaveFunction& initial, const Potential& potential, double dt,
                                double t_end, bool with_gradients) {
  if (!(initial.grid() == potential.grid())) throw DimensionMismatch("WaveHistory: potential grid differs");
  if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("WaveHistory: dt and t_end must be positive");
  const auto steps = static_cast<std::size_t>(std::max<long long>(1, std::llround(t_end / dt)));
  WaveHistory h;
  h.grid_ = initial.grid();
  h.step_ = t_end / static_cast<double>(steps);
  SplitStepPropagator prop(potential, h.step_);
  RealPartGradient gradient(h.grid_);

  auto make_frame = [&](double t, std::vector<Complex> psi) {
    Frame fr;
    fr.time = t;
    for (const auto& a : psi) fr.max_modulus = std::max(fr.max_modulus, std::abs(a));
    if (with_gradients) fr.gradient = gradient(psi);
    fr.psi = std::move(psi);
    return fr;
  };

  std::vector<Complex> psi(initial.amplitudes().begin(), initial.amplitudes().end());
  h.frames_.reserve(steps + 1);
  h.frames_.push_back(make_frame(0.0, psi));
  for (std::size_t s = 1; s <= steps; ++s) {
    prop.step(psi);
    h.frames_.push_back(make_frame(static_cast<double>(s) * h.step_, psi));
  }
  return h;
}

std::vector<double> WaveHistory::times() const {
  std::vector<double> t;
  t.reserve(frames_.size());
  for (const auto& f : frames_) t.push_back(f.time);
  return t;
}

GridWaveFunction WaveHistory::wave(std::size_t i) const { return GridWaveFunction(grid_, frames_.at(i).psi); }

std::size_t WaveHistory::frame_at(double t) const {
  const double r = t / step_;
  const auto k = static_cast<long long>(std::llround(r));
  if (k < 0 || static_cast<std::size_t>(k) >= frames_.size() ||
      std::abs(frames_[static_cast<std::size_t>(k)].time - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw std::invalid_argument("WaveHistory::frame_at: time " + std::to_string(t) + " is not a frame time");
  }
  return static_cast<std::size_t>(k);
}

}  // namespace bohmlab
