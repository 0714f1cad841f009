#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace bohmlab {

using Complex = std::complex<double>;

/// Tolerance used for normalization and orthonormality of finite-dimensional states.
inline constexpr double kFiniteTolerance = 1e-12;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Normalized pure state in a d-dimensional Hilbert space.
///
/// Construction normalizes the supplied amplitudes; an empty or all-zero
/// vector is rejected with std::invalid_argument. Instances are immutable.
class FiniteState {
 public:
  explicit FiniteState(std::vector<Complex> amplitudes);
  FiniteState(std::initializer_list<Complex> amplitudes)
      : FiniteState(std::vector<Complex>(amplitudes)) {}

  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[i]; }

  /// <this|other>
  Complex inner(const FiniteState& other) const;

  /// Squared norm of the stored amplitudes (1 up to rounding).
  double squared_norm() const;

 private:
  std::vector<Complex> amplitudes_;
};

/// Linear combination sum_i c_i |state_i>, normalized afterwards.
FiniteState superpose(std::initializer_list<std::pair<Complex, FiniteState>> terms);

/// Kronecker product; the left factor is the most significant index.
FiniteState tensor(const FiniteState& a, const FiniteState& b);

/// |<outcome|state>|^2. Throws DimensionMismatch.
double born_probability(const FiniteState& state, const FiniteState& outcome);

/// Max |G_ij - delta_ij| over the Gram matrix of `vectors`.
double gram_deviation(std::span<const FiniteState> vectors);

/// Complete orthonormal basis; outcome k corresponds to basis()[k].
class ProjectiveMeasurement {
 public:
  /// Throws std::invalid_argument unless the basis is complete and
  /// orthonormal within `tolerance`.
  explicit ProjectiveMeasurement(std::vector<FiniteState> basis,
                                 double tolerance = kFiniteTolerance);

  std::size_t dimension() const { return basis_.front().dimension(); }
  std::size_t outcome_count() const { return basis_.size(); }
  const std::vector<FiniteState>& basis() const { return basis_; }
  double gram_deviation() const;

 private:
  std::vector<FiniteState> basis_;
};

/// Born probabilities of every outcome of `m` for `state`.
std::vector<double> measurement_distribution(const FiniteState& state,
                                             const ProjectiveMeasurement& m);

/// Computational basis measurement of dimension d.
ProjectiveMeasurement computational_basis(std::size_t dimension);

namespace qubit {
FiniteState zero();
FiniteState one();
FiniteState plus();   // (|0> + |1>)/sqrt2
FiniteState minus();  // (|0> - |1>)/sqrt2
}  // namespace qubit

/// |<a|b>|^2 >= 1 - tol: same ray.
bool same_ray(const FiniteState& a, const FiniteState& b, double tol = kFiniteTolerance);

// Serialized as an array of [re, im] pairs.
void to_json(nlohmann::json& j, const FiniteState& s);
FiniteState finite_state_from_json(const nlohmann::json& j);

nlohmann::json complex_array_to_json(std::span<const Complex> values);
std::vector<Complex> complex_array_from_json(const nlohmann::json& j);

}  // namespace bohmlab
