#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohmlab/diagnostics.hpp"
#include "bohmlab/grid.hpp"
#include "bohmlab/potential.hpp"

namespace bohmlab {

enum class ExperimentKind { double_slit, box, free_gaussian, pbr, ontic_model_check, custom };
enum class DynamicsKind { bohm, rdmp, both, none };

std::string_view to_string(ExperimentKind k);
std::string_view to_string(DynamicsKind k);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view s);
std::optional<DynamicsKind> parse_dynamics_kind(std::string_view s);

/// Wave-function kinds run on a grid; the others are finite-dimensional.
bool uses_grid(ExperimentKind k);

struct AxisSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 0;
};

struct PotentialSpec {
  std::string type = "free";  // free | box | double-slit-barrier
  std::vector<double> lower;
  std::vector<double> upper;
  double wall = kWallHeight;
  DoubleSlitBarrier barrier;
};

struct InitialSpec {
  std::string type = "gaussians";  // gaussians | eigenstate
  std::vector<GaussianPacket> packets;
  /// Eigenstate index, 0 = ground state.
  std::size_t level = 0;
};

struct TimeSpec {
  double t_end = 0.0;
  double dt = 0.0;
  /// Times at which ensembles and frames are stamped; default {0, t_end}.
  std::vector<double> sample_times;
};

struct Tolerances {
  double significance = 1e-3;
  double norm_drift = 1e-10;
  double width_relative = 1e-3;
  double rest_displacement = 1e-10;
  double rest_velocity = 1e-12;
  double consistency = 1e-12;
  double structure = 1e-12;
  double pbr = 1e-9;
};

struct OnticSpec {
  /// random-epistemic | trivial-psi-ontic | box-nomological | box-style-qubit | inline
  std::string model = "random-epistemic";
  double overlap = 0.25;
  std::size_t n_ontic = 6;
  std::size_t n_levels = 2;
  std::size_t n_positions = 16;
  nlohmann::json definition;  // inline model
  /// Expected outcomes; unset entries are reported without pass/fail.
  std::optional<bool> expect_consistent;
  std::optional<std::string> expect_pbr;    // contradiction | not-derivable
  std::optional<std::string> expect_pairs;  // epistemic | ontic
  std::optional<std::string> expect_distinctness;
};

/// Checks a run may perform. Requested checks are recorded in the manifest.
namespace checks {
inline constexpr std::string_view norm_drift = "norm-drift";
inline constexpr std::string_view equivariance = "equivariance";
inline constexpr std::string_view uniform_control = "uniform-control";
inline constexpr std::string_view at_rest = "at-rest";
inline constexpr std::string_view width_law = "width-law";
inline constexpr std::string_view duel = "duel";
inline constexpr std::string_view pbr_structure = "pbr-structure";
inline constexpr std::string_view pbr_contradiction = "pbr-contradiction";
inline constexpr std::string_view consistency = "consistency";
inline constexpr std::string_view classify = "classify";
inline constexpr std::string_view distinctness = "distinctness";
}  // namespace checks

struct ExperimentSpec {
  std::string name;
  ExperimentKind kind = ExperimentKind::custom;
  std::vector<AxisSpec> grid;
  PotentialSpec potential;
  InitialSpec initial;
  DynamicsKind dynamics = DynamicsKind::none;
  std::size_t ensemble_size = 0;
  TimeSpec time;
  std::uint64_t seed = 0;
  /// Not part of the canonical form or the hash.
  std::string out_dir;
  Tolerances tolerances;
  std::optional<OnticSpec> ontic;
  std::vector<std::string> checks;

  bool wants(std::string_view check) const;
  /// t_end / round(t_end / dt): the step actually used by the propagator.
  double effective_dt() const;
  std::vector<double> stamp_times() const;
};

/// Field-level problems found while reading a spec document.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(Diagnostics findings);
  const Diagnostics& findings() const { return findings_; }

 private:
  Diagnostics findings_;
};

/// Throws SpecError listing every offending field.
ExperimentSpec parse_spec(const nlohmann::json& j);
/// Full canonical document including defaults; keys are sorted on dump.
nlohmann::json canonical_json(const ExperimentSpec& spec);
/// Canonical text without out_dir.
std::string canonical_text(const ExperimentSpec& spec);
/// Hex SHA-256 of canonical_text.
std::string spec_hash(const ExperimentSpec& spec);

std::vector<std::string> preset_names();
/// Throws std::invalid_argument for unknown names.
ExperimentSpec preset(std::string_view name);

/// Cutoff-mode phase per step above which validate() warns.
inline constexpr double kCutoffPhaseWarning = 128.0;
/// Potential phase per half step, max V * dt / 2, above which validate() warns.
inline constexpr double kPotentialPhaseWarning = 0.5;

/// Dimension checks, sampling-power checks, a step-size warning based on the
/// kinetic phase dt * (pi/dx)^2 / 2 of the cutoff mode, a wall-resolution
/// warning based on max V * dt / 2, and node-risk warnings
/// for initial states with interior zeros.
Diagnostics validate(const ExperimentSpec& spec);
bool has_errors(const Diagnostics& d);

Grid build_grid(const ExperimentSpec& spec);
Potential build_potential(const ExperimentSpec& spec, const Grid& grid);
GridWaveFunction build_initial_state(const ExperimentSpec& spec, const Potential& potential);

}  // namespace bohmlab
