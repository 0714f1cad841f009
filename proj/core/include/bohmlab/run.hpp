#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohmlab/diagnostics.hpp"
#include "bohmlab/experiment.hpp"
#include "bohmlab/ontic_model.hpp"

namespace bohmlab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAcceptanceFailure = 2;
inline constexpr int kExitValidationError = 3;

/// Environment variable naming the default output root.
inline constexpr const char* kOutRootVariable = "BOHMLAB_OUT_ROOT";

std::string_view tool_version();

struct RunOptions {
  /// Overrides the spec's out_dir when nonempty.
  std::filesystem::path out_dir;
  unsigned threads = 1;
  /// Multiplies every deterministic tolerance; the significance level is unchanged.
  double tolerance_scale = 1.0;
  std::optional<std::uint64_t> seed;
};

struct TestOutcome {
  std::string name;
  bool pass = false;
  nlohmann::json detail;
};

struct RunManifest {
  std::string name;
  std::string spec_hash;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
  std::vector<TestOutcome> tests;
  /// Paths relative to the output directory, in creation order.
  std::vector<std::string> artifacts;
  Diagnostics diagnostics;
  bool all_pass = false;
};

void to_json(nlohmann::json& j, const RunManifest& m);
RunManifest run_manifest_from_json(const nlohmann::json& j);

/// Output directory: options, then spec.out_dir, then $BOHMLAB_OUT_ROOT/<name>,
/// then ./bohmlab-runs/<name>.
std::filesystem::path resolve_output_dir(const ExperimentSpec& spec, const RunOptions& options);

/// Spec after applying the seed override and tolerance scale.
ExperimentSpec effective_spec(const ExperimentSpec& spec, const RunOptions& options);

/// Ontological model described by the spec's ontic section.
OntologicalModel build_ontic_model(const OnticSpec& o, std::uint64_t seed);

/// Validates, executes the pipeline for the spec's kind, and writes every
/// artifact and manifest.json into the output directory. Throws SpecError
/// when validation reports errors.
RunManifest run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

int exit_code(const RunManifest& m);

/// Human-readable summary of a manifest.
std::string format_report(const RunManifest& m);

}  // namespace bohmlab
