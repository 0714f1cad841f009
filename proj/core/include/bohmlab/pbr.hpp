#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohmlab/finite_state.hpp"
#include "bohmlab/ontic_model.hpp"

namespace bohmlab {

/// Threshold separating structural zeros from rounding in the contradiction engine.
inline constexpr double kPbrTolerance = 1e-9;

/// The two-copy preparations |00>, |0+>, |+0>, |++> and the entangled
/// four-outcome measurement that antidistinguishes them.
struct PbrSetup {
  std::array<FiniteState, 4> states;
  ProjectiveMeasurement measurement;
  /// born[i][j] = p(outcome i | states[j]); outcome i is paired with state i.
  std::array<std::array<double, 4>, 4> born{};

  double gram_deviation() const { return measurement.gram_deviation(); }
  double max_paired_probability() const;
  double max_column_sum_deviation() const;
};

PbrSetup build_pbr_states();
void to_json(nlohmann::json& j, const PbrSetup& s);

enum class PbrVerdictKind { contradiction, not_derivable };
std::string_view to_string(PbrVerdictKind k);

struct PbrVerdict {
  PbrVerdictKind kind = PbrVerdictKind::not_derivable;
  /// First witness (lexicographic in the single-system ontic indices).
  std::optional<std::array<std::size_t, 2>> witness;
  std::optional<std::array<std::string, 2>> witness_labels;
  std::size_t witness_count = 0;
  /// Upper bound on the total outcome probability at the witness.
  std::optional<double> outcome_mass_bound;
  /// Revised mode only: sum over the four preparations and four outcomes of the exhibited response.
  std::optional<double> double_sum_diagnostic;
  std::vector<std::string> trace;
};

void to_json(nlohmann::json& j, const PbrVerdict& v);

/// Runs the two-copy argument on a single-system model that contains |0> and |+>.
///
/// Standard mode: every ontic pair in the common support of the four product
/// preparations must give each outcome probability at most B_aa / P_a(pair);
/// when those bounds sum below 1 the pair is a contradiction witness.
/// Revised mode: the zero conditions constrain different per-state response
/// functions, so the verdict is not-derivable and a consistent Born response
/// assignment is exhibited in the trace.
///
/// Throws std::invalid_argument when |0> or |+> is missing, or when a
/// standard-mode model is inconsistent on its own measurements.
PbrVerdict pbr_contradiction(const OntologicalModel& model, double tol = kPbrTolerance);

}  // namespace bohmlab
