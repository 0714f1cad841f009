#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohmlab/finite_state.hpp"

namespace bohmlab {

/// Tolerance for distribution normalization and consistency checks.
inline constexpr double kOnticTolerance = 1e-12;

enum class ResponseMode { standard, revised };
std::string_view to_string(ResponseMode m);

struct NamedState {
  std::string name;
  FiniteState state;
};

struct NamedMeasurement {
  std::string name;
  ProjectiveMeasurement measurement;
};

/// [measurement][state][lambda][outcome]; in standard mode the state axis has length 1.
using ResponseTable = std::vector<std::vector<std::vector<std::vector<double>>>>;

/// Finite ontological model: ontic states, preparation distributions over
/// them for a catalog of states, and response functions for a catalog of
/// measurements. Immutable; construction validates every distribution.
class OntologicalModel {
 public:
  /// Standard mode. responses[m][lambda][k].
  OntologicalModel(std::vector<std::string> labels, std::vector<NamedState> states,
                   std::vector<NamedMeasurement> measurements, std::vector<std::vector<double>> preparations,
                   std::vector<std::vector<std::vector<double>>> responses);

  /// Revised mode: responses[m][state][lambda][k] depend on the prepared state.
  static OntologicalModel revised(std::vector<std::string> labels, std::vector<NamedState> states,
                                  std::vector<NamedMeasurement> measurements,
                                  std::vector<std::vector<double>> preparations, ResponseTable responses);

  ResponseMode mode() const { return mode_; }
  std::size_t ontic_count() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<NamedState>& states() const { return states_; }
  const std::vector<NamedMeasurement>& measurements() const { return measurements_; }

  /// Optional position annotation per ontic state.
  const std::optional<std::vector<double>>& positions() const { return positions_; }
  OntologicalModel with_positions(std::vector<double> positions) const;

  /// p(lambda | state s).
  std::span<const double> preparation(std::size_t s) const { return preparations_.at(s); }
  /// p(. | lambda, M) in standard mode or p(. | lambda, state s, M) in revised mode.
  std::span<const double> response(std::size_t m, std::size_t s, std::size_t lambda) const;
  const ResponseTable& responses() const { return responses_; }

  /// Catalog index of the state on the same ray as `state`.
  std::optional<std::size_t> find_state(const FiniteState& state) const;
  std::optional<std::size_t> find_state(std::string_view name) const;
  std::optional<std::size_t> find_measurement(std::string_view name) const;

  /// Standard-mode model whose response averages the revised response over the catalog states.
  OntologicalModel to_standard_mode() const;

 private:
  OntologicalModel() = default;
  void validate() const;

  ResponseMode mode_ = ResponseMode::standard;
  std::vector<std::string> labels_;
  std::optional<std::vector<double>> positions_;
  std::vector<NamedState> states_;
  std::vector<NamedMeasurement> measurements_;
  std::vector<std::vector<double>> preparations_;
  ResponseTable responses_;
};

void to_json(nlohmann::json& j, const OntologicalModel& m);
OntologicalModel ontological_model_from_json(const nlohmann::json& j);

/// Lambda = catalog states, delta preparations, Born responses.
OntologicalModel trivial_psi_ontic_model(std::vector<NamedState> states, std::vector<NamedMeasurement> measurements);

struct ConsistencyEntry {
  std::size_t state = 0;
  std::size_t measurement = 0;
  std::size_t outcome = 0;
  double predicted = 0.0;
  double born = 0.0;
  double deviation = 0.0;
};

struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;
  double max_deviation = 0.0;
  double tolerance = kOnticTolerance;
  bool pass = true;
  /// Entry with the largest deviation, and the ontic state contributing most to it.
  std::optional<ConsistencyEntry> witness;
  std::optional<std::size_t> witness_lambda;
};

void to_json(nlohmann::json& j, const ConsistencyReport& r);

/// Compares sum_lambda p(k|lambda,.) p(lambda|psi) with the Born probability for
/// every catalog state, every outcome, and every measurement in `measurements`
/// (all measurements when empty).
ConsistencyReport check_consistency(const OntologicalModel& model, double tol = kOnticTolerance,
                                    std::span<const std::size_t> measurements = {});

enum class PairClass { ontic_pair, epistemic_pair };
std::string_view to_string(PairClass c);

struct Classification {
  PairClass kind = PairClass::ontic_pair;
  double overlap = 0.0;
};

double distribution_overlap(std::span<const double> p, std::span<const double> q);

/// Throws std::invalid_argument when either state is not in the catalog.
Classification classify(const OntologicalModel& model, const FiniteState& a, const FiniteState& b);
Classification classify(const OntologicalModel& model, std::size_t a, std::size_t b);

enum class DistinctnessVerdict { zero_overlap_confirmed, violation, blocked_revised, not_applicable };
std::string_view to_string(DistinctnessVerdict v);

struct DistinctnessPair {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t measurement = 0;
  double overlap = 0.0;
  /// Set for violations.
  std::optional<std::size_t> lambda;
  std::optional<ConsistencyEntry> violation;
};

struct DistinctnessReport {
  DistinctnessVerdict verdict = DistinctnessVerdict::not_applicable;
  std::vector<DistinctnessPair> pairs;
  std::string message;
};

void to_json(nlohmann::json& j, const DistinctnessReport& r);

/// For every orthogonal catalog pair with a catalog measurement whose Born
/// supports separate them, checks that the preparations do not overlap.
DistinctnessReport orthogonal_distinctness_check(const OntologicalModel& model, double tol = 1e-9);

}  // namespace bohmlab
