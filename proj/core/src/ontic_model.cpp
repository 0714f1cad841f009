#include "bohmlab/ontic_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bohmlab {
namespace {

void check_distribution(std::span<const double> p, std::string_view what) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument(std::string(what) + ": negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kOnticTolerance) {
    throw std::invalid_argument(std::string(what) + ": sums to " + std::to_string(sum) + ", not 1");
  }
}

std::string state_label(const OntologicalModel& m, std::size_t s) { return m.states().at(s).name; }

}  // namespace

std::string_view to_string(ResponseMode m) { return m == ResponseMode::standard ? "standard" : "revised"; }

std::string_view to_string(PairClass c) { return c == PairClass::ontic_pair ? "ontic-pair" : "epistemic-pair"; }

std::string_view to_string(DistinctnessVerdict v) {
  switch (v) {
    case DistinctnessVerdict::zero_overlap_confirmed:
      return "zero-overlap-confirmed";
    case DistinctnessVerdict::violation:
      return "violation";
    case DistinctnessVerdict::blocked_revised:
      return "blocked in revised mode";
    case DistinctnessVerdict::not_applicable:
      return "not-applicable";
  }
  return "unknown";
}

OntologicalModel::OntologicalModel(std::vector<std::string> labels, std::vector<NamedState> states,
                                   std::vector<NamedMeasurement> measurements,
                                   std::vector<std::vector<double>> preparations,
                                   std::vector<std::vector<std::vector<double>>> responses)
    : mode_(ResponseMode::standard),
      labels_(std::move(labels)),
      states_(std::move(states)),
      measurements_(std::move(measurements)),
      preparations_(std::move(preparations)) {
  responses_.reserve(responses.size());
  for (auto& r : responses) responses_.push_back({std::move(r)});
  validate();
}

OntologicalModel OntologicalModel::revised(std::vector<std::string> labels, std::vector<NamedState> states,
                                           std::vector<NamedMeasurement> measurements,
                                           std::vector<std::vector<double>> preparations, ResponseTable responses) {
  OntologicalModel m;
  m.mode_ = ResponseMode::revised;
  m.labels_ = std::move(labels);
  m.states_ = std::move(states);
  m.measurements_ = std::move(measurements);
  m.preparations_ = std::move(preparations);
  m.responses_ = std::move(responses);
  m.validate();
  return m;
}

void OntologicalModel::validate() const {
  if (labels_.empty()) throw std::invalid_argument("OntologicalModel: ontic space is empty");
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    throw std::invalid_argument("OntologicalModel: ontic labels must be unique");
  }
  if (positions_ && positions_->size() != labels_.size()) {
    throw std::invalid_argument("OntologicalModel: one position per ontic state required");
  }
  if (states_.empty()) throw std::invalid_argument("OntologicalModel: state catalog is empty");
  if (preparations_.size() != states_.size()) {
    throw std::invalid_argument("OntologicalModel: one preparation distribution per catalog state required");
  }
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (preparations_[s].size() != labels_.size()) {
      throw DimensionMismatch("OntologicalModel: preparation of '" + states_[s].name + "' has wrong length");
    }
    check_distribution(preparations_[s], "preparation of '" + states_[s].name + "'");
  }
  if (responses_.size() != measurements_.size()) {
    throw std::invalid_argument("OntologicalModel: one response table per measurement required");
  }
  const std::size_t per_state = mode_ == ResponseMode::standard ? 1 : states_.size();
  for (std::size_t m = 0; m < measurements_.size(); ++m) {
    const auto& meas = measurements_[m];
    if (responses_[m].size() != per_state) {
      throw DimensionMismatch("OntologicalModel: response of '" + meas.name + "' has wrong state extent");
    }
    for (std::size_t s = 0; s < per_state; ++s) {
      if (mode_ == ResponseMode::revised && states_[s].state.dimension() != meas.measurement.dimension()) continue;
      if (responses_[m][s].size() != labels_.size()) {
        throw DimensionMismatch("OntologicalModel: response of '" + meas.name + "' has wrong ontic extent");
      }
      for (std::size_t l = 0; l < labels_.size(); ++l) {
        if (responses_[m][s][l].size() != meas.measurement.outcome_count()) {
          throw DimensionMismatch("OntologicalModel: response of '" + meas.name + "' has wrong outcome count");
        }
        check_distribution(responses_[m][s][l], "response of '" + meas.name + "' at '" + labels_[l] + "'");
      }
    }
  }
}

OntologicalModel OntologicalModel::with_positions(std::vector<double> positions) const {
  OntologicalModel copy = *this;
  copy.positions_ = std::move(positions);
  copy.validate();
  return copy;
}

std::span<const double> OntologicalModel::response(std::size_t m, std::size_t s, std::size_t lambda) const {
  const auto& table = responses_.at(m);
  return table.at(mode_ == ResponseMode::standard ? 0 : s).at(lambda);
}

std::optional<std::size_t> OntologicalModel::find_state(const FiniteState& state) const {
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (same_ray(states_[s].state, state, 1e-9)) return s;
  }
  return std::nullopt;
}

std::optional<std::size_t> OntologicalModel::find_state(std::string_view name) const {
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (states_[s].name == name) return s;
  }
  return std::nullopt;
}

std::optional<std::size_t> OntologicalModel::find_measurement(std::string_view name) const {
  for (std::size_t m = 0; m < measurements_.size(); ++m) {
    if (measurements_[m].name == name) return m;
  }
  return std::nullopt;
}

OntologicalModel OntologicalModel::to_standard_mode() const {
  if (mode_ == ResponseMode::standard) return *this;
  std::vector<std::vector<std::vector<double>>> averaged;
  for (std::size_t m = 0; m < measurements_.size(); ++m) {
    const std::size_t outcomes = measurements_[m].measurement.outcome_count();
    std::vector<std::vector<double>> table(labels_.size(), std::vector<double>(outcomes, 0.0));
    std::size_t used = 0;
    for (std::size_t s = 0; s < states_.size(); ++s) {
      if (states_[s].state.dimension() != measurements_[m].measurement.dimension()) continue;
      ++used;
      for (std::size_t l = 0; l < labels_.size(); ++l) {
        for (std::size_t k = 0; k < outcomes; ++k) table[l][k] += responses_[m][s][l][k];
      }
    }
    for (auto& row : table) {
      for (auto& v : row) v /= static_cast<double>(used);
    }
    averaged.push_back(std::move(table));
  }
  OntologicalModel out(labels_, states_, measurements_, preparations_, std::move(averaged));
  out.positions_ = positions_;
  return out;
}

void to_json(nlohmann::json& j, const OntologicalModel& m) {
  auto states = nlohmann::json::array();
  for (const auto& s : m.states()) states.push_back({{"name", s.name}, {"amplitudes", s.state}});
  auto measurements = nlohmann::json::array();
  for (const auto& mm : m.measurements()) {
    auto basis = nlohmann::json::array();
    for (const auto& b : mm.measurement.basis()) basis.push_back(b);
    measurements.push_back({{"name", mm.name}, {"basis", basis}});
  }
  auto preparations = nlohmann::json::array();
  for (std::size_t s = 0; s < m.states().size(); ++s) {
    auto p = m.preparation(s);
    preparations.push_back(std::vector<double>(p.begin(), p.end()));
  }
  j = nlohmann::json{{"mode", std::string(to_string(m.mode()))},
                     {"labels", m.labels()},
                     {"states", states},
                     {"measurements", measurements},
                     {"preparations", preparations}};
  if (m.mode() == ResponseMode::standard) {
    auto responses = nlohmann::json::array();
    for (const auto& table : m.responses()) responses.push_back(table.front());
    j["responses"] = responses;
  } else {
    j["responses"] = m.responses();
  }
  if (m.positions()) j["positions"] = *m.positions();
}

OntologicalModel ontological_model_from_json(const nlohmann::json& j) {
  const std::string mode = j.value("mode", std::string("standard"));
  if (mode != "standard" && mode != "revised") throw std::invalid_argument("model mode must be standard or revised");
  auto labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<NamedState> states;
  for (const auto& s : j.at("states")) {
    states.push_back({s.at("name").get<std::string>(), finite_state_from_json(s.at("amplitudes"))});
  }
  std::vector<NamedMeasurement> measurements;
  for (const auto& mm : j.value("measurements", nlohmann::json::array())) {
    std::vector<FiniteState> basis;
    for (const auto& b : mm.at("basis")) basis.push_back(finite_state_from_json(b));
    measurements.push_back({mm.at("name").get<std::string>(), ProjectiveMeasurement(std::move(basis))});
  }
  auto preparations = j.at("preparations").get<std::vector<std::vector<double>>>();
  const auto responses_json = j.value("responses", nlohmann::json::array());
  std::optional<OntologicalModel> model;
  if (mode == "standard") {
    model.emplace(std::move(labels), std::move(states), std::move(measurements), std::move(preparations),
                  responses_json.get<std::vector<std::vector<std::vector<double>>>>());
  } else {
    model.emplace(OntologicalModel::revised(std::move(labels), std::move(states), std::move(measurements),
                                            std::move(preparations), responses_json.get<ResponseTable>()));
  }
  if (j.contains("positions")) return model->with_positions(j.at("positions").get<std::vector<double>>());
  return *model;
}

OntologicalModel trivial_psi_ontic_model(std::vector<NamedState> states, std::vector<NamedMeasurement> measurements) {
  const std::size_t n = states.size();
  std::vector<std::string> labels;
  std::vector<std::vector<double>> preparations(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    labels.push_back("lambda_" + states[s].name);
    preparations[s][s] = 1.0;
  }
  std::vector<std::vector<std::vector<double>>> responses;
  for (const auto& m : measurements) {
    std::vector<std::vector<double>> table;
    for (const auto& s : states) table.push_back(measurement_distribution(s.state, m.measurement));
    responses.push_back(std::move(table));
  }
  return OntologicalModel(std::move(labels), std::move(states), std::move(measurements), std::move(preparations),
                          std::move(responses));
}

void to_json(nlohmann::json& j, const ConsistencyReport& r) {
  auto entry = [](const ConsistencyEntry& e) {
    return nlohmann::json{{"state", e.state},         {"measurement", e.measurement}, {"outcome", e.outcome},
                          {"predicted", e.predicted}, {"born", e.born},               {"deviation", e.deviation}};
  };
  j = nlohmann::json{{"max_deviation", r.max_deviation}, {"tolerance", r.tolerance}, {"pass", r.pass},
                     {"entries", r.entries.size()}};
  if (r.witness) j["witness"] = entry(*r.witness);
  if (r.witness_lambda) j["witness_lambda"] = *r.witness_lambda;
}

ConsistencyReport check_consistency(const OntologicalModel& model, double tol,
                                    std::span<const std::size_t> measurements) {
  std::vector<std::size_t> chosen(measurements.begin(), measurements.end());
  if (chosen.empty()) {
    for (std::size_t m = 0; m < model.measurements().size(); ++m) chosen.push_back(m);
  }
  ConsistencyReport r;
  r.tolerance = tol;
  for (std::size_t m : chosen) {
    const auto& meas = model.measurements().at(m).measurement;
    for (std::size_t s = 0; s < model.states().size(); ++s) {
      const auto& state = model.states()[s].state;
      if (state.dimension() != meas.dimension()) continue;
      const auto born = measurement_distribution(state, meas);
      const auto prep = model.preparation(s);
      for (std::size_t k = 0; k < meas.outcome_count(); ++k) {
        double predicted = 0.0;
        for (std::size_t l = 0; l < model.ontic_count(); ++l) predicted += model.response(m, s, l)[k] * prep[l];
        ConsistencyEntry e{s, m, k, predicted, born[k], std::abs(predicted - born[k])};
        if (!r.witness || e.deviation > r.witness->deviation) r.witness = e;
        r.max_deviation = std::max(r.max_deviation, e.deviation);
        r.entries.push_back(e);
      }
    }
  }
  r.pass = r.max_deviation <= tol;
  if (r.witness && !r.pass) {
    const auto& w = *r.witness;
    const auto prep = model.preparation(w.state);
    double best = -1.0;
    for (std::size_t l = 0; l < model.ontic_count(); ++l) {
      const double c = model.response(w.measurement, w.state, l)[w.outcome] * prep[l];
      if (c > best) {
        best = c;
        r.witness_lambda = l;
      }
    }
  }
  return r;
}

double distribution_overlap(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionMismatch("distribution_overlap: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::min(p[i], q[i]);
  return s;
}

Classification classify(const OntologicalModel& model, std::size_t a, std::size_t b) {
  const double ov = distribution_overlap(model.preparation(a), model.preparation(b));
  return {ov > 0.0 ? PairClass::epistemic_pair : PairClass::ontic_pair, ov};
}

Classification classify(const OntologicalModel& model, const FiniteState& a, const FiniteState& b) {
  const auto ia = model.find_state(a);
  const auto ib = model.find_state(b);
  if (!ia || !ib) throw std::invalid_argument("classify: state not in the model catalog");
  return classify(model, *ia, *ib);
}

void to_json(nlohmann::json& j, const DistinctnessReport& r) {
  auto pairs = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    nlohmann::json e{{"first", p.first}, {"second", p.second}, {"measurement", p.measurement}, {"overlap", p.overlap}};
    if (p.lambda) e["lambda"] = *p.lambda;
    if (p.violation) {
      e["violation"] = {{"state", p.violation->state},
                        {"outcome", p.violation->outcome},
                        {"predicted", p.violation->predicted},
                        {"born", p.violation->born},
                        {"deviation", p.violation->deviation}};
    }
    pairs.push_back(std::move(e));
  }
  j = nlohmann::json{{"verdict", std::string(to_string(r.verdict))}, {"pairs", pairs}, {"message", r.message}};
}

DistinctnessReport orthogonal_distinctness_check(const OntologicalModel& model, double tol) {
  DistinctnessReport r;
  if (model.mode() == ResponseMode::revised) {
    r.verdict = DistinctnessVerdict::blocked_revised;
    r.message = "responses depend on the prepared state, so a shared ontic state need not answer consistently "
                "for both members of an orthogonal pair";
    return r;
  }
  const auto& states = model.states();
  for (std::size_t a = 0; a < states.size(); ++a) {
    for (std::size_t b = a + 1; b < states.size(); ++b) {
      if (states[a].state.dimension() != states[b].state.dimension()) continue;
      if (std::norm(states[a].state.inner(states[b].state)) > tol) continue;
      for (std::size_t m = 0; m < model.measurements().size(); ++m) {
        const auto& meas = model.measurements()[m].measurement;
        if (meas.dimension() != states[a].state.dimension()) continue;
        const auto pa = measurement_distribution(states[a].state, meas);
        const auto pb = measurement_distribution(states[b].state, meas);
        bool separates = true;
        for (std::size_t k = 0; k < pa.size(); ++k) {
          if (std::min(pa[k], pb[k]) > tol) separates = false;
        }
        if (!separates) continue;

        DistinctnessPair pair{a, b, m, classify(model, a, b).overlap, std::nullopt, std::nullopt};
        if (pair.overlap > tol) {
          const auto prep_a = model.preparation(a);
          const auto prep_b = model.preparation(b);
          double shared = -1.0;
          for (std::size_t l = 0; l < model.ontic_count(); ++l) {
            if (std::min(prep_a[l], prep_b[l]) > shared) {
              shared = std::min(prep_a[l], prep_b[l]);
              pair.lambda = l;
            }
          }
          const std::size_t indices[] = {m};
          const auto report = check_consistency(model, tol, indices);
          for (const auto& e : report.entries) {
            if ((e.state == a || e.state == b) && (!pair.violation || e.deviation > pair.violation->deviation)) {
              pair.violation = e;
            }
          }
        }
        r.pairs.push_back(pair);
        break;
      }
    }
  }
  if (r.pairs.empty()) {
    r.verdict = DistinctnessVerdict::not_applicable;
    r.message = "no orthogonal catalog pair with a distinguishing measurement";
    return r;
  }
  r.verdict = DistinctnessVerdict::zero_overlap_confirmed;
  for (const auto& p : r.pairs) {
    if (p.overlap > tol) {
      r.verdict = DistinctnessVerdict::violation;
      r.message = "states '" + state_label(model, p.first) + "' and '" + state_label(model, p.second) +
                  "' share ontic state '" + model.labels()[*p.lambda] + "' but measurement '" +
                  model.measurements()[p.measurement].name + "' separates them";
      return r;
    }
  }
  r.message = "every orthogonal pair has disjoint preparations";
  return r;
}

}  // namespace bohmlab
