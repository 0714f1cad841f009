#include "bohmlab/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "bohmlab/frame_io.hpp"
#include "bohmlab/guidance.hpp"
#include "bohmlab/stationary.hpp"
#include "bohmlab/statistics.hpp"

namespace bohmlab {
namespace {

// Collects field errors while reading a JSON document.
class FieldReader {
 public:
  explicit FieldReader(Diagnostics& errors) : errors_(errors) {}

  void error(const std::string& field, const std::string& message) {
    errors_.push_back({Severity::error, field, message});
  }

  template <class T>
  bool read(const nlohmann::json& j, const char* key, const std::string& path, T& out, bool required) {
    if (!j.is_object() || !j.contains(key)) {
      if (required) error(path, "missing required field");
      return false;
    }
    try {
      out = j.at(key).get<T>();
      return true;
    } catch (const std::exception& e) {
      error(path, std::string("wrong type: ") + e.what());
      return false;
    }
  }

 private:
  Diagnostics& errors_;
};

nlohmann::json axis_json(const AxisSpec& a) { return {{"lo", a.lo}, {"hi", a.hi}, {"points", a.points}}; }

nlohmann::json barrier_json(const DoubleSlitBarrier& b) {
  return {{"normal_axis", b.normal_axis},       {"slit_axis", b.slit_axis},   {"wall_position", b.wall_position},
          {"wall_thickness", b.wall_thickness}, {"slit_separation", b.slit_separation},
          {"slit_width", b.slit_width},         {"height", b.height}};
}

nlohmann::json tolerances_json(const Tolerances& t) {
  return {{"significance", t.significance},       {"norm_drift", t.norm_drift},
          {"width_relative", t.width_relative},   {"rest_displacement", t.rest_displacement},
          {"rest_velocity", t.rest_velocity},     {"consistency", t.consistency},
          {"structure", t.structure},             {"pbr", t.pbr}};
}

nlohmann::json ontic_json(const OnticSpec& o) {
  nlohmann::json j{{"model", o.model},     {"overlap", o.overlap},         {"n_ontic", o.n_ontic},
                   {"n_levels", o.n_levels}, {"n_positions", o.n_positions}};
  if (!o.definition.is_null()) j["definition"] = o.definition;
  nlohmann::json expect = nlohmann::json::object();
  if (o.expect_consistent) expect["consistent"] = *o.expect_consistent;
  if (o.expect_pbr) expect["pbr"] = *o.expect_pbr;
  if (o.expect_pairs) expect["pairs"] = *o.expect_pairs;
  if (o.expect_distinctness) expect["distinctness"] = *o.expect_distinctness;
  j["expect"] = expect;
  return j;
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

bool is_multiple(double t, double h) {
  const double r = t / h;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

GaussianPacket packet(double center, double sigma, double momentum = 0.0) {
  return GaussianPacket{{center}, {sigma}, {momentum}, Complex{1.0, 0.0}};
}

// Interior zeros of |psi| along any grid line, between cells with appreciable amplitude.
std::optional<Configuration> interior_node(const GridWaveFunction& w) {
  const Grid& g = w.grid();
  const double peak = w.max_modulus();
  for (std::size_t d = 0; d < g.rank(); ++d) {
    const std::size_t n = g.axis(d).points;
    const std::size_t stride = g.stride(d);
    for (std::size_t base = 0; base < g.size(); ++base) {
      if ((base / stride) % n != 0) continue;
      constexpr std::size_t none = static_cast<std::size_t>(-1);
      bool seen_strong = false;
      std::size_t candidate = none;
      for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(w[base + i * stride]);
        if (a >= 1e-2 * peak) {
          if (candidate != none && seen_strong) return g.point(candidate);
          seen_strong = true;
          candidate = none;
        } else if (seen_strong && a < kNodeFraction * peak && candidate == none) {
          candidate = base + i * stride;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::double_slit: return "double-slit";
    case ExperimentKind::box: return "box";
    case ExperimentKind::free_gaussian: return "free-gaussian";
    case ExperimentKind::pbr: return "pbr";
    case ExperimentKind::ontic_model_check: return "ontic-model-check";
    case ExperimentKind::custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(DynamicsKind k) {
  switch (k) {
    case DynamicsKind::bohm: return "bohm";
    case DynamicsKind::rdmp: return "rdmp";
    case DynamicsKind::both: return "both";
    case DynamicsKind::none: return "none";
  }
  return "none";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::double_slit, ExperimentKind::box, ExperimentKind::free_gaussian, ExperimentKind::pbr,
                 ExperimentKind::ontic_model_check, ExperimentKind::custom}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<DynamicsKind> parse_dynamics_kind(std::string_view s) {
  for (auto k : {DynamicsKind::bohm, DynamicsKind::rdmp, DynamicsKind::both, DynamicsKind::none}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

bool uses_grid(ExperimentKind k) { return k != ExperimentKind::pbr && k != ExperimentKind::ontic_model_check; }

bool ExperimentSpec::wants(std::string_view check) const {
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

double ExperimentSpec::effective_dt() const {
  if (!(time.dt > 0.0) || !(time.t_end > 0.0)) return time.dt;
  const auto steps = std::max<long long>(1, std::llround(time.t_end / time.dt));
  return time.t_end / static_cast<double>(steps);
}

std::vector<double> ExperimentSpec::stamp_times() const {
  if (!time.sample_times.empty()) return time.sample_times;
  return {0.0, time.t_end};
}

SpecError::SpecError(Diagnostics findings)
    : std::runtime_error([&] {
        std::string msg = "invalid experiment spec:";
        for (const auto& f : findings) msg += "\n  " + f.code + ": " + f.message;
        return msg;
      }()),
      findings_(std::move(findings)) {}

ExperimentSpec parse_spec(const nlohmann::json& j) {
  Diagnostics errors;
  FieldReader r(errors);
  ExperimentSpec s;
  if (!j.is_object()) {
    r.error("$", "spec must be a JSON object");
    throw SpecError(errors);
  }
  r.read(j, "name", "name", s.name, true);
  std::string kind;
  if (r.read(j, "kind", "kind", kind, true)) {
    if (auto k = parse_experiment_kind(kind)) {
      s.kind = *k;
    } else {
      r.error("kind", "unknown kind '" + kind + "'");
    }
  }
  std::string dynamics = "none";
  if (r.read(j, "dynamics", "dynamics", dynamics, false)) {
    if (auto d = parse_dynamics_kind(dynamics)) {
      s.dynamics = *d;
    } else {
      r.error("dynamics", "unknown dynamics '" + dynamics + "'");
    }
  }
  r.read(j, "ensemble_size", "ensemble_size", s.ensemble_size, false);
  r.read(j, "seed", "seed", s.seed, false);
  r.read(j, "out_dir", "out_dir", s.out_dir, false);
  r.read(j, "checks", "checks", s.checks, false);

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_object() || !g.contains("axes") || !g.at("axes").is_array()) {
      r.error("grid.axes", "expected an array of {lo, hi, points}");
    } else {
      for (std::size_t i = 0; i < g.at("axes").size(); ++i) {
        const auto& a = g.at("axes")[i];
        const auto path = fmt::format("grid.axes[{}]", i);
        AxisSpec ax;
        r.read(a, "lo", path + ".lo", ax.lo, true);
        r.read(a, "hi", path + ".hi", ax.hi, true);
        r.read(a, "points", path + ".points", ax.points, true);
        s.grid.push_back(ax);
      }
    }
  }
  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    r.read(p, "type", "potential.type", s.potential.type, false);
    r.read(p, "lower", "potential.lower", s.potential.lower, false);
    r.read(p, "upper", "potential.upper", s.potential.upper, false);
    r.read(p, "wall", "potential.wall", s.potential.wall, false);
    if (p.is_object() && p.contains("barrier")) {
      const auto& b = p.at("barrier");
      auto& d = s.potential.barrier;
      r.read(b, "normal_axis", "potential.barrier.normal_axis", d.normal_axis, false);
      r.read(b, "slit_axis", "potential.barrier.slit_axis", d.slit_axis, false);
      r.read(b, "wall_position", "potential.barrier.wall_position", d.wall_position, false);
      r.read(b, "wall_thickness", "potential.barrier.wall_thickness", d.wall_thickness, false);
      r.read(b, "slit_separation", "potential.barrier.slit_separation", d.slit_separation, false);
      r.read(b, "slit_width", "potential.barrier.slit_width", d.slit_width, false);
      r.read(b, "height", "potential.barrier.height", d.height, false);
    }
  }
  if (j.contains("initial")) {
    const auto& in = j.at("initial");
    r.read(in, "type", "initial.type", s.initial.type, false);
    r.read(in, "packets", "initial.packets", s.initial.packets, false);
    r.read(in, "level", "initial.level", s.initial.level, false);
  }
  if (j.contains("time")) {
    const auto& t = j.at("time");
    r.read(t, "t_end", "time.t_end", s.time.t_end, true);
    r.read(t, "dt", "time.dt", s.time.dt, true);
    r.read(t, "sample_times", "time.sample_times", s.time.sample_times, false);
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    auto& d = s.tolerances;
    r.read(t, "significance", "tolerances.significance", d.significance, false);
    r.read(t, "norm_drift", "tolerances.norm_drift", d.norm_drift, false);
    r.read(t, "width_relative", "tolerances.width_relative", d.width_relative, false);
    r.read(t, "rest_displacement", "tolerances.rest_displacement", d.rest_displacement, false);
    r.read(t, "rest_velocity", "tolerances.rest_velocity", d.rest_velocity, false);
    r.read(t, "consistency", "tolerances.consistency", d.consistency, false);
    r.read(t, "structure", "tolerances.structure", d.structure, false);
    r.read(t, "pbr", "tolerances.pbr", d.pbr, false);
  }
  if (j.contains("ontic")) {
    const auto& o = j.at("ontic");
    OnticSpec os;
    r.read(o, "model", "ontic.model", os.model, false);
    r.read(o, "overlap", "ontic.overlap", os.overlap, false);
    r.read(o, "n_ontic", "ontic.n_ontic", os.n_ontic, false);
    r.read(o, "n_levels", "ontic.n_levels", os.n_levels, false);
    r.read(o, "n_positions", "ontic.n_positions", os.n_positions, false);
    if (o.is_object() && o.contains("definition")) os.definition = o.at("definition");
    if (o.is_object() && o.contains("expect")) {
      const auto& e = o.at("expect");
      bool consistent = false;
      std::string text;
      if (r.read(e, "consistent", "ontic.expect.consistent", consistent, false)) os.expect_consistent = consistent;
      if (r.read(e, "pbr", "ontic.expect.pbr", text, false)) os.expect_pbr = text;
      if (r.read(e, "pairs", "ontic.expect.pairs", text, false)) os.expect_pairs = text;
      if (r.read(e, "distinctness", "ontic.expect.distinctness", text, false)) os.expect_distinctness = text;
    }
    s.ontic = std::move(os);
  }
  if (!errors.empty()) throw SpecError(std::move(errors));
  return s;
}

nlohmann::json canonical_json(const ExperimentSpec& s) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : s.grid) axes.push_back(axis_json(a));
  nlohmann::json packets = nlohmann::json::array();
  for (const auto& p : s.initial.packets) packets.push_back(p);
  nlohmann::json j{{"name", s.name},
                   {"kind", std::string(to_string(s.kind))},
                   {"dynamics", std::string(to_string(s.dynamics))},
                   {"ensemble_size", s.ensemble_size},
                   {"seed", s.seed},
                   {"checks", s.checks},
                   {"tolerances", tolerances_json(s.tolerances)}};
  if (uses_grid(s.kind)) {
    j["grid"] = {{"axes", axes}};
    j["potential"] = {{"type", s.potential.type},
                      {"lower", s.potential.lower},
                      {"upper", s.potential.upper},
                      {"wall", s.potential.wall},
                      {"barrier", barrier_json(s.potential.barrier)}};
    j["initial"] = {{"type", s.initial.type}, {"packets", packets}, {"level", s.initial.level}};
    j["time"] = {{"t_end", s.time.t_end}, {"dt", s.time.dt}, {"sample_times", s.time.sample_times}};
  }
  if (s.ontic) j["ontic"] = ontic_json(*s.ontic);
  if (!s.out_dir.empty()) j["out_dir"] = s.out_dir;
  return j;
}

std::string canonical_text(const ExperimentSpec& spec) {
  auto j = canonical_json(spec);
  j.erase("out_dir");
  return j.dump();
}

std::string spec_hash(const ExperimentSpec& spec) { return sha256_hex(canonical_text(spec)); }

std::vector<std::string> preset_names() {
  return {"double-slit", "box", "free-gaussian", "pbr", "duel-stationary", "duel-free", "ontic-box-model"};
}

ExperimentSpec preset(std::string_view name) {
  ExperimentSpec s;
  s.name = std::string(name);
  s.seed = 20240501;
  if (name == "double-slit") {
    s.kind = ExperimentKind::double_slit;
    s.grid = {{-40.0, 40.0, 1024}};
    s.initial.packets = {packet(-5.0, 1.0), packet(5.0, 1.0)};
    s.dynamics = DynamicsKind::bohm;
    s.ensemble_size = 10000;
    s.time = {10.0, 0.01, {0.0, 10.0}};
    s.checks = {std::string(checks::norm_drift), std::string(checks::equivariance),
                std::string(checks::uniform_control)};
  } else if (name == "box" || name == "duel-stationary") {
    s.kind = ExperimentKind::box;
    s.grid = {{-0.5, 1.5, 256}};
    s.potential = {"box", {0.0}, {1.0}, kWallHeight, {}};
    s.initial.type = "eigenstate";
    s.initial.level = 0;
    s.time = {0.1, 2.5e-5, {0.0, 0.025, 0.05, 0.075, 0.1}};
    if (name == "box") {
      s.dynamics = DynamicsKind::bohm;
      s.ensemble_size = 200;
      s.checks = {std::string(checks::norm_drift), std::string(checks::at_rest), std::string(checks::equivariance)};
    } else {
      s.dynamics = DynamicsKind::both;
      s.ensemble_size = 1000;
      s.checks = {std::string(checks::norm_drift), std::string(checks::at_rest), std::string(checks::equivariance),
                  std::string(checks::duel)};
    }
  } else if (name == "free-gaussian" || name == "duel-free") {
    s.kind = ExperimentKind::free_gaussian;
    s.grid = {{-40.0, 40.0, 1024}};
    s.initial.packets = {packet(0.0, 1.0, 1.0)};
    s.time = {5.0, 0.01, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0}};
    if (name == "free-gaussian") {
      s.dynamics = DynamicsKind::rdmp;
      s.ensemble_size = 10000;
      s.checks = {std::string(checks::norm_drift), std::string(checks::width_law), std::string(checks::equivariance)};
    } else {
      s.dynamics = DynamicsKind::both;
      s.ensemble_size = 2000;
      s.time.sample_times = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
      s.checks = {std::string(checks::norm_drift), std::string(checks::width_law), std::string(checks::equivariance),
                  std::string(checks::duel)};
    }
  } else if (name == "pbr") {
    s.kind = ExperimentKind::pbr;
    OnticSpec o;
    o.model = "random-epistemic";
    o.overlap = 0.25;
    o.n_ontic = 6;
    o.expect_consistent = true;
    o.expect_pbr = "contradiction";
    s.ontic = o;
    s.checks = {std::string(checks::pbr_structure), std::string(checks::consistency),
                std::string(checks::pbr_contradiction)};
  } else if (name == "ontic-box-model") {
    s.kind = ExperimentKind::ontic_model_check;
    OnticSpec o;
    o.model = "box-nomological";
    o.n_levels = 3;
    o.n_positions = 16;
    o.expect_consistent = true;
    o.expect_pairs = "epistemic";
    o.expect_distinctness = "blocked in revised mode";
    s.ontic = o;
    s.checks = {std::string(checks::consistency), std::string(checks::classify), std::string(checks::distinctness)};
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return s;
}

bool has_errors(const Diagnostics& d) {
  return std::any_of(d.begin(), d.end(), [](const Diagnostic& x) { return x.severity == Severity::error; });
}

Diagnostics validate(const ExperimentSpec& s) {
  Diagnostics out;
  auto error = [&](std::string field, std::string msg) { out.push_back({Severity::error, std::move(field), std::move(msg)}); };
  auto warn = [&](std::string field, std::string msg) { out.push_back({Severity::warning, std::move(field), std::move(msg)}); };

  if (s.name.empty()) error("name", "must be nonempty");
  const auto& t = s.tolerances;
  for (auto [field, v] : {std::pair{"tolerances.significance", t.significance}, {"tolerances.norm_drift", t.norm_drift},
                          {"tolerances.width_relative", t.width_relative},
                          {"tolerances.rest_displacement", t.rest_displacement},
                          {"tolerances.rest_velocity", t.rest_velocity}, {"tolerances.consistency", t.consistency},
                          {"tolerances.structure", t.structure}, {"tolerances.pbr", t.pbr}}) {
    if (!(v > 0.0)) error(field, "must be positive");
  }
  if (!(t.significance < 1.0)) error("tolerances.significance", "must be below 1");

  const std::vector<std::string_view> known = {checks::norm_drift,     checks::equivariance, checks::uniform_control,
                                               checks::at_rest,        checks::width_law,    checks::duel,
                                               checks::pbr_structure,  checks::pbr_contradiction,
                                               checks::consistency,    checks::classify,     checks::distinctness};
  for (const auto& c : s.checks) {
    if (std::find(known.begin(), known.end(), c) == known.end()) error("checks", "unknown check '" + c + "'");
  }

  if (!uses_grid(s.kind)) {
    if (!s.ontic) {
      error("ontic", "required for kind " + std::string(to_string(s.kind)));
    } else {
      const auto& o = *s.ontic;
      const std::vector<std::string> models = {"random-epistemic", "trivial-psi-ontic", "box-nomological",
                                               "box-style-qubit", "inline"};
      if (std::find(models.begin(), models.end(), o.model) == models.end()) {
        error("ontic.model", "unknown model '" + o.model + "'");
      }
      if (o.model == "random-epistemic" && !(o.overlap >= 0.0 && o.overlap < 1.0)) {
        error("ontic.overlap", "must lie in [0, 1)");
      }
      if (o.model == "box-nomological" && o.n_levels < 2) error("ontic.n_levels", "must be at least 2");
      if ((o.model == "box-nomological" || o.model == "box-style-qubit") && o.n_positions < 1) {
        error("ontic.n_positions", "must be at least 1");
      }
      if (o.model == "inline" && !o.definition.is_object()) error("ontic.definition", "inline model must be an object");
      if (o.expect_pbr && *o.expect_pbr != "contradiction" && *o.expect_pbr != "not-derivable") {
        error("ontic.expect.pbr", "must be contradiction or not-derivable");
      }
      if (o.expect_pairs && *o.expect_pairs != "epistemic" && *o.expect_pairs != "ontic") {
        error("ontic.expect.pairs", "must be epistemic or ontic");
      }
    }
    if (s.dynamics != DynamicsKind::none) error("dynamics", "finite-dimensional kinds take dynamics none");
    return out;
  }

  if (s.grid.empty()) error("grid.axes", "at least one axis required");
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const auto& a = s.grid[i];
    if (!(a.hi > a.lo)) error(fmt::format("grid.axes[{}]", i), "hi must exceed lo");
    if (a.points < 2) error(fmt::format("grid.axes[{}].points", i), "at least 2 points required");
  }
  const std::size_t rank = s.grid.size();
  if (!(s.time.t_end > 0.0)) error("time.t_end", "must be positive");
  if (!(s.time.dt > 0.0)) error("time.dt", "must be positive");
  if (s.time.dt > 0.0 && s.time.t_end > 0.0 && s.time.dt > s.time.t_end) error("time.dt", "exceeds t_end");

  const auto& p = s.potential;
  if (p.type == "box") {
    if (p.lower.size() != rank || p.upper.size() != rank) error("potential.lower", "box bounds need one entry per axis");
    for (std::size_t d = 0; d < std::min(p.lower.size(), p.upper.size()); ++d) {
      if (!(p.upper[d] > p.lower[d])) error("potential.upper", "upper must exceed lower");
    }
    if (!(p.wall > 0.0)) error("potential.wall", "must be positive");
  } else if (p.type == "double-slit-barrier") {
    const auto& b = p.barrier;
    if (rank < 2 || b.normal_axis >= rank || b.slit_axis >= rank || b.normal_axis == b.slit_axis) {
      error("potential.barrier", "needs two distinct axes of a rank >= 2 grid");
    }
  } else if (p.type != "free") {
    error("potential.type", "unknown potential '" + p.type + "'");
  }

  const auto& in = s.initial;
  if (in.type == "gaussians") {
    if (in.packets.empty()) error("initial.packets", "at least one packet required");
    for (std::size_t i = 0; i < in.packets.size(); ++i) {
      const auto& g = in.packets[i];
      const auto path = fmt::format("initial.packets[{}]", i);
      if (g.center.size() != rank || g.sigma.size() != rank || g.momentum.size() != rank) {
        error(path, "center, sigma and momentum need one entry per axis");
      }
      for (double sg : g.sigma) {
        if (!(sg > 0.0)) error(path + ".sigma", "must be positive");
      }
    }
  } else if (in.type == "eigenstate") {
    std::size_t size = 1;
    for (const auto& a : s.grid) size *= std::max<std::size_t>(a.points, 1);
    if (size > 4096) error("initial.type", "eigenstates are computed densely; grid must have at most 4096 points");
    if (in.level >= size) error("initial.level", "exceeds the number of grid states");
  } else {
    error("initial.type", "unknown initial state '" + in.type + "'");
  }

  const bool needs_ensemble = s.dynamics != DynamicsKind::none;
  if (needs_ensemble && s.ensemble_size == 0) error("ensemble_size", "must be positive");
  if ((s.wants(checks::equivariance) || s.wants(checks::uniform_control)) && s.ensemble_size < kMinEnsemble) {
    error("ensemble_size", fmt::format("{} samples are too few for goodness-of-fit tests (need at least {})",
                                       s.ensemble_size, kMinEnsemble));
  }
  if ((s.wants(checks::equivariance) || s.wants(checks::uniform_control)) && !needs_ensemble) {
    error("dynamics", "equivariance checks need an ensemble");
  }
  if (s.wants(checks::duel) && s.dynamics != DynamicsKind::both) error("dynamics", "the duel check needs dynamics both");
  if (s.wants(checks::at_rest) && s.dynamics != DynamicsKind::bohm && s.dynamics != DynamicsKind::both) {
    error("dynamics", "the at-rest check needs Bohmian trajectories");
  }
  if (s.wants(checks::width_law) && (in.type != "gaussians" || in.packets.size() != 1 || p.type != "free")) {
    error("checks", "the width-law check needs a single Gaussian packet in free space");
  }

  if (s.time.dt > 0.0 && s.time.t_end > 0.0) {
    const double h = s.effective_dt();
    if (std::abs(h - s.time.dt) > 1e-9 * s.time.dt) {
      warn("time.dt", fmt::format("t_end is not a multiple of dt; using step {}", h));
    }
    const auto stamps = s.stamp_times();
    for (double ts : stamps) {
      if (ts < 0.0 || ts > s.time.t_end * (1.0 + 1e-12)) {
        error("time.sample_times", fmt::format("{} lies outside [0, t_end]", ts));
      } else if (!is_multiple(ts, h)) {
        error("time.sample_times", fmt::format("{} is not a multiple of the step {}", ts, h));
      }
    }
    if (!std::is_sorted(stamps.begin(), stamps.end()) ||
        std::adjacent_find(stamps.begin(), stamps.end()) != stamps.end()) {
      error("time.sample_times", "must be strictly increasing");
    }
    double phase = 0.0;
    for (const auto& a : s.grid) {
      if (a.points < 2 || !(a.hi > a.lo)) continue;
      const double dx = (a.hi - a.lo) / static_cast<double>(a.points);
      phase += 0.5 * std::pow(std::numbers::pi / dx, 2);
    }
    phase *= h;
    if (phase > kCutoffPhaseWarning) {
      warn("time.dt", fmt::format("cutoff mode turns by {:.1f} rad per step (limit {}); reduce dt or coarsen the grid",
                                  phase, kCutoffPhaseWarning));
    }
    double v_max = 0.0;
    if (s.potential.type == "box") v_max = s.potential.wall;
    if (s.potential.type == "double-slit-barrier") v_max = s.potential.barrier.height;
    if (0.5 * v_max * h > kPotentialPhaseWarning) {
      warn("time.dt", fmt::format("potential walls turn by {:.2f} rad per half step (limit {}); the split-step map "
                                  "does not resolve them, reduce dt",
                                  0.5 * v_max * h, kPotentialPhaseWarning));
    }
  }

  if (!has_errors(out)) {
    try {
      const auto grid = build_grid(s);
      const auto pot = build_potential(s, grid);
      if (in.type == "gaussians") {
        const auto w = build_initial_state(s, pot);
        if (auto node = interior_node(w)) {
          std::string where;
          for (double c : *node) where += (where.empty() ? "" : ", ") + format_double(c);
          warn("initial", "initial state vanishes at interior point (" + where +
                              "); trajectories near it may be truncated");
        }
      } else if (in.level > 0) {
        warn("initial", "excited eigenstates have interior nodes; trajectories near them may be truncated");
      }
    } catch (const std::exception& e) {
      error("initial", e.what());
    }
  }
  return out;
}

Grid build_grid(const ExperimentSpec& s) {
  std::vector<Axis> axes;
  for (const auto& a : s.grid) axes.push_back(Axis::periodic(a.lo, a.hi, a.points));
  return Grid(std::move(axes));
}

Potential build_potential(const ExperimentSpec& s, const Grid& grid) {
  if (s.potential.type == "box") return Potential::box(grid, s.potential.lower, s.potential.upper, s.potential.wall);
  if (s.potential.type == "double-slit-barrier") return Potential::double_slit(grid, s.potential.barrier);
  return Potential::free(grid);
}

GridWaveFunction build_initial_state(const ExperimentSpec& s, const Potential& potential) {
  if (s.initial.type == "eigenstate") return split_step_stationary_state(potential, s.initial.level, s.effective_dt());
  return gaussian_superposition(potential.grid(), s.initial.packets);
}

}  // namespace bohmlab
