#include "bohmlab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "bohmlab/box_model.hpp"
#include "bohmlab/duel.hpp"
#include "bohmlab/frame_io.hpp"
#include "bohmlab/guidance.hpp"
#include "bohmlab/pbr.hpp"
#include "bohmlab/propagator.hpp"
#include "bohmlab/random.hpp"
#include "bohmlab/random_model.hpp"
#include "bohmlab/sampling.hpp"
#include "bohmlab/statistics.hpp"
#include "bohmlab/trajectory.hpp"

#ifndef BOHMLAB_VERSION
#define BOHMLAB_VERSION "0.0.0"
#endif

namespace bohmlab {
namespace {

namespace fs = std::filesystem;

// Derived seeds for the independent random streams of one run.
constexpr std::uint64_t kRdmpStream = 1;
constexpr std::uint64_t kControlStream = 2;

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  void json(const std::string& name, const nlohmann::json& j) {
    std::ofstream out(path(name), std::ios::binary);
    out << j.dump(2) << '\n';
    finish(out, name);
  }

  template <class Fn>
  void text(const std::string& name, Fn&& write) {
    std::ofstream out(path(name), std::ios::binary);
    write(out);
    finish(out, name);
  }

  void frame(const std::string& stem, const GridWaveFunction& w, double t) {
    fs::create_directories((root_ / stem).parent_path());
    for (const auto& p : write_frame(root_ / stem, w, t)) files_.push_back(fs::relative(p, root_).generic_string());
  }

  const fs::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path path(const std::string& name) {
    const auto p = root_ / name;
    fs::create_directories(p.parent_path());
    return p;
  }
  void finish(std::ofstream& out, const std::string& name) {
    if (!out) throw std::runtime_error("cannot write artifact " + (root_ / name).string());
    files_.push_back(name);
  }

  fs::path root_;
  std::vector<std::string> files_;
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) { return mix64(seed ^ mix64(stream)); }

std::size_t truncated_count(const Ensemble& e) {
  return static_cast<std::size_t>(
      std::count_if(e.members.begin(), e.members.end(), [](const Trajectory& t) { return t.truncated; }));
}

TestOutcome equivariance_outcome(const std::string& label, const Ensemble& e, const WaveHistory& history,
                                 std::span<const std::size_t> frames, double significance, nlohmann::json& report) {
  TestOutcome out{label, true, nlohmann::json::object()};
  auto per_time = nlohmann::json::array();
  double min_p = 1.0;
  for (auto f : frames) {
    const double t = history.frame(f).time;
    const auto r = equivariance_test(e, history.wave(f), t, significance);
    per_time.push_back(r);
    out.pass = out.pass && r.pass;
    min_p = std::min(min_p, r.chi_square.p_value);
    for (const auto& k : r.ks) min_p = std::min(min_p, k.p_value);
  }
  report = per_time;
  out.detail = {{"times", frames.size()}, {"min_p_value", min_p}, {"significance", significance},
                {"truncated_members", truncated_count(e)}};
  return out;
}

void run_grid_pipeline(const ExperimentSpec& spec, const RunOptions& options, ArtifactWriter& writer,
                       RunManifest& manifest) {
  const auto& tol = spec.tolerances;
  const Grid grid = build_grid(spec);
  const Potential potential = build_potential(spec, grid);
  const GridWaveFunction psi0 = build_initial_state(spec, potential);
  const double edge = spectral_edge_fraction(psi0);
  if (edge > kSpectralEdgeWarning) {
    manifest.diagnostics.push_back(
        {Severity::warning, "grid-too-coarse", fmt::format("initial momentum weight {:.3e} near the grid cutoff", edge)});
  }

  const bool bohm = spec.dynamics == DynamicsKind::bohm || spec.dynamics == DynamicsKind::both;
  const bool rdmp = spec.dynamics == DynamicsKind::rdmp || spec.dynamics == DynamicsKind::both;
  const auto history = WaveHistory::evolve(psi0, potential, spec.time.dt, spec.time.t_end, bohm);
  std::vector<std::size_t> frames;
  for (double t : spec.stamp_times()) frames.push_back(history.frame_at(t));

  nlohmann::json reports = nlohmann::json::object();
  reports["grid"] = grid.axes();
  reports["step"] = history.step();
  reports["stamp_times"] = spec.stamp_times();

  for (auto f : frames) writer.frame(fmt::format("frames/frame_{:06d}", f), history.wave(f), history.frame(f).time);

  if (spec.wants(checks::norm_drift)) {
    const double n0 = grid_norm(history.wave(0));
    double drift = 0.0;
    for (std::size_t k = 0; k < history.size(); ++k) {
      drift = std::max(drift, std::abs(grid_norm(history.wave(k)) - n0));
    }
    reports["norm_drift"] = drift;
    manifest.tests.push_back({std::string(checks::norm_drift), drift <= tol.norm_drift,
                              {{"max_drift", drift}, {"tolerance", tol.norm_drift}, {"steps", history.size() - 1}}});
  }

  std::optional<Ensemble> bohm_e, rdmp_e;
  if (bohm) {
    IntegratorOptions io;
    io.record_frames = frames;
    bohm_e = bohm_ensemble(history, spec.ensemble_size, spec.seed, options.threads, io);
    bohm_e->source = manifest.spec_hash;
    writer.text("trajectories_bohm.csv", [&](std::ostream& out) { write_trajectories_csv(out, *bohm_e); });
    reports["bohm_truncated"] = truncated_count(*bohm_e);
  }
  if (rdmp) {
    rdmp_e = rdmp_ensemble(history, spec.ensemble_size, stream_seed(spec.seed, kRdmpStream), options.threads, frames);
    rdmp_e->source = manifest.spec_hash;
    writer.text("trajectories_rdmp.csv", [&](std::ostream& out) { write_trajectories_csv(out, *rdmp_e); });
  }

  if (spec.wants(checks::equivariance)) {
    if (bohm_e) {
      manifest.tests.push_back(equivariance_outcome("equivariance-bohm", *bohm_e, history, frames, tol.significance,
                                                    reports["equivariance_bohm"]));
    }
    if (rdmp_e) {
      manifest.tests.push_back(equivariance_outcome("equivariance-rdmp", *rdmp_e, history, frames, tol.significance,
                                                    reports["equivariance_rdmp"]));
    }
  }

  if (spec.wants(checks::uniform_control)) {
    const auto last = frames.back();
    const auto control = uniform_sample(grid, spec.ensemble_size, stream_seed(spec.seed, kControlStream));
    const auto r = equivariance_test(control, history.wave(last), history.frame(last).time, tol.significance);
    reports["uniform_control"] = r;
    manifest.tests.push_back({std::string(checks::uniform_control), !r.pass,
                              {{"rejected", !r.pass}, {"chi_square_p", r.chi_square.p_value}}});
  }

  if (spec.wants(checks::at_rest)) {
    double displacement = 0.0;
    for (const auto& m : bohm_e->members) {
      for (const auto& q : m.configurations) {
        for (std::size_t d = 0; d < q.size(); ++d) {
          displacement = std::max(displacement, std::abs(q[d] - m.configurations.front()[d]));
        }
      }
    }
    // Velocity on grid points carrying appreciable density.
    const double peak = psi0.max_modulus();
    double speed = 0.0;
    for (std::size_t f = 0; f < grid.size(); ++f) {
      if (std::abs(psi0[f]) < 1e-3 * peak) continue;
      const auto v = guiding_velocity(psi0, grid.point(f));
      for (double c : v.velocity) speed = std::max(speed, std::abs(c));
    }
    const bool pass = displacement <= tol.rest_displacement && speed <= tol.rest_velocity &&
                      truncated_count(*bohm_e) == 0;
    reports["at_rest"] = {{"max_displacement", displacement}, {"max_velocity", speed}};
    manifest.tests.push_back({std::string(checks::at_rest), pass,
                              {{"max_displacement", displacement},
                               {"max_velocity", speed},
                               {"displacement_tolerance", tol.rest_displacement},
                               {"velocity_tolerance", tol.rest_velocity}}});
  }

  if (spec.wants(checks::width_law)) {
    const double s0 = spec.initial.packets.front().sigma.front();
    double worst = 0.0;
    auto rows = nlohmann::json::array();
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double t = history.frame(k).time;
      const double expected = s0 * std::sqrt(1.0 + std::pow(t / (2.0 * s0 * s0), 2));
      const double measured = std::sqrt(density_moments(history.wave(k).normalized(), 0).variance);
      const double rel = std::abs(measured - expected) / expected;
      worst = std::max(worst, rel);
      if (std::find(frames.begin(), frames.end(), k) != frames.end()) {
        rows.push_back({{"t", t}, {"expected", expected}, {"measured", measured}, {"relative_error", rel}});
      }
    }
    reports["width_law"] = rows;
    manifest.tests.push_back({std::string(checks::width_law), worst <= tol.width_relative,
                              {{"max_relative_error", worst}, {"tolerance", tol.width_relative}}});
  }

  if (spec.wants(checks::duel)) {
    const auto duel = compare_bohm_rdmp(history, *bohm_e, *rdmp_e);
    writer.json("duel.json", duel);
    const bool pass = duel.marginals_agree && duel.rdmp_mean_step > duel.bohm_mean_step;
    manifest.tests.push_back({std::string(checks::duel), pass,
                              {{"marginals_agree", duel.marginals_agree},
                               {"bohm_mean_step", duel.bohm_mean_step},
                               {"rdmp_mean_step", duel.rdmp_mean_step}}});
  }

  writer.json("report.json", reports);
}

bool expectation_met(const std::optional<std::string>& expected, std::string_view actual) {
  return !expected || *expected == actual;
}

void run_ontic_pipeline(const ExperimentSpec& spec, ArtifactWriter& writer, RunManifest& manifest) {
  const auto& tol = spec.tolerances;
  const auto& o = *spec.ontic;

  if (spec.wants(checks::pbr_structure)) {
    const auto setup = build_pbr_states();
    writer.json("pbr_structure.json", setup);
    const bool pass = setup.gram_deviation() <= tol.structure && setup.max_paired_probability() <= tol.structure &&
                      setup.max_column_sum_deviation() <= tol.structure;
    manifest.tests.push_back({std::string(checks::pbr_structure), pass,
                              {{"gram_deviation", setup.gram_deviation()},
                               {"max_paired_probability", setup.max_paired_probability()},
                               {"max_column_sum_deviation", setup.max_column_sum_deviation()}}});
  }

  const auto model = build_ontic_model(o, spec.seed);
  writer.json("model.json", model);

  if (spec.wants(checks::consistency)) {
    const auto r = check_consistency(model, tol.consistency);
    writer.json("consistency.json", r);
    const bool expected = o.expect_consistent.value_or(true);
    manifest.tests.push_back({std::string(checks::consistency), r.pass == expected,
                              {{"max_deviation", r.max_deviation}, {"consistent", r.pass}, {"expected", expected}}});
  }

  if (spec.wants(checks::classify)) {
    auto pairs = nlohmann::json::array();
    bool pass = true;
    for (std::size_t a = 0; a < model.states().size(); ++a) {
      for (std::size_t b = a + 1; b < model.states().size(); ++b) {
        const auto c = classify(model, a, b);
        pairs.push_back({{"first", model.states()[a].name},
                         {"second", model.states()[b].name},
                         {"class", std::string(to_string(c.kind))},
                         {"overlap", c.overlap}});
        if (o.expect_pairs) pass = pass && to_string(c.kind) == *o.expect_pairs + "-pair";
      }
    }
    writer.json("classification.json", pairs);
    manifest.tests.push_back({std::string(checks::classify), pass, {{"pairs", pairs.size()}}});
  }

  if (spec.wants(checks::distinctness)) {
    const auto r = orthogonal_distinctness_check(model, tol.pbr);
    writer.json("distinctness.json", r);
    const auto verdict = to_string(r.verdict);
    const bool pass = o.expect_distinctness ? *o.expect_distinctness == verdict
                                            : r.verdict != DistinctnessVerdict::violation;
    manifest.tests.push_back({std::string(checks::distinctness), pass, {{"verdict", std::string(verdict)}}});
  }

  if (spec.wants(checks::pbr_contradiction)) {
    try {
      const auto v = pbr_contradiction(model, tol.pbr);
      writer.json("pbr_verdict.json", v);
      manifest.tests.push_back({std::string(checks::pbr_contradiction), expectation_met(o.expect_pbr, to_string(v.kind)),
                                {{"verdict", std::string(to_string(v.kind))}, {"witness_count", v.witness_count}}});
    } catch (const std::exception& e) {
      manifest.tests.push_back({std::string(checks::pbr_contradiction), false, {{"error", e.what()}}});
    }
  }
}

}  // namespace

std::string_view tool_version() { return BOHMLAB_VERSION; }

void to_json(nlohmann::json& j, const RunManifest& m) {
  auto tests = nlohmann::json::array();
  for (const auto& t : m.tests) tests.push_back({{"name", t.name}, {"pass", t.pass}, {"detail", t.detail}});
  j = nlohmann::json{{"name", m.name},
                     {"spec_hash", m.spec_hash},
                     {"tool_version", m.tool_version},
                     {"wall_clock_seconds", m.wall_clock_seconds},
                     {"tests", tests},
                     {"artifacts", m.artifacts},
                     {"diagnostics", m.diagnostics},
                     {"all_pass", m.all_pass}};
}

RunManifest run_manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.name = j.at("name").get<std::string>();
  m.spec_hash = j.at("spec_hash").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  for (const auto& t : j.at("tests")) {
    m.tests.push_back({t.at("name").get<std::string>(), t.at("pass").get<bool>(), t.value("detail", nlohmann::json{})});
  }
  m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  for (const auto& d : j.value("diagnostics", nlohmann::json::array())) {
    const auto sev = d.at("severity").get<std::string>();
    m.diagnostics.push_back({sev == "error" ? Severity::error : sev == "warning" ? Severity::warning : Severity::info,
                             d.at("code").get<std::string>(), d.at("message").get<std::string>()});
  }
  m.all_pass = j.at("all_pass").get<bool>();
  return m;
}

fs::path resolve_output_dir(const ExperimentSpec& spec, const RunOptions& options) {
  if (!options.out_dir.empty()) return options.out_dir;
  if (!spec.out_dir.empty()) return spec.out_dir;
  if (const char* root = std::getenv(kOutRootVariable); root && *root) return fs::path(root) / spec.name;
  return fs::path("bohmlab-runs") / spec.name;
}

ExperimentSpec effective_spec(const ExperimentSpec& spec, const RunOptions& options) {
  if (!(options.tolerance_scale > 0.0)) throw std::invalid_argument("tolerance scale must be positive");
  ExperimentSpec s = spec;
  if (options.seed) s.seed = *options.seed;
  auto& t = s.tolerances;
  for (double* v : {&t.norm_drift, &t.width_relative, &t.rest_displacement, &t.rest_velocity, &t.consistency,
                    &t.structure, &t.pbr}) {
    *v *= options.tolerance_scale;
  }
  return s;
}

OntologicalModel build_ontic_model(const OnticSpec& o, std::uint64_t seed) {
  if (o.model == "random-epistemic") return random_epistemic_model(o.overlap, o.n_ontic, seed);
  if (o.model == "trivial-psi-ontic") {
    return trivial_psi_ontic_model(
        {{"0", qubit::zero()}, {"1", qubit::one()}, {"+", qubit::plus()}, {"-", qubit::minus()}},
        {{"Z", computational_basis(2)}, {"X", ProjectiveMeasurement({qubit::plus(), qubit::minus()})}});
  }
  if (o.model == "box-nomological") return build_box_nomological_model(o.n_levels, o.n_positions);
  if (o.model == "box-style-qubit") return box_style_qubit_model(o.n_positions);
  if (o.model == "inline") return ontological_model_from_json(o.definition);
  throw std::invalid_argument("unknown ontic model '" + o.model + "'");
}

RunManifest run_experiment(const ExperimentSpec& input, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentSpec spec = effective_spec(input, options);
  auto findings = validate(spec);
  if (has_errors(findings)) throw SpecError(std::move(findings));

  RunManifest manifest;
  manifest.name = spec.name;
  manifest.spec_hash = spec_hash(spec);
  manifest.tool_version = std::string(tool_version());
  manifest.diagnostics = findings;

  ArtifactWriter writer(resolve_output_dir(spec, options));
  auto canonical = canonical_json(spec);
  canonical.erase("out_dir");
  writer.json("spec.json", canonical);

  if (uses_grid(spec.kind)) {
    run_grid_pipeline(spec, options, writer, manifest);
  } else {
    run_ontic_pipeline(spec, writer, manifest);
  }

  manifest.artifacts = writer.files();
  manifest.all_pass = std::all_of(manifest.tests.begin(), manifest.tests.end(), [](const TestOutcome& t) { return t.pass; });
  manifest.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream out(writer.root() / "manifest.json", std::ios::binary);
  out << nlohmann::json(manifest).dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest");
  return manifest;
}

int exit_code(const RunManifest& m) { return m.all_pass ? kExitPass : kExitAcceptanceFailure; }

std::string format_report(const RunManifest& m) {
  std::string s = fmt::format("run {}  (spec {}, bohmlab {}, {:.2f} s)\n", m.name, m.spec_hash.substr(0, 12),
                              m.tool_version, m.wall_clock_seconds);
  for (const auto& t : m.tests) s += fmt::format("  {:<20} {}  {}\n", t.name, t.pass ? "PASS" : "FAIL", t.detail.dump());
  for (const auto& d : m.diagnostics) s += fmt::format("  {}: {}: {}\n", to_string(d.severity), d.code, d.message);
  s += fmt::format("  {} artifacts; overall {}\n", m.artifacts.size(), m.all_pass ? "PASS" : "FAIL");
  return s;
}

}  // namespace bohmlab
