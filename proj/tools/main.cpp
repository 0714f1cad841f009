#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bohmlab/experiment.hpp"
#include "bohmlab/run.hpp"

namespace {

using bohmlab::Diagnostics;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

void print_findings(const Diagnostics& findings, std::ostream& out) {
  for (const auto& f : findings) out << bohmlab::to_string(f.severity) << ": " << f.code << ": " << f.message << '\n';
}

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 0;
  double tolerance_scale = 1.0;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "Override the spec seed");
    app->add_option("--out-dir", out_dir, "Output directory (default: $BOHMLAB_OUT_ROOT/<name>)");
    app->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");
    app->add_option("--tolerance-scale", tolerance_scale, "Multiply deterministic tolerances")
        ->check(CLI::PositiveNumber);
  }

  bohmlab::RunOptions options() const {
    bohmlab::RunOptions o;
    o.seed = seed;
    o.out_dir = out_dir;
    o.threads = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    o.tolerance_scale = tolerance_scale;
    return o;
  }
};

int execute(const bohmlab::ExperimentSpec& spec, const CommonFlags& flags) {
  const auto manifest = bohmlab::run_experiment(spec, flags.options());
  std::cout << bohmlab::format_report(manifest);
  std::cout << "output: " << bohmlab::resolve_output_dir(bohmlab::effective_spec(spec, flags.options()), flags.options()).string()
            << '\n';
  return bohmlab::exit_code(manifest);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pilot-wave and ontological-model experiment runner"};
  app.set_version_flag("--version", std::string(bohmlab::tool_version()));
  app.require_subcommand(1);

  CommonFlags flags;
  std::string spec_path;
  auto* run = app.add_subcommand("run", "Run an experiment spec");
  run->add_option("spec", spec_path, "Spec JSON file")->required();
  flags.add_to(run);

  std::string preset_name;
  bool emit = false;
  auto* preset = app.add_subcommand("preset", "Run a built-in preset, or print it with --emit");
  preset->add_option("name", preset_name, "Preset name")->required();
  preset->add_flag("--emit", emit, "Print the preset spec instead of running it");
  flags.add_to(preset);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a spec without running it");
  validate->add_option("spec", validate_path, "Spec JSON file")->required();

  std::string manifest_path;
  auto* report = app.add_subcommand("report", "Summarize a run manifest");
  report->add_option("manifest", manifest_path, "manifest.json or its directory")->required();

  app.add_subcommand("presets", "List preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return execute(bohmlab::parse_spec(read_json(spec_path)), flags);
    if (*preset) {
      auto spec = bohmlab::preset(preset_name);
      if (emit) {
        std::cout << bohmlab::canonical_json(bohmlab::effective_spec(spec, flags.options())).dump(2) << '\n';
        return bohmlab::kExitPass;
      }
      return execute(spec, flags);
    }
    if (*validate) {
      const auto findings = bohmlab::validate(bohmlab::parse_spec(read_json(validate_path)));
      print_findings(findings, std::cout);
      if (findings.empty()) std::cout << "ok\n";
      return bohmlab::has_errors(findings) ? bohmlab::kExitValidationError : bohmlab::kExitPass;
    }
    if (*report) {
      std::filesystem::path p = manifest_path;
      if (std::filesystem::is_directory(p)) p /= "manifest.json";
      const auto m = bohmlab::run_manifest_from_json(read_json(p.string()));
      std::cout << bohmlab::format_report(m);
      return bohmlab::exit_code(m);
    }
    for (const auto& n : bohmlab::preset_names()) std::cout << n << '\n';
    return bohmlab::kExitPass;
  } catch (const bohmlab::SpecError& e) {
    print_findings(e.findings(), std::cerr);
    return bohmlab::kExitValidationError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bohmlab::kExitValidationError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bohmlab::kExitValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
