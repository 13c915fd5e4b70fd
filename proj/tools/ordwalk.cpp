// Command-line driver: one subcommand per experiment.
//
// Exit codes: 0 when every acceptance verdict passes, 1 when one fails,
// 2 for usage, configuration or domain errors.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ordwalk/config.hpp"
#include "ordwalk/errors.hpp"
#include "ordwalk/experiments.hpp"
#include "ordwalk/parallel.hpp"

namespace fs = std::filesystem;
using namespace ordwalk;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::int64_t seed = -1;
  int workers = -1;
  std::string output;
  bool quiet = false;
};

using Runner = ComparisonReport (*)(const ExperimentConfig&, const ExperimentEnv&);

ComparisonReport run_psi(const ExperimentConfig& cfg, const ExperimentEnv& env) {
  return run_psi_experiment(cfg, env);
}

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> r{
      {"tail", run_tail_experiment},     {"theorem1", run_theorem1_study}, {"harmonic", run_harmonic_experiment},
      {"chain", run_chain_experiment},   {"dyson", run_dyson_experiment},  {"psi", run_psi},
      {"theorem2", run_theorem2_study},  {"audit", run_kernel_audit}};
  return r;
}

const char* describe(const std::string& name) {
  if (name == "tail") return "Survival tail curve and slope fit";
  if (name == "theorem1") return "Tail slope, light-tailed control, importance-sampling check, intercepts";
  if (name == "harmonic") return "Harmonicity of V-hat, U telescope, mixture weights";
  if (name == "chain") return "Chain trajectory and resampling diagnostics";
  if (name == "dyson") return "Dyson process from the origin";
  if (name == "psi") return "psi curve, theta and the limit start density";
  if (name == "theorem2") return "Conditioned paths vs the limit start law and limit process";
  if (name == "audit") return "Kernel mass on a panel of states and chain lifetimes";
  return "";
}

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig() : ExperimentConfig::load(o.config_path);
  for (const auto& s : o.overrides) cfg.apply_override(s);
  if (o.seed >= 0) cfg.set("run.seed", std::to_string(o.seed));
  if (o.workers >= 0) cfg.set("run.workers", std::to_string(o.workers));
  if (!o.output.empty()) cfg.set("run.output", o.output);
  return cfg;
}

fs::path output_root(const ExperimentConfig& cfg) {
  const std::string& o = cfg.get_text("run.output");
  return o.empty() ? fs::path(default_output_dir()) : fs::path(o);
}

void print_verdicts(const ComparisonReport& r) {
  for (const auto& v : r.verdicts) {
    std::string label = v.criterion ? "criterion " + std::to_string(v.criterion) : "diagnostic";
    std::printf("%-4s %-12s %s\n", v.pass ? "PASS" : "FAIL", label.c_str(), v.name.c_str());
  }
}

int run_one(const std::string& name, Runner fn, const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  set_workers(static_cast<int>(cfg.get_int("run.workers")));
  const fs::path dir = output_root(cfg) / name;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  write_manifest(dir, cfg, name, "running", 0.0);
  ExperimentEnv env;
  env.out_dir = dir;
  if (!o.quiet)
    env.progress = [&](const std::string& msg) { std::fprintf(stderr, "[%7.1fs] %s\n", elapsed(), msg.c_str()); };
  ComparisonReport r;
  try {
    r = fn(cfg, env);
  } catch (...) {
    write_manifest(dir, cfg, name, "failed", elapsed());
    throw;
  }
  write_report(r, dir);
  write_manifest(dir, cfg, name, r.all_pass() ? "pass" : "fail", elapsed());
  if (!o.quiet) print_verdicts(r);
  return r.all_pass() ? 0 : 1;
}

int validate(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  validate_params(cfg.params());
  const auto x = cfg.start();
  if (static_cast<int>(x.size()) != cfg.params().k || !in_chamber(x))
    throw ConfigError("cli-experiments", "validate", "start.x must be a strictly increasing vector of length k");
  if (!o.quiet) std::cout << cfg.serialize();
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config_path, "Config file (sectioned key = value)")->check(CLI::ExistingFile);
  sub->add_option("-s,--set", o.overrides, "Override, section.key=value (repeatable)");
  sub->add_option("--seed", o.seed, "Master seed")->check(CLI::NonNegativeNumber);
  sub->add_option("-j,--workers", o.workers, "Worker threads, 0 = hardware concurrency")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("-o,--output", o.output, "Output root (default $ORDWALK_OUTPUT_DIR or ordwalk-out)");
  sub->add_flag("-q,--quiet", o.quiet, "No progress or verdict lines");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ordered heavy-tailed random walks: experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;
  std::string chosen;

  auto* v = app.add_subcommand("validate", "Check a configuration and print it in canonical form");
  add_common(v, o);
  v->callback([&] { chosen = "validate"; });
  auto* dump = app.add_subcommand("config", "Print the default configuration with key descriptions");
  dump->callback([&] { chosen = "config"; });
  for (const auto& [name, fn] : runners()) {
    auto* sub = app.add_subcommand(name, describe(name));
    add_common(sub, o);
    sub->callback([&, n = name] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (chosen == "validate") return validate(o);
    if (chosen == "config") {
      std::string section;
      for (const auto& k : ExperimentConfig::schema()) {
        const std::string key = k.key;
        const std::string sec = key.substr(0, key.find('.'));
        if (sec != section) {
          std::cout << (section.empty() ? "" : "\n") << "[" << sec << "]\n";
          section = sec;
        }
        std::cout << "# " << k.doc << "\n" << key.substr(key.find('.') + 1) << " = " << k.default_value << "\n";
      }
      return 0;
    }
    for (const auto& [name, fn] : runners())
      if (name == chosen) return run_one(name, fn, o);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s [module=%s op=%s]: %s\n", e.kind().c_str(), e.module().c_str(), e.op().c_str(),
                 e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
