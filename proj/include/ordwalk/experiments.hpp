#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ordwalk/brownian.hpp"
#include "ordwalk/config.hpp"

namespace ordwalk {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kReportSchema = 1;

struct Verdict {
  int criterion = 0;  // acceptance criterion number, 0 for a diagnostic
  std::string name;
  bool pass = false;
  nlohmann::json measured;
  std::string tolerance;
};

struct ComparisonReport {
  std::string experiment;
  std::vector<Verdict> verdicts;
  nlohmann::json data = nlohmann::json::object();
  std::string config_text;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  /// Stage runtimes in seconds. Written to timing.json, not to the report,
  /// so reports are byte-identical across re-runs.
  std::vector<std::pair<std::string, double>> timings;

  /// True when every numbered criterion verdict passes.
  bool all_pass() const;
  nlohmann::json to_json() const;
};

using Progress = std::function<void(const std::string&)>;

struct ExperimentEnv {
  std::filesystem::path out_dir;
  Progress progress;
  /// Reused by run_theorem2_study instead of estimating psi again.
  const PsiCurve* psi = nullptr;
};

/// Root stream of an experiment: experiments never share streams.
RngStream experiment_stream(const ExperimentConfig& cfg, const std::string& name);

ComparisonReport run_tail_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env);
/// Tail curve and slope, light-tailed control, ForcedJump vs Direct, and
/// intercept consistency across two starts.
ComparisonReport run_theorem1_study(const ExperimentConfig& cfg, const ExperimentEnv& env);
/// Harmonicity of V-hat, U telescope, superharmonicity of v, mixture weights.
ComparisonReport run_harmonic_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env);
/// One trajectory plus resampling diagnostics.
ComparisonReport run_chain_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env);
ComparisonReport run_dyson_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env);
/// psi curve, its checks, theta and the tabulated f. `curve_out` receives
/// the curve when given.
ComparisonReport run_psi_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env,
                                    PsiCurve* curve_out = nullptr);
/// Conditioned paths at horizon n by self-normalized ForcedJump weights,
/// compared with p(x), f and the limit process.
ComparisonReport run_theorem2_study(const ExperimentConfig& cfg, const ExperimentEnv& env);
/// Kernel mass at a panel of states and the lifetime of the killed chain.
ComparisonReport run_kernel_audit(const ExperimentConfig& cfg, const ExperimentEnv& env);

/// <experiment>.json and timing.json in `dir`.
void write_report(const ComparisonReport& report, const std::filesystem::path& dir);

/// manifest.json: config hash, seed, version, status and wall time.
void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg, const std::string& subcommand,
                    const std::string& status, double wall_seconds);

/// Sup distance between a weighted and an unweighted empirical CDF.
double ks_weighted_two_sample(std::vector<double> a, std::vector<double> wa, std::vector<double> b);

}  // namespace ordwalk
