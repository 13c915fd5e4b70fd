#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ordwalk/experiments.hpp"
#include "ordwalk/parallel.hpp"
#include "ordwalk/stats.hpp"

using namespace ordwalk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig small_dyson() {
  ExperimentConfig cfg;
  cfg.set("dyson.paths", "300");
  cfg.set("dyson.dt", "0.0078125");
  return cfg;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("weighted KS with unit weights equals the two-sample KS") {
  RngStream rng(21, 0);
  std::vector<double> a(500), b(700);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = 0.2 + rng.normal();
  const std::vector<double> ones(a.size(), 1.0);
  CHECK(ks_weighted_two_sample(a, ones, b) == doctest::Approx(ks_two_sample(a, b)).epsilon(1e-12));
  // scaling the weights changes nothing
  const std::vector<double> threes(a.size(), 3.0);
  CHECK(ks_weighted_two_sample(a, threes, b) == doctest::Approx(ks_two_sample(a, b)).epsilon(1e-12));
}

TEST_CASE("weighted KS reweights toward the other sample") {
  // a = {0, 1}; all weight on 0 makes it the point mass at 0
  const std::vector<double> a{0.0, 1.0}, w{1.0, 0.0}, b{0.0, 0.0};
  CHECK(ks_weighted_two_sample(a, w, b) == doctest::Approx(0.0));
}

TEST_CASE("experiments use distinct streams") {
  const ExperimentConfig cfg;
  RngStream a = experiment_stream(cfg, "tail");
  RngStream b = experiment_stream(cfg, "psi");
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("report JSON carries the config, seed and verdicts") {
  const ExperimentConfig cfg = small_dyson();
  const fs::path dir = fs::temp_directory_path() / "ordwalk-test-report";
  fs::remove_all(dir);
  ExperimentEnv env;
  env.out_dir = dir;
  const auto r = run_dyson_experiment(cfg, env);
  const auto j = r.to_json();
  CHECK(j.at("experiment") == "dyson");
  CHECK(j.at("schema_version") == kReportSchema);
  CHECK(j.at("seed") == cfg.seed());
  CHECK(j.at("config") == cfg.identity());
  CHECK(j.at("verdicts").is_array());
  CHECK(!j.at("verdicts").empty());
  CHECK(!j.contains("timings"));
  write_report(r, dir);
  CHECK(fs::exists(dir / "dyson.json"));
  CHECK(fs::exists(dir / "timing.json"));
  CHECK(fs::exists(dir / "dyson_paths.csv"));
  write_manifest(dir, cfg, "dyson", "pass", 1.0);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("status") == "pass");
  CHECK(m.at("version") == kVersion);
  fs::remove_all(dir);
}

TEST_CASE("re-running an experiment reproduces its files byte for byte") {
  const ExperimentConfig cfg = small_dyson();
  const fs::path d1 = fs::temp_directory_path() / "ordwalk-test-rerun1";
  const fs::path d2 = fs::temp_directory_path() / "ordwalk-test-rerun2";
  for (const auto& d : {d1, d2}) {
    fs::remove_all(d);
    ExperimentEnv env;
    env.out_dir = d;
    write_report(run_dyson_experiment(cfg, env), d);
  }
  CHECK(slurp(d1 / "dyson.json") == slurp(d2 / "dyson.json"));
  CHECK(slurp(d1 / "dyson_paths.csv") == slurp(d2 / "dyson_paths.csv"));
  // a different worker count gives the same bytes
  const int before = workers();
  set_workers(3);
  const fs::path d3 = fs::temp_directory_path() / "ordwalk-test-rerun3";
  fs::remove_all(d3);
  ExperimentEnv env;
  env.out_dir = d3;
  write_report(run_dyson_experiment(cfg, env), d3);
  set_workers(before);
  CHECK(slurp(d1 / "dyson.json") == slurp(d3 / "dyson.json"));
  for (const auto& d : {d1, d2, d3}) fs::remove_all(d);
}

}
