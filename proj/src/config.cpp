#include "ordwalk/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ordwalk/errors.hpp"
#include "ordwalk/rng.hpp"

namespace ordwalk {

namespace {

constexpr const char* kModule = "cli-experiments";

const std::vector<ConfigKey> kSchema = {
    {"params.k", ConfigType::Int, "4", "number of walks"},
    {"params.alpha", ConfigType::Real, "2.5", "tail index"},
    {"params.p", ConfigType::Real, "0.5", "right tail constant"},
    {"params.q", ConfigType::Real, "0.5", "left tail constant"},
    {"params.body_cut", ConfigType::Real, "1", "edge of the uniform body"},
    {"start.x", ConfigType::RealList, "0, 1, 2, 3", "start point"},
    {"start.alt", ConfigType::RealList, "0, 2, 4, 6", "second start for the intercept check"},
    {"grids.horizons", ConfigType::IntList, "32, 64, 128, 256, 512", "tail-curve horizons"},
    {"grids.r", ConfigType::RealList, "0.1, 0.2, 0.4, 0.7, 1, 1.5, 2, 3, 4, 6, 8", "psi r-grid"},
    {"grids.psi_slope_r", ConfigType::RealList, "0.1, 0.2, 0.4", "r values of the small-r slope fit"},
    {"grids.a", ConfigType::RealList, "0.02, 0.01, 0.005", "psi gap regularization, decreasing"},
    {"grids.time_points", ConfigType::Int, "512", "time grid on [0, 1] for Brownian functionals"},
    {"tail.method", ConfigType::Text, "forced_jump", "direct | forced_jump | splitting"},
    {"tail.samples", ConfigType::Count, "10000000", "draws per horizon"},
    {"tail.carry", ConfigType::Int, "1000000", "ForcedJump particles carried by splitting (0: plain IS)"},
    {"tail.l_force", ConfigType::Int, "8", "forced jump time window"},
    {"tail.b", ConfigType::Real, "0.5", "forced jump threshold in units of sqrt(n)"},
    {"tail.defensive_mix", ConfigType::Real, "0.1", "probability of an unmodified proposal path"},
    {"tail.alt_samples", ConfigType::Count, "2000000", "draws per horizon at the second start"},
    {"tail.alt_carry", ConfigType::Int, "200000", "carried particles at the second start"},
    {"tail.is_check_horizon", ConfigType::Int, "16", "horizon of the ForcedJump vs Direct check"},
    {"tail.is_check_samples", ConfigType::Count, "1000000", "draws per method in that check"},
    {"light.k", ConfigType::Int, "3", "walks in the light-tailed control"},
    {"light.horizons", ConfigType::IntList, "32, 64, 128, 256", "control horizons"},
    {"light.samples", ConfigType::Count, "10000000", "direct paths in the control"},
    {"harmonic.lattice_nodes", ConfigType::Int, "32", "cells per axis of the V lattice"},
    {"harmonic.green_nodes", ConfigType::Int, "16", "cells per axis of the U lattice"},
    {"harmonic.u_truncation", ConfigType::Int, "64", "U-series terms before the tail fit"},
    {"harmonic.u_samples", ConfigType::Count, "100000", "U-series paths"},
    {"harmonic.one_step_samples", ConfigType::Count, "1000000", "one-step Monte Carlo draws"},
    {"harmonic.starts", ConfigType::Int, "10", "random starts of the harmonicity check"},
    {"harmonic.cache", ConfigType::Text, "", "surrogate cache directory (empty: none)"},
    {"chain.batch", ConfigType::Int, "1024", "resampling batch M"},
    {"chain.steps", ConfigType::Int, "1000", "trajectory length"},
    {"chain.lifetime_samples", ConfigType::Count, "10000", "killed-chain lifetimes"},
    {"chain.lifetime_cap", ConfigType::Int, "100000", "lifetime cap"},
    {"chain.lifetime_batch", ConfigType::Int, "256", "resampling batch of the lifetime runs"},
    {"chain.panel_states", ConfigType::Int, "10", "states of the kernel audit"},
    {"chain.drift_steps", ConfigType::Count, "100000", "steps of the one-step drift check"},
    {"psi.paths", ConfigType::Count, "50000", "Dyson paths per a"},
    {"psi.bootstrap", ConfigType::Int, "200", "bootstrap resamples"},
    {"dyson.dim", ConfigType::Int, "3", "dimension of the Dyson paths"},
    {"dyson.paths", ConfigType::Count, "10000", "Dyson paths"},
    {"dyson.dt", ConfigType::Real, "0.001953125", "output step"},
    {"theorem2.n", ConfigType::Int, "256", "horizon"},
    {"theorem2.samples", ConfigType::Count, "10000000", "ForcedJump draws up to sqrt(n)"},
    {"theorem2.b", ConfigType::Real, "0.5", "forced jump threshold in units of sqrt(n)"},
    {"theorem2.carry", ConfigType::Count, "1000000", "particles carried from sqrt(n) to n"},
    {"theorem2.limit_paths", ConfigType::Count, "2000", "limit-process paths"},
    {"theorem2.a", ConfigType::Real, "0.01", "gap regularization of the limit process"},
    {"theorem2.proposals", ConfigType::Int, "64", "candidate paths per limit-process path"},
    {"theorem2.psi_curve", ConfigType::Text, "", "psi_curve.csv to reuse (empty: estimate psi)"},
    {"run.seed", ConfigType::Int, "1", "master seed"},
    {"run.workers", ConfigType::Int, "0", "worker threads (0: hardware)"},
    {"run.output", ConfigType::Text, "", "output directory (empty: $ORDWALK_OUTPUT_DIR or ordwalk-out)"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_real(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool parse_real(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* b = t.data();
  const char* e = b + t.size();
  if (*b == '+') ++b;
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

bool parse_integer(const std::string& s, std::int64_t& out) {
  double d;
  if (!parse_real(s, d) || d != std::floor(d) || std::abs(d) > 9.0e18) return false;
  out = static_cast<std::int64_t>(d);
  return true;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

std::string canonical(const ConfigKey& k, const std::string& raw) {
  auto bad = [&](const char* what) {
    return ConfigError(kModule, "config", std::string(k.key) + ": " + what + " (got '" + raw + "')");
  };
  switch (k.type) {
    case ConfigType::Int: {
      std::int64_t v;
      if (!parse_integer(raw, v)) throw bad("expected an integer");
      return std::to_string(v);
    }
    case ConfigType::Count: {
      std::int64_t v;
      if (!parse_integer(raw, v) || v <= 0) throw bad("expected a positive integer");
      return std::to_string(v);
    }
    case ConfigType::Real: {
      double v;
      if (!parse_real(raw, v)) throw bad("expected a real number");
      return format_real(v);
    }
    case ConfigType::RealList: {
      std::string out;
      for (const auto& item : split_list(raw)) {
        double v;
        if (!parse_real(item, v)) throw bad("expected a comma-separated list of reals");
        out += (out.empty() ? "" : ", ") + format_real(v);
      }
      if (out.empty()) throw bad("empty list");
      return out;
    }
    case ConfigType::IntList: {
      std::string out;
      for (const auto& item : split_list(raw)) {
        std::int64_t v;
        if (!parse_integer(item, v)) throw bad("expected a comma-separated list of integers");
        out += (out.empty() ? "" : ", ") + std::to_string(v);
      }
      if (out.empty()) throw bad("empty list");
      return out;
    }
    case ConfigType::Text: {
      std::string t = trim(raw);
      if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
      if (t.find('\n') != std::string::npos) throw bad("text values are single-line");
      return t;
    }
  }
  return raw;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (const auto& k : kSchema) values_[k.key] = canonical(k, k.default_value);
}

const std::vector<ConfigKey>& ExperimentConfig::schema() { return kSchema; }

const ConfigKey& ExperimentConfig::find(const std::string& key) const {
  for (const auto& k : kSchema)
    if (key == k.key) return k;
  throw ConfigError(kModule, "config", "unknown key '" + key + "'");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const ConfigKey& k = find(key);
  values_[k.key] = canonical(k, value);
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(kModule, "config", "override '" + assignment + "' is not of the form section.key=value");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(kModule, "config", "line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(kModule, "config", "line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError(kModule, "config", "line " + std::to_string(lineno) + ": key outside a section");
    cfg.set(section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(kModule, "config", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

// Where results and caches go does not change them.
bool is_location(const std::string& key) { return key == "run.output" || key == "harmonic.cache"; }

}  // namespace

std::string ExperimentConfig::render(bool locations) const {
  std::ostringstream o;
  std::string section;
  for (const auto& k : kSchema) {
    const std::string key = k.key;
    if (!locations && is_location(key)) continue;
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) o << "\n";
      o << "[" << sec << "]\n";
      section = sec;
    }
    o << key.substr(dot + 1) << " = " << values_.at(key) << "\n";
  }
  return o.str();
}

std::string ExperimentConfig::serialize() const { return render(true); }

std::string ExperimentConfig::identity() const { return render(false); }

std::uint64_t ExperimentConfig::hash() const { return derive_stream(0, identity()); }

std::int64_t ExperimentConfig::get_int(const std::string& key) const {
  find(key);
  return std::stoll(values_.at(key));
}

std::uint64_t ExperimentConfig::get_count(const std::string& key) const {
  find(key);
  return std::stoull(values_.at(key));
}

double ExperimentConfig::get_real(const std::string& key) const {
  find(key);
  double v = 0.0;
  parse_real(values_.at(key), v);
  return v;
}

std::vector<double> ExperimentConfig::get_reals(const std::string& key) const {
  find(key);
  std::vector<double> out;
  for (const auto& item : split_list(values_.at(key))) {
    double v = 0.0;
    parse_real(item, v);
    out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> ExperimentConfig::get_ints(const std::string& key) const {
  find(key);
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(values_.at(key))) out.push_back(std::stoll(item));
  return out;
}

const std::string& ExperimentConfig::get_text(const std::string& key) const {
  find(key);
  return values_.at(key);
}

WalkParams ExperimentConfig::params() const {
  WalkParams p;
  p.k = static_cast<int>(get_int("params.k"));
  p.law.alpha = get_real("params.alpha");
  p.law.p = get_real("params.p");
  p.law.q = get_real("params.q");
  p.law.body_cut = get_real("params.body_cut");
  return p;
}

std::vector<double> ExperimentConfig::start() const { return get_reals("start.x"); }

std::uint64_t ExperimentConfig::seed() const {
  const std::int64_t s = get_int("run.seed");
  if (s < 0) throw ConfigError("cli-experiments", "config", "run.seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::string default_output_dir() {
  const char* env = std::getenv("ORDWALK_OUTPUT_DIR");
  return env && *env ? std::string(env) : std::string("ordwalk-out");
}

}  // namespace ordwalk
