#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ordwalk/core.hpp"

namespace ordwalk {

enum class ConfigType { Int, Count, Real, RealList, IntList, Text };

struct ConfigKey {
  const char* key;  // section.name
  ConfigType type;
  const char* default_value;
  const char* doc;
};

/// Flat sectioned text:
///
///   # comment
///   [params]
///   k = 4
///   alpha = 2.5
///
/// Every key is addressed as section.name. Unknown keys and values that do
/// not parse as the key's type are rejected with ConfigError. Counts must be
/// positive.
class ExperimentConfig {
 public:
  /// All keys at their defaults (the desk configuration).
  ExperimentConfig();

  static const std::vector<ConfigKey>& schema();
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  /// Type-checked assignment; the stored text is the canonical form.
  void set(const std::string& key, const std::string& value);
  /// "section.name=value".
  void apply_override(const std::string& assignment);

  /// Canonical text (sections and keys in schema order). parse(serialize())
  /// reproduces the config exactly.
  std::string serialize() const;
  /// serialize() without run.output and harmonic.cache: the text recorded
  /// in reports and hashed, so moving a run does not change its artifacts.
  std::string identity() const;
  std::uint64_t hash() const;

  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_count(const std::string& key) const;
  double get_real(const std::string& key) const;
  std::vector<double> get_reals(const std::string& key) const;
  std::vector<std::int64_t> get_ints(const std::string& key) const;
  const std::string& get_text(const std::string& key) const;

  WalkParams params() const;
  std::vector<double> start() const;
  /// run.seed; ConfigError if negative.
  std::uint64_t seed() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const ConfigKey& find(const std::string& key) const;
  std::string render(bool locations) const;
  std::map<std::string, std::string> values_;
};

/// Default output directory: $ORDWALK_OUTPUT_DIR if set, else "ordwalk-out".
std::string default_output_dir();

}  // namespace ordwalk
