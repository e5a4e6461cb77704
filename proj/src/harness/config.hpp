#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lab::harness {

/// Scalar or homogeneous-array value of the experiment config format: a
/// line-oriented `key = value` file with `[section]` tables and `#` comments.
using Value = std::variant<bool, std::int64_t, double, std::string, std::vector<double>,
                           std::vector<std::string>>;

using Table = std::map<std::string, Value>;

struct ExperimentConfig {
  std::string experiment;
  Table top;                             // scalar keys outside any section
  std::map<std::string, Table> sections;

  bool operator==(const ExperimentConfig&) const = default;

  std::int64_t trials() const;
  std::uint64_t base_seed() const;
  std::string out_dir() const;
  int threads() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical rendering: sorted keys, type-stable number formatting, so that
/// parse(serialize(cfg)) == cfg.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a of the canonical serialization, as fixed-width hex.
std::string config_hash(const ExperimentConfig& cfg);

/// Schema check for the named experiment; throws errc::config with the full
/// list of problems.
void validate_config(const ExperimentConfig& cfg);

/// Typed lookups with defaults; wrong types throw errc::config.
double get_double(const Table& t, const std::string& key, std::optional<double> fallback = {});
std::int64_t get_int(const Table& t, const std::string& key, std::optional<std::int64_t> fallback = {});
bool get_bool(const Table& t, const std::string& key, std::optional<bool> fallback = {});
std::string get_string(const Table& t, const std::string& key,
                       std::optional<std::string> fallback = {});
std::vector<double> get_doubles(const Table& t, const std::string& key,
                                std::optional<std::vector<double>> fallback = {});

const Table& section_or_empty(const ExperimentConfig& cfg, const std::string& name);

}  // namespace lab::harness
