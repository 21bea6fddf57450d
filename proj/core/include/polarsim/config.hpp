#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "polarsim/experiments.hpp"

namespace polarsim {

/// Flat TOML subset: `key = value` lines, '#' comments, values are booleans,
/// integers, floats, basic strings, or one-line arrays of numbers. Tables are
/// rejected.
using ConfigValue = std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;
using ConfigDocument = std::map<std::string, ConfigValue>;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keys understood by experiment_from_document and the CLI.
const std::vector<std::string>& known_config_keys();

/// Throws ConfigError (with the line number) on syntax errors, duplicate or unknown keys.
ConfigDocument parse_config(std::istream& in);
ConfigDocument parse_config_string(std::string_view text);
ConfigDocument parse_config_file(const std::string& path);

/// Parses one value. With `allow_bare_string`, text that is not a TOML
/// literal is taken as a string (for command-line overrides such as ic=sic).
ConfigValue parse_config_value(std::string_view text, bool allow_bare_string = false);

/// Applies "key=value"; the override replaces any value from the file.
void apply_override(ConfigDocument& doc, std::string_view assignment);

/// Canonical TOML text: keys sorted, numbers in shortest round-trip form.
std::string dump_config(const ConfigDocument& doc);

std::optional<double> get_double(const ConfigDocument& doc, const std::string& key);
std::optional<std::int64_t> get_int(const ConfigDocument& doc, const std::string& key);
std::optional<std::string> get_string(const ConfigDocument& doc, const std::string& key);
std::optional<bool> get_bool(const ConfigDocument& doc, const std::string& key);
std::optional<std::vector<double>> get_list(const ConfigDocument& doc, const std::string& key);

/// Builds an experiment; an empirical `graph` path is loaded relative to the
/// working directory. Missing keys keep their ExperimentConfig defaults.
ExperimentConfig experiment_from_document(const ConfigDocument& doc);

/// Inverse of experiment_from_document for the experiment keys.
ConfigDocument document_from_experiment(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical dump (plus the edge list of a fixed graph),
/// as 16 hex digits.
std::string config_digest(const ExperimentConfig& cfg);

}  // namespace polarsim
