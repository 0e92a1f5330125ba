#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rgmm/solver.hpp"

namespace rgmm {

// Flat key-value text: one `key = value` per line, '#' starts a comment,
// blank lines ignored. Keys may repeat; order is preserved.

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<KeyValue> parse_key_values(std::istream& in);
std::vector<KeyValue> parse_key_values_file(const std::string& path);

/// Solver defaults used by the benchmark harness and the CLI: the library
/// defaults plus the relative stopping rule ||g|| <= 1e-6 ||g(x0)||.
SolverConfig harness_defaults();

/// Sets one SolverConfig field by name. Accepts '-' or '_' in keys
/// (lambda-min, lambda_min) and on/off/true/false/1/0 for booleans.
/// Returns false when the key is not a solver setting.
bool apply_config_value(SolverConfig& config, const std::string& key, const std::string& value);

/// Lists every solver setting in parseable `key = value` form.
std::string format_config(const SolverConfig& config);

double parse_double(const std::string& key, const std::string& value);
long parse_long(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);

}  // namespace rgmm
