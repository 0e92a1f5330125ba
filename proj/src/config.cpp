#include "rgmm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rgmm/errors.hpp"

namespace rgmm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (kv.key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<KeyValue> parse_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return parse_key_values(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

SolverConfig harness_defaults() {
  SolverConfig c;
  c.tol_rel = 1e-6;
  return c;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw ConfigError("'" + key + "': expected a number, got '" + value + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != static_cast<double>(static_cast<long>(v)))
    throw ConfigError("'" + key + "': expected an integer, got '" + value + "'");
  return static_cast<long>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("'" + key + "': expected on|off, got '" + value + "'");
}

bool apply_config_value(SolverConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(raw_key);
  auto num = [&](double& field) { field = parse_double(raw_key, value); };
  if (key == "gamma") num(c.gamma);
  else if (key == "delta") num(c.delta);
  else if (key == "epsilon") num(c.epsilon);
  else if (key == "tol_rel") num(c.tol_rel);
  else if (key == "c1") num(c.c1);
  else if (key == "c2") num(c.c2);
  else if (key == "lambda_min") num(c.lambda_min);
  else if (key == "lambda_max") num(c.lambda_max);
  else if (key == "lambda0") num(c.lambda0);
  else if (key == "strategy") c.strategy = parse_strategy(value);
  else if (key == "max_iter") c.max_iter = parse_long(raw_key, value);
  else if (key == "max_time") num(c.max_time_seconds);
  else if (key == "min_step") num(c.min_step_size);
  else if (key == "safeguard_eta") c.safeguard_eta = parse_bool(raw_key, value);
  else if (key == "safeguard_growth") num(c.safeguard_growth);
  else if (key == "safeguard_scale") num(c.safeguard_scale);
  else if (key == "momentum") c.momentum = parse_bool(raw_key, value);
  else if (key == "degeneracy_tol") num(c.degeneracy_tol);
  else return false;
  return true;
}

namespace {

/// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_config(const SolverConfig& c) {
  std::ostringstream out;
  out << "gamma = " << shortest(c.gamma) << '\n'
      << "delta = " << shortest(c.delta) << '\n'
      << "epsilon = " << shortest(c.epsilon) << '\n'
      << "tol_rel = " << shortest(c.tol_rel) << '\n'
      << "c1 = " << shortest(c.c1) << '\n'
      << "c2 = " << shortest(c.c2) << '\n'
      << "lambda_min = " << shortest(c.lambda_min) << '\n'
      << "lambda_max = " << shortest(c.lambda_max) << '\n'
      << "lambda0 = " << shortest(c.lambda0) << '\n'
      << "strategy = " << to_string(c.strategy) << '\n'
      << "max_iter = " << c.max_iter << '\n'
      << "max_time = " << shortest(c.max_time_seconds) << '\n'
      << "min_step = " << shortest(c.min_step_size) << '\n'
      << "safeguard_eta = " << (c.safeguard_eta ? "on" : "off") << '\n'
      << "safeguard_growth = " << shortest(c.safeguard_growth) << '\n'
      << "safeguard_scale = " << shortest(c.safeguard_scale) << '\n'
      << "momentum = " << (c.momentum ? "on" : "off") << '\n'
      << "degeneracy_tol = " << shortest(c.degeneracy_tol) << '\n';
  return out.str();
}

}  // namespace rgmm
