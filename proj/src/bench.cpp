#include "rgmm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "rgmm/errors.hpp"

namespace rgmm {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

std::string InstanceSpec::instance_id() const {
  std::string id = problem;
  if (size.m > 0) id += "_m" + std::to_string(size.m);
  if (size.n > 0) id += "_n" + std::to_string(size.n);
  if (size.p > 0) id += "_p" + std::to_string(size.p);
  return id;
}

const SolverConfig& InstanceSpec::config_for(Rule rule) const {
  auto it = overrides.find(rule);
  return it == overrides.end() ? config : it->second;
}

Point InstanceSpec::starting_point(const Manifold& manifold) const {
  return manifold.random_point(mix_seed(data_seed, seed));
}

SuiteResult run_suite(const std::vector<InstanceSpec>& specs, int jobs) {
  SuiteResult result;
  std::vector<std::vector<SuiteRecord>> slots(specs.size());
  std::vector<std::optional<SuiteError>> failures(specs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      const InstanceSpec& spec = specs[i];
      try {
        const Problem problem = make_problem(spec.problem, spec.size, spec.data_seed);
        const Point x0 = spec.starting_point(problem.manifold());
        for (Rule rule : spec.solvers) {
          SolverConfig cfg = spec.config_for(rule);
          cfg.record_trace = false;
          slots[i].push_back(
              {spec.instance_id(), rule, spec.seed, solve(problem, x0, cfg, rule)});
        }
      } catch (const Error& e) {
        slots[i].clear();
        failures[i] = SuiteError{spec.instance_id(), spec.seed, e.what()};
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(specs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (auto& r : slots[i]) result.records.push_back(std::move(r));
    if (failures[i]) result.errors.push_back(*failures[i]);
  }
  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(a.instance, to_string(a.solver), a.seed) <
           std::make_tuple(b.instance, to_string(b.solver), b.seed);
  });
  return result;
}

std::pair<std::string, ProblemSize> parse_problem_line(const std::string& text) {
  std::istringstream in(text);
  std::pair<std::string, ProblemSize> out;
  if (!(in >> out.first)) throw ConfigError("problem line is empty");
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("problem size '" + tok + "' is not key=value");
    const std::string k = tok.substr(0, eq);
    const long v = parse_long(k, tok.substr(eq + 1));
    if (v <= 0) throw ConfigError("problem size '" + tok + "' must be positive");
    if (k == "n") out.second.n = v;
    else if (k == "p") out.second.p = v;
    else if (k == "m") out.second.m = v;
    else throw ConfigError("unknown size parameter '" + k + "'");
  }
  return out;
}

SuiteDefinition parse_suite(std::istream& in) {
  SuiteDefinition def;
  def.problems.clear();
  std::vector<std::pair<Rule, KeyValue>> per_solver;
  for (const KeyValue& kv : parse_key_values(in)) {
    auto where = [&] { return "suite line " + std::to_string(kv.line) + ": "; };
    try {
      if (kv.key == "solvers") {
        def.solvers.clear();
        for (const std::string& s : split(kv.value, ',')) def.solvers.push_back(parse_rule(trim(s)));
      } else if (kv.key == "seeds") {
        def.seeds = static_cast<int>(parse_long(kv.key, kv.value));
      } else if (kv.key == "seed") {
        def.base_seed = static_cast<std::uint64_t>(parse_long(kv.key, kv.value));
      } else if (kv.key == "problem") {
        def.problems.push_back(parse_problem_line(kv.value));
      } else if (const auto dot = kv.key.find('.'); dot != std::string::npos) {
        per_solver.emplace_back(parse_rule(kv.key.substr(0, dot)),
                                KeyValue{kv.key.substr(dot + 1), kv.value, kv.line});
      } else if (!apply_config_value(def.config, kv.key, kv.value)) {
        throw ConfigError("unknown key '" + kv.key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }
  // per-solver settings layer on top of the suite-wide ones
  for (const auto& [rule, kv] : per_solver) {
    auto [it, fresh] = def.overrides.emplace(rule, def.config);
    if (!apply_config_value(it->second, kv.key, kv.value))
      throw ConfigError("suite line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
  }
  if (def.seeds < 1) throw ConfigError("suite: seeds must be >= 1");
  if (def.solvers.empty()) throw ConfigError("suite: no solvers");
  def.config.validate();
  for (const auto& [rule, cfg] : def.overrides) cfg.validate();
  return def;
}

SuiteDefinition parse_suite_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open suite file '" + path + "'");
  try {
    return parse_suite(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<InstanceSpec> SuiteDefinition::expand() const {
  std::vector<InstanceSpec> specs;
  for (const auto& [name, size] : problems) {
    InstanceSpec base;
    base.problem = name;
    base.size = size;
    base.data_seed = mix_seed(base_seed, fnv1a(base.instance_id()));
    base.solvers = solvers;
    base.config = config;
    base.overrides = overrides;
    for (int s = 0; s < seeds; ++s) {
      InstanceSpec spec = base;
      spec.seed = base_seed + static_cast<std::uint64_t>(s);
      specs.push_back(std::move(spec));
    }
  }
  return specs;
}

SuiteDefinition desk_suite() {
  SuiteDefinition def;
  def.problems = {
      {"dis", {128, 3, 0}},         {"dis", {500, 3, 0}},
      {"tsvd", {60, 5, 42}},        {"tsvd", {100, 7, 60}},
      {"maxcut", {20, 2, 0}},       {"maxcut", {100, 2, 0}},
      {"procrustes", {100, 10, 0}}, {"procrustes", {500, 15, 0}},
  };
  return def;
}

CsvRecord to_csv_record(const SuiteRecord& r) {
  return {r.instance,
          to_string(r.solver),
          r.seed,
          r.record.iterations,
          r.record.function_evals,
          r.record.gradient_evals,
          r.record.retraction_count,
          r.record.wall_time,
          r.record.termination};
}

static const char* kCsvHeader =
    "instance,solver,seed,iterations,fevals,gevals,retractions,wall_time_s,termination";

void write_records_csv(std::ostream& out, const std::vector<CsvRecord>& records) {
  out << kCsvHeader << '\n';
  std::vector<CsvRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.instance, a.solver, a.seed) < std::tie(b.instance, b.solver, b.seed);
  });
  for (const CsvRecord& r : sorted) {
    out << r.instance << ',' << r.solver << ',' << r.seed << ',' << r.iterations << ','
        << r.fevals << ',' << r.gevals << ',' << r.retractions << ',' << std::setprecision(9)
        << r.wall_time_s << ',' << to_string(r.termination) << '\n';
  }
}

void write_records_csv_file(const std::string& path, const std::vector<CsvRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_records_csv(out, records);
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::vector<CsvRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw ConfigError("records csv: unexpected header");
  std::vector<CsvRecord> out;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 9)
      throw ConfigError("records csv line " + std::to_string(lineno) + ": expected 9 fields");
    try {
      CsvRecord r;
      r.instance = f[0];
      r.solver = f[1];
      r.seed = std::stoull(f[2]);
      r.iterations = std::stol(f[3]);
      r.fevals = std::stol(f[4]);
      r.gevals = std::stol(f[5]);
      r.retractions = std::stol(f[6]);
      r.wall_time_s = std::stod(f[7]);
      r.termination = parse_termination(f[8]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ConfigError("records csv line " + std::to_string(lineno) + ": malformed number");
    } catch (const ConfigError& e) {
      throw ConfigError("records csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CsvRecord> read_records_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return read_records_csv(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::time: return "time";
    case Metric::iterations: return "iterations";
    case Metric::function_evals: return "function_evals";
    case Metric::gradient_evals: return "gradient_evals";
  }
  return "?";
}

Metric parse_metric(const std::string& s) {
  if (s == "time") return Metric::time;
  if (s == "iterations" || s == "iter") return Metric::iterations;
  if (s == "function_evals" || s == "fevals") return Metric::function_evals;
  if (s == "gradient_evals" || s == "gevals") return Metric::gradient_evals;
  throw ConfigError("unknown metric '" + s + "' (time|iterations|fevals|gevals)");
}

std::vector<ProfileSample> profile_samples(const std::vector<CsvRecord>& records, Metric metric) {
  std::vector<ProfileSample> out;
  out.reserve(records.size());
  for (const CsvRecord& r : records) {
    double cost = 0;
    switch (metric) {
      case Metric::time: cost = r.wall_time_s; break;
      case Metric::iterations: cost = static_cast<double>(r.iterations); break;
      case Metric::function_evals: cost = static_cast<double>(r.fevals); break;
      case Metric::gradient_evals: cost = static_cast<double>(r.gevals); break;
    }
    out.push_back({r.instance + "#" + std::to_string(r.seed), r.solver, cost,
                   r.termination == Termination::gradient_tolerance});
  }
  return out;
}

double SafeguardRates::curvature_rate() const {
  return iterations ? static_cast<double>(curvature_failures) / static_cast<double>(iterations) : 0.0;
}

double SafeguardRates::gradient_related_rate() const {
  return iterations ? static_cast<double>(gradient_related_failures) / static_cast<double>(iterations)
                    : 0.0;
}

SafeguardRates safeguard_rates(const std::vector<SuiteRecord>& records) {
  SafeguardRates r;
  for (const SuiteRecord& s : records) {
    if (s.solver != Rule::rgmm) continue;
    r.iterations += s.record.iterations;
    r.curvature_failures += s.record.count(Branch::curvature_fallback);
    r.gradient_related_failures += s.record.count(Branch::gradient_related_fallback);
    r.degenerate += s.record.count(Branch::degenerate_fallback);
  }
  return r;
}

}  // namespace rgmm
