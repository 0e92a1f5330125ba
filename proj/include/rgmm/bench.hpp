#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rgmm/config.hpp"
#include "rgmm/problems.hpp"
#include "rgmm/profile.hpp"
#include "rgmm/solver.hpp"

namespace rgmm {

/// One problem instance solved from one random starting point by every
/// listed solver. All solvers start from the same x0.
struct InstanceSpec {
  std::string problem;
  ProblemSize size;
  std::uint64_t data_seed = 0;  // problem data
  std::uint64_t seed = 0;       // starting point
  std::vector<Rule> solvers;
  SolverConfig config = harness_defaults();
  std::map<Rule, SolverConfig> overrides;  // replaces config for that solver

  /// Stable name of the problem instance, e.g. "dis_n128_p3".
  std::string instance_id() const;
  const SolverConfig& config_for(Rule rule) const;
  Point starting_point(const Manifold& manifold) const;

};

struct SuiteRecord {
  std::string instance;
  Rule solver = Rule::rgmm;
  std::uint64_t seed = 0;
  RunRecord record;
};

struct SuiteError {
  std::string instance;
  std::uint64_t seed = 0;
  std::string message;
};

struct SuiteResult {
  std::vector<SuiteRecord> records;  // sorted by (instance, solver, seed)
  std::vector<SuiteError> errors;
};

/// Runs every spec with up to `jobs` worker threads. Output does not depend
/// on scheduling except for wall times. A spec whose problem cannot be built
/// is reported in errors and skipped.
SuiteResult run_suite(const std::vector<InstanceSpec>& specs, int jobs);

/// Suite definition file (key-value format):
///
///   solvers = rgmm, rgd, rbb
///   seeds = 10                  # starting points per instance
///   seed = 1                    # base seed
///   problem = dis n=128 p=3     # repeatable
///   problem = tsvd m=42 n=60 p=5
///   max_iter = 50000            # any solver setting, all solvers
///   rbb.strategy = alternate    # per-solver setting
struct SuiteDefinition {
  std::vector<Rule> solvers{Rule::rgmm, Rule::rgd, Rule::rbb};
  int seeds = 10;
  std::uint64_t base_seed = 1;
  std::vector<std::pair<std::string, ProblemSize>> problems;
  SolverConfig config = harness_defaults();
  std::map<Rule, SolverConfig> overrides;

  std::vector<InstanceSpec> expand() const;
};

SuiteDefinition parse_suite(std::istream& in);
SuiteDefinition parse_suite_file(const std::string& path);
/// Parses "dis n=128 p=3".
std::pair<std::string, ProblemSize> parse_problem_line(const std::string& text);

/// The desk-scale comparison: dis n in {128, 500}, tsvd (42x60, p=5) and
/// (60x100, p=7), maxcut rank 2 n in {20, 100}, procrustes (100x10) and
/// (500x15); 10 seeds; rgmm, rgd, rbb.
SuiteDefinition desk_suite();

// Records CSV, fixed column order:
//   instance,solver,seed,iterations,fevals,gevals,retractions,wall_time_s,termination
// The profile instance key is "<instance>#<seed>".

struct CsvRecord {
  std::string instance;
  std::string solver;
  std::uint64_t seed = 0;
  long iterations = 0;
  long fevals = 0;
  long gevals = 0;
  long retractions = 0;
  double wall_time_s = 0.0;
  Termination termination = Termination::gradient_tolerance;
};

CsvRecord to_csv_record(const SuiteRecord& r);
void write_records_csv(std::ostream& out, const std::vector<CsvRecord>& records);
void write_records_csv_file(const std::string& path, const std::vector<CsvRecord>& records);
std::vector<CsvRecord> read_records_csv(std::istream& in);
std::vector<CsvRecord> read_records_csv_file(const std::string& path);

enum class Metric { time, iterations, function_evals, gradient_evals };
std::string to_string(Metric m);
Metric parse_metric(const std::string& s);

std::vector<ProfileSample> profile_samples(const std::vector<CsvRecord>& records, Metric metric);

/// How often the RGMM safeguards fired across a set of runs.
struct SafeguardRates {
  long iterations = 0;
  long curvature_failures = 0;       // <s,y> <= 0
  long gradient_related_failures = 0;
  long degenerate = 0;
  double curvature_rate() const;
  double gradient_related_rate() const;
};

SafeguardRates safeguard_rates(const std::vector<SuiteRecord>& records);

}  // namespace rgmm
