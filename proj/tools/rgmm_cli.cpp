// rgmm command-line front end.
//
//   rgmm solve   --problem rayleigh --n 50 --solver rgmm --seed 7
//   rgmm bench   [--suite FILE] [--jobs N] [--out DIR]
//   rgmm profile --in records.csv --metric time --out profile.svg
//   rgmm audit   --problem rayleigh --n 30 --seed 1
//   rgmm check   --show-config | --problem NAME ...
//
// Settings are resolved as: built-in defaults, then --config FILE, then
// flags. RGMM_OUT_DIR sets the output directory when --out is absent.
//
// Exit codes: 0 success, 1 solver failure, 2 usage or input error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rgmm/bench.hpp"
#include "rgmm/config.hpp"
#include "rgmm/errors.hpp"
#include "rgmm/matrix_io.hpp"
#include "rgmm/problems.hpp"
#include "rgmm/profile.hpp"
#include "rgmm/solver.hpp"

namespace fs = std::filesystem;
using namespace rgmm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitUsage = 2;

struct SolverFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> strategy;
  std::optional<double> gamma, delta, c1, c2, lambda_min, lambda_max, lambda0, tol_rel, max_time,
      min_step;
  std::optional<long> max_iter;
  std::optional<std::string> safeguard_eta;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_file, "key = value settings file");
    app.add_option("--strategy", strategy, "BB step: direct | inverse | alternate");
    app.add_option("--gamma", gamma, "Armijo slope fraction");
    app.add_option("--delta", delta, "backtracking factor");
    app.add_option("--c1", c1, "gradient-related lower constant");
    app.add_option("--c2", c2, "gradient-related upper constant");
    app.add_option("--lambda-min", lambda_min, "lower BB clip");
    app.add_option("--lambda-max", lambda_max, "upper BB clip");
    app.add_option("--lambda0", lambda0, "first-iteration scale");
    app.add_option("--tol-rel", tol_rel, "stop at ||g|| <= tol_rel ||g0|| (default 1e-6)");
    app.add_option("--max-iter", max_iter, "iteration budget (default 50000)");
    app.add_option("--max-time", max_time, "time budget in seconds (default 600)");
    app.add_option("--min-step", min_step, "smallest line-search step (default 1e-10)");
    app.add_option("--safeguard-eta", safeguard_eta, "initial-step safeguard: on | off");
  }

  /// Layers the config file and then the flags on top of `config`.
  void apply(SolverConfig& config) const {
    if (config_file) {
      for (const KeyValue& kv : parse_key_values_file(*config_file))
        if (!apply_config_value(config, kv.key, kv.value))
          throw ConfigError(*config_file + ":" + std::to_string(kv.line) + ": unknown key '" +
                            kv.key + "'");
    }
    auto set = [&](const char* key, const auto& v) {
      if (!v) return;
      std::ostringstream s;
      s << std::setprecision(17) << *v;
      apply_config_value(config, key, s.str());
    };
    set("strategy", strategy);
    set("gamma", gamma);
    set("delta", delta);
    set("c1", c1);
    set("c2", c2);
    set("lambda_min", lambda_min);
    set("lambda_max", lambda_max);
    set("lambda0", lambda0);
    set("tol_rel", tol_rel);
    set("max_iter", max_iter);
    set("max_time", max_time);
    set("min_step", min_step);
    set("safeguard_eta", safeguard_eta);
    config.validate();
  }

};

struct ProblemFlags {
  std::string problem = "rayleigh";
  long n = 0, p = 0, m = 0;
  std::uint64_t data_seed = 1;
  std::optional<std::string> data, data_b;

  void add_to(CLI::App& app) {
    app.add_option("--problem", problem, "rayleigh | dis | tsvd | procrustes | maxcut");
    app.add_option("--n", n, "size n");
    app.add_option("--p", p, "size p (subspace dimension or max-cut rank)");
    app.add_option("--m", m, "size m (rows of the tsvd data matrix)");
    app.add_option("--data-seed", data_seed, "seed of the random problem data");
    app.add_option("--data", data, "matrix file replacing random data (A, or L for maxcut)");
    app.add_option("--data-b", data_b, "second matrix file (B for procrustes)");
  }

  Problem build() const {
    if (!data) return make_problem(problem, {n, p, m}, data_seed);
    const Eigen::MatrixXd a = read_matrix_file(*data);
    if (problem == "rayleigh") return rayleigh(a);
    if (problem == "dis") return dominant_invariant_subspace(a, p > 0 ? p : 3);
    if (problem == "tsvd") {
      if (p <= 0) throw InvalidInput("tsvd: --p is required");
      return truncated_svd(a, p);
    }
    if (problem == "maxcut") return maxcut_elliptope(a, p > 0 ? p : 2);
    if (problem == "procrustes") {
      if (!data_b) throw InvalidInput("procrustes: --data-b is required with --data");
      return procrustes(a, read_matrix_file(*data_b));
    }
    throw InvalidInput("unknown problem '" + problem + "'");
  }

  std::string label() const {
    std::string s = problem;
    if (data) return s + " (" + *data + ")";
    if (m > 0) s += " m=" + std::to_string(m);
    if (n > 0) s += " n=" + std::to_string(n);
    if (p > 0) s += " p=" + std::to_string(p);
    return s;
  }
};

std::optional<std::string> output_dir(const std::optional<std::string>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("RGMM_OUT_DIR"); env && *env) return std::string(env);
  return std::nullopt;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_trace_csv(const std::string& path, const RunRecord& r) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "k,f,grad_norm,slope,dir_norm,lambda,eta0,eta,backtracks,branch,f_next\n";
  out << std::setprecision(17);
  for (const TraceEntry& e : r.trace)
    out << e.k << ',' << e.f << ',' << e.grad_norm << ',' << e.slope << ',' << e.dir_norm << ','
        << e.lambda << ',' << e.eta0 << ',' << e.eta << ',' << e.backtracks << ','
        << to_string(e.branch) << ',' << e.f_next << '\n';
  if (!out) throw ConfigError("error writing '" + path + "'");
}

void print_branches(const RunRecord& r) {
  std::cout << "branches:";
  for (std::size_t b = 0; b < kBranchCount; ++b)
    if (r.branch_counts[b] > 0)
      std::cout << ' ' << to_string(static_cast<Branch>(b)) << '=' << r.branch_counts[b];
  std::cout << '\n';
}

void print_record(const RunRecord& r) {
  std::cout << std::setprecision(10);
  std::cout << "termination: " << to_string(r.termination) << '\n'
            << "iterations: " << r.iterations << '\n'
            << "final f: " << r.final_f << '\n'
            << "final ||g||: " << r.final_grad_norm << " (tolerance " << r.epsilon << ", initial "
            << r.initial_grad_norm << ")\n"
            << "function evals: " << r.function_evals << '\n'
            << "gradient evals: " << r.gradient_evals << '\n'
            << "retractions: " << r.retraction_count << '\n'
            << "transports: " << r.transport_count << '\n'
            << "wall time (s): " << r.wall_time << '\n';
  print_branches(r);
}

// solve

struct SolveCommand {
  ProblemFlags problem;
  SolverFlags solver_flags;
  std::string solver = "rgmm";
  std::uint64_t seed = 0;
  std::optional<std::string> out;

  void add_to(CLI::App& app) {
    problem.add_to(app);
    solver_flags.add_to(app);
    app.add_option("--solver", solver, "rgmm | rgd | rbb");
    app.add_option("--seed", seed, "seed of the starting point");
    app.add_option("--out", out, "directory for record.csv, trace.csv and x.txt");
  }

  int run() const {
    SolverConfig config = harness_defaults();
    solver_flags.apply(config);
    const Rule rule = parse_rule(solver);
    const Problem prob = problem.build();
    const Point x0 = prob.manifold().random_point(seed);
    const RunRecord r = solve(prob, x0, config, rule);

    std::cout << "problem: " << problem.label() << " on " << prob.manifold().name() << '\n'
              << "solver: " << to_string(rule) << "  seed: " << seed << '\n';
    print_record(r);
    if (prob.has_oracle()) {
      const double opt = prob.optimum(x0).value;
      std::cout << "oracle f: " << opt << "  relative gap: "
                << std::abs(r.final_f - opt) / std::max(1.0, std::abs(opt)) << '\n';
    }

    if (const auto dir = output_dir(out)) {
      ensure_dir(*dir);
      SuiteRecord sr{prob.name(), rule, seed, r};
      write_records_csv_file(*dir + "/record.csv", {to_csv_record(sr)});
      write_trace_csv(*dir + "/trace.csv", r);
      write_matrix_file(*dir + "/x.txt", r.final_point);
      std::cout << "wrote " << *dir << "/{record.csv,trace.csv,x.txt}\n";
    }
    return r.success() ? kExitOk : kExitSolverFailure;
  }
};

// bench

struct BenchCommand {
  std::optional<std::string> suite;
  std::optional<int> seeds;
  std::optional<std::vector<std::string>> solvers;
  SolverFlags solver_flags;
  int jobs = 1;
  std::optional<std::string> out;

  void add_to(CLI::App& app) {
    app.add_option("--suite", suite, "suite definition file (default: desk-scale suite)");
    app.add_option("--seeds", seeds, "starting points per instance");
    app.add_option("--solver", solvers, "solvers to compare (repeatable)");
    solver_flags.add_to(app);
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output directory (default: $RGMM_OUT_DIR or .)");
  }

  int run() const {
    SuiteDefinition def = suite ? parse_suite_file(*suite) : desk_suite();
    if (seeds) {
      if (*seeds < 1) throw ConfigError("--seeds must be >= 1");
      def.seeds = *seeds;
    }
    if (solvers) {
      def.solvers.clear();
      for (const auto& s : *solvers) def.solvers.push_back(parse_rule(s));
    }
    solver_flags.apply(def.config);
    for (auto& [rule, cfg] : def.overrides) solver_flags.apply(cfg);

    const std::string dir = output_dir(out).value_or(".");
    ensure_dir(dir);
    const auto specs = def.expand();
    std::cout << "running " << specs.size() << " instance starts x " << def.solvers.size()
              << " solvers on " << jobs << " thread(s)\n";
    const SuiteResult res = run_suite(specs, jobs);
    for (const SuiteError& e : res.errors)
      std::cerr << "instance " << e.instance << " seed " << e.seed << ": " << e.message << '\n';

    std::vector<CsvRecord> rows;
    for (const SuiteRecord& r : res.records) rows.push_back(to_csv_record(r));
    write_records_csv_file(dir + "/records.csv", rows);

    std::ostringstream summary;
    summary << std::setprecision(6);
    std::map<std::string, std::pair<long, long>> solved;  // solver -> (successes, runs)
    for (const SuiteRecord& r : res.records) {
      auto& s = solved[to_string(r.solver)];
      s.first += r.record.success();
      ++s.second;
    }
    for (const auto& [name, s] : solved)
      summary << "solver " << name << ": " << s.first << "/" << s.second << " runs converged\n";

    if (!rows.empty()) {
      for (Metric metric : {Metric::time, Metric::iterations, Metric::function_evals,
                            Metric::gradient_evals}) {
        const auto samples = profile_samples(rows, metric);
        const ProfileTable t = performance_profile(samples, to_string(metric), default_tau_grid());
        write_profile_csv_file(dir + "/profile_" + to_string(metric) + ".csv", t);
        write_profile_svg_file(dir + "/profile_" + to_string(metric) + ".svg", t);
        summary << "profile " << to_string(metric) << ":";
        for (std::size_t s = 0; s < t.solvers.size(); ++s)
          summary << ' ' << t.solvers[s] << " pi(1)=" << t.pi(s, 0);
        summary << '\n';
      }
    }
    const SafeguardRates rates = safeguard_rates(res.records);
    summary << "rgmm iterations: " << rates.iterations << '\n'
            << "curvature fallback (<s,y> <= 0): " << rates.curvature_failures << " ("
            << 100 * rates.curvature_rate() << "%)\n"
            << "gradient-related fallback: " << rates.gradient_related_failures << " ("
            << 100 * rates.gradient_related_rate() << "%)\n"
            << "degenerate fallback: " << rates.degenerate << '\n';

    std::cout << summary.str();
    std::ofstream sf(dir + "/summary.txt");
    sf << summary.str();
    if (!sf) throw ConfigError("cannot write '" + dir + "/summary.txt'");
    std::cout << "wrote " << dir << "/{records.csv,profile_*.csv,profile_*.svg,summary.txt}\n";
    return res.errors.empty() ? kExitOk : kExitSolverFailure;
  }
};

// profile

struct ProfileCommand {
  std::string in;
  std::string metric = "time";
  std::optional<std::string> out;

  void add_to(CLI::App& app) {
    app.add_option("--in", in, "records CSV")->required();
    app.add_option("--metric", metric, "time | iterations | function_evals | gradient_evals");
    app.add_option("--out", out, "output .svg or .csv path; the other format is written alongside");
  }

  int run() const {
    const Metric m = parse_metric(metric);
    const auto samples = profile_samples(read_records_csv_file(in), m);
    const ProfileTable t = performance_profile(samples, to_string(m), default_tau_grid());

    const std::vector<double> shown{1, 2, 4, 10, 100};
    const ProfileTable brief = performance_profile(samples, to_string(m), shown);
    std::cout << "metric: " << to_string(m) << "  instances: " << t.instances << '\n';
    for (std::size_t s = 0; s < brief.solvers.size(); ++s) {
      std::cout << brief.solvers[s] << " failures=" << brief.failures[s];
      for (std::size_t i = 0; i < shown.size(); ++i)
        std::cout << " pi(" << shown[i] << ")=" << brief.pi(s, i);
      std::cout << '\n';
    }

    std::string target;
    if (out) {
      target = *out;
    } else if (const auto dir = output_dir(std::nullopt)) {
      target = *dir + "/profile_" + to_string(m) + ".svg";
    }
    if (!target.empty()) {
      fs::path base(target);
      if (base.has_parent_path()) ensure_dir(base.parent_path().string());
      const std::string ext = base.extension().string();
      if (ext == ".svg" || ext == ".csv") base.replace_extension();
      write_profile_svg_file(base.string() + ".svg", t);
      write_profile_csv_file(base.string() + ".csv", t);
      std::cout << "wrote " << base.string() << ".{svg,csv}\n";
    }
    return kExitOk;
  }
};

// audit

struct AuditCommand {
  ProblemFlags problem;
  SolverFlags solver_flags;
  std::string solver = "rgmm";
  std::uint64_t seed = 0;
  int pairs = 20;
  std::optional<double> lipschitz;

  void add_to(CLI::App& app) {
    problem.add_to(app);
    solver_flags.add_to(app);
    app.add_option("--solver", solver, "rgmm | rgd | rbb");
    app.add_option("--seed", seed, "seed of the starting point");
    app.add_option("--pairs", pairs, "random (x, v) pairs for the L estimate");
    app.add_option("--lipschitz", lipschitz, "use this L instead of estimating it");
  }

  int run() const {
    SolverConfig config = harness_defaults();
    solver_flags.apply(config);
    const Problem prob = problem.build();
    const Manifold& man = prob.manifold();
    const Point x0 = man.random_point(seed);
    const RunRecord r = solve(prob, x0, config, parse_rule(solver));

    double lip = 0.0;
    if (lipschitz) {
      lip = *lipschitz;
    } else {
      const auto steps = log_grid(1e-2, 1e-6, 9);
      Rng rng(mix_seed(seed, 0x4c49505343484b));
      for (int i = 0; i < pairs; ++i) {
        const Point x = man.random_point(rng);
        const Tangent v = man.random_tangent(x, rng);
        lip = std::max(lip, finite_difference_check(prob, x, v, steps).lipschitz_estimate);
      }
    }

    std::cout << "problem: " << problem.label() << " on " << man.name() << '\n';
    print_record(r);
    const BacktrackReport bt = backtrack_audit(r.trace, lip, config);
    std::cout << std::setprecision(6) << "backtracking: L=" << bt.lipschitz << " c1_eff=" << bt.constants.c1
              << " c2_eff=" << bt.constants.c2 << " threshold=" << bt.threshold
              << " bound=" << bt.backtrack_bound << " audited=" << bt.audited
              << " skipped=" << bt.skipped << " violations=" << bt.violations.size() << '\n';
    for (const auto& v : bt.violations)
      std::cout << "  k=" << v.k << " backtracks=" << v.observed << " bound=" << v.bound << '\n';

    bool ok = bt.violations.empty();
    std::optional<double> f_low = prob.lower_bound();
    if (prob.has_oracle()) f_low = prob.optimum(x0).value;
    if (f_low) {
      const ComplexityReport c = complexity_audit(r, *f_low, config);
      std::cout << "complexity: f_low=" << *f_low << " iterations=" << c.iterations
                << " sum||g||^2=" << c.sum_grad_sq << " bound=" << c.decrease_bound
                << " sum_ok=" << (c.sum_ok ? "yes" : "no")
                << " count_ok=" << (c.count_ok ? "yes" : "no") << '\n';
      ok = ok && c.passed();
    } else {
      std::cout << "complexity: skipped (no lower bound)\n";
    }
    std::cout << (ok ? "audit passed" : "audit FAILED") << '\n';
    return ok ? kExitOk : kExitSolverFailure;
  }
};

// check

struct CheckCommand {
  bool show_config = false;
  SolverFlags solver_flags;
  ProblemFlags problem;
  int pairs = 20;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    app.add_flag("--show-config", show_config, "print the resolved solver settings");
    solver_flags.add_to(app);
    problem.add_to(app);
    app.add_option("--pairs", pairs, "random (x, v) pairs for the gradient check");
    app.add_option("--seed", seed, "seed of the random pairs");
  }

  int run(const CLI::App& app) const {
    if (show_config || app.count("--problem") == 0) {
      SolverConfig config = harness_defaults();
      solver_flags.apply(config);
      std::cout << format_config(config);
      if (app.count("--problem") == 0) return kExitOk;
    }
    const Problem prob = problem.build();
    const Manifold& man = prob.manifold();
    const auto steps = log_grid(1e-2, 1e-6, 9);
    Rng rng(seed);
    int bad = 0, skipped = 0;
    double worst = 1e300, lip = 0;
    for (int i = 0; i < pairs; ++i) {
      const Point x = man.random_point(rng);
      const Tangent v = man.random_tangent(x, rng);
      const TaylorCheck tc = finite_difference_check(prob, x, v, steps);
      lip = std::max(lip, tc.lipschitz_estimate);
      if (tc.skipped) {
        ++skipped;
        continue;
      }
      worst = std::min(worst, tc.slope);
      bad += tc.slope < 1.9;
    }
    std::cout << "gradient check on " << problem.label() << ": pairs=" << pairs
              << " skipped=" << skipped << " min slope=" << (pairs > skipped ? worst : 0.0)
              << " L estimate=" << lip << (bad ? "  FAILED" : "  ok") << '\n';
    return bad ? kExitSolverFailure : kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian gradient method with momentum: solver, benchmarks and audits"};
  app.require_subcommand(1);

  SolveCommand solve_cmd;
  BenchCommand bench_cmd;
  ProfileCommand profile_cmd;
  AuditCommand audit_cmd;
  CheckCommand check_cmd;

  CLI::App* solve_app = app.add_subcommand("solve", "solve one problem from one starting point");
  solve_cmd.add_to(*solve_app);
  CLI::App* bench_app = app.add_subcommand("bench", "run a suite and emit records and profiles");
  bench_cmd.add_to(*bench_app);
  CLI::App* profile_app = app.add_subcommand("profile", "performance profile of a records CSV");
  profile_cmd.add_to(*profile_app);
  CLI::App* audit_app = app.add_subcommand("audit", "backtrack and complexity audits of one run");
  audit_cmd.add_to(*audit_app);
  CLI::App* check_app = app.add_subcommand("check", "show settings or check a gradient");
  check_cmd.add_to(*check_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve_app) return solve_cmd.run();
    if (*bench_app) return bench_cmd.run();
    if (*profile_app) return profile_cmd.run();
    if (*audit_app) return audit_cmd.run();
    if (*check_app) return check_cmd.run(*check_app);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
