// Acceptance checks. One line per criterion:
//
//   [PASS] 3 oracle convergence: ...
//
// Criterion 8 is reported only. Exit status is 0 iff every asserted
// criterion passes. Artifacts go to argv[1] (default ./acceptance_out).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "rgmm/bench.hpp"
#include "rgmm/problems.hpp"
#include "rgmm/profile.hpp"
#include "rgmm/solver.hpp"
#include "support/test_support.hpp"

using namespace rgmm;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kGeomTol = 1e-12;
constexpr double kMinSlope = 1.9;
constexpr double kPolarTol = 1e-10;
constexpr double kGeomSeconds = 10;
constexpr double kOperatorTol = 1e-12;
constexpr double kSystemTol = 1e-10;
constexpr double kOperatorSeconds = 5;
constexpr double kOracleRelTol = 1e-6;
constexpr double kOracleSeconds = 60;
constexpr double kDeskSeconds = 300;
constexpr int kSeeds = 10;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << "FAILED " << what;
      pass = false;
    }
  }
};

double dot(const Tangent& a, const Tangent& b) { return (a.array() * b.array()).sum(); }

// 1

Outcome geometry() {
  Outcome o;
  const auto start = Clock::now();
  const std::vector<ManifoldPtr> manifolds{
      std::make_shared<Sphere>(8), std::make_shared<Oblique>(5, 6),
      std::make_shared<Stiefel>(8, 3), std::make_shared<Grassmann>(9, 4)};
  double idem = 0, adj = 0, lin = 0, slope = 1e9, polar = 0, horiz = 0;
  for (const auto& m : manifolds) {
    const auto r = test::run_geometry_suite(*m, 100, 20240601);
    idem = std::max(idem, r.idempotence);
    adj = std::max(adj, r.self_adjoint);
    lin = std::max(lin, r.linearity);
    slope = std::min(slope, r.min_slope);
    if (m->kind() == ManifoldKind::stiefel || m->kind() == ManifoldKind::grassmann)
      polar = std::max(polar, r.retract_defect);
    if (m->kind() == ManifoldKind::grassmann) {
      Rng rng(7);
      for (int i = 0; i < 100; ++i) {
        const Point x = m->random_point(rng);
        const Tangent v = m->project(x, rng.gaussian(m->rows(), m->cols()));
        horiz = std::max(horiz, (x.transpose() * v).norm());
      }
    }
  }
  const double secs = seconds_since(start);
  o.require(idem <= kGeomTol, "idempotence");
  o.require(adj <= kGeomTol, "self-adjointness");
  o.require(lin <= kGeomTol, "transport linearity");
  o.require(slope >= kMinSlope, "retraction slope");
  o.require(polar <= kPolarTol, "polar membership");
  o.require(horiz <= kGeomTol, "grassmann horizontality");
  o.require(secs < kGeomSeconds, "runtime");
  o.detail << (o.pass ? "" : " | ") << "4 manifolds x 100 trials, idempotence=" << idem
           << " self_adjoint=" << adj << " linearity=" << lin << " min_slope=" << slope
           << " polar_defect=" << polar << " X^T V=" << horiz << " time=" << secs << "s";
  return o;
}

// 2

Outcome operators() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(99);
  double adj = 0, secant = 0, residual = 0;
  bool positive = true;
  int triples = 0, systems = 0;
  const Stiefel st(6, 3);
  while (triples < 1000) {
    // tangent vectors at a random Stiefel point
    const Point x = st.random_point(rng);
    auto tangent = [&] { return st.project(x, rng.gaussian(6, 3)); };
    const Tangent s = tangent(), u = tangent(), v = tangent(), g = tangent();
    Tangent y = tangent();
    if (dot(s, y) < 0) y = -y;
    if (!(dot(s, y) > 1e-8)) continue;
    ++triples;
    const double lambda = std::exp(rng.uniform() * 8 - 4);
    const double op = 1 / lambda + y.squaredNorm() / dot(s, y);

    const double a1 = dot(u, bfgs_operator_apply(s, y, lambda, v));
    const double a2 = dot(v, bfgs_operator_apply(s, y, lambda, u));
    adj = std::max(adj, std::abs(a1 - a2) / (op * u.norm() * v.norm()));
    positive = positive && dot(u, bfgs_operator_apply(s, y, lambda, u)) > 0;
    secant = std::max(secant, (bfgs_operator_apply(s, y, lambda, s) - y).norm() / y.norm());

    const auto mc = momentum_direction(g, s, y, lambda);
    if (mc.degenerate) continue;
    ++systems;
    const Tangent bg = bfgs_operator_apply(s, y, lambda, g);
    const Tangent bs = bfgs_operator_apply(s, y, lambda, s);
    Eigen::Matrix2d h;
    h << dot(g, bg), -dot(g, bs), -dot(s, bg), dot(s, bs);
    const Eigen::Vector2d rhs(g.squaredNorm(), -dot(g, s));
    residual = std::max(residual, (h * Eigen::Vector2d(mc.alpha, mc.beta) - rhs).norm() / rhs.norm());
  }
  const double secs = seconds_since(start);
  o.require(adj <= kOperatorTol, "self-adjointness");
  o.require(positive, "positive definiteness");
  o.require(secant <= kOperatorTol, "secant equation");
  o.require(systems >= 1000, "momentum trial count");
  o.require(residual <= kSystemTol, "2x2 system residual");
  o.require(secs < kOperatorSeconds, "runtime");
  o.detail << (o.pass ? "" : " | ") << triples << " triples, " << systems
           << " systems, self_adjoint=" << adj << " secant=" << secant
           << " residual=" << residual << " time=" << secs << "s";
  return o;
}

// 3 and 4

struct OracleCase {
  std::string kind;
  ProblemSize size;
};

struct OracleRun {
  std::string label;
  RunRecord record;
  double oracle = 0;
};

std::vector<OracleRun> oracle_runs(double& seconds) {
  const std::vector<OracleCase> cases{{"rayleigh", {50, 0, 0}},
                                      {"rayleigh", {100, 0, 0}},
                                      {"dis", {128, 3, 0}},
                                      {"tsvd", {60, 5, 42}},
                                      {"procrustes", {100, 10, 0}}};
  std::vector<OracleRun> runs;
  const SolverConfig config = harness_defaults();
  const auto start = Clock::now();
  for (const auto& c : cases) {
    const Problem p = make_problem(c.kind, c.size, 4242);
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      const Point x0 = p.manifold().random_point(mix_seed(4242, seed));
      OracleRun r;
      r.label = p.name() + " " + p.manifold().name() + " seed " + std::to_string(seed);
      r.record = solve(p, x0, config, Rule::rgmm);
      runs.push_back(std::move(r));
      runs.back().oracle = p.optimum(x0).value;
    }
  }
  seconds = seconds_since(start);
  return runs;
}

Outcome oracle_convergence(const std::vector<OracleRun>& runs, double seconds) {
  Outcome o;
  int converged = 0;
  double worst_gap = 0;
  for (const auto& r : runs) {
    const bool ok = r.record.success() &&
                    r.record.final_grad_norm <= 1e-6 * r.record.initial_grad_norm &&
                    r.record.iterations <= 50000;
    converged += ok;
    const double gap = std::abs(r.record.final_f - r.oracle) / std::abs(r.oracle);
    worst_gap = std::max(worst_gap, gap);
    if (!ok) o.require(false, "convergence of " + r.label);
    if (!(gap <= kOracleRelTol)) o.require(false, "objective of " + r.label);
  }
  o.require(seconds < kOracleSeconds, "runtime");
  o.detail << (o.pass ? "" : " | ") << converged << "/" << runs.size()
           << " runs reached ||g|| <= 1e-6 ||g0||, worst relative objective gap=" << worst_gap
           << " time=" << seconds << "s";
  return o;
}

Outcome framework(const std::vector<OracleRun>& runs) {
  Outcome o;
  const SolverConfig config = harness_defaults();
  long iterations = 0;
  int audits = 0;
  for (const auto& r : runs) {
    const RunRecord& rec = r.record;
    long trials = 0;
    bool decrease = true, related = true;
    for (const TraceEntry& e : rec.trace) {
      trials += e.backtracks + 1;
      decrease = decrease && e.f_next <= e.f + config.gamma * e.eta * e.slope;
      related = related && e.slope <= -config.c1 * e.grad_norm * e.grad_norm &&
                e.dir_norm <= config.c2 * e.grad_norm;
    }
    iterations += rec.iterations;
    const bool counts = static_cast<long>(rec.trace.size()) == rec.iterations &&
                        rec.gradient_evals == rec.iterations + 1 &&
                        rec.function_evals == 1 + trials + rec.failed_search_trials &&
                        rec.retraction_count == trials + rec.failed_search_trials;
    const ComplexityReport cr = complexity_audit(rec, r.oracle, config);
    audits += cr.passed();
    if (!decrease) o.require(false, "Armijo decrease in " + r.label);
    if (!related) o.require(false, "gradient-related test in " + r.label);
    if (!counts) o.require(false, "evaluation identities in " + r.label);
    if (!cr.passed()) o.require(false, "complexity audit in " + r.label);
  }
  o.detail << (o.pass ? "" : " | ") << runs.size() << " runs, " << iterations
           << " iterations checked, complexity audits passed " << audits << "/" << runs.size();
  return o;
}

// 5

Outcome backtrack_bound() {
  Outcome o;
  Rng data(5);
  Eigen::MatrixXd a = random_symmetric(40, data);
  // shift to spectrum [1, ...] so the problem is a strongly convex quadratic
  a += (1.0 - Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues()(0)) *
       Eigen::MatrixXd::Identity(40, 40);
  const Problem p = rayleigh(a);
  SolverConfig config = harness_defaults();
  config.safeguard_eta = false;
  const auto steps = log_grid(1e-2, 1e-6, 9);
  long audited = 0, skipped = 0, violations = 0;
  double lip_max = 0;
  int max_backtracks = 0, max_bound = 0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    double lip = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto [x, v] = test::random_pair(p.manifold(), mix_seed(seed, s));
      lip = std::max(lip, finite_difference_check(p, x, v, steps).lipschitz_estimate);
    }
    lip_max = std::max(lip_max, lip);
    const RunRecord r = solve(p, p.manifold().random_point(mix_seed(77, seed)), config, Rule::rgmm);
    const BacktrackReport rep = backtrack_audit(r.trace, lip, config);
    audited += rep.audited;
    skipped += rep.skipped;
    violations += static_cast<long>(rep.violations.size());
    max_bound = std::max(max_bound, rep.backtrack_bound);
    for (const auto& e : r.trace) max_backtracks = std::max(max_backtracks, e.backtracks);
    o.require(r.success(), "convergence seed " + std::to_string(seed));
  }
  o.require(violations == 0, "backtrack bound");
  o.require(skipped == 0, "every iteration audited");
  o.detail << (o.pass ? "" : " | ") << "10 seeds, " << audited << " iterations audited, L<=" << lip_max
           << ", max backtracks=" << max_backtracks << " bound<=" << max_bound
           << ", violations=" << violations;
  return o;
}

// 6

IterState history_state(const Tangent& g, const Tangent& prev_g, const Tangent& prev_d) {
  IterState st;
  st.x = Eigen::MatrixXd::Zero(g.rows(), 1);
  st.prev_x = st.x;
  st.g = g;
  st.grad_norm = g.norm();
  st.k = 1;
  st.prev_g = prev_g;
  st.prev_d = prev_d;
  st.prev_eta = 1.0;
  return st;
}

Outcome safeguards() {
  Outcome o;
  const test::Euclidean e(3);
  EvalCounters counters;
  Rng rng(6);
  int curvature_ok = 0, related_ok = 0, cases = 0;
  for (int i = 0; i < 100; ++i, ++cases) {
    // <s,y> <= 0: take y = g - prev_g, then flip prev_d to the non-positive side
    const Tangent g = rng.gaussian(3, 1), prev_g = rng.gaussian(3, 1);
    Tangent prev_d = rng.gaussian(3, 1);
    if (dot(prev_d, g - prev_g) > 0) prev_d = -prev_d;
    const SolverConfig config = harness_defaults();
    const Direction d = compute_direction(e, history_state(g, prev_g, prev_d), config, Rule::rgmm, counters);
    curvature_ok += d.diagnostics.branch == Branch::curvature_fallback &&
                    (d.d + config.lambda_max * g).norm() == 0.0;

    // constants pinned to 1: only -g passes, the momentum direction does not
    SolverConfig tight = harness_defaults();
    tight.c1 = tight.lambda_min = tight.lambda0 = tight.lambda_max = tight.c2 = 1.0;
    Tangent pd = rng.gaussian(3, 1);
    if (dot(pd, g - prev_g) < 0) pd = -pd;
    const IterState st = history_state(g, prev_g, pd);
    const Direction t = compute_direction(e, st, tight, Rule::rgmm, counters);
    const auto mc = momentum_direction(g, pd, g - prev_g, t.diagnostics.lambda);
    const bool expect_fallback = !mc.degenerate && !check_gradient_related(g, mc.d, 1.0, 1.0);
    related_ok += expect_fallback && t.diagnostics.branch == Branch::gradient_related_fallback &&
                  (t.d + t.diagnostics.lambda * g).norm() == 0.0;
  }
  o.require(curvature_ok == cases, "curvature fallback d = -lambda_max g");
  o.require(related_ok == cases, "gradient-related fallback d = -lambda_k g");
  o.detail << (o.pass ? "" : " | ") << "curvature " << curvature_ok << "/" << cases
           << ", gradient-related " << related_ok << "/" << cases;
  return o;
}

// 7 and 8

bool profile_properties(std::string& why) {
  // hand-computed fixture: S1 costs (1,4), S2 costs (2,2)
  const std::vector<ProfileSample> fixture{
      {"P1", "S1", 1, true}, {"P1", "S2", 2, true}, {"P2", "S1", 4, true}, {"P2", "S2", 2, true}};
  const ProfileTable t = performance_profile(fixture, "time", {1.0, 2.0});
  if (!(t.solved == std::vector<std::vector<long>>{{1, 2}, {1, 2}} && t.instances == 2 &&
        t.pi(0, 0) == 0.5 && t.pi(1, 0) == 0.5 && t.pi(0, 1) == 1.0 && t.pi(1, 1) == 1.0)) {
    why = "fixture";
    return false;
  }
  Rng rng(7);
  const auto grid = default_tau_grid();
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ProfileSample> s;
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 3; ++k)
        s.push_back({"i" + std::to_string(i), "s" + std::to_string(k),
                     1 + std::floor(rng.uniform() * 50), rng.uniform() > 0.25});
    const ProfileTable a = performance_profile(s, "x", grid);
    std::set<std::string> solved;
    for (const auto& x : s)
      if (x.success) solved.insert(x.instance);
    long at_one = 0;
    for (std::size_t k = 0; k < a.solvers.size(); ++k) {
      long succ = 0;
      for (const auto& x : s) succ += x.solver == a.solvers[k] && x.success;
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (a.solved[k][i] < a.solved[k][i - 1]) {
          why = "monotonicity";
          return false;
        }
      if (a.solved[k].back() != succ || a.failures[k] != 6 - succ) {
        why = "failure handling";
        return false;
      }
      at_one += a.solved[k][0];
    }
    if (at_one < static_cast<long>(solved.size())) {
      why = "tie coverage";
      return false;
    }
    for (auto& x : s)
      if (x.solver == "s1") x.cost = std::max(1.0, x.cost / 2);
    const ProfileTable b = performance_profile(s, "x", grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (b.solved[1][i] < a.solved[1][i]) {
        why = "perturbation";
        return false;
      }
  }
  return true;
}

Outcome profiles(const fs::path& out_dir, std::vector<SuiteRecord>& desk_records) {
  Outcome o;
  std::string why;
  o.require(profile_properties(why), "profile property: " + why);

  const auto start = Clock::now();
  const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const SuiteResult res = run_suite(desk_suite().expand(), jobs);
  const double secs = seconds_since(start);
  desk_records = res.records;
  o.require(res.errors.empty(), "desk suite instance construction");
  o.require(secs < kDeskSeconds, "desk suite runtime");

  std::vector<CsvRecord> rows;
  for (const auto& r : res.records) rows.push_back(to_csv_record(r));
  fs::create_directories(out_dir);
  const std::string records_path = (out_dir / "desk_records.csv").string();
  write_records_csv_file(records_path, rows);
  const auto back = read_records_csv_file(records_path);
  o.require(back.size() == rows.size() && rows.size() == 240, "records CSV round trip");

  std::map<std::string, int> converged;
  for (Metric m : {Metric::time, Metric::iterations, Metric::function_evals, Metric::gradient_evals}) {
    const ProfileTable t = performance_profile(profile_samples(back, m), to_string(m), default_tau_grid());
    const std::string stem = (out_dir / ("desk_profile_" + to_string(m))).string();
    write_profile_csv_file(stem + ".csv", t);
    write_profile_svg_file(stem + ".svg", t);
    std::ifstream csv(stem + ".csv");
    o.require(read_profile_csv(csv) == t, "profile CSV round trip (" + to_string(m) + ")");
    std::ifstream svg_in(stem + ".svg");
    const std::string svg((std::istreambuf_iterator<char>(svg_in)), {});
    std::size_t lines = 0;
    for (auto p = svg.find("<polyline class=\"profile\""); p != std::string::npos;
         p = svg.find("<polyline class=\"profile\"", p + 1))
      ++lines;
    o.require(svg.rfind("<svg", 0) == 0 && svg.find("</svg>") != std::string::npos &&
                  svg.find("class=\"legend\"") != std::string::npos && lines == t.solvers.size(),
              "SVG element set (" + to_string(m) + ")");
  }
  for (const auto& r : res.records) converged[to_string(r.solver)] += r.record.success();
  o.detail << (o.pass ? "" : " | ") << "fixture exact, 300 random tables ok, desk suite "
           << res.records.size() << " runs in " << secs << "s (converged:";
  for (const auto& [name, n] : converged) o.detail << ' ' << name << '=' << n;
  o.detail << "), artifacts in " << out_dir.string();
  return o;
}

std::string echo_rates(const std::vector<SuiteRecord>& records, const fs::path& out_dir) {
  const SafeguardRates r = safeguard_rates(records);
  std::ostringstream s;
  s << std::setprecision(4) << "rgmm iterations=" << r.iterations
    << ", <s,y> <= 0: " << r.curvature_failures << " (" << 100 * r.curvature_rate() << "%)"
    << ", gradient-related failures: " << r.gradient_related_failures << " ("
    << 100 * r.gradient_related_rate() << "%)"
    << ", degenerate: " << r.degenerate << "; reference level for violations: below 0.5%";
  std::ofstream f(out_dir / "safeguard_rates.txt");
  f << s.str() << '\n';
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  bool all = true;
  std::cout << std::setprecision(3);
  auto report = [&](int id, const std::string& name, const Outcome& o) {
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << ' ' << name << ": " << o.detail.str()
              << std::endl;
    all = all && o.pass;
  };
  auto guarded = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    try {
      report(id, name, fn());
    } catch (const std::exception& e) {
      Outcome o;
      o.require(false, std::string("exception: ") + e.what());
      report(id, name, o);
    }
  };

  guarded(1, "geometry suite", geometry);
  guarded(2, "operator suite", operators);
  double oracle_secs = 0;
  std::vector<OracleRun> runs;
  guarded(3, "oracle convergence", [&] {
    runs = oracle_runs(oracle_secs);
    return oracle_convergence(runs, oracle_secs);
  });
  guarded(4, "framework guarantees", [&] { return framework(runs); });
  guarded(5, "backtrack bound audit", backtrack_bound);
  guarded(6, "safeguard branches", safeguards);
  std::vector<SuiteRecord> desk;
  guarded(7, "performance profiles", [&] { return profiles(out_dir, desk); });
  std::cout << "[REPORT] 8 safeguard rates on the desk suite: " << echo_rates(desk, out_dir)
            << std::endl;
  std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
  return all ? 0 : 1;
}
