#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rgmm/manifold.hpp"
#include "rgmm/problems.hpp"

namespace rgmm {

/// Barzilai-Borwein step formula used for lambda_k.
enum class Strategy {
  direct,    // BB1 = ||s||^2 / <s,y>
  inverse,   // BB2 = <s,y> / ||y||^2
  alternate  // BB1 on even k, BB2 on odd k
};

/// Direction rule plugged into the gradient-related framework.
enum class Rule {
  rgmm,  // momentum direction from the memoryless-BFGS 2D subproblem
  rgd,   // d = -g
  rbb    // d = -lambda_k g, monotone Armijo
};

enum class Termination { gradient_tolerance, max_iter, max_time, min_step };

enum class Branch {
  first_iter,
  curvature_fallback,
  momentum,
  gradient_related_fallback,
  degenerate_fallback,
  steepest_descent,  // rgd
  spectral,          // rbb, <s,y> > 0
};
inline constexpr std::size_t kBranchCount = 7;

std::string to_string(Strategy s);
std::string to_string(Rule r);
std::string to_string(Termination t);
std::string to_string(Branch b);
Strategy parse_strategy(const std::string& s);
Rule parse_rule(const std::string& s);
Termination parse_termination(const std::string& s);

struct SolverConfig {
  double gamma = 1e-4;  // Armijo slope fraction
  double delta = 0.5;   // backtracking factor
  /// Absolute gradient tolerance, used when tol_rel == 0.
  double epsilon = 1e-6;
  /// When > 0 the run stops at ||g|| <= tol_rel * ||g(x0)||.
  double tol_rel = 0.0;
  double c1 = 1e-9;
  double c2 = 1e9;
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  double lambda0 = 1.0;
  Strategy strategy = Strategy::direct;
  long max_iter = 50000;
  double max_time_seconds = 600.0;
  double min_step_size = 1e-10;
  /// Shrink the first line-search trial when ||d_k|| jumps: if
  /// ||d_k|| > safeguard_growth * eta_{k-1} ||d_{k-1}|| then the first trial
  /// is eta0 = min(1, safeguard_scale * eta_{k-1} ||d_{k-1}|| / ||d_k||).
  bool safeguard_eta = true;
  double safeguard_growth = 10.0;
  double safeguard_scale = 2.0;
  /// Disables the momentum term (rgmm then steps along -lambda0 g).
  bool momentum = true;
  /// Relative floor on ||g||^2 - <g,s>^2/||s||^2 below which g and s are
  /// treated as collinear.
  double degeneracy_tol = 1e-14;
  bool record_trace = true;

  /// Throws ConfigError unless 0 < c1 <= lambda_min <= lambda0 <= lambda_max
  /// <= c2, gamma and delta lie in (0, 1), and budgets are non-negative.
  void validate() const;
};

struct EvalCounters {
  long function_evals = 0;
  long gradient_evals = 0;
  long retractions = 0;
  long transports = 0;
};

struct IterState {
  Point x;
  double f = 0.0;
  Tangent g;
  double grad_norm = 0.0;
  long k = 0;
  // previous iterate, meaningful when k > 0
  Point prev_x;
  Tangent prev_d;
  double prev_eta = 0.0;
  Tangent prev_g;
};

struct DirectionDiagnostics {
  Tangent s;  // transported momentum eta_{k-1} d_{k-1}
  Tangent y;  // g_k - T(g_{k-1})
  double sy = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;  // <g, B[g]>
  Branch branch = Branch::first_iter;
  /// Whether the direction proposed before any fallback passed the
  /// gradient-related test. False only on gradient_related_fallback.
  bool grad_related_ok = true;
};

struct Direction {
  Tangent d;
  DirectionDiagnostics diagnostics;
};

struct TraceEntry {
  long k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double slope = 0.0;     // <g_k, d_k>
  double dir_norm = 0.0;  // ||d_k||
  double lambda = 0.0;
  double eta0 = 1.0;
  double eta = 0.0;
  int backtracks = 0;
  Branch branch = Branch::first_iter;
  double f_next = 0.0;
};

struct RunRecord {
  Rule rule = Rule::rgmm;
  long iterations = 0;
  long function_evals = 0;
  long gradient_evals = 0;
  long retraction_count = 0;
  long transport_count = 0;
  double wall_time = 0.0;
  Termination termination = Termination::gradient_tolerance;
  double epsilon = 0.0;  // tolerance actually applied
  double initial_f = 0.0;
  double initial_grad_norm = 0.0;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  Point final_point;
  /// Trial evaluations of a line search that hit min_step without accepting.
  int failed_search_trials = 0;
  std::array<long, kBranchCount> branch_counts{};
  std::vector<TraceEntry> trace;

  bool success() const { return termination == Termination::gradient_tolerance; }
  long count(Branch b) const { return branch_counts[static_cast<std::size_t>(b)]; }
};

// Inner products below are the Frobenius (inherited) metric: all supported
// manifolds are Riemannian submanifolds of a matrix space.

double evaluate_cost(const Problem& problem, const Point& x, EvalCounters& counters);

/// Proj_x(euclidean_gradient(x)); counts one gradient evaluation.
Tangent riemannian_gradient(const Problem& problem, const Point& x, EvalCounters* counters = nullptr);

struct ArmijoResult {
  double eta = 0.0;
  int backtracks = 0;
  double f_new = 0.0;
  Point x_new;
  /// False when the trial step shrank below min_step before acceptance.
  bool accepted = false;
  int trials = 0;
};

/// Backtracking from eta0 until f(R_x(eta d)) <= f_x + gamma eta <g,d>.
/// Every trial costs one function evaluation and one retraction. Gives up
/// when the next trial step eta ||d|| would fall below min_step.
ArmijoResult armijo(const Problem& problem, const Point& x, double f_x, const Tangent& g,
                    const Tangent& d, double eta0, double gamma, double delta, double min_step,
                    EvalCounters& counters);

/// Clipped Barzilai-Borwein scale; requires <s,y> > 0.
double lambda_bb(const Tangent& s, const Tangent& y, Strategy strategy, long k, double lambda_min,
                 double lambda_max);

struct MomentumCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  Tangent d;
  bool degenerate = false;  // g and s (numerically) collinear; d is empty
};

/// Closed-form minimizer (alpha, beta) of the 2D model with the scaled
/// memoryless BFGS operator, and d = -alpha g + beta s. Requires <s,y> > 0.
MomentumCoefficients momentum_direction(const Tangent& g, const Tangent& s, const Tangent& y,
                                        double lambda, double degeneracy_tol = 1e-14);

/// B[v] = (v - <s,v>/||s||^2 s) / lambda + <y,v>/<s,y> y.
Tangent bfgs_operator_apply(const Tangent& s, const Tangent& y, double lambda, const Tangent& v);

/// <g,d> <= -c1 ||g||^2 and ||d|| <= c2 ||g||.
bool check_gradient_related(const Tangent& g, const Tangent& d, double c1, double c2);

/// Evaluates f and grad f at x0 and builds the k = 0 state.
IterState initial_state(const Problem& problem, const Point& x0, EvalCounters& counters);

/// Direction for the current state. Costs two transports when k > 0 and
/// the rule uses history; never evaluates f or grad f.
Direction compute_direction(const Manifold& manifold, const IterState& state,
                            const SolverConfig& config, Rule rule, EvalCounters& counters);

/// First line-search trial, with the optional jump safeguard.
double initial_step(const IterState& state, double dir_norm, const SolverConfig& config);

struct StepResult {
  IterState next;
  DirectionDiagnostics diagnostics;
  TraceEntry entry;
  /// Set when the line search failed; next is then a copy of the input.
  std::optional<Termination> stop;
  int trials = 0;
};

StepResult step(const Problem& problem, const IterState& state, const SolverConfig& config,
                Rule rule, EvalCounters& counters);

inline StepResult rgmm_step(const Problem& problem, const IterState& state,
                            const SolverConfig& config, EvalCounters& counters) {
  return step(problem, state, config, Rule::rgmm, counters);
}

RunRecord solve(const Problem& problem, const Point& x0, const SolverConfig& config, Rule rule);

// Diagnostics for the convergence theory.

struct EmpiricalConstants {
  double c1 = 0.0;  // min_k -<g_k,d_k> / ||g_k||^2
  double c2 = 0.0;  // max_k ||d_k|| / ||g_k||
  double eta_min = 0.0;
};

EmpiricalConstants empirical_constants(const std::vector<TraceEntry>& trace);

struct BacktrackViolation {
  long k = 0;
  int observed = 0;
  int bound = 0;
};

struct BacktrackReport {
  EmpiricalConstants constants;
  double lipschitz = 0.0;
  /// (2 / L)(1 - gamma) c1 / c2^2; >= 1 means no backtracking is needed.
  double threshold = 0.0;
  int backtrack_bound = 0;
  long audited = 0;
  long skipped = 0;  // iterations whose first trial was not eta = 1
  std::vector<BacktrackViolation> violations;
};

/// Compares observed backtracks with the worst-case count implied by a
/// Lipschitz-type constant L of f composed with the retraction:
/// zero when L <= 2(1-gamma) c1/c2^2, else floor(log_delta(threshold)) + 1.
BacktrackReport backtrack_audit(const std::vector<TraceEntry>& trace, double lipschitz,
                          const SolverConfig& config);

struct ComplexityReport {
  EmpiricalConstants constants;
  long iterations = 0;          // number of iterations with ||g_k|| > eps
  double sum_grad_sq = 0.0;     // sum over those iterations of ||g_k||^2
  double decrease_bound = 0.0;  // (f(x0) - f_low) / (gamma c1 eta_min)
  double epsilon = 0.0;
  bool sum_ok = true;    // sum_grad_sq <= decrease_bound
  bool count_ok = true;  // iterations * eps^2 <= sum_grad_sq
  bool passed() const { return sum_ok && count_ok; }
};

/// Checks the worst-case complexity chain on a finished run using its
/// empirical gradient-related constants and smallest accepted step.
ComplexityReport complexity_audit(const RunRecord& record, double f_low, const SolverConfig& config);

}  // namespace rgmm
