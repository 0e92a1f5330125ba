#include "rgmm/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "rgmm/errors.hpp"

namespace rgmm {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::direct: return "direct";
    case Strategy::inverse: return "inverse";
    case Strategy::alternate: return "alternate";
  }
  return "?";
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::rgmm: return "rgmm";
    case Rule::rgd: return "rgd";
    case Rule::rbb: return "rbb";
  }
  return "?";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::gradient_tolerance: return "gradient_tolerance";
    case Termination::max_iter: return "max_iter";
    case Termination::max_time: return "max_time";
    case Termination::min_step: return "min_step";
  }
  return "?";
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::first_iter: return "first_iter";
    case Branch::curvature_fallback: return "curvature_fallback";
    case Branch::momentum: return "momentum";
    case Branch::gradient_related_fallback: return "gradient_related_fallback";
    case Branch::degenerate_fallback: return "degenerate_fallback";
    case Branch::steepest_descent: return "steepest_descent";
    case Branch::spectral: return "spectral";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "direct") return Strategy::direct;
  if (s == "inverse") return Strategy::inverse;
  if (s == "alternate") return Strategy::alternate;
  throw ConfigError("unknown strategy '" + s + "' (direct|inverse|alternate)");
}

Rule parse_rule(const std::string& s) {
  if (s == "rgmm") return Rule::rgmm;
  if (s == "rgd") return Rule::rgd;
  if (s == "rbb") return Rule::rbb;
  throw ConfigError("unknown solver '" + s + "' (rgmm|rgd|rbb)");
}

Termination parse_termination(const std::string& s) {
  for (auto t : {Termination::gradient_tolerance, Termination::max_iter, Termination::max_time,
                 Termination::min_step})
    if (to_string(t) == s) return t;
  throw ConfigError("unknown termination '" + s + "'");
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("solver config: " + msg); };
  if (!(gamma > 0 && gamma < 1)) fail("gamma must lie in (0, 1)");
  if (!(delta > 0 && delta < 1)) fail("delta must lie in (0, 1)");
  if (!(c1 > 0 && c1 <= lambda_min && lambda_min <= lambda0 && lambda0 <= lambda_max &&
        lambda_max <= c2)) {
    std::ostringstream msg;
    msg << "need 0 < c1 <= lambda_min <= lambda0 <= lambda_max <= c2, got " << c1 << ", "
        << lambda_min << ", " << lambda0 << ", " << lambda_max << ", " << c2;
    fail(msg.str());
  }
  if (!(epsilon >= 0) || !(tol_rel >= 0)) fail("tolerances must be non-negative");
  if (max_iter < 0 || !(max_time_seconds >= 0) || !(min_step_size >= 0))
    fail("budgets must be non-negative");
  if (!(safeguard_growth > 0) || !(safeguard_scale > 0)) fail("safeguard factors must be positive");
  if (!(degeneracy_tol >= 0)) fail("degeneracy_tol must be non-negative");
}

double evaluate_cost(const Problem& problem, const Point& x, EvalCounters& counters) {
  ++counters.function_evals;
  return problem.cost(x);
}

Tangent riemannian_gradient(const Problem& problem, const Point& x, EvalCounters* counters) {
  if (counters) ++counters->gradient_evals;
  return problem.riemannian_gradient(x);
}

ArmijoResult armijo(const Problem& problem, const Point& x, double f_x, const Tangent& g,
                    const Tangent& d, double eta0, double gamma, double delta, double min_step,
                    EvalCounters& counters) {
  const Manifold& m = problem.manifold();
  const double slope = m.inner(x, g, d);
  if (!(slope < 0)) throw ContractViolation("armijo: d is not a descent direction");
  if (!(eta0 > 0 && eta0 <= 1)) throw ContractViolation("armijo: eta0 must lie in (0, 1]");
  const double dnorm = d.norm();

  ArmijoResult out;
  double eta = eta0;
  for (;;) {
    Point trial = m.retract(x, eta * d);
    ++counters.retractions;
    const double f_trial = evaluate_cost(problem, trial, counters);
    ++out.trials;
    // written so that a NaN trial value is rejected
    if (f_trial <= f_x + gamma * eta * slope) {
      out.eta = eta;
      out.f_new = f_trial;
      out.x_new = std::move(trial);
      out.accepted = true;
      return out;
    }
    eta *= delta;
    ++out.backtracks;
    if (eta * dnorm < min_step) {
      out.eta = eta;
      return out;
    }
  }
}

IterState initial_state(const Problem& problem, const Point& x0, EvalCounters& counters) {
  problem.manifold().require_point(x0);
  IterState s;
  s.x = x0;
  s.f = evaluate_cost(problem, x0, counters);
  s.g = riemannian_gradient(problem, x0, &counters);
  s.grad_norm = s.g.norm();
  s.k = 0;
  return s;
}

StepResult step(const Problem& problem, const IterState& state, const SolverConfig& config,
                Rule rule, EvalCounters& counters) {
  const Manifold& m = problem.manifold();
  Direction dir = compute_direction(m, state, config, rule, counters);

  StepResult out;
  TraceEntry& e = out.entry;
  e.k = state.k;
  e.f = state.f;
  e.grad_norm = state.grad_norm;
  e.slope = m.inner(state.x, state.g, dir.d);
  e.dir_norm = dir.d.norm();
  e.lambda = dir.diagnostics.lambda;
  e.branch = dir.diagnostics.branch;
  e.eta0 = initial_step(state, e.dir_norm, config);

  ArmijoResult ls = armijo(problem, state.x, state.f, state.g, dir.d, e.eta0, config.gamma,
                           config.delta, config.min_step_size, counters);
  e.eta = ls.eta;
  e.backtracks = ls.backtracks;
  out.trials = ls.trials;
  out.diagnostics = std::move(dir.diagnostics);
  if (!ls.accepted) {
    out.stop = Termination::min_step;
    out.next = state;
    e.f_next = state.f;
    return out;
  }
  e.f_next = ls.f_new;

  IterState& n = out.next;
  n.x = std::move(ls.x_new);
  n.f = ls.f_new;
  n.g = riemannian_gradient(problem, n.x, &counters);
  n.grad_norm = n.g.norm();
  n.k = state.k + 1;
  n.prev_x = state.x;
  n.prev_d = std::move(dir.d);
  n.prev_eta = ls.eta;
  n.prev_g = state.g;
  return out;
}

RunRecord solve(const Problem& problem, const Point& x0, const SolverConfig& config, Rule rule) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  RunRecord rec;
  rec.rule = rule;
  EvalCounters counters;
  IterState state = initial_state(problem, x0, counters);
  rec.initial_f = state.f;
  rec.initial_grad_norm = state.grad_norm;
  rec.epsilon = config.tol_rel > 0 ? config.tol_rel * state.grad_norm : config.epsilon;

  rec.termination = Termination::gradient_tolerance;
  while (state.grad_norm > rec.epsilon) {
    if (rec.iterations >= config.max_iter) {
      rec.termination = Termination::max_iter;
      break;
    }
    if (elapsed() >= config.max_time_seconds) {
      rec.termination = Termination::max_time;
      break;
    }
    StepResult st = step(problem, state, config, rule, counters);
    if (st.stop) {
      rec.termination = *st.stop;
      rec.failed_search_trials = st.trials;
      break;
    }
    ++rec.branch_counts[static_cast<std::size_t>(st.entry.branch)];
    if (config.record_trace) rec.trace.push_back(st.entry);
    state = std::move(st.next);
    ++rec.iterations;
  }

  rec.wall_time = elapsed();
  rec.function_evals = counters.function_evals;
  rec.gradient_evals = counters.gradient_evals;
  rec.retraction_count = counters.retractions;
  rec.transport_count = counters.transports;
  rec.final_f = state.f;
  rec.final_grad_norm = state.grad_norm;
  rec.final_point = std::move(state.x);
  return rec;
}

}  // namespace rgmm
