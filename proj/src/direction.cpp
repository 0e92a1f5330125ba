#include <algorithm>
#include <cmath>

#include "rgmm/errors.hpp"
#include "rgmm/solver.hpp"

namespace rgmm {

namespace {

double dot(const Tangent& a, const Tangent& b) { return (a.array() * b.array()).sum(); }

void require_same_shape(const Tangent& a, const Tangent& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ContractViolation(std::string(who) + ": tangent vectors differ in shape");
}

}  // namespace

double lambda_bb(const Tangent& s, const Tangent& y, Strategy strategy, long k, double lambda_min,
                 double lambda_max) {
  require_same_shape(s, y, "lambda_bb");
  const double sy = dot(s, y);
  if (!(sy > 0)) throw ContractViolation("lambda_bb: requires <s,y> > 0");
  const bool use_bb1 = strategy == Strategy::direct ||
                       (strategy == Strategy::alternate && k % 2 == 0);
  const double raw = use_bb1 ? s.squaredNorm() / sy : sy / y.squaredNorm();
  return std::min(lambda_max, std::max(lambda_min, raw));
}

MomentumCoefficients momentum_direction(const Tangent& g, const Tangent& s, const Tangent& y,
                                        double lambda, double degeneracy_tol) {
  require_same_shape(g, s, "momentum_direction");
  require_same_shape(g, y, "momentum_direction");
  if (!(lambda > 0)) throw ContractViolation("momentum_direction: lambda must be positive");
  const double sy = dot(s, y);
  if (!(sy > 0)) throw ContractViolation("momentum_direction: requires <s,y> > 0");

  MomentumCoefficients out;
  const double gg = g.squaredNorm();
  const double ss = s.squaredNorm();
  const double gs = dot(g, s);
  const double gy = dot(g, y);
  // squared norm of the component of g orthogonal to s
  const double g_perp = gg - gs * gs / ss;
  out.rho = g_perp / lambda + gy * gy / sy;
  if (!(gg > 0) || !(g_perp > 0) || g_perp < degeneracy_tol * gg) {
    out.degenerate = true;
    return out;
  }
  out.alpha = lambda * (gg * sy - gy * gs) / (sy * g_perp);
  out.beta = (out.alpha * gy - gs) / sy;
  out.d = -out.alpha * g + out.beta * s;
  return out;
}

Tangent bfgs_operator_apply(const Tangent& s, const Tangent& y, double lambda, const Tangent& v) {
  require_same_shape(s, y, "bfgs_operator_apply");
  require_same_shape(s, v, "bfgs_operator_apply");
  const double ss = s.squaredNorm();
  const double sy = dot(s, y);
  if (!(ss > 0) || !(sy > 0) || !(lambda > 0))
    throw ContractViolation("bfgs_operator_apply: needs s != 0, <s,y> > 0, lambda > 0");
  return (v - (dot(s, v) / ss) * s) / lambda + (dot(y, v) / sy) * y;
}

bool check_gradient_related(const Tangent& g, const Tangent& d, double c1, double c2) {
  require_same_shape(g, d, "check_gradient_related");
  const double gg = g.squaredNorm();
  return dot(g, d) <= -c1 * gg && d.norm() <= c2 * std::sqrt(gg);
}

Direction compute_direction(const Manifold& manifold, const IterState& state,
                            const SolverConfig& config, Rule rule, EvalCounters& counters) {
  Direction out;
  DirectionDiagnostics& diag = out.diagnostics;
  const Tangent& g = state.g;

  if (rule == Rule::rgd) {
    diag.branch = Branch::steepest_descent;
    diag.lambda = 1.0;
    out.d = -g;
    return out;
  }
  if (state.k == 0 || (rule == Rule::rgmm && !config.momentum)) {
    diag.branch = Branch::first_iter;
    diag.lambda = config.lambda0;
    out.d = -config.lambda0 * g;
    return out;
  }

  diag.s = manifold.transport(state.prev_x, state.x, state.prev_eta * state.prev_d);
  diag.y = g - manifold.transport(state.prev_x, state.x, state.prev_g);
  counters.transports += 2;
  diag.sy = dot(diag.s, diag.y);

  // s = 0 gives <s,y> = 0 and lands here as well
  if (!(diag.sy > 0)) {
    diag.branch = Branch::curvature_fallback;
    diag.lambda = config.lambda_max;
    out.d = -config.lambda_max * g;
    return out;
  }

  diag.lambda = lambda_bb(diag.s, diag.y, config.strategy, state.k, config.lambda_min,
                          config.lambda_max);
  if (rule == Rule::rbb) {
    diag.branch = Branch::spectral;
    out.d = -diag.lambda * g;
    return out;
  }

  MomentumCoefficients mc =
      momentum_direction(g, diag.s, diag.y, diag.lambda, config.degeneracy_tol);
  diag.rho = mc.rho;
  if (mc.degenerate) {
    diag.branch = Branch::degenerate_fallback;
    out.d = -diag.lambda * g;
    return out;
  }
  diag.alpha = mc.alpha;
  diag.beta = mc.beta;
  if (!check_gradient_related(g, mc.d, config.c1, config.c2)) {
    diag.branch = Branch::gradient_related_fallback;
    diag.grad_related_ok = false;
    out.d = -diag.lambda * g;
    return out;
  }
  diag.branch = Branch::momentum;
  out.d = std::move(mc.d);
  return out;
}

double initial_step(const IterState& state, double dir_norm, const SolverConfig& config) {
  if (!config.safeguard_eta || state.k == 0 || !(dir_norm > 0)) return 1.0;
  const double prev_len = state.prev_eta * state.prev_d.norm();
  if (dir_norm > config.safeguard_growth * prev_len)
    return std::min(1.0, config.safeguard_scale * prev_len / dir_norm);
  return 1.0;
}

}  // namespace rgmm
