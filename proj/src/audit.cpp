#include <algorithm>
#include <cmath>
#include <limits>

#include "rgmm/solver.hpp"

namespace rgmm {

EmpiricalConstants empirical_constants(const std::vector<TraceEntry>& trace) {
  EmpiricalConstants c;
  if (trace.empty()) return c;
  c.c1 = std::numeric_limits<double>::infinity();
  c.eta_min = std::numeric_limits<double>::infinity();
  for (const TraceEntry& e : trace) {
    const double gg = e.grad_norm * e.grad_norm;
    c.c1 = std::min(c.c1, -e.slope / gg);
    c.c2 = std::max(c.c2, e.dir_norm / e.grad_norm);
    c.eta_min = std::min(c.eta_min, e.eta);
  }
  return c;
}

BacktrackReport backtrack_audit(const std::vector<TraceEntry>& trace, double lipschitz,
                          const SolverConfig& config) {
  BacktrackReport r;
  r.lipschitz = lipschitz;
  if (trace.empty()) return r;
  r.constants = empirical_constants(trace);
  const double c1 = r.constants.c1, c2 = r.constants.c2;
  r.threshold = lipschitz > 0 ? (2.0 / lipschitz) * (1.0 - config.gamma) * c1 / (c2 * c2)
                              : std::numeric_limits<double>::infinity();
  if (r.threshold >= 1.0) {
    r.backtrack_bound = 0;
  } else {
    r.backtrack_bound =
        static_cast<int>(std::floor(std::log(r.threshold) / std::log(config.delta))) + 1;
  }
  for (const TraceEntry& e : trace) {
    // the bound assumes the search starts from eta = 1
    if (e.eta0 != 1.0) {
      ++r.skipped;
      continue;
    }
    ++r.audited;
    if (e.backtracks > r.backtrack_bound)
      r.violations.push_back({e.k, e.backtracks, r.backtrack_bound});
  }
  return r;
}

ComplexityReport complexity_audit(const RunRecord& record, double f_low,
                                  const SolverConfig& config) {
  ComplexityReport r;
  r.epsilon = record.epsilon;
  const auto& trace = record.trace;
  if (trace.empty()) return r;
  r.constants = empirical_constants(trace);
  for (const TraceEntry& e : trace) {
    if (e.grad_norm <= record.epsilon) continue;
    ++r.iterations;
    r.sum_grad_sq += e.grad_norm * e.grad_norm;
  }
  r.decrease_bound =
      (record.initial_f - f_low) / (config.gamma * r.constants.c1 * r.constants.eta_min);
  // relative slack for round-off in the accumulated sums only
  const double slack = 1e-10;
  r.sum_ok = r.sum_grad_sq <= r.decrease_bound * (1.0 + slack);
  r.count_ok = static_cast<double>(r.iterations) * r.epsilon * r.epsilon <=
               r.sum_grad_sq * (1.0 + slack);
  return r;
}

}  // namespace rgmm
