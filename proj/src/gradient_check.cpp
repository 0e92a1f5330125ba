#include <algorithm>
#include <cmath>
#include <limits>

#include "rgmm/errors.hpp"
#include "rgmm/problems.hpp"

namespace rgmm {

std::vector<double> log_grid(double hi, double lo, int points) {
  if (points < 2 || !(hi > 0) || !(lo > 0)) throw ContractViolation("log_grid: bad arguments");
  std::vector<double> out(points);
  const double a = std::log(hi), b = std::log(lo);
  for (int i = 0; i < points; ++i) out[i] = std::exp(a + (b - a) * i / (points - 1));
  out.front() = hi;
  out.back() = lo;
  return out;
}

TaylorCheck finite_difference_check(const Problem& problem, const Point& x, const Tangent& v,
                                    std::span<const double> steps) {
  const Manifold& m = problem.manifold();
  if (m.check_tangent(x, v) > kTolTangent || std::abs(v.norm() - 1.0) > 1e-8)
    throw ContractViolation("finite_difference_check: v must be a unit tangent vector at x");

  const double fx = problem.cost(x);
  const double slope0 = m.inner(x, problem.riemannian_gradient(x), v);
  TaylorCheck out;
  out.steps.assign(steps.begin(), steps.end());
  for (double t : steps) {
    const double r = std::abs(problem.cost(m.retract(x, t * v)) - fx - t * slope0);
    out.residuals.push_back(r);
    out.lipschitz_estimate = std::max(out.lipschitz_estimate, 2.0 * r / (t * t));
  }

  // Residuals below this floor are cancellation noise in f(R(tv)) - f(x).
  const double floor = 1e-14 * (1.0 + std::abs(fx));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < out.steps.size(); ++i) {
    if (out.residuals[i] <= floor) continue;
    const double lx = std::log(out.steps[i]), ly = std::log(out.residuals[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) {
    out.skipped = true;
    out.slope = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return out;
}

}  // namespace rgmm
