#include <Eigen/Dense>

#include "rgmm/errors.hpp"
#include "rgmm/manifold.hpp"

namespace rgmm {

Stiefel::Stiefel(Eigen::Index n, Eigen::Index p) : Manifold(n, p) {
  if (p < 1 || p > n) throw ContractViolation("stiefel: need 1 <= p <= n");
}

std::string Stiefel::name() const {
  return "stiefel(" + std::to_string(rows()) + "," + std::to_string(cols()) + ")";
}

double Stiefel::check_point(const Point& x) const {
  require_shape(x, "point");
  return orthonormality_defect(x);
}

Point Stiefel::random_point(Rng& rng) const {
  return orthonormal_basis(rng.gaussian(rows(), cols()));
}

Tangent Stiefel::project_impl(const Point& x, const Eigen::MatrixXd& w) const {
  const Eigen::MatrixXd xtw = x.transpose() * w;
  return w - x * (0.5 * (xtw + xtw.transpose()));
}

Point Stiefel::retract_impl(const Point& x, const Tangent& v) const {
  return polar_factor(x + v);
}

}  // namespace rgmm
