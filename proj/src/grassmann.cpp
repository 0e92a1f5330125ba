#include "rgmm/errors.hpp"
#include "rgmm/manifold.hpp"

namespace rgmm {

Grassmann::Grassmann(Eigen::Index n, Eigen::Index p) : Manifold(n, p) {
  if (p < 1 || p > n) throw ContractViolation("grassmann: need 1 <= p <= n");
}

std::string Grassmann::name() const {
  return "grassmann(" + std::to_string(rows()) + "," + std::to_string(cols()) + ")";
}

double Grassmann::check_point(const Point& x) const {
  require_shape(x, "point");
  return orthonormality_defect(x);
}

Point Grassmann::random_point(Rng& rng) const {
  return orthonormal_basis(rng.gaussian(rows(), cols()));
}

double Grassmann::distance(const Point& x, const Point& y) const {
  require_shape(x, "point");
  require_shape(y, "point");
  return principal_angles(x, y).maxCoeff();
}

Tangent Grassmann::project_impl(const Point& x, const Eigen::MatrixXd& w) const {
  return w - x * (x.transpose() * w);
}

Point Grassmann::retract_impl(const Point& x, const Tangent& v) const {
  return polar_factor(x + v);
}

}  // namespace rgmm
