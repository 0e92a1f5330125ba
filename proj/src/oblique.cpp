#include <cmath>

#include "rgmm/errors.hpp"
#include "rgmm/manifold.hpp"

namespace rgmm {

Oblique::Oblique(Eigen::Index n, Eigen::Index m) : Manifold(n, m) {
  // n == 1 is allowed: each factor is S^0 = {-1, +1}, dimension 0
  if (n < 1 || m < 1) throw ContractViolation("oblique: need n >= 1 and m >= 1");
}

std::string Oblique::name() const {
  return "oblique(" + std::to_string(rows()) + "," + std::to_string(cols()) + ")";
}

double Oblique::check_point(const Point& x) const {
  require_shape(x, "point");
  return (x.colwise().squaredNorm().array() - 1.0).abs().maxCoeff();
}

Point Oblique::random_point(Rng& rng) const {
  Point x = rng.gaussian(rows(), cols());
  for (Eigen::Index j = 0; j < cols(); ++j) {
    while (x.col(j).norm() < 1e-12) x.col(j) = rng.gaussian(rows(), 1);
    x.col(j).normalize();
  }
  return x;
}

Tangent Oblique::project_impl(const Point& x, const Eigen::MatrixXd& w) const {
  const Eigen::RowVectorXd coef = (x.array() * w.array()).colwise().sum();
  return w - x * coef.asDiagonal();
}

Point Oblique::retract_impl(const Point& x, const Tangent& v) const {
  Point y = x + v;
  y.colwise().normalize();
  return y;
}

}  // namespace rgmm
