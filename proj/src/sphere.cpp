#include <cmath>

#include "rgmm/errors.hpp"
#include "rgmm/manifold.hpp"

namespace rgmm {

Sphere::Sphere(Eigen::Index n) : Manifold(n, 1) {
  if (n < 2) throw ContractViolation("sphere: ambient dimension must be >= 2");
}

std::string Sphere::name() const { return "sphere(" + std::to_string(rows()) + ")"; }

double Sphere::check_point(const Point& x) const {
  require_shape(x, "point");
  return std::abs(x.squaredNorm() - 1.0);
}

Point Sphere::random_point(Rng& rng) const {
  for (;;) {
    Point x = rng.gaussian(rows(), 1);
    const double nx = x.norm();
    if (nx > 1e-12) return x / nx;
  }
}

Tangent Sphere::project_impl(const Point& x, const Eigen::MatrixXd& w) const {
  return w - x * (x.array() * w.array()).sum();
}

Point Sphere::retract_impl(const Point& x, const Tangent& v) const {
  Point y = x + v;
  return y / y.norm();
}

}  // namespace rgmm
