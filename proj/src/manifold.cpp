#include "rgmm/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "rgmm/errors.hpp"

namespace rgmm {

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::oblique: return "oblique";
    case ManifoldKind::stiefel: return "stiefel";
    case ManifoldKind::grassmann: return "grassmann";
  }
  return "unknown";
}

void Manifold::require_shape(const Eigen::MatrixXd& a, const char* what) const {
  if (a.rows() != rows_ || a.cols() != cols_) {
    std::ostringstream msg;
    msg << name() << ": " << what << " has shape " << a.rows() << "x" << a.cols()
        << ", expected " << rows_ << "x" << cols_;
    throw ContractViolation(msg.str());
  }
}

void Manifold::require_point(const Point& x) const {
  require_shape(x, "point");
  const double defect = check_point(x);
  if (!(defect <= kTolPoint)) {
    std::ostringstream msg;
    msg << name() << ": point membership defect " << defect << " exceeds " << kTolPoint;
    throw InvalidPoint(msg.str());
  }
}

double Manifold::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  require_shape(x, "base point");
  require_shape(u, "tangent u");
  require_shape(v, "tangent v");
  return (u.array() * v.array()).sum();
}

double Manifold::norm(const Point& x, const Tangent& v) const {
  return std::sqrt(inner(x, v, v));
}

Tangent Manifold::project(const Point& x, const Eigen::MatrixXd& w) const {
  require_point(x);
  require_shape(w, "ambient vector");
  return project_impl(x, w);
}

Point Manifold::retract(const Point& x, const Tangent& v) const {
  require_point(x);
  require_shape(v, "tangent");
  return retract_impl(x, v);
}

Tangent Manifold::transport(const Point& from, const Point& to, const Tangent& v) const {
  require_point(from);
  require_point(to);
  require_shape(v, "tangent");
  return project_impl(to, v);
}

double Manifold::check_tangent(const Point& x, const Tangent& v) const {
  require_shape(x, "base point");
  require_shape(v, "tangent");
  return (v - project_impl(x, v)).norm();
}

Point Manifold::random_point(std::uint64_t seed) const {
  Rng rng(seed);
  return random_point(rng);
}

Tangent Manifold::random_tangent(const Point& x, std::uint64_t seed) const {
  Rng rng(seed);
  return random_tangent(x, rng);
}

Tangent Manifold::random_tangent(const Point& x, Rng& rng) const {
  require_point(x);
  for (;;) {
    Tangent v = project_impl(x, rng.gaussian(rows_, cols_));
    const double nv = v.norm();
    if (nv > 1e-12) return v / nv;
  }
}

double Manifold::distance(const Point& x, const Point& y) const {
  require_shape(x, "point");
  require_shape(y, "point");
  return (x - y).norm();
}

double orthonormality_defect(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd gram = x.transpose() * x;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).norm();
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
  // fix column signs so the map is a function of span and orientation only
  const Eigen::MatrixXd r = qr.matrixQR().topRows(y.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd gram = y.transpose() * y;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd& q = eig.eigenvectors();
  return y * (q * inv_sqrt.asDiagonal() * q.transpose());
}

Eigen::VectorXd principal_angles(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw ContractViolation("principal_angles: shape mismatch");
  const Eigen::Index p = x.cols();
  // cosines from X^T Y, sines from the component of Y outside span(X);
  // pairing the two sorted lists keeps small angles accurate.
  Eigen::JacobiSVD<Eigen::MatrixXd> cos_svd(x.transpose() * y);
  const Eigen::MatrixXd residual = y - x * (x.transpose() * y);
  Eigen::JacobiSVD<Eigen::MatrixXd> sin_svd(residual);
  Eigen::VectorXd cosines = cos_svd.singularValues();  // descending
  Eigen::VectorXd sines = sin_svd.singularValues();    // descending
  Eigen::VectorXd angles(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double c = std::min(1.0, cosines(i));
    const double s = i < sines.size() ? std::min(1.0, sines(sines.size() - 1 - i)) : 0.0;
    angles(i) = std::atan2(s, c);
  }
  std::sort(angles.data(), angles.data() + p);
  return angles;
}

}  // namespace rgmm
