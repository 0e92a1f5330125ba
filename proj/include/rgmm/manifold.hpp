#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "rgmm/rng.hpp"

namespace rgmm {

/// Element of a manifold, stored in ambient coordinates.
using Point = Eigen::MatrixXd;
/// Element of a tangent space, same ambient shape as its base point.
using Tangent = Eigen::MatrixXd;

/// Membership / tangency tolerance used by validating operations.
inline constexpr double kTolPoint = 1e-8;
inline constexpr double kTolTangent = 1e-8;

enum class ManifoldKind { sphere, oblique, stiefel, grassmann };

std::string to_string(ManifoldKind kind);

/// Riemannian submanifold of a matrix space with the inherited Frobenius
/// metric. Vector transport is orthogonal projection onto the target
/// tangent space. Implementations are immutable and thread-safe.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  /// Human-readable handle such as "stiefel(5,2)".
  virtual std::string name() const = 0;
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  virtual long dimension() const = 0;

  double inner(const Point& x, const Tangent& u, const Tangent& v) const;
  double norm(const Point& x, const Tangent& v) const;

  /// Orthogonal projection of an ambient array onto T_x M.
  /// Throws InvalidPoint if x is off the manifold.
  Tangent project(const Point& x, const Eigen::MatrixXd& w) const;
  Point retract(const Point& x, const Tangent& v) const;
  Tangent transport(const Point& from, const Point& to, const Tangent& v) const;

  /// Membership defect; 0 on exact members.
  virtual double check_point(const Point& x) const = 0;
  /// Tangency defect ||v - Proj_x v||_F.
  double check_tangent(const Point& x, const Tangent& v) const;

  Point random_point(std::uint64_t seed) const;
  virtual Point random_point(Rng& rng) const = 0;
  /// Unit-norm tangent vector at x drawn from a projected Gaussian.
  Tangent random_tangent(const Point& x, std::uint64_t seed) const;
  Tangent random_tangent(const Point& x, Rng& rng) const;
  Tangent zero_tangent() const { return Tangent::Zero(rows_, cols_); }

  /// Distance used to decide whether two points are the same element.
  /// Grassmann overrides this with the largest principal angle.
  virtual double distance(const Point& x, const Point& y) const;

  void require_shape(const Eigen::MatrixXd& a, const char* what) const;
  void require_point(const Point& x) const;

 protected:
  Manifold(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}

  virtual Tangent project_impl(const Point& x, const Eigen::MatrixXd& w) const = 0;
  virtual Point retract_impl(const Point& x, const Tangent& v) const = 0;

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

/// Unit sphere in R^n, points stored as n x 1.
class Sphere final : public Manifold {
 public:
  explicit Sphere(Eigen::Index n);
  ManifoldKind kind() const override { return ManifoldKind::sphere; }
  std::string name() const override;
  long dimension() const override { return static_cast<long>(rows()) - 1; }
  double check_point(const Point& x) const override;
  using Manifold::random_point;
  Point random_point(Rng& rng) const override;

 protected:
  Tangent project_impl(const Point& x, const Eigen::MatrixXd& w) const override;
  Point retract_impl(const Point& x, const Tangent& v) const override;
};

/// n x m matrices with unit-norm columns (product of m spheres S^{n-1}).
class Oblique final : public Manifold {
 public:
  Oblique(Eigen::Index n, Eigen::Index m);
  ManifoldKind kind() const override { return ManifoldKind::oblique; }
  std::string name() const override;
  long dimension() const override {
    return static_cast<long>(cols()) * (static_cast<long>(rows()) - 1);
  }
  double check_point(const Point& x) const override;
  using Manifold::random_point;
  Point random_point(Rng& rng) const override;

 protected:
  Tangent project_impl(const Point& x, const Eigen::MatrixXd& w) const override;
  Point retract_impl(const Point& x, const Tangent& v) const override;
};

/// n x p matrices with orthonormal columns. Polar retraction.
class Stiefel final : public Manifold {
 public:
  Stiefel(Eigen::Index n, Eigen::Index p);
  ManifoldKind kind() const override { return ManifoldKind::stiefel; }
  std::string name() const override;
  long dimension() const override {
    const long n = rows(), p = cols();
    return n * p - p * (p + 1) / 2;
  }
  double check_point(const Point& x) const override;
  using Manifold::random_point;
  Point random_point(Rng& rng) const override;

 protected:
  Tangent project_impl(const Point& x, const Eigen::MatrixXd& w) const override;
  Point retract_impl(const Point& x, const Tangent& v) const override;
};

/// p-dimensional subspaces of R^n, represented by orthonormal n x p bases.
/// Tangent vectors are horizontal lifts (X^T V = 0). Polar retraction.
class Grassmann final : public Manifold {
 public:
  Grassmann(Eigen::Index n, Eigen::Index p);
  ManifoldKind kind() const override { return ManifoldKind::grassmann; }
  std::string name() const override;
  long dimension() const override {
    const long n = rows(), p = cols();
    return p * (n - p);
  }
  double check_point(const Point& x) const override;
  using Manifold::random_point;
  Point random_point(Rng& rng) const override;
  double distance(const Point& x, const Point& y) const override;

 protected:
  Tangent project_impl(const Point& x, const Eigen::MatrixXd& w) const override;
  Point retract_impl(const Point& x, const Tangent& v) const override;
};

// Shared helpers for the orthonormal-column manifolds.

/// ||X^T X - I||_F
double orthonormality_defect(const Eigen::MatrixXd& x);
/// Thin-QR orthonormal basis of span(Y) with a positive R diagonal.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y);
/// Y (Y^T Y)^{-1/2} via eigendecomposition of the p x p Gram matrix.
Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& y);
/// Principal angles (radians, ascending) between span(X) and span(Y),
/// both orthonormal n x p.
Eigen::VectorXd principal_angles(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

}  // namespace rgmm
