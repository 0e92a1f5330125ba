#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rgmm/manifold.hpp"

namespace rgmm {

/// Reference optimum computed by a dense decomposition.
struct OptimumOracle {
  double value = 0.0;
  std::optional<Point> point;
  std::string provenance;
};

using CostFn = std::function<double(const Point&)>;
using GradientFn = std::function<Eigen::MatrixXd(const Point&)>;
/// Optimum over the connected component of M that contains x0. Only
/// Stiefel(p,p) = O(p) is disconnected among the supported manifolds.
using OracleFn = std::function<OptimumOracle(const Point& x0)>;

struct ProblemDefinition {
  std::string name;
  ManifoldPtr manifold;
  CostFn cost;
  GradientFn euclidean_gradient;
  OracleFn oracle;                    // empty when no oracle exists
  std::optional<double> lower_bound;  // valid f_low, for complexity audits
};

/// Smooth cost on a manifold together with its ambient gradient.
/// Immutable and safe to share between threads.
class Problem {
 public:
  explicit Problem(ProblemDefinition def);

  const std::string& name() const { return def_.name; }
  const Manifold& manifold() const { return *def_.manifold; }
  const ManifoldPtr& manifold_ptr() const { return def_.manifold; }

  double cost(const Point& x) const { return def_.cost(x); }
  Eigen::MatrixXd euclidean_gradient(const Point& x) const { return def_.euclidean_gradient(x); }
  /// Proj_x(euclidean_gradient(x)), without evaluation accounting.
  Tangent riemannian_gradient(const Point& x) const;

  bool has_oracle() const { return static_cast<bool>(def_.oracle); }
  OptimumOracle optimum(const Point& x0) const;
  std::optional<double> lower_bound() const { return def_.lower_bound; }

 private:
  ProblemDefinition def_;
};

/// f(x) = x^T A x on the unit sphere.
Problem rayleigh(const Eigen::MatrixXd& a);

/// f(X) = -trace(X^T A X) on Grassmann(n, p).
Problem dominant_invariant_subspace(const Eigen::MatrixXd& a, Eigen::Index p);

/// Low-rank max-cut relaxation on Oblique(r, n): the n graph nodes are the
/// unit columns of the r x n matrix Y and
///
///   f(Y) = -1/2 <L, Y^T Y> = -1/2 trace(Y L Y^T),   grad f = -Y L.
///
/// For a +-1 assignment y the cut weight is y^T L y / 4 = -f / 2, so
/// minimizing f maximizes the relaxed cut and -f/2 is the cut bound.
Problem maxcut_elliptope(const Eigen::MatrixXd& laplacian, Eigen::Index rank);

/// f(X) = ||A X - B||_F^2 on Stiefel(k, p) for A m x k and B m x p.
/// Oracle available when k == p (rotation-constrained Procrustes, solved
/// per orientation component) or when A^T A is a multiple of I.
Problem procrustes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// f(X) = -||A X||_F^2 on Grassmann(n, p) for A m x n.
Problem truncated_svd(const Eigen::MatrixXd& a, Eigen::Index p);

// Seeded random instances.

/// (G + G^T) / 2 with standard Gaussian G.
Eigen::MatrixXd random_symmetric(Eigen::Index n, Rng& rng);
/// Laplacian of an Erdos-Renyi graph with unit weights.
Eigen::MatrixXd random_laplacian(Eigen::Index n, double edge_probability, Rng& rng);

struct ProblemSize {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::Index m = 0;
};

/// Names accepted by make_problem.
std::vector<std::string> problem_names();

/// Builds a named problem from seeded random data.
///
///   rayleigh    n            A n x n symmetric
///   dis         n, p         A n x n symmetric, Grassmann(n, p)
///   tsvd        m, n, p      A m x n Gaussian, Grassmann(n, p)
///   procrustes  n, p         A, B n x p Gaussian, Stiefel(p, p)
///   maxcut      n, p (rank)  Laplacian of G(n, 1/2), Oblique(p, n)
///
/// Missing sizes fall back to defaults (p = 3 for dis, p = 2 for maxcut).
Problem make_problem(const std::string& kind, ProblemSize size, std::uint64_t data_seed);

/// Result of a Taylor-remainder test of the Riemannian gradient.
struct TaylorCheck {
  std::vector<double> steps;
  std::vector<double> residuals;
  /// Least-squares slope of log r(t) against log t; NaN when skipped.
  double slope = 0.0;
  /// max 2 r(t) / t^2 over the steps.
  double lipschitz_estimate = 0.0;
  /// All residuals were at round-off level, so no slope was fitted.
  bool skipped = false;
};

/// Residuals r(t) = |f(R_x(t v)) - f(x) - t <grad f(x), v>| for unit
/// tangent v. A correct gradient gives slope ~2.
TaylorCheck finite_difference_check(const Problem& problem, const Point& x, const Tangent& v,
                                    std::span<const double> steps);

/// Geometric grid from hi down to lo, inclusive.
std::vector<double> log_grid(double hi, double lo, int points);

}  // namespace rgmm
