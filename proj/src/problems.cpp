#include "rgmm/problems.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/Dense>

#include "rgmm/errors.hpp"

namespace rgmm {

Problem::Problem(ProblemDefinition def) : def_(std::move(def)) {
  if (!def_.manifold || !def_.cost || !def_.euclidean_gradient)
    throw ContractViolation("problem '" + def_.name + "': manifold, cost and gradient are required");
}

Tangent Problem::riemannian_gradient(const Point& x) const {
  return def_.manifold->project(x, def_.euclidean_gradient(x));
}

OptimumOracle Problem::optimum(const Point& x0) const {
  if (!def_.oracle) throw ContractViolation("problem '" + def_.name + "' has no optimum oracle");
  return def_.oracle(x0);
}

namespace {

void require_symmetric(const Eigen::MatrixXd& a, const char* who) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << who << ": matrix must be square, got " << a.rows() << "x" << a.cols();
    throw InvalidInput(msg.str());
  }
  if ((a - a.transpose()).norm() > 1e-12 * a.norm())
    throw InvalidInput(std::string(who) + ": matrix is not symmetric");
}

}  // namespace

Problem rayleigh(const Eigen::MatrixXd& a) {
  require_symmetric(a, "rayleigh");
  if (a.rows() < 2) throw InvalidInput("rayleigh: need n >= 2");
  auto shared = std::make_shared<const Eigen::MatrixXd>(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  OptimumOracle best{eig.eigenvalues()(0), Point(eig.eigenvectors().col(0)),
                     "dense eigendecomposition: smallest eigenpair"};
  ProblemDefinition def;
  def.name = "rayleigh";
  def.manifold = std::make_shared<Sphere>(a.rows());
  def.cost = [shared](const Point& x) { return (x.transpose() * (*shared) * x)(0, 0); };
  def.euclidean_gradient = [shared](const Point& x) -> Eigen::MatrixXd {
    return 2.0 * (*shared) * x;
  };
  def.oracle = [best](const Point&) { return best; };
  def.lower_bound = best.value;
  return Problem(std::move(def));
}

Problem dominant_invariant_subspace(const Eigen::MatrixXd& a, Eigen::Index p) {
  require_symmetric(a, "dominant_invariant_subspace");
  if (p < 1 || p > a.rows()) throw InvalidInput("dominant_invariant_subspace: need 1 <= p <= n");
  auto shared = std::make_shared<const Eigen::MatrixXd>(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::Index n = a.rows();
  OptimumOracle best{-eig.eigenvalues().tail(p).sum(), Point(eig.eigenvectors().rightCols(p)),
                     "dense eigendecomposition: top-p eigenvectors"};
  ProblemDefinition def;
  def.name = "dis";
  def.manifold = std::make_shared<Grassmann>(n, p);
  def.cost = [shared](const Point& x) { return -(x.transpose() * (*shared) * x).trace(); };
  def.euclidean_gradient = [shared](const Point& x) -> Eigen::MatrixXd {
    return -2.0 * (*shared) * x;
  };
  def.oracle = [best](const Point&) { return best; };
  def.lower_bound = best.value;
  return Problem(std::move(def));
}

Problem maxcut_elliptope(const Eigen::MatrixXd& laplacian, Eigen::Index rank) {
  require_symmetric(laplacian, "maxcut_elliptope");
  if (rank < 1) throw InvalidInput("maxcut_elliptope: rank must be >= 1");
  const Eigen::Index n = laplacian.rows();
  auto shared = std::make_shared<const Eigen::MatrixXd>(laplacian);
  ProblemDefinition def;
  def.name = "maxcut";
  def.manifold = std::make_shared<Oblique>(rank, n);
  def.cost = [shared](const Point& y) { return -0.5 * (y * (*shared) * y.transpose()).trace(); };
  def.euclidean_gradient = [shared](const Point& y) -> Eigen::MatrixXd {
    return -(y * (*shared));
  };
  // <L, Y^T Y> <= lambda_max(L) * trace(Y^T Y) = lambda_max(L) * n
  const double lmax = n > 0 ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                  laplacian, Eigen::EigenvaluesOnly)
                                  .eigenvalues()
                                  .maxCoeff()
                            : 0.0;
  def.lower_bound = -0.5 * std::max(lmax, 0.0) * static_cast<double>(n);
  return Problem(std::move(def));
}

Problem procrustes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows())
    throw InvalidInput("procrustes: A and B must have the same number of rows");
  const Eigen::Index k = a.cols();
  const Eigen::Index p = b.cols();
  if (p < 1 || p > k) throw InvalidInput("procrustes: need 1 <= cols(B) <= cols(A)");
  auto sa = std::make_shared<const Eigen::MatrixXd>(a);
  auto sb = std::make_shared<const Eigen::MatrixXd>(b);
  ProblemDefinition def;
  def.name = "procrustes";
  def.manifold = std::make_shared<Stiefel>(k, p);
  CostFn cost = [sa, sb](const Point& x) { return ((*sa) * x - (*sb)).squaredNorm(); };
  def.cost = cost;
  def.euclidean_gradient = [sa, sb](const Point& x) -> Eigen::MatrixXd {
    return 2.0 * sa->transpose() * ((*sa) * x - (*sb));
  };
  def.lower_bound = 0.0;

  const Eigen::MatrixXd ata = a.transpose() * a;
  const double scale = ata.trace() / static_cast<double>(k);
  const bool isotropic =
      (ata - scale * Eigen::MatrixXd::Identity(k, k)).norm() <= 1e-10 * std::max(scale, 1e-300);
  const Eigen::MatrixXd m = a.transpose() * b;
  if (k == p) {
    // ||AX||_F is constant on O(p), so f = const - 2 trace(X^T A^T B).
    // Each orientation component has its own minimizer (Kabsch).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd u = svd.matrixU();
    const Eigen::MatrixXd v = svd.matrixV();
    def.oracle = [u, v, cost, p](const Point& x0) {
      const double want = x0.determinant() < 0 ? -1.0 : 1.0;
      Eigen::VectorXd d = Eigen::VectorXd::Ones(p);
      if ((u * v.transpose()).determinant() * want < 0) d(p - 1) = -1.0;
      Point x = u * d.asDiagonal() * v.transpose();
      return OptimumOracle{cost(x), x, "SVD of A^T B, restricted to the orientation of x0"};
    };
  } else if (isotropic) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Point x = svd.matrixU() * svd.matrixV().transpose();
    OptimumOracle best{cost(x), x, "polar factor of A^T B"};
    def.oracle = [best](const Point&) { return best; };
  }
  return Problem(std::move(def));
}

Problem truncated_svd(const Eigen::MatrixXd& a, Eigen::Index p) {
  if (p < 1 || p > std::min(a.rows(), a.cols()))
    throw InvalidInput("truncated_svd: need 1 <= p <= min(m, n)");
  auto shared = std::make_shared<const Eigen::MatrixXd>(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::VectorXd sigma = svd.singularValues();
  OptimumOracle best{-sigma.head(p).squaredNorm(), Point(svd.matrixV().leftCols(p)),
                     "dense SVD: top-p right singular vectors"};
  ProblemDefinition def;
  def.name = "tsvd";
  def.manifold = std::make_shared<Grassmann>(a.cols(), p);
  def.cost = [shared](const Point& x) { return -((*shared) * x).squaredNorm(); };
  def.euclidean_gradient = [shared](const Point& x) -> Eigen::MatrixXd {
    return -2.0 * shared->transpose() * ((*shared) * x);
  };
  def.oracle = [best](const Point&) { return best; };
  def.lower_bound = best.value;
  return Problem(std::move(def));
}

Eigen::MatrixXd random_symmetric(Eigen::Index n, Rng& rng) {
  const Eigen::MatrixXd g = rng.gaussian(n, n);
  return 0.5 * (g + g.transpose());
}

Eigen::MatrixXd random_laplacian(Eigen::Index n, double edge_probability, Rng& rng) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (rng.uniform() < edge_probability) {
        l(i, j) = l(j, i) = -1.0;
        l(i, i) += 1.0;
        l(j, j) += 1.0;
      }
    }
  }
  return l;
}

std::vector<std::string> problem_names() {
  return {"rayleigh", "dis", "tsvd", "procrustes", "maxcut"};
}

Problem make_problem(const std::string& kind, ProblemSize size, std::uint64_t data_seed) {
  Rng rng(data_seed);
  auto need = [&](Eigen::Index v, const char* what) {
    if (v <= 0) throw InvalidInput(kind + ": size parameter " + what + " is required");
    return v;
  };
  if (kind == "rayleigh") {
    return rayleigh(random_symmetric(need(size.n, "n"), rng));
  }
  if (kind == "dis") {
    const Eigen::Index p = size.p > 0 ? size.p : 3;
    return dominant_invariant_subspace(random_symmetric(need(size.n, "n"), rng), p);
  }
  if (kind == "tsvd") {
    const Eigen::Index m = need(size.m, "m");
    const Eigen::Index n = need(size.n, "n");
    return truncated_svd(rng.gaussian(m, n), need(size.p, "p"));
  }
  if (kind == "procrustes") {
    const Eigen::Index n = need(size.n, "n");
    const Eigen::Index p = need(size.p, "p");
    Eigen::MatrixXd a = rng.gaussian(n, p);
    Eigen::MatrixXd b = rng.gaussian(n, p);
    return procrustes(a, b);
  }
  if (kind == "maxcut") {
    const Eigen::Index r = size.p > 0 ? size.p : 2;
    return maxcut_elliptope(random_laplacian(need(size.n, "n"), 0.5, rng), r);
  }
  throw InvalidInput("unknown problem '" + kind + "'");
}

}  // namespace rgmm
