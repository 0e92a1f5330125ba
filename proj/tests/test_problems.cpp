#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "rgmm/errors.hpp"
#include "rgmm/matrix_io.hpp"
#include "rgmm/problems.hpp"
#include "rgmm/solver.hpp"
#include "support/test_support.hpp"

using namespace rgmm;

namespace {

Point col(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  Eigen::Index i = 0;
  for (double e : v) out(i++) = e;
  return out;
}

Eigen::MatrixXd diag(std::initializer_list<double> v) { return col(v).col(0).asDiagonal(); }

Eigen::MatrixXd cols(Eigen::Index n, std::initializer_list<Eigen::Index> idx) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, idx.size());
  Eigen::Index j = 0;
  for (auto i : idx) x(i, j++) = 1.0;
  return x;
}

SolverConfig tight() {
  SolverConfig c;
  c.epsilon = 1e-6;
  c.max_iter = 20000;
  return c;
}

}  // namespace

TEST(Rayleigh, EigenvectorIsStationary) {
  const Problem p = rayleigh(diag({1, 2}));
  EXPECT_DOUBLE_EQ(p.cost(col({1, 0})), 1.0);
  EXPECT_LE(p.riemannian_gradient(col({1, 0})).norm(), 1e-15);
}

TEST(Rayleigh, DiagonalPointGradient) {
  // 2Ax - 2(x^T A x)x at x = (1,1)/sqrt2: 2Ax = (sqrt2, 2 sqrt2), x^T A x = 3/2,
  // so grad = (sqrt2 - 3/sqrt2, 2 sqrt2 - 3/sqrt2) = (-1/sqrt2, 1/sqrt2).
  const Problem p = rayleigh(diag({1, 2}));
  const double h = 1 / std::sqrt(2.0);
  const Tangent g = p.riemannian_gradient(col({h, h}));
  EXPECT_NEAR(g(0), -h, 1e-15);
  EXPECT_NEAR(g(1), h, 1e-15);
}

TEST(Rayleigh, IdentityIsConstant) {
  const Problem p = rayleigh(Eigen::MatrixXd::Identity(4, 4));
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const Point x = p.manifold().random_point(rng);
    EXPECT_NEAR(p.cost(x), 1.0, 1e-14);
    EXPECT_LE(p.riemannian_gradient(x).norm(), 1e-14);
  }
}

TEST(Rayleigh, AsymmetricRejected) {
  Eigen::MatrixXd a = diag({1, 2});
  a(0, 1) = 1e-6;
  EXPECT_THROW(rayleigh(a), InvalidInput);
}

TEST(Rayleigh, OracleIsSmallestEigenpair) {
  const Problem p = rayleigh(diag({3, -1, 2}));
  const auto opt = p.optimum(col({1, 0, 0}));
  EXPECT_NEAR(opt.value, -1.0, 1e-14);
  ASSERT_TRUE(opt.point);
  EXPECT_NEAR(std::abs((*opt.point)(1)), 1.0, 1e-14);
}

TEST(Dis, InvariantSubspaceStationary) {
  const Problem p = dominant_invariant_subspace(diag({3, 2, 1}), 2);
  const Point x = cols(3, {0, 1});
  EXPECT_DOUBLE_EQ(p.cost(x), -5.0);
  EXPECT_LE(p.riemannian_gradient(x).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(p.cost(cols(3, {1, 2})), -3.0);
}

TEST(Dis, AsymmetricRejected) {
  Eigen::MatrixXd a = diag({3, 2, 1});
  a(2, 0) = 0.5;
  EXPECT_THROW(dominant_invariant_subspace(a, 2), InvalidInput);
}

TEST(Dis, SolverRecoversOracleSubspace) {
  Rng rng(606);
  const Problem p = dominant_invariant_subspace(random_symmetric(6, rng), 2);
  const Point x0 = p.manifold().random_point(1);
  const RunRecord r = solve(p, x0, tight(), Rule::rgmm);
  ASSERT_TRUE(r.success());
  const auto opt = p.optimum(x0);
  ASSERT_TRUE(opt.point);
  EXPECT_LE(principal_angles(r.final_point, *opt.point).maxCoeff(), 1e-5);
}

TEST(Maxcut, ZeroLaplacianIsConstant) {
  const Problem p = maxcut_elliptope(Eigen::MatrixXd::Zero(4, 4), 2);
  const Point y = p.manifold().random_point(2);
  EXPECT_EQ(p.cost(y), 0.0);
  EXPECT_EQ(p.riemannian_gradient(y).norm(), 0.0);
}

TEST(Maxcut, TwoNodeEnumeration) {
  Eigen::MatrixXd l(2, 2);
  l << 1, -1, -1, 1;
  const Problem p = maxcut_elliptope(l, 1);
  // brute force over +-1 assignments
  double best_cut = -1, best_f = 1e300;
  for (int a : {-1, 1})
    for (int b : {-1, 1}) {
      Eigen::MatrixXd y(1, 2);
      y << a, b;
      const double cut = (a != b) ? 1.0 : 0.0;
      best_cut = std::max(best_cut, cut);
      best_f = std::min(best_f, p.cost(y));
      EXPECT_NEAR(-p.cost(y) / 2, cut, 1e-15);
    }
  EXPECT_EQ(best_cut, 1.0);
  EXPECT_EQ(best_f, -2.0);
}

TEST(Maxcut, IteratesKeepUnitColumns) {
  Rng rng(9);
  const Problem p = maxcut_elliptope(random_laplacian(12, 0.5, rng), 3);
  SolverConfig c;
  c.max_iter = 50;
  const RunRecord r = solve(p, p.manifold().random_point(5), c, Rule::rgmm);
  const Eigen::VectorXd d = (r.final_point.transpose() * r.final_point).diagonal();
  EXPECT_LE((d.array() - 1.0).abs().maxCoeff(), 1e-12);
  for (const auto& e : r.trace) EXPECT_LE(e.f_next, e.f);
}

TEST(Maxcut, LaplacianShapeChecked) {
  EXPECT_THROW(maxcut_elliptope(Eigen::MatrixXd::Zero(3, 2), 2), Error);
}

TEST(Procrustes, ExactFitHasZeroCost) {
  Rng rng(4);
  const Eigen::MatrixXd a = rng.gaussian(7, 3);
  const Point xs = Stiefel(3, 3).random_point(rng);
  const Problem p = procrustes(a, a * xs);
  EXPECT_NEAR(p.cost(xs), 0.0, 1e-24);
}

TEST(Procrustes, IdentityGivesPolarFactor) {
  Rng rng(5);
  const Eigen::MatrixXd b = rng.gaussian(4, 4);
  const Problem p = procrustes(Eigen::MatrixXd::Identity(4, 4), b);
  // independent oracle: U V^T from the SVD of B
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
  const bool positive = polar.determinant() > 0;
  // pick a start in the same orientation component as the polar factor
  Point x0 = Eigen::MatrixXd::Identity(4, 4);
  if (!positive) x0(0, 0) = -1;
  const auto opt = p.optimum(x0);
  ASSERT_TRUE(opt.point);
  EXPECT_LE((*opt.point - polar).norm(), 1e-10);
  EXPECT_NEAR(opt.value, (polar - b).squaredNorm(), 1e-10);
}

TEST(Procrustes, OracleRespectsOrientation) {
  Rng rng(15);
  const Eigen::MatrixXd a = rng.gaussian(20, 4), b = rng.gaussian(20, 4);
  const Problem p = procrustes(a, b);
  Point plus = Eigen::MatrixXd::Identity(4, 4), minus = plus;
  minus(3, 3) = -1;
  const auto op = p.optimum(plus), om = p.optimum(minus);
  EXPECT_GT((*op.point).determinant(), 0);
  EXPECT_LT((*om.point).determinant(), 0);
  // both are stationary on their component
  EXPECT_LE(p.riemannian_gradient(*op.point).norm(), 1e-8 * (1 + std::abs(op.value)));
  EXPECT_LE(p.riemannian_gradient(*om.point).norm(), 1e-8 * (1 + std::abs(om.value)));
  // no random rotation in either component does better
  Stiefel o4(4, 4);
  for (int i = 0; i < 200; ++i) {
    const Point q = o4.random_point(rng);
    const double bound = q.determinant() > 0 ? op.value : om.value;
    EXPECT_GE(p.cost(q), bound - 1e-10);
  }
}

TEST(Procrustes, ShapeMismatchRejected) {
  EXPECT_THROW(procrustes(Eigen::MatrixXd::Zero(5, 3), Eigen::MatrixXd::Zero(4, 3)), Error);
}

TEST(Tsvd, DiagonalExample) {
  const Problem p = truncated_svd(diag({2, 1}), 1);
  EXPECT_DOUBLE_EQ(p.cost(col({1, 0})), -4.0);
  EXPECT_LE(p.riemannian_gradient(col({1, 0})).norm(), 1e-15);
  const auto opt = p.optimum(col({0, 1}));
  EXPECT_NEAR(opt.value, -4.0, 1e-14);
  EXPECT_LE(principal_angles(*opt.point, col({1, 0})).maxCoeff(), 1e-12);
}

TEST(Tsvd, OrthogonalRowsReduceToDis) {
  // A = D Q with Q orthogonal: A^T A = Q^T D^2 Q, so tsvd(A) equals
  // dis(Q^T D^2 Q) pointwise
  Rng rng(21);
  const Eigen::MatrixXd q = Stiefel(5, 5).random_point(rng);
  const Eigen::MatrixXd d = diag({3, 2, 1.5, 1, 0.5});
  const Eigen::MatrixXd a = d * q;
  const Problem t = truncated_svd(a, 2);
  const Eigen::MatrixXd gram = q.transpose() * d * d * q;
  const Problem s = dominant_invariant_subspace(0.5 * (gram + gram.transpose()), 2);
  for (int i = 0; i < 10; ++i) {
    const Point x = t.manifold().random_point(rng);
    EXPECT_NEAR(t.cost(x), s.cost(x), 1e-12);
  }
}

TEST(Tsvd, SolverRecoversOracleSubspace) {
  Rng rng(808);
  const Problem p = truncated_svd(rng.gaussian(8, 5), 2);
  const Point x0 = p.manifold().random_point(2);
  const RunRecord r = solve(p, x0, tight(), Rule::rgmm);
  ASSERT_TRUE(r.success());
  const auto opt = p.optimum(x0);
  EXPECT_LE(principal_angles(r.final_point, *opt.point).maxCoeff(), 1e-5);
}

TEST(Tsvd, RankTooLargeRejected) {
  EXPECT_THROW(truncated_svd(Eigen::MatrixXd::Ones(2, 4), 3), Error);
}

TEST(GradientCheck, QuadraticOnSphere) {
  const Problem p = make_problem("rayleigh", {10, 0, 0}, 3);
  const auto [x, v] = test::random_pair(p.manifold(), 4);
  const auto r = finite_difference_check(p, x, v, log_grid(1e-2, 1e-6, 9));
  ASSERT_FALSE(r.skipped);
  EXPECT_GE(r.slope, 1.9);
  EXPECT_LE(r.slope, 2.1);
  EXPECT_GT(r.lipschitz_estimate, 0.0);
}

TEST(GradientCheck, ConstantCostSkipped) {
  const Problem p = test::constant_problem(4, 2.5);
  const auto [x, v] = test::random_pair(p.manifold(), 1);
  const auto r = finite_difference_check(p, x, v, log_grid(1e-2, 1e-6, 9));
  EXPECT_TRUE(r.skipped);
  EXPECT_TRUE(std::isnan(r.slope));
}

TEST(GradientCheck, LinearCostOnSphere) {
  const Problem p = test::linear_problem(col({1, -2, 0.5, 3}).col(0));
  const auto [x, v] = test::random_pair(p.manifold(), 7);
  const auto r = finite_difference_check(p, x, v, log_grid(1e-2, 1e-6, 9));
  ASSERT_FALSE(r.skipped);
  EXPECT_GE(r.slope, 1.9);
  EXPECT_LE(r.slope, 2.1);
}

TEST(GradientCheck, WrongGradientDetected) {
  ProblemDefinition def;
  def.name = "broken";
  def.manifold = std::make_shared<Sphere>(3);
  def.cost = [](const Point& x) { return x(0, 0) * x(1, 0); };
  def.euclidean_gradient = [](const Point& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 1);
    g(0, 0) = x(0, 0);  // should be x(1)
    return g;
  };
  const Problem p(def);
  const auto [x, v] = test::random_pair(p.manifold(), 2);
  const auto r = finite_difference_check(p, x, v, log_grid(1e-2, 1e-6, 9));
  EXPECT_LT(r.slope, 1.5);
}

TEST(GradientCheck, NonUnitTangentRejected) {
  const Problem p = make_problem("rayleigh", {5, 0, 0}, 1);
  const auto [x, v] = test::random_pair(p.manifold(), 1);
  const std::vector<double> steps{1e-2, 1e-3};
  EXPECT_THROW(finite_difference_check(p, x, Tangent(3.0 * v), steps), ContractViolation);
}

TEST(MakeProblem, ShapesAndNames) {
  EXPECT_EQ(make_problem("dis", {20, 3, 0}, 1).manifold().name(), Grassmann(20, 3).name());
  EXPECT_EQ(make_problem("tsvd", {60, 5, 42}, 1).manifold().rows(), 60);
  EXPECT_EQ(make_problem("procrustes", {30, 4, 0}, 1).manifold().name(), Stiefel(4, 4).name());
  EXPECT_EQ(make_problem("maxcut", {10, 2, 0}, 1).manifold().cols(), 10);
  EXPECT_THROW(make_problem("nope", {10, 2, 0}, 1), Error);
  EXPECT_EQ(problem_names().size(), 5u);
}

TEST(MakeProblem, SeededDataIsDeterministic) {
  const Problem a = make_problem("tsvd", {30, 3, 20}, 99), b = make_problem("tsvd", {30, 3, 20}, 99);
  const Point x = a.manifold().random_point(1);
  EXPECT_EQ(a.cost(x), b.cost(x));
  EXPECT_NE(a.cost(x), make_problem("tsvd", {30, 3, 20}, 100).cost(x));
}

TEST(MatrixIo, RoundTripIsExact) {
  Rng rng(1);
  const Eigen::MatrixXd a = rng.gaussian(3, 4);
  std::stringstream ss;
  write_matrix(ss, a);
  EXPECT_EQ(read_matrix(ss), a);
}

TEST(MatrixIo, CommentsAndErrors) {
  std::istringstream ok("# sym\n2 2\n1 2\n# mid\n2 5\n");
  const Eigen::MatrixXd a = read_matrix(ok);
  EXPECT_EQ(a(1, 1), 5.0);
  std::istringstream short_row("2 2\n1 2\n3\n");
  EXPECT_THROW(read_matrix(short_row), ConfigError);
  EXPECT_THROW(read_matrix_file("/nonexistent/matrix.txt"), ConfigError);
}

// Properties over every named problem.

struct NamedCase {
  const char* kind;
  ProblemSize size;
};

void PrintTo(const NamedCase& c, std::ostream* os) { *os << c.kind; }

class ProblemProperties : public ::testing::TestWithParam<NamedCase> {};
class OracleProperties : public ::testing::TestWithParam<NamedCase> {};
class GrassmannProperties : public ::testing::TestWithParam<NamedCase> {};

TEST_P(ProblemProperties, TaylorSlopeAtRandomPairs) {
  const Problem p = make_problem(GetParam().kind, GetParam().size, 17);
  const auto steps = log_grid(1e-2, 1e-6, 9);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto [x, v] = test::random_pair(p.manifold(), 1000 + s);
    const auto r = finite_difference_check(p, x, v, steps);
    if (r.skipped) continue;
    EXPECT_GE(r.slope, 1.9) << p.name() << " seed " << s;
  }
}

TEST_P(ProblemProperties, GradientIsTangent) {
  const Problem p = make_problem(GetParam().kind, GetParam().size, 18);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Point x = p.manifold().random_point(rng);
    EXPECT_LE(p.manifold().check_tangent(x, p.riemannian_gradient(x)), 1e-10);
  }
}

TEST_P(OracleProperties, OracleIsStationary) {
  const Problem p = make_problem(GetParam().kind, GetParam().size, 19);
  ASSERT_TRUE(p.has_oracle());
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto opt = p.optimum(p.manifold().random_point(s));
    ASSERT_TRUE(opt.point);
    EXPECT_NEAR(p.cost(*opt.point), opt.value, 1e-10 * (1 + std::abs(opt.value)));
    EXPECT_LE(p.riemannian_gradient(*opt.point).norm(), 1e-8 * (1 + std::abs(opt.value)));
  }
}

TEST_P(ProblemProperties, OracleBelowRandomPoints) {
  const Problem p = make_problem(GetParam().kind, GetParam().size, 20);
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Point x = p.manifold().random_point(rng);
    if (p.has_oracle()) EXPECT_LE(p.optimum(x).value, p.cost(x) + 1e-12);
    if (p.lower_bound()) EXPECT_LE(*p.lower_bound(), p.cost(x) + 1e-12);
  }
}

TEST_P(GrassmannProperties, RotationInvariance) {
  const Problem p = make_problem(GetParam().kind, GetParam().size, 21);
  ASSERT_EQ(p.manifold().kind(), ManifoldKind::grassmann);
  Rng rng(8);
  const Stiefel rot(p.manifold().cols(), p.manifold().cols());
  for (int i = 0; i < 10; ++i) {
    const Point x = p.manifold().random_point(rng);
    const Point q = rot.random_point(rng);
    EXPECT_NEAR(p.cost(x * q), p.cost(x), 1e-10 * std::abs(p.cost(x)));
  }
}

INSTANTIATE_TEST_SUITE_P(
    Named, ProblemProperties,
    ::testing::Values(NamedCase{"rayleigh", {12, 0, 0}}, NamedCase{"dis", {15, 3, 0}},
                      NamedCase{"tsvd", {14, 3, 9}}, NamedCase{"procrustes", {12, 4, 0}},
                      NamedCase{"maxcut", {10, 3, 0}}),
    [](const auto& info) { return std::string(info.param.kind); });

INSTANTIATE_TEST_SUITE_P(
    Named, OracleProperties,
    ::testing::Values(NamedCase{"rayleigh", {12, 0, 0}}, NamedCase{"dis", {15, 3, 0}},
                      NamedCase{"tsvd", {14, 3, 9}}, NamedCase{"procrustes", {12, 4, 0}}),
    [](const auto& info) { return std::string(info.param.kind); });

INSTANTIATE_TEST_SUITE_P(
    Named, GrassmannProperties,
    ::testing::Values(NamedCase{"dis", {15, 3, 0}}, NamedCase{"tsvd", {14, 3, 9}}),
    [](const auto& info) { return std::string(info.param.kind); });
