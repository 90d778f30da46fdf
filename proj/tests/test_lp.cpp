#include "sonc/lp.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <optional>
#include <random>

using namespace sonc;

namespace {

Eigen::MatrixXd select_cols(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(idx[i]);
  return out;
}

// Best basic feasible solution by enumerating every column subset of size m.
// Assumes full row rank and a bounded feasible region.
std::optional<double> brute_force_optimum(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.equality_matrix.rows());
  const int n = static_cast<int>(lp.equality_matrix.cols());
  std::optional<double> best;
  std::vector<int> pick(m);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == m) {
      Eigen::MatrixXd b(m, m);
      for (int r = 0; r < m; ++r) b.col(r) = lp.equality_matrix.col(pick[r]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
      if (lu.rank() < m) return;
      const Eigen::VectorXd xb = lu.solve(lp.equality_rhs);
      if ((xb.array() < -1e-10).any()) return;
      double obj = 0.0;
      for (int r = 0; r < m; ++r) obj += lp.objective(pick[r]) * xb(r);
      if (!best || obj > *best) best = obj;
      return;
    }
    for (int j = start; j < n; ++j) {
      pick[depth] = j;
      rec(j + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST(Lp, TrivialCombination) {
  LinearProgram lp{Eigen::Vector2d(1, 0), Eigen::RowVector2d(1, 1), Eigen::VectorXd::Ones(1)};
  const auto s = solve_lp(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.x(0), 1.0, 1e-12);
  EXPECT_NEAR(s.x(1), 0.0, 1e-12);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(Lp, EdgeMidpointIsFeasible) {
  // (1,1) over {(0,0),(2,0),(0,2)}: rows are the two coordinates plus the weight sum.
  Eigen::MatrixXd a(3, 3);
  a << 0, 2, 0, 0, 0, 2, 1, 1, 1;
  const auto s = solve_lp({Eigen::Vector3d::Zero(), a, Eigen::Vector3d(1, 1, 1)});
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.x(0), 0.0, 1e-12);
  EXPECT_NEAR(s.x(1), 0.5, 1e-12);
  EXPECT_NEAR(s.x(2), 0.5, 1e-12);
}

TEST(Lp, ExtremalPointIsInfeasible) {
  // (2,0) over {(0,0),(0,2),(1,1)}
  Eigen::MatrixXd a(3, 3);
  a << 0, 0, 1, 0, 2, 1, 1, 1, 1;
  EXPECT_EQ(solve_lp({Eigen::Vector3d::Zero(), a, Eigen::Vector3d(2, 0, 1)}).status, LpStatus::infeasible);
}

TEST(Lp, DetectsUnbounded) {
  // max x1 s.t. x0 - x1 = 1
  Eigen::MatrixXd a(1, 2);
  a << 1, -1;
  EXPECT_EQ(solve_lp({Eigen::Vector2d(0, 1), a, Eigen::VectorXd::Ones(1)}).status, LpStatus::unbounded);
}

TEST(Lp, RedundantRowsAreTolerated) {
  Eigen::MatrixXd a(3, 3);
  a << 1, 1, 1, 2, 2, 2, 1, 0, 0;
  const auto s = solve_lp({Eigen::Vector3d(0, 1, 2), a, Eigen::Vector3d(1, 2, 0.25)});
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective, 1.5, 1e-10);
}

TEST(Lp, MatchesBasisEnumerationOnRandomPolytopes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 3;
    const int n = m + 2 + trial % 4;
    LinearProgram lp;
    lp.equality_matrix = Eigen::MatrixXd::NullaryExpr(m, n, [&]() { return u(rng) * 4.0 - 1.0; });
    lp.equality_matrix.row(m - 1).setOnes();  // bounded: weights of a convex combination
    const Eigen::VectorXd w = Eigen::VectorXd::NullaryExpr(n, [&]() { return u(rng); });
    lp.equality_rhs = lp.equality_matrix * (w / w.sum());
    lp.objective = Eigen::VectorXd::NullaryExpr(n, [&]() { return u(rng) * 2.0 - 1.0; });
    const auto oracle = brute_force_optimum(lp);
    ASSERT_TRUE(oracle.has_value());
    const auto s = solve_lp(lp);
    ASSERT_TRUE(s.optimal()) << "trial " << trial;
    EXPECT_NEAR(s.objective, *oracle, 1e-8) << "trial " << trial;
    EXPECT_LE((lp.equality_matrix * s.x - lp.equality_rhs).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GE(s.x.minCoeff(), -1e-12);
    EXPECT_LE((s.x.array() > 1e-9).count(), m);
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

TEST(Lp, RowScalingDoesNotChangeTheAnswer) {
  Eigen::MatrixXd a(3, 4);
  a << 0, 2, 0, 2, 0, 0, 2, 2, 1, 1, 1, 1;
  LinearProgram lp{Eigen::Vector4d(1, 0, 0, 0), a, Eigen::Vector3d(1, 1, 1)};
  const auto s1 = solve_lp(lp);
  lp.equality_matrix.row(0) *= 1e6;
  lp.equality_rhs(0) *= 1e6;
  const auto s2 = solve_lp(lp);
  ASSERT_TRUE(s1.optimal() && s2.optimal());
  EXPECT_NEAR(s1.objective, 0.5, 1e-12);
  EXPECT_NEAR(s2.objective, 0.5, 1e-12);
}

TEST(Caratheodory, SymmetricSquare) {
  Eigen::MatrixXd pts(2, 4);
  pts << 0, 2, 0, 2, 0, 0, 2, 2;
  const auto r = caratheodory_reduce(pts, Eigen::Vector4d::Constant(0.25), Eigen::Vector2d(1, 1));
  EXPECT_LE(r.subset.size(), 3u);
  Eigen::Vector2d back = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < r.subset.size(); ++i) back += r.weights(static_cast<Eigen::Index>(i)) * pts.col(r.subset[i]);
  EXPECT_NEAR((back - Eigen::Vector2d(1, 1)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(r.weights.sum(), 1.0, 1e-12);
  EXPECT_GT(r.weights.minCoeff(), 0.0);
  EXPECT_EQ(affine_rank(select_cols(pts, r.subset)), static_cast<int>(r.subset.size()));
}

TEST(Caratheodory, IndependentTripleUnchanged) {
  Eigen::MatrixXd pts(2, 3);
  pts << 0, 6, 0, 0, 0, 6;
  const Eigen::Vector3d w(0.5, 0.25, 0.25);
  const auto r = caratheodory_reduce(pts, w, pts * w);
  ASSERT_EQ(r.subset, (std::vector<int>{0, 1, 2}));
  EXPECT_NEAR((r.weights - w).norm(), 0.0, 1e-14);
}

TEST(Caratheodory, FourPointsInThePlane) {
  Eigen::MatrixXd pts(2, 4);
  pts << 0, 6, 0, 2, 0, 0, 6, 2;
  const Eigen::Vector4d w(1.0 / 6, 1.0 / 6, 1.0 / 6, 0.5);
  const auto r = caratheodory_reduce(pts, w, Eigen::Vector2d(2, 2));
  EXPECT_LE(r.subset.size(), 3u);
  Eigen::Vector2d back = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < r.subset.size(); ++i) back += r.weights(static_cast<Eigen::Index>(i)) * pts.col(r.subset[i]);
  EXPECT_NEAR((back - Eigen::Vector2d(2, 2)).norm(), 0.0, 1e-12);
}

TEST(Caratheodory, RandomReductionsReproduceTheTarget) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coord(0, 8);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 3;
    const int k = n + 2 + trial % 5;
    Eigen::MatrixXd pts = Eigen::MatrixXd::NullaryExpr(n, k, [&]() { return double(coord(rng)); });
    Eigen::VectorXd w = Eigen::VectorXd::NullaryExpr(k, [&]() { return u(rng); });
    w /= w.sum();
    const Eigen::VectorXd target = pts * w;
    const auto r = caratheodory_reduce(pts, w, target);
    Eigen::VectorXd back = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < r.subset.size(); ++i) back += r.weights(static_cast<Eigen::Index>(i)) * pts.col(r.subset[i]);
    EXPECT_LE((back - target).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(static_cast<int>(r.subset.size()), n + 1);
    EXPECT_GT(r.weights.minCoeff(), 0.0);
  }
}

TEST(Caratheodory, RejectsBadWeights) {
  Eigen::MatrixXd pts(1, 2);
  pts << 0, 2;
  EXPECT_THROW(caratheodory_reduce(pts, Eigen::Vector2d(0.5, 0.6), Eigen::VectorXd::Ones(1)), std::invalid_argument);
  EXPECT_THROW(caratheodory_reduce(pts, Eigen::Vector2d(0.5, 0.5), Eigen::VectorXd::Zero(1)), std::invalid_argument);
}
