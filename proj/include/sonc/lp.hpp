#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace sonc {

/// maximize c^T x  subject to  A_eq x = b_eq,  x >= 0.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd equality_matrix;
  Eigen::VectorXd equality_rhs;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;       ///< empty unless optimal
  double objective = 0.0;  ///< meaningful only when optimal
  int basis_size = 0;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::optimal; }
};

inline constexpr double kLpTolerance = 1e-9;

/// Two-phase revised simplex on a dense tableau-free representation. The
/// returned point is a basic solution: at most (rank of A_eq) entries exceed
/// `tol`. Rows are equilibrated before solving, so uniformly rescaling a row
/// does not change the pivot sequence.
LpSolution solve_lp(const LinearProgram& lp, double tol = kLpTolerance);

struct CaratheodoryResult {
  std::vector<int> subset;  ///< column indices into the input point matrix
  Eigen::VectorXd weights;  ///< positive, sums to 1, same order as subset
};

/// Reduces a convex combination `points * weights = target` to one over an
/// affinely independent subset by repeatedly moving along a kernel vector of
/// the stacked [1; points] matrix until a weight vanishes.
///
/// Throws std::invalid_argument if the weights are not a strictly positive
/// convex combination reproducing `target`.
CaratheodoryResult caratheodory_reduce(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                                       const Eigen::VectorXd& target);

/// Numerical rank of [1; points] using a relative singular-value threshold.
int affine_rank(const Eigen::MatrixXd& points, double relative_threshold = 1e-10);

}  // namespace sonc
