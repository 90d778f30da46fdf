#include "sonc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sonc {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr int kBlandAfterDegenerate = 1000;
constexpr int kRefactorInterval = 64;
constexpr double kPivotTolerance = 1e-9;

/// Revised simplex state over structural columns [0, cols) followed by one
/// artificial column per row.
class RevisedSimplex {
 public:
  RevisedSimplex(Eigen::MatrixXd a, Eigen::VectorXd b, double tol)
      : a_(std::move(a)), b_(std::move(b)), rows_(static_cast<int>(a_.rows())), cols_(static_cast<int>(a_.cols())),
        tol_(tol) {
    basis_.resize(rows_);
    in_basis_.assign(cols_ + rows_, -1);
    for (int r = 0; r < rows_; ++r) {
      basis_[r] = cols_ + r;
      in_basis_[cols_ + r] = r;
    }
    binv_ = Eigen::MatrixXd::Identity(rows_, rows_);
    xb_ = b_;
    iteration_cap_ = 50 * (rows_ + cols_);
  }

  // Returns false on iteration cap; sets unbounded_ if phase two is unbounded.
  bool run(const Eigen::VectorXd& costs, bool allow_artificial_entry) {
    int degenerate_streak = 0;
    bool bland = false;
    while (true) {
      if (iterations_ >= iteration_cap_) return false;
      Eigen::VectorXd cb(rows_);
      for (int r = 0; r < rows_; ++r) cb(r) = costs(basis_[r]);
      const Eigen::RowVectorXd duals = cb.transpose() * binv_;

      int entering = -1;
      double best = kPivotTolerance;
      const int candidates = allow_artificial_entry ? cols_ + rows_ : cols_;
      for (int j = 0; j < candidates; ++j) {
        if (in_basis_[j] >= 0) continue;
        const double reduced = costs(j) - column_dot(duals, j);
        if (reduced <= kPivotTolerance) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (reduced > best) {
          best = reduced;
          entering = j;
        }
      }
      if (entering < 0) return true;

      const Eigen::VectorXd u = binv_column(entering);
      int leaving = -1;
      double min_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        if (u(r) <= kPivotTolerance) continue;
        const double ratio = std::max(xb_(r), 0.0) / u(r);
        if (leaving < 0 || ratio < min_ratio - 1e-12) {
          min_ratio = ratio;
          leaving = r;
        } else if (ratio <= min_ratio + 1e-12) {
          const bool prefer = bland ? basis_[r] < basis_[leaving] : u(r) > u(leaving);
          if (prefer) {
            min_ratio = std::min(min_ratio, ratio);
            leaving = r;
          }
        }
      }
      if (leaving < 0) {
        unbounded_ = true;
        return true;
      }

      pivot(entering, leaving, u);
      if (min_ratio <= 1e-12) {
        if (++degenerate_streak >= kBlandAfterDegenerate) bland = true;
      } else {
        degenerate_streak = 0;
      }
    }
  }

  void pivot(int entering, int leaving, const Eigen::VectorXd& u) {
    const double theta = std::max(xb_(leaving), 0.0) / u(leaving);
    xb_ -= theta * u;
    xb_(leaving) = theta;
    in_basis_[basis_[leaving]] = -1;
    basis_[leaving] = entering;
    in_basis_[entering] = leaving;

    const Eigen::RowVectorXd pivot_row = binv_.row(leaving) / u(leaving);
    for (int r = 0; r < rows_; ++r) {
      if (r == leaving) continue;
      if (u(r) != 0.0) binv_.row(r) -= u(r) * pivot_row;
    }
    binv_.row(leaving) = pivot_row;

    ++iterations_;
    if (iterations_ % kRefactorInterval == 0) refactor();
  }

  void refactor() {
    Eigen::MatrixXd basis_matrix(rows_, rows_);
    for (int r = 0; r < rows_; ++r) basis_matrix.col(r) = column(basis_[r]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    binv_ = lu.inverse();
    xb_ = binv_ * b_;
    for (int r = 0; r < rows_; ++r) {
      if (xb_(r) < 0.0 && xb_(r) > -tol_) xb_(r) = 0.0;
    }
  }

  // Pivots basic artificials out of the basis where a structural column allows it.
  void drive_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) continue;
      int best_j = -1;
      double best_abs = 1e-7;
      const Eigen::RowVectorXd row = binv_.row(r);
      for (int j = 0; j < cols_; ++j) {
        if (in_basis_[j] >= 0) continue;
        const double v = std::abs(column_dot(row, j));
        if (v > best_abs) {
          best_abs = v;
          best_j = j;
        }
      }
      if (best_j < 0) continue;  // redundant row
      xb_(r) = 0.0;
      Eigen::VectorXd u = binv_column(best_j);
      // Degenerate pivot: allow a negative pivot element since theta is zero.
      const double theta_guard = u(r);
      if (theta_guard < 0.0) {
        binv_.row(r) *= -1.0;
        u(r) = -u(r);
      }
      pivot(best_j, r, u);
    }
    refactor();
  }

  double artificial_mass() const {
    double s = 0.0;
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] >= cols_) s += std::abs(xb_(r));
    }
    return s;
  }

  Eigen::VectorXd structural_solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(cols_);
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) x(basis_[r]) = std::max(xb_(r), 0.0);
    }
    return x;
  }

  bool unbounded() const { return unbounded_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::VectorXd column(int j) const {
    if (j < cols_) return a_.col(j);
    return Eigen::VectorXd::Unit(rows_, j - cols_);
  }
  double column_dot(const Eigen::RowVectorXd& row, int j) const {
    if (j < cols_) return row.dot(a_.col(j).transpose());
    return row(j - cols_);
  }
  Eigen::VectorXd binv_column(int j) const {
    if (j < cols_) return binv_ * a_.col(j);
    return binv_.col(j - cols_);
  }

  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  int rows_;
  int cols_;
  double tol_;
  std::vector<int> basis_;
  std::vector<int> in_basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  int iterations_ = 0;
  int iteration_cap_ = 0;
  bool unbounded_ = false;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
  const auto cols = lp.objective.size();
  if (lp.equality_matrix.rows() != lp.equality_rhs.size() || lp.equality_matrix.cols() != cols) {
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("solve_lp: tolerance must be positive");

  // Drop empty rows and equilibrate the rest.
  std::vector<Eigen::Index> kept;
  for (Eigen::Index r = 0; r < lp.equality_matrix.rows(); ++r) {
    const double scale = cols > 0 ? lp.equality_matrix.row(r).cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) {
      if (std::abs(lp.equality_rhs(r)) > tol) return LpSolution{LpStatus::infeasible, {}, 0.0, 0, 0};
      continue;
    }
    kept.push_back(r);
  }
  const int rows = static_cast<int>(kept.size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (int r = 0; r < rows; ++r) {
    const double scale = lp.equality_matrix.row(kept[r]).cwiseAbs().maxCoeff();
    a.row(r) = lp.equality_matrix.row(kept[r]) / scale;
    b(r) = lp.equality_rhs(kept[r]) / scale;
    if (b(r) < 0.0) {
      a.row(r) *= -1.0;
      b(r) = -b(r);
    }
  }

  RevisedSimplex simplex(a, b, tol);
  Eigen::VectorXd phase_one = Eigen::VectorXd::Zero(cols + rows);
  phase_one.tail(rows).setConstant(-1.0);
  if (!simplex.run(phase_one, true)) {
    return LpSolution{LpStatus::iteration_limit, {}, 0.0, rows, simplex.iterations()};
  }
  simplex.refactor();
  const double rhs_scale = std::max(1.0, b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  if (simplex.artificial_mass() > tol * rhs_scale) {
    return LpSolution{LpStatus::infeasible, {}, 0.0, rows, simplex.iterations()};
  }
  simplex.drive_out_artificials();

  Eigen::VectorXd phase_two = Eigen::VectorXd::Zero(cols + rows);
  phase_two.head(cols) = lp.objective;
  if (!simplex.run(phase_two, false)) {
    return LpSolution{LpStatus::iteration_limit, {}, 0.0, rows, simplex.iterations()};
  }
  if (simplex.unbounded()) return LpSolution{LpStatus::unbounded, {}, 0.0, rows, simplex.iterations()};
  simplex.refactor();

  LpSolution solution;
  solution.status = LpStatus::optimal;
  solution.x = simplex.structural_solution();
  solution.objective = lp.objective.dot(solution.x);
  solution.basis_size = rows;
  solution.iterations = simplex.iterations();
  return solution;
}

int affine_rank(const Eigen::MatrixXd& points, double relative_threshold) {
  if (points.cols() == 0) return 0;
  Eigen::MatrixXd stacked(points.rows() + 1, points.cols());
  stacked.row(0).setOnes();
  stacked.bottomRows(points.rows()) = points;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  const auto& s = svd.singularValues();
  const double cutoff = relative_threshold * s(0);
  return static_cast<int>((s.array() > cutoff).count());
}

CaratheodoryResult caratheodory_reduce(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                                       const Eigen::VectorXd& target) {
  const auto m = points.cols();
  if (weights.size() != m || target.size() != points.rows()) {
    throw std::invalid_argument("caratheodory_reduce: inconsistent dimensions");
  }
  if (m == 0 || (weights.array() <= 0.0).any()) {
    throw std::invalid_argument("caratheodory_reduce: weights must be strictly positive");
  }
  const double scale = 1.0 + (points.size() > 0 ? points.cwiseAbs().maxCoeff() : 0.0);
  if (std::abs(weights.sum() - 1.0) > 1e-9 || (points * weights - target).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("caratheodory_reduce: weights do not reproduce the target");
  }

  std::vector<int> active(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) active[static_cast<std::size_t>(i)] = i;
  Eigen::VectorXd lambda = weights;

  while (true) {
    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd stacked(points.rows() + 1, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      stacked(0, c) = 1.0;
      stacked.col(c).tail(points.rows()) = points.col(active[static_cast<std::size_t>(c)]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cutoff = 1e-10 * s(0);
    const auto rank = (s.array() > cutoff).count();
    if (rank == k) break;

    Eigen::VectorXd mu = svd.matrixV().col(k - 1);
    if ((mu.array() > 1e-14).count() == 0) mu = -mu;
    Eigen::Index drop = -1;
    double eta = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < k; ++i) {
      if (mu(i) > 1e-14 && lambda(i) / mu(i) < eta) {
        eta = lambda(i) / mu(i);
        drop = i;
      }
    }
    lambda -= eta * mu;
    lambda(drop) = 0.0;

    std::vector<int> next;
    std::vector<double> next_lambda;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (lambda(i) > 1e-15) {
        next.push_back(active[static_cast<std::size_t>(i)]);
        next_lambda.push_back(lambda(i));
      }
    }
    active = std::move(next);
    lambda = Eigen::Map<Eigen::VectorXd>(next_lambda.data(), static_cast<Eigen::Index>(next_lambda.size()));
    lambda /= lambda.sum();
  }

  return CaratheodoryResult{active, lambda};
}

}  // namespace sonc
