#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace sonc {

/// c * prod_k x_k^{a_k}, with the exponent vector stored sparsely.
struct Monomial {
  double coefficient = 1.0;
  std::vector<std::pair<int, double>> exponents;
};

using Posynomial = std::vector<Monomial>;

/// minimize objective(x)  s.t.  inequalities[i](x) <= 1,  equalities[j](x) = 1,  x > 0.
struct GeometricProgram {
  int num_variables = 0;
  Posynomial objective;
  std::vector<Posynomial> inequalities;
  std::vector<Monomial> equalities;
};

inline constexpr double kGpTolerance = 1e-7;
inline constexpr double kGpInaccurateLimit = 1e-4;
inline constexpr int kGpMaxNewtonSteps = 200;

enum class GpStatus { optimal, infeasible, unbounded, inaccurate, failed };

const char* to_string(GpStatus status);

struct GPSolution {
  GpStatus status = GpStatus::failed;
  Eigen::VectorXd x;  ///< positive; empty when no point was produced
  double value = 0.0;
  double kkt_residual = 0.0;
  /// Optimal phase-one slack in log scale (negative when strictly feasible).
  double phase_one_sigma = 0.0;
  /// Phase one ended with slack in [0, tol]: feasible only on the boundary.
  bool interior_empty = false;
  int newton_steps = 0;
};

/// log-sum-exp of (A y + c); the log of a posynomial at x = exp(y).
struct LogSumExp {
  Eigen::MatrixXd a;
  Eigen::VectorXd c;

  double value(const Eigen::VectorXd& y) const;
  /// Softmax weights of the terms at y.
  Eigen::VectorXd weights(const Eigen::VectorXd& y) const;
};

/// The GP after substituting y = log x: minimize objective_log(y) subject to
/// inequalities[i].value(y) <= 0 and E y = g.
struct LogConvexProgram {
  int num_variables = 0;
  LogSumExp objective;
  std::vector<LogSumExp> inequalities;
  Eigen::MatrixXd e;
  Eigen::VectorXd g;

  double objective_log(const Eigen::VectorXd& y) const { return objective.value(y); }
  double objective_value(const Eigen::VectorXd& y) const;
};

LogConvexProgram to_log_convex(const GeometricProgram& gp);

/// Evaluates a posynomial / monomial at a positive point.
double evaluate(const Posynomial& f, const Eigen::VectorXd& x);
double evaluate(const Monomial& m, const Eigen::VectorXd& x);

/// Barrier method on the log-convex form. `start` need not be feasible.
GPSolution solve_gp(const GeometricProgram& gp, double tol = kGpTolerance,
                    const std::optional<Eigen::VectorXd>& start = std::nullopt);

struct FeasibilityResult {
  GpStatus status = GpStatus::failed;  ///< optimal means feasible
  Eigen::VectorXd x;
  double sigma = 0.0;
  bool strictly_feasible = false;

  bool feasible() const { return status == GpStatus::optimal; }
};

/// Phase-one solve over the constraints of `gp` (the objective is ignored).
FeasibilityResult check_feasibility(const GeometricProgram& gp, double tol = kGpTolerance,
                                    const std::optional<Eigen::VectorXd>& start = std::nullopt);

}  // namespace sonc
