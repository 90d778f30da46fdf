#pragma once

#include "sonc/geometry.hpp"
#include "sonc/gp.hpp"
#include "sonc/poly.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sonc {

struct Term {
  Exponent exponent;
  double coefficient = 0.0;
};

/// sum_i c_i x^{alpha(i)} + b x^beta with beta in the relative interior of
/// the simplex spanned by the (even) outer exponents.
struct CircuitPolynomial {
  std::vector<Term> outer;
  Term inner;
  Eigen::VectorXd lambda;
  double theta = 0.0;
};

struct Certificate {
  double gamma = 0.0;
  std::vector<CircuitPolynomial> circuits;
  std::vector<Term> residual_squares;
};

/// Theta = prod_j (c_j / lambda_j)^{lambda_j}, evaluated in log space.
template <typename D1, typename D2>
double circuit_number(const Eigen::MatrixBase<D1>& coefficients, const Eigen::MatrixBase<D2>& lambda) {
  if (coefficients.size() != lambda.size()) throw std::invalid_argument("circuit_number: size mismatch");
  double log_theta = 0.0;
  for (Eigen::Index j = 0; j < coefficients.size(); ++j) {
    const double c = static_cast<double>(coefficients(j));
    const double l = static_cast<double>(lambda(j));
    if (!(c > 0.0)) throw std::invalid_argument("circuit_number: outer coefficients must be positive");
    if (l > 0.0) log_theta += l * (std::log(c) - std::log(l));
  }
  return std::exp(log_theta);
}

double circuit_number(const CircuitPolynomial& c);

struct VerificationReport {
  bool valid = false;
  double max_coeff_residual = 0.0;
  /// (Theta - |b_beta|) / Theta per circuit; negative means violated.
  std::vector<double> margins;
  std::vector<std::string> problems;
};

/// Checks a certificate against p without trusting any stored lambda/theta.
VerificationReport verify_certificate(const SparsePolynomial& p, const Certificate& cert, double tol = 1e-6);

enum class SplitStrategy { even, variable };
enum class BoundStatus { bounded, unbounded, trivial, failed };

const char* to_string(SplitStrategy s);
const char* to_string(BoundStatus s);

struct BoundOptions {
  SplitStrategy split = SplitStrategy::variable;
  double tol = kGpTolerance;
  double verify_tol = 1e-6;
};

struct Diagnostics {
  int cover_size = 0;
  std::vector<int> degenerate_indices;
  SplitStrategy split = SplitStrategy::variable;
  bool simplex_shortcut = false;
  std::optional<GpStatus> solver_status;
  double wall_time = 0.0;  ///< seconds
  int gp_variables = 0;
  int gp_inequalities = 0;
  int gp_equalities = 0;
  std::string failure_reason;

  int degenerate_count() const { return static_cast<int>(degenerate_indices.size()); }
};

struct BoundResult {
  BoundStatus status = BoundStatus::failed;
  std::optional<double> lower_bound;
  std::optional<double> gamma;
  std::optional<Certificate> certificate;
  Cover cover;
  Diagnostics diagnostics;
};

enum class Gate { proceed, trivial, unbounded };

/// Unbounded iff some vertex is a non-square; trivial iff there are no
/// non-squares. Needs `c.vertices` filled.
Gate detect_trivial_or_unbounded(const SparsePolynomial& p, const SupportClassification& c);

/// GP variable X^k_{i,j}: weight taken from vertex i of simplex k to balance
/// covered point j of that simplex (local indices).
struct SoncVariable {
  int simplex = 0;
  int vertex = 0;
  int covered = 0;
};

struct SoncVariableMap {
  std::vector<SoncVariable> entries;
  /// First variable id of each simplex; its block is contiguous.
  std::vector<int> simplex_offset;

  int id(int simplex, int vertex, int covered) const;
};

/// A SONC geometric program together with the data needed to read it back.
struct SoncProblem {
  GeometricProgram gp;
  SoncVariableMap map;
  /// Signed share of each covered point's coefficient, per simplex.
  std::vector<Eigen::VectorXd> inner_coefficients;
  /// Budget per vertex of each simplex as used by this GP.
  std::vector<Eigen::VectorXd> vertex_budgets;
  bool has_objective = false;
};

/// b_i^k = b_i / #{simplices containing alpha(i)}, for vertices and covered points.
struct SimplexCoefficients {
  Eigen::VectorXd vertex;
  Eigen::VectorXd covered;
};
std::vector<SimplexCoefficients> even_split(const SparsePolynomial& p, const Cover& cover);

/// Single-simplex GP on the whole support; requires New(p) to be a simplex
/// with square vertices and every other point a strictly interior non-square.
SoncProblem build_simplex_gp(const SparsePolynomial& p);

/// Joint GP with shared budgets sum_{k,j} X^k_{i,j} <= b_i.
SoncProblem build_varsplit_gp(const SparsePolynomial& p, const Cover& cover);

/// GP for simplex k alone with the even-split budgets; variable ids are local
/// to the simplex block of build_varsplit_gp.
SoncProblem build_even_subproblem(const SparsePolynomial& p, const Cover& cover, int k);

/// Equal-share point X_{i,j} = fraction * budget_i / uses_i with the origin
/// variables solved from the equalities. Empty if some simplex lacks the
/// origin. With fraction < 1 the budgets hold strictly.
std::optional<Eigen::VectorXd> initial_feasible_point(const SoncProblem& problem, const Cover& cover,
                                                      double budget_fraction = 1.0);

/// Builds the circuits from a GP point of build_varsplit_gp's variable layout,
/// clamping over-used budgets and re-solving origin weights so each circuit
/// with the origin is tight.
Certificate extract_certificate(const SparsePolynomial& p, const Cover& cover, const SoncProblem& problem,
                                const Eigen::VectorXd& x);

Certificate trivial_certificate(const SparsePolynomial& p);

BoundResult bound(const SparsePolynomial& p, const BoundOptions& options = {});

/// Same as bound() but with the given vertex sets (support indices) as cover.
BoundResult bound_with_cover(const SparsePolynomial& p, const std::vector<std::vector<int>>& simplices,
                             const BoundOptions& options = {});

}  // namespace sonc
