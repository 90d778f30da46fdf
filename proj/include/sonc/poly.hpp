#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sonc {

/// Lattice point in N^n. Columns of an ExponentMatrix are exponents.
using Exponent = Eigen::VectorXi;
using ExponentMatrix = Eigen::MatrixXi;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficients with magnitude below this are dropped during canonicalization.
inline constexpr double kZeroCoefficient = 1e-12;

/// Graded lexicographic order: total degree first, then entries left to right.
bool graded_lex_less(const Exponent& a, const Exponent& b);
bool lex_less(const Exponent& a, const Exponent& b);

/// Sparse real polynomial p = sum_i b_i x^{A_i}, stored as the pair (A, b).
///
/// The stored form is canonical: exponents are distinct and sorted in graded
/// lexicographic order, zero coefficients are removed, and the origin term is
/// always the first column (with coefficient 0 if p has no constant term).
/// Instances are immutable once constructed.
class SparsePolynomial {
 public:
  SparsePolynomial() : SparsePolynomial(0) {}
  explicit SparsePolynomial(int num_variables);
  /// Canonicalizes the given columns; duplicate exponents are summed.
  SparsePolynomial(ExponentMatrix exponents, Eigen::VectorXd coefficients);

  int num_variables() const { return static_cast<int>(exponents_.rows()); }
  int num_terms() const { return static_cast<int>(exponents_.cols()); }

  const ExponentMatrix& exponents() const { return exponents_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }

  Exponent exponent(int i) const { return exponents_.col(i); }
  double coefficient(int i) const { return coefficients_(i); }
  double constant_term() const { return coefficients_(0); }

  /// Index of the term with exponent `alpha`, if present.
  std::optional<int> find(const Exponent& alpha) const;

  bool operator==(const SparsePolynomial& other) const;

 private:
  ExponentMatrix exponents_;
  Eigen::VectorXd coefficients_;
};

/// Parses `poly := term (('+'|'-') term)*` with `term := [coeff '*'] var ('^' int)? ('*' var ('^' int)?)*`
/// and `var := 'x' int`. A bare coefficient is a constant term. When
/// `num_variables` is given, variable indices must be below it; otherwise n is
/// one past the largest index that occurs.
SparsePolynomial parse_polynomial(std::string_view text, std::optional<int> num_variables = std::nullopt);

/// Inverse of parse_polynomial; coefficients are printed round-trip exact.
std::string to_string(const SparsePolynomial& p);

/// Index partition of the support. `vertices` and `interior` are left empty
/// by classify_support and filled by annotate_geometry.
struct SupportClassification {
  std::vector<int> mono_squares;
  std::vector<int> non_squares;
  std::vector<int> vertices;
  std::vector<int> interior;
};

bool is_even(const Exponent& alpha);

/// Splits the support into monomial squares (even exponent, positive
/// coefficient) and the rest. The origin is always a square: its coefficient
/// is the shift slot of every lower bound.
SupportClassification classify_support(const SparsePolynomial& p);

template <typename Derived>
double evaluate(const SparsePolynomial& p, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != p.num_variables()) {
    throw DimensionError("evaluate: point has " + std::to_string(x.size()) + " entries, polynomial has " +
                         std::to_string(p.num_variables()) + " variables");
  }
  double total = 0.0;
  for (int i = 0; i < p.num_terms(); ++i) {
    double term = p.coefficient(i);
    for (int k = 0; k < p.num_variables(); ++k) {
      const int e = p.exponents()(k, i);
      if (e != 0) term *= std::pow(static_cast<double>(x(k)), e);
    }
    total += term;
  }
  return total;
}

int degree(const SparsePolynomial& p);
int total_degree(const Exponent& alpha);
SparsePolynomial scale_exponents(const SparsePolynomial& p, int factor);
SparsePolynomial operator+(const SparsePolynomial& p, const SparsePolynomial& q);

/// Builds a polynomial from (exponent, coefficient) pairs.
SparsePolynomial from_terms(int num_variables, const std::vector<std::pair<std::vector<int>, double>>& terms);

}  // namespace sonc
