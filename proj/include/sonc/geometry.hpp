#pragma once

#include "sonc/lp.hpp"
#include "sonc/poly.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace sonc {

/// Barycentric coordinates above this count as strictly positive.
inline constexpr double kInteriorTolerance = 1e-9;

/// One simplex of a cover. `lambda(i, j)` is the weight of vertex i in the
/// covered point j; the origin, when present, is vertex 0.
struct CoverSimplex {
  std::vector<int> vertex_indices;
  std::vector<int> covered_indices;
  Eigen::MatrixXd lambda;
  bool contains_origin = false;
};

struct Cover {
  std::vector<CoverSimplex> simplices;
  std::vector<int> degenerate_indices;
};

class UncoverablePointError : public std::runtime_error {
 public:
  UncoverablePointError(const std::string& what, int index) : std::runtime_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

/// Converts exponent columns to doubles.
Eigen::MatrixXd to_real(const ExponentMatrix& a);

/// Columns of `support` selected by `indices`.
Eigen::MatrixXd select_columns(const ExponentMatrix& support, const std::vector<int>& indices);

/// Indices of extremal support points: those not a convex combination of the
/// other support points.
std::vector<int> compute_vertices(const SparsePolynomial& p);

/// True when `point` is a convex combination of the columns of `points`.
bool in_convex_hull(const Eigen::MatrixXd& points, const Eigen::VectorXd& point);

/// True when `point` lies in the relative interior of conv(points), decided
/// by an LP that maximizes the smallest weight of a convex representation.
bool in_relative_interior(const Eigen::MatrixXd& points, const Eigen::VectorXd& point);

/// Fills `vertices` and `interior` (support minus relative boundary of New(p)).
void annotate_geometry(const SparsePolynomial& p, SupportClassification& c);

/// max lambda_origin  s.t.  squares * lambda = u, sum lambda = 1, lambda >= 0.
/// `origin_column` names the column of `squares` that is the zero vector.
LpSolution lphull(const Eigen::VectorXd& u, const Eigen::MatrixXd& squares, int origin_column);

struct Barycentric {
  Eigen::VectorXd lambda;
  double residual = 0.0;
  bool in_affine_hull = false;
  bool interior = false;  ///< all coordinates > kInteriorTolerance
};

/// Solves [1; V] lambda = [1; point] for affinely independent columns V.
Barycentric barycentric_coordinates(const Eigen::MatrixXd& vertices, const Eigen::VectorXd& point);

/// Greedy simplex cover of the non-squares by simplices spanned by squares.
/// Throws UncoverablePointError if some non-square lies outside conv(squares).
Cover cover(const ExponentMatrix& support, const std::vector<int>& squares, const std::vector<int>& non_squares);

/// Builds a cover simplex on the given vertices, covering every candidate in
/// the relative interior of their hull. Vertices must be affinely independent.
CoverSimplex make_cover_simplex(const ExponentMatrix& support, std::vector<int> vertex_indices,
                                const std::vector<int>& candidates);

/// Non-squares on the relative boundary of New(p) covered by a simplex
/// without the origin.
std::vector<int> find_degenerate_points(const SparsePolynomial& p, const Cover& cover,
                                        const std::vector<int>& non_squares);

}  // namespace sonc
