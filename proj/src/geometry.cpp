#include "sonc/geometry.hpp"

#include <algorithm>
#include <set>

namespace sonc {

Eigen::MatrixXd to_real(const ExponentMatrix& a) { return a.cast<double>(); }

Eigen::MatrixXd select_columns(const ExponentMatrix& support, const std::vector<int>& indices) {
  Eigen::MatrixXd out(support.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = support.col(indices[k]).cast<double>();
  }
  return out;
}

namespace {

// Rows: one coordinate row per dimension, then the sum-to-one row.
LinearProgram convex_combination_lp(const Eigen::MatrixXd& points, const Eigen::VectorXd& target) {
  const auto n = points.rows();
  const auto k = points.cols();
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(k);
  lp.equality_matrix.resize(n + 1, k);
  lp.equality_matrix.topRows(n) = points;
  lp.equality_matrix.row(n).setOnes();
  lp.equality_rhs.resize(n + 1);
  lp.equality_rhs.head(n) = target;
  lp.equality_rhs(n) = 1.0;
  return lp;
}

}  // namespace

std::vector<int> compute_vertices(const SparsePolynomial& p) {
  const Eigen::MatrixXd pts = to_real(p.exponents());
  const int t = p.num_terms();
  std::vector<int> vertices;
  if (t == 1) return {0};
  for (int i = 0; i < t; ++i) {
    Eigen::MatrixXd others(pts.rows(), t - 1);
    for (int j = 0, c = 0; j < t; ++j) {
      if (j != i) others.col(c++) = pts.col(j);
    }
    const LpSolution s = solve_lp(convex_combination_lp(others, pts.col(i)));
    if (s.status == LpStatus::iteration_limit) throw std::runtime_error("compute_vertices: LP iteration limit");
    if (s.status == LpStatus::infeasible) vertices.push_back(i);
  }
  return vertices;
}

bool in_convex_hull(const Eigen::MatrixXd& points, const Eigen::VectorXd& point) {
  if (points.cols() == 0) return false;
  const LpSolution s = solve_lp(convex_combination_lp(points, point));
  if (s.status == LpStatus::iteration_limit) throw std::runtime_error("in_convex_hull: LP iteration limit");
  return s.optimal();
}

bool in_relative_interior(const Eigen::MatrixXd& points, const Eigen::VectorXd& point) {
  // lambda_j = eps + mu_j with mu >= 0; maximize eps.
  const auto n = points.rows();
  const auto k = points.cols();
  if (k == 0) return false;
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(k + 1);
  lp.objective(k) = 1.0;
  lp.equality_matrix.resize(n + 1, k + 1);
  lp.equality_matrix.topLeftCorner(n, k) = points;
  lp.equality_matrix.topRightCorner(n, 1) = points.rowwise().sum();
  lp.equality_matrix.row(n).head(k).setOnes();
  lp.equality_matrix(n, k) = static_cast<double>(k);
  lp.equality_rhs.resize(n + 1);
  lp.equality_rhs.head(n) = point;
  lp.equality_rhs(n) = 1.0;
  const LpSolution s = solve_lp(lp);
  if (s.status == LpStatus::iteration_limit) throw std::runtime_error("in_relative_interior: LP iteration limit");
  return s.optimal() && s.objective > kInteriorTolerance;
}

void annotate_geometry(const SparsePolynomial& p, SupportClassification& c) {
  c.vertices = compute_vertices(p);
  c.interior.clear();
  const Eigen::MatrixXd pts = to_real(p.exponents());
  for (int i = 0; i < p.num_terms(); ++i) {
    if (std::find(c.vertices.begin(), c.vertices.end(), i) != c.vertices.end()) continue;
    if (in_relative_interior(pts, pts.col(i))) c.interior.push_back(i);
  }
}

LpSolution lphull(const Eigen::VectorXd& u, const Eigen::MatrixXd& squares, int origin_column) {
  LinearProgram lp = convex_combination_lp(squares, u);
  lp.objective(origin_column) = 1.0;
  return solve_lp(lp);
}

Barycentric barycentric_coordinates(const Eigen::MatrixXd& vertices, const Eigen::VectorXd& point) {
  const auto n = vertices.rows();
  const auto k = vertices.cols();
  Eigen::MatrixXd m(n + 1, k);
  Eigen::VectorXd rhs(n + 1);
  m.row(0).setOnes();
  rhs(0) = 1.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    double scale = k > 0 ? vertices.row(r).cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) scale = 1.0;
    m.row(r + 1) = vertices.row(r) / scale;
    rhs(r + 1) = point(r) / scale;
  }
  Barycentric out;
  out.lambda = m.colPivHouseholderQr().solve(rhs);
  out.residual = (m * out.lambda - rhs).cwiseAbs().maxCoeff();
  out.in_affine_hull = out.residual <= 1e-9;
  out.interior = out.in_affine_hull && (out.lambda.array() > kInteriorTolerance).all();
  return out;
}

CoverSimplex make_cover_simplex(const ExponentMatrix& support, std::vector<int> vertex_indices,
                                const std::vector<int>& candidates) {
  std::sort(vertex_indices.begin(), vertex_indices.end());
  const Eigen::MatrixXd verts = select_columns(support, vertex_indices);
  if (affine_rank(verts) != static_cast<int>(vertex_indices.size())) {
    throw std::invalid_argument("make_cover_simplex: vertices are affinely dependent");
  }
  CoverSimplex s;
  s.vertex_indices = vertex_indices;
  s.contains_origin = (support.col(vertex_indices.front()).array() == 0).all();
  std::vector<Eigen::VectorXd> columns;
  for (int j : candidates) {
    if (std::find(vertex_indices.begin(), vertex_indices.end(), j) != vertex_indices.end()) continue;
    const Barycentric bc = barycentric_coordinates(verts, support.col(j).cast<double>());
    if (!bc.interior) continue;
    s.covered_indices.push_back(j);
    columns.push_back(bc.lambda);
  }
  s.lambda.resize(static_cast<Eigen::Index>(vertex_indices.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) s.lambda.col(static_cast<Eigen::Index>(c)) = columns[c];
  return s;
}

Cover cover(const ExponentMatrix& support, const std::vector<int>& squares, const std::vector<int>& non_squares) {
  Cover result;
  if (non_squares.empty()) return result;
  const Eigen::MatrixXd square_pts = select_columns(support, squares);
  int origin_column = -1;
  for (std::size_t k = 0; k < squares.size(); ++k) {
    if ((support.col(squares[k]).array() == 0).all()) origin_column = static_cast<int>(k);
  }
  if (origin_column < 0) throw std::invalid_argument("cover: squares must contain the origin");

  std::vector<int> uncovered = non_squares;
  std::sort(uncovered.begin(), uncovered.end(), [&](int a, int b) {
    return lex_less(support.col(a), support.col(b));
  });

  while (!uncovered.empty()) {
    const int u = uncovered.front();
    const Eigen::VectorXd target = support.col(u).cast<double>();
    const LpSolution hull = lphull(target, square_pts, origin_column);
    if (hull.status == LpStatus::infeasible) {
      throw UncoverablePointError("point " + std::to_string(u) + " lies outside the hull of the monomial squares", u);
    }
    if (!hull.optimal()) throw std::runtime_error("cover: LPHull did not solve to optimality");

    std::vector<int> local;
    for (Eigen::Index k = 0; k < hull.x.size(); ++k) {
      if (hull.x(k) > kInteriorTolerance) local.push_back(static_cast<int>(k));
    }
    Eigen::MatrixXd s_pts(square_pts.rows(), static_cast<Eigen::Index>(local.size()));
    Eigen::VectorXd s_weights(static_cast<Eigen::Index>(local.size()));
    for (std::size_t k = 0; k < local.size(); ++k) {
      s_pts.col(static_cast<Eigen::Index>(k)) = square_pts.col(local[k]);
      s_weights(static_cast<Eigen::Index>(k)) = hull.x(local[k]);
    }
    if (affine_rank(s_pts) < static_cast<int>(local.size())) {
      s_weights /= s_weights.sum();
      const CaratheodoryResult reduced = caratheodory_reduce(s_pts, s_weights, target);
      std::vector<int> kept;
      for (int r : reduced.subset) kept.push_back(local[static_cast<std::size_t>(r)]);
      local = kept;
    }
    std::vector<int> vertex_indices;
    for (int k : local) vertex_indices.push_back(squares[static_cast<std::size_t>(k)]);

    CoverSimplex simplex = make_cover_simplex(support, vertex_indices, non_squares);
    if (std::find(simplex.covered_indices.begin(), simplex.covered_indices.end(), u) == simplex.covered_indices.end()) {
      throw std::runtime_error("cover: chosen point is not interior to its simplex");
    }
    std::erase_if(uncovered, [&](int j) {
      return std::find(simplex.covered_indices.begin(), simplex.covered_indices.end(), j) !=
             simplex.covered_indices.end();
    });
    result.simplices.push_back(std::move(simplex));
  }
  return result;
}

std::vector<int> find_degenerate_points(const SparsePolynomial& p, const Cover& cover,
                                        const std::vector<int>& non_squares) {
  const Eigen::MatrixXd pts = to_real(p.exponents());
  std::set<int> flagged;
  for (const auto& s : cover.simplices) {
    if (s.contains_origin) continue;
    for (int j : s.covered_indices) {
      if (std::find(non_squares.begin(), non_squares.end(), j) == non_squares.end()) continue;
      if (flagged.count(j)) continue;
      if (!in_relative_interior(pts, pts.col(j))) flagged.insert(j);
    }
  }
  return {flagged.begin(), flagged.end()};
}

}  // namespace sonc
