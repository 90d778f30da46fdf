#include "sonc/certifier.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace sonc {

const char* to_string(SplitStrategy s) { return s == SplitStrategy::even ? "even" : "variable"; }

const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::bounded: return "bounded";
    case BoundStatus::unbounded: return "unbounded";
    case BoundStatus::trivial: return "trivial";
    case BoundStatus::failed: return "failed";
  }
  return "unknown";
}

double circuit_number(const CircuitPolynomial& c) {
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(c.outer.size()));
  for (std::size_t i = 0; i < c.outer.size(); ++i) coeffs(static_cast<Eigen::Index>(i)) = c.outer[i].coefficient;
  return circuit_number(coeffs, c.lambda);
}

int SoncVariableMap::id(int simplex, int vertex, int covered) const {
  for (std::size_t v = 0; v < entries.size(); ++v) {
    const auto& e = entries[v];
    if (e.simplex == simplex && e.vertex == vertex && e.covered == covered) return static_cast<int>(v);
  }
  return -1;
}

Gate detect_trivial_or_unbounded(const SparsePolynomial& p, const SupportClassification& c) {
  (void)p;
  for (int v : c.vertices) {
    if (std::find(c.non_squares.begin(), c.non_squares.end(), v) != c.non_squares.end()) return Gate::unbounded;
  }
  return c.non_squares.empty() ? Gate::trivial : Gate::proceed;
}

std::vector<SimplexCoefficients> even_split(const SparsePolynomial& p, const Cover& cover) {
  std::vector<int> count(static_cast<std::size_t>(p.num_terms()), 0);
  for (const auto& s : cover.simplices) {
    for (int i : s.vertex_indices) ++count[static_cast<std::size_t>(i)];
    for (int j : s.covered_indices) ++count[static_cast<std::size_t>(j)];
  }
  std::vector<SimplexCoefficients> out;
  for (const auto& s : cover.simplices) {
    SimplexCoefficients c;
    c.vertex.resize(static_cast<Eigen::Index>(s.vertex_indices.size()));
    c.covered.resize(static_cast<Eigen::Index>(s.covered_indices.size()));
    for (std::size_t i = 0; i < s.vertex_indices.size(); ++i) {
      const int idx = s.vertex_indices[i];
      c.vertex(static_cast<Eigen::Index>(i)) = p.coefficient(idx) / count[static_cast<std::size_t>(idx)];
    }
    for (std::size_t j = 0; j < s.covered_indices.size(); ++j) {
      const int idx = s.covered_indices[j];
      c.covered(static_cast<Eigen::Index>(j)) = p.coefficient(idx) / count[static_cast<std::size_t>(idx)];
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Builds the GP over simplices `ks`. With shared budgets the constraint for a
// positive point sums over all listed simplices and uses the full b_i,
// otherwise each simplex gets its own constraint with the even-split share.
SoncProblem build_problem(const SparsePolynomial& p, const Cover& cover, const std::vector<int>& ks, bool shared) {
  const auto split = even_split(p, cover);
  SoncProblem prob;
  prob.map.simplex_offset.assign(cover.simplices.size(), -1);
  prob.inner_coefficients.resize(cover.simplices.size());
  prob.vertex_budgets.resize(cover.simplices.size());

  for (int k : ks) {
    const auto& s = cover.simplices[static_cast<std::size_t>(k)];
    prob.map.simplex_offset[static_cast<std::size_t>(k)] = static_cast<int>(prob.map.entries.size());
    prob.inner_coefficients[static_cast<std::size_t>(k)] = split[static_cast<std::size_t>(k)].covered;
    Eigen::VectorXd budgets(static_cast<Eigen::Index>(s.vertex_indices.size()));
    for (std::size_t i = 0; i < s.vertex_indices.size(); ++i) {
      budgets(static_cast<Eigen::Index>(i)) =
          shared ? p.coefficient(s.vertex_indices[i]) : split[static_cast<std::size_t>(k)].vertex(static_cast<Eigen::Index>(i));
    }
    prob.vertex_budgets[static_cast<std::size_t>(k)] = budgets;
    for (std::size_t j = 0; j < s.covered_indices.size(); ++j) {
      for (std::size_t i = 0; i < s.vertex_indices.size(); ++i) {
        prob.map.entries.push_back({k, static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  const int m = static_cast<int>(prob.map.entries.size());
  prob.gp.num_variables = m;

  std::map<int, Posynomial> shared_rows;
  std::map<std::pair<int, int>, Posynomial> own_rows;
  for (int v = 0; v < m; ++v) {
    const auto& e = prob.map.entries[static_cast<std::size_t>(v)];
    const auto& s = cover.simplices[static_cast<std::size_t>(e.simplex)];
    if (s.contains_origin && e.vertex == 0) {
      prob.gp.objective.push_back({1.0, {{v, 1.0}}});
      continue;
    }
    const double budget = prob.vertex_budgets[static_cast<std::size_t>(e.simplex)](e.vertex);
    Monomial term{1.0 / budget, {{v, 1.0}}};
    if (shared) {
      shared_rows[s.vertex_indices[static_cast<std::size_t>(e.vertex)]].push_back(term);
    } else {
      own_rows[{e.simplex, e.vertex}].push_back(term);
    }
  }
  for (auto& [idx, row] : shared_rows) prob.gp.inequalities.push_back(std::move(row));
  for (auto& [key, row] : own_rows) prob.gp.inequalities.push_back(std::move(row));

  for (int k : ks) {
    const auto& s = cover.simplices[static_cast<std::size_t>(k)];
    const int offset = prob.map.simplex_offset[static_cast<std::size_t>(k)];
    const auto h = static_cast<int>(s.vertex_indices.size());
    for (std::size_t j = 0; j < s.covered_indices.size(); ++j) {
      Monomial eq;
      double log_c = -std::log(std::abs(prob.inner_coefficients[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(j))));
      for (int i = 0; i < h; ++i) {
        const double l = s.lambda(i, static_cast<Eigen::Index>(j));
        log_c -= l * std::log(l);
        eq.exponents.emplace_back(offset + static_cast<int>(j) * h + i, l);
      }
      eq.coefficient = std::exp(log_c);
      prob.gp.equalities.push_back(std::move(eq));
    }
  }
  prob.has_objective = !prob.gp.objective.empty();
  return prob;
}

std::vector<int> all_simplices(const Cover& cover) {
  std::vector<int> ks(cover.simplices.size());
  for (std::size_t k = 0; k < ks.size(); ++k) ks[k] = static_cast<int>(k);
  return ks;
}

// Origin weight making the circuit tight: X0 = l0 * (|b| / prod_{i>0} (X_i/l_i)^{l_i})^{1/l0}.
double tight_origin_weight(const Eigen::VectorXd& outer, const Eigen::VectorXd& lambda, double inner_abs) {
  double log_rest = 0.0;
  for (Eigen::Index i = 1; i < outer.size(); ++i) log_rest += lambda(i) * (std::log(outer(i)) - std::log(lambda(i)));
  return lambda(0) * std::exp((std::log(inner_abs) - log_rest) / lambda(0));
}

}  // namespace

SoncProblem build_varsplit_gp(const SparsePolynomial& p, const Cover& cover) {
  return build_problem(p, cover, all_simplices(cover), true);
}

SoncProblem build_even_subproblem(const SparsePolynomial& p, const Cover& cover, int k) {
  return build_problem(p, cover, {k}, false);
}

namespace {

std::optional<CoverSimplex> simplex_of_newton_polytope(const SparsePolynomial& p, const SupportClassification& c) {
  if (affine_rank(select_columns(p.exponents(), c.vertices)) != static_cast<int>(c.vertices.size())) return std::nullopt;
  std::vector<int> others;
  for (int i = 0; i < p.num_terms(); ++i) {
    if (std::find(c.vertices.begin(), c.vertices.end(), i) != c.vertices.end()) continue;
    if (std::find(c.non_squares.begin(), c.non_squares.end(), i) == c.non_squares.end()) return std::nullopt;
    others.push_back(i);
  }
  CoverSimplex s = make_cover_simplex(p.exponents(), c.vertices, others);
  if (s.covered_indices.size() != others.size()) return std::nullopt;
  return s;
}

}  // namespace

SoncProblem build_simplex_gp(const SparsePolynomial& p) {
  SupportClassification c = classify_support(p);
  c.vertices = compute_vertices(p);
  for (int v : c.vertices) {
    if (std::find(c.non_squares.begin(), c.non_squares.end(), v) != c.non_squares.end()) {
      throw std::invalid_argument("build_simplex_gp: a vertex is not a monomial square");
    }
  }
  auto s = simplex_of_newton_polytope(p, c);
  if (!s) throw std::invalid_argument("build_simplex_gp: Newton polytope is not a simplex with strictly interior non-squares");
  Cover cover;
  cover.simplices.push_back(std::move(*s));
  return build_varsplit_gp(p, cover);
}

std::optional<Eigen::VectorXd> initial_feasible_point(const SoncProblem& problem, const Cover& cover,
                                                      double budget_fraction) {
  const int m = problem.gp.num_variables;
  for (const auto& e : problem.map.entries) {
    if (!cover.simplices[static_cast<std::size_t>(e.simplex)].contains_origin) return std::nullopt;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  for (const auto& row : problem.gp.inequalities) {
    for (const auto& term : row) {
      x(term.exponents.front().first) = budget_fraction / (static_cast<double>(row.size()) * term.coefficient);
    }
  }
  Eigen::Index eq = 0;
  for (std::size_t k = 0; k < cover.simplices.size(); ++k) {
    const int offset = problem.map.simplex_offset[k];
    if (offset < 0) continue;
    const auto& s = cover.simplices[k];
    const auto h = static_cast<int>(s.vertex_indices.size());
    for (std::size_t j = 0; j < s.covered_indices.size(); ++j, ++eq) {
      const int base = offset + static_cast<int>(j) * h;
      const Eigen::VectorXd lambda = s.lambda.col(static_cast<Eigen::Index>(j));
      const double b = std::abs(problem.inner_coefficients[k](static_cast<Eigen::Index>(j)));
      x(base) = tight_origin_weight(x.segment(base, h), lambda, b);
    }
  }
  if (!x.allFinite() || (x.array() <= 0.0).any()) return std::nullopt;
  for (const auto& row : problem.gp.inequalities) {
    if (evaluate(row, x) > 1.0 + 1e-12) return std::nullopt;
  }
  for (const auto& e : problem.gp.equalities) {
    if (std::abs(std::log(evaluate(e, x))) > 1e-9) return std::nullopt;
  }
  return x;
}

Certificate trivial_certificate(const SparsePolynomial& p) {
  Certificate cert;
  cert.gamma = -p.constant_term();
  for (int i = 1; i < p.num_terms(); ++i) cert.residual_squares.push_back({p.exponent(i), p.coefficient(i)});
  return cert;
}

Certificate extract_certificate(const SparsePolynomial& p, const Cover& cover, const SoncProblem& problem,
                                const Eigen::VectorXd& x) {
  if (x.size() != problem.gp.num_variables) throw std::invalid_argument("extract_certificate: point size mismatch");
  std::vector<double> usage(static_cast<std::size_t>(p.num_terms()), 0.0);
  for (std::size_t v = 0; v < problem.map.entries.size(); ++v) {
    const auto& e = problem.map.entries[v];
    const auto& s = cover.simplices[static_cast<std::size_t>(e.simplex)];
    const int idx = s.vertex_indices[static_cast<std::size_t>(e.vertex)];
    if (idx != 0) usage[static_cast<std::size_t>(idx)] += x(static_cast<Eigen::Index>(v));
  }
  std::vector<double> scale(usage.size(), 1.0);
  for (std::size_t i = 1; i < usage.size(); ++i) {
    if (usage[i] > p.coefficient(static_cast<int>(i))) scale[i] = p.coefficient(static_cast<int>(i)) / usage[i];
  }

  Certificate cert;
  double origin_total = 0.0;
  std::vector<double> used(usage.size(), 0.0);
  for (std::size_t k = 0; k < cover.simplices.size(); ++k) {
    const int offset = problem.map.simplex_offset[k];
    if (offset < 0) continue;
    const auto& s = cover.simplices[k];
    const auto h = static_cast<int>(s.vertex_indices.size());
    for (std::size_t j = 0; j < s.covered_indices.size(); ++j) {
      const Eigen::VectorXd lambda = s.lambda.col(static_cast<Eigen::Index>(j));
      const double inner = problem.inner_coefficients[k](static_cast<Eigen::Index>(j));
      Eigen::VectorXd outer(h);
      for (int i = 0; i < h; ++i) {
        const int idx = s.vertex_indices[static_cast<std::size_t>(i)];
        outer(i) = x(offset + static_cast<int>(j) * h + i) * scale[static_cast<std::size_t>(idx)];
      }
      if (s.contains_origin) outer(0) = tight_origin_weight(outer, lambda, std::abs(inner));

      CircuitPolynomial c;
      for (int i = 0; i < h; ++i) {
        const int idx = s.vertex_indices[static_cast<std::size_t>(i)];
        c.outer.push_back({p.exponent(idx), outer(i)});
        if (idx == 0) {
          origin_total += outer(i);
        } else {
          used[static_cast<std::size_t>(idx)] += outer(i);
        }
      }
      c.inner = {p.exponent(s.covered_indices[j]), inner};
      c.lambda = lambda;
      c.theta = circuit_number(outer, lambda);
      cert.circuits.push_back(std::move(c));
    }
  }
  const SupportClassification cls = classify_support(p);
  for (int i : cls.mono_squares) {
    if (i == 0) continue;
    const double rest = p.coefficient(i) - used[static_cast<std::size_t>(i)];
    if (rest > 0.0) cert.residual_squares.push_back({p.exponent(i), rest});
  }
  cert.gamma = origin_total - p.constant_term();
  return cert;
}

VerificationReport verify_certificate(const SparsePolynomial& p, const Certificate& cert, double tol) {
  VerificationReport rep;
  const int n = p.num_variables();
  std::map<std::vector<int>, double> total;
  auto key = [](const Exponent& e) { return std::vector<int>(e.data(), e.data() + e.size()); };
  auto add = [&](const Exponent& e, double c) { total[key(e)] += c; };

  for (std::size_t ci = 0; ci < cert.circuits.size(); ++ci) {
    const auto& c = cert.circuits[ci];
    const std::string tag = "circuit " + std::to_string(ci) + ": ";
    const auto r = static_cast<Eigen::Index>(c.outer.size());
    bool ok = r > 0 && c.inner.exponent.size() == n;
    Eigen::MatrixXd m(n + 1, r);
    Eigen::VectorXd coeffs(r);
    for (Eigen::Index i = 0; i < r && ok; ++i) {
      const auto& t = c.outer[static_cast<std::size_t>(i)];
      if (t.exponent.size() != n) {
        ok = false;
        break;
      }
      if (!is_even(t.exponent)) rep.problems.push_back(tag + "outer exponent not even");
      if (!(t.coefficient > 0.0)) rep.problems.push_back(tag + "outer coefficient not positive");
      m(0, i) = 1.0;
      m.col(i).tail(n) = t.exponent.cast<double>();
      coeffs(i) = t.coefficient;
    }
    if (!ok) {
      rep.problems.push_back(tag + "malformed");
      rep.margins.push_back(-1.0);
      continue;
    }
    for (const auto& t : c.outer) add(t.exponent, t.coefficient);
    add(c.inner.exponent, c.inner.coefficient);

    Eigen::VectorXd rhs(n + 1);
    rhs(0) = 1.0;
    rhs.tail(n) = c.inner.exponent.cast<double>();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(1e-10);
    const Eigen::VectorXd lambda = qr.solve(rhs);
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    const bool independent = qr.rank() == r;
    const bool reproduces = (m * lambda - rhs).cwiseAbs().maxCoeff() <= 1e-9 * scale;
    const bool positive = (lambda.array() > 1e-12).all();
    const bool square_sum = is_even(c.inner.exponent) && c.inner.coefficient >= 0.0 &&
                            std::all_of(c.outer.begin(), c.outer.end(), [](const Term& t) { return t.coefficient >= 0.0; });
    if (!(independent && reproduces && positive) || (coeffs.array() <= 0.0).any()) {
      if (!square_sum) {
        rep.problems.push_back(tag + "inner exponent is not in the relative interior of an outer simplex");
        rep.margins.push_back(-1.0);
      } else {
        rep.margins.push_back(1.0);
      }
      continue;
    }
    const double theta = circuit_number(coeffs, lambda);
    const double b = std::abs(c.inner.coefficient);
    rep.margins.push_back((theta - b) / theta);
    if (!square_sum && b > theta * (1.0 + tol)) {
      rep.problems.push_back(tag + "inner coefficient exceeds circuit number");
    }
  }

  for (const auto& t : cert.residual_squares) {
    if (t.exponent.size() != n) {
      rep.problems.push_back("residual square has wrong dimension");
      continue;
    }
    if (!is_even(t.exponent)) rep.problems.push_back("residual square with odd exponent");
    if (t.coefficient < 0.0) rep.problems.push_back("residual square with negative coefficient");
    add(t.exponent, t.coefficient);
  }

  for (int i = 0; i < p.num_terms(); ++i) add(p.exponent(i), -p.coefficient(i));
  add(Exponent::Zero(n), -cert.gamma);
  double worst = 0.0;
  for (const auto& [e, v] : total) worst = std::max(worst, std::abs(v));
  rep.max_coeff_residual = worst;
  const double bmax = p.coefficients().cwiseAbs().maxCoeff();
  if (worst > tol * (1.0 + bmax)) rep.problems.push_back("reconstruction residual " + std::to_string(worst));
  rep.valid = rep.problems.empty();
  return rep;
}

namespace {

GpStatus worse(GpStatus a, GpStatus b) {
  auto rank = [](GpStatus s) {
    switch (s) {
      case GpStatus::optimal: return 0;
      case GpStatus::inaccurate: return 1;
      case GpStatus::unbounded: return 2;
      case GpStatus::infeasible: return 3;
      case GpStatus::failed: return 4;
    }
    return 4;
  };
  return rank(a) >= rank(b) ? a : b;
}

struct SolveOutcome {
  GpStatus status = GpStatus::failed;
  Eigen::VectorXd x;
  std::string reason;
};

SolveOutcome solve_sonc(const SoncProblem& prob, const Cover& cover, double tol) {
  SolveOutcome out;
  if (prob.gp.num_variables == 0) {
    out.status = GpStatus::optimal;
    return out;
  }
  if (!prob.has_objective) {
    const FeasibilityResult fr = check_feasibility(prob.gp, tol);
    out.status = fr.status;
    out.x = fr.x;
    if (!fr.feasible()) out.reason = "feasibility subproblem is infeasible";
    return out;
  }
  const auto start = initial_feasible_point(prob, cover, 0.5);
  const GPSolution sol = solve_gp(prob.gp, tol, start);
  out.status = sol.status;
  out.x = sol.x;
  if (sol.interior_empty) {
    out.status = GpStatus::infeasible;
    out.reason = "constraints admit no strictly feasible point";
  } else if (sol.status == GpStatus::infeasible) {
    out.reason = "GP infeasible";
  } else if (sol.status == GpStatus::failed || sol.status == GpStatus::unbounded) {
    out.reason = std::string("GP solver ") + to_string(sol.status);
  }
  return out;
}

void count_gp(Diagnostics& d, const GeometricProgram& gp) {
  d.gp_variables += gp.num_variables;
  d.gp_inequalities += static_cast<int>(gp.inequalities.size());
  d.gp_equalities += static_cast<int>(gp.equalities.size());
}

BoundResult bound_impl(const SparsePolynomial& p, const BoundOptions& options,
                       const std::vector<std::vector<int>>* user_cover) {
  const auto started = std::chrono::steady_clock::now();
  BoundResult res;
  res.diagnostics.split = options.split;
  auto finish = [&]() {
    res.diagnostics.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
  };
  auto fail = [&](std::string why) {
    res.status = BoundStatus::failed;
    res.lower_bound.reset();
    res.gamma.reset();
    res.certificate.reset();
    if (res.diagnostics.degenerate_count() > 0) why += " (degenerate points present)";
    res.diagnostics.failure_reason = std::move(why);
    return finish();
  };

  SupportClassification c = classify_support(p);
  c.vertices = compute_vertices(p);
  switch (detect_trivial_or_unbounded(p, c)) {
    case Gate::unbounded:
      res.status = BoundStatus::unbounded;
      return finish();
    case Gate::trivial: {
      res.status = BoundStatus::trivial;
      res.certificate = trivial_certificate(p);
      res.gamma = res.certificate->gamma;
      res.lower_bound = -res.certificate->gamma;
      return finish();
    }
    case Gate::proceed: break;
  }

  if (user_cover) {
    for (const auto& verts : *user_cover) {
      for (int v : verts) {
        if (v < 0 || v >= p.num_terms() ||
            std::find(c.mono_squares.begin(), c.mono_squares.end(), v) == c.mono_squares.end()) {
          throw std::invalid_argument("bound_with_cover: simplex vertex is not a monomial square");
        }
      }
      res.cover.simplices.push_back(make_cover_simplex(p.exponents(), verts, c.non_squares));
    }
    for (int j : c.non_squares) {
      const bool covered = std::any_of(res.cover.simplices.begin(), res.cover.simplices.end(), [&](const CoverSimplex& s) {
        return std::find(s.covered_indices.begin(), s.covered_indices.end(), j) != s.covered_indices.end();
      });
      if (!covered) throw std::invalid_argument("bound_with_cover: non-square " + std::to_string(j) + " is not covered");
    }
  } else if (auto s = simplex_of_newton_polytope(p, c)) {
    res.diagnostics.simplex_shortcut = true;
    res.cover.simplices.push_back(std::move(*s));
  } else {
    try {
      res.cover = cover(p.exponents(), c.mono_squares, c.non_squares);
    } catch (const UncoverablePointError& e) {
      return fail(e.what());
    }
  }
  res.cover.degenerate_indices = find_degenerate_points(p, res.cover, c.non_squares);
  res.diagnostics.cover_size = static_cast<int>(res.cover.simplices.size());
  res.diagnostics.degenerate_indices = res.cover.degenerate_indices;

  const SoncProblem joint = build_varsplit_gp(p, res.cover);
  Eigen::VectorXd x;
  if (options.split == SplitStrategy::variable) {
    count_gp(res.diagnostics, joint.gp);
    const SolveOutcome out = solve_sonc(joint, res.cover, options.tol);
    res.diagnostics.solver_status = out.status;
    if (out.status != GpStatus::optimal && out.status != GpStatus::inaccurate) return fail(out.reason);
    x = out.x;
  } else {
    x = Eigen::VectorXd::Zero(joint.gp.num_variables);
    GpStatus overall = GpStatus::optimal;
    for (std::size_t k = 0; k < res.cover.simplices.size(); ++k) {
      const SoncProblem sub = build_even_subproblem(p, res.cover, static_cast<int>(k));
      count_gp(res.diagnostics, sub.gp);
      const SolveOutcome out = solve_sonc(sub, res.cover, options.tol);
      overall = worse(overall, out.status);
      res.diagnostics.solver_status = overall;
      if (out.status != GpStatus::optimal && out.status != GpStatus::inaccurate) {
        return fail("simplex " + std::to_string(k) + ": " + out.reason);
      }
      x.segment(joint.map.simplex_offset[k], sub.gp.num_variables) = out.x;
    }
  }

  Certificate cert = extract_certificate(p, res.cover, joint, x);
  const VerificationReport rep = verify_certificate(p, cert, options.verify_tol);
  if (!rep.valid) return fail("certificate rejected: " + rep.problems.front());
  res.status = BoundStatus::bounded;
  res.gamma = cert.gamma;
  res.lower_bound = -cert.gamma;
  res.certificate = std::move(cert);
  return finish();
}

}  // namespace

BoundResult bound(const SparsePolynomial& p, const BoundOptions& options) { return bound_impl(p, options, nullptr); }

BoundResult bound_with_cover(const SparsePolynomial& p, const std::vector<std::vector<int>>& simplices,
                             const BoundOptions& options) {
  return bound_impl(p, options, &simplices);
}

}  // namespace sonc
