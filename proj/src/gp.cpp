#include "sonc/gp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace sonc {

const char* to_string(GpStatus status) {
  switch (status) {
    case GpStatus::optimal: return "optimal";
    case GpStatus::infeasible: return "infeasible";
    case GpStatus::unbounded: return "unbounded";
    case GpStatus::inaccurate: return "inaccurate";
    case GpStatus::failed: return "failed";
  }
  return "unknown";
}

namespace {

double log_sum_exp(const Eigen::VectorXd& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

void validate(const GeometricProgram& gp) {
  auto check_monomial = [&](const Monomial& m, const char* where) {
    if (!(m.coefficient > 0.0) || !std::isfinite(m.coefficient)) {
      throw std::invalid_argument(std::string("GP ") + where + ": coefficient must be positive");
    }
    for (const auto& [var, power] : m.exponents) {
      if (var < 0 || var >= gp.num_variables) {
        throw std::invalid_argument(std::string("GP ") + where + ": variable index out of range");
      }
      if (!std::isfinite(power)) throw std::invalid_argument(std::string("GP ") + where + ": non-finite exponent");
    }
  };
  if (gp.num_variables < 0) throw std::invalid_argument("GP: negative variable count");
  for (const auto& m : gp.objective) check_monomial(m, "objective");
  for (const auto& f : gp.inequalities) {
    if (f.empty()) throw std::invalid_argument("GP inequality: empty posynomial");
    for (const auto& m : f) check_monomial(m, "inequality");
  }
  for (const auto& m : gp.equalities) check_monomial(m, "equality");
}

LogSumExp lse_of(const Posynomial& f, int m) {
  LogSumExp out;
  out.a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f.size()), m);
  out.c.resize(static_cast<Eigen::Index>(f.size()));
  for (std::size_t r = 0; r < f.size(); ++r) {
    out.c(static_cast<Eigen::Index>(r)) = std::log(f[r].coefficient);
    for (const auto& [var, power] : f[r].exponents) out.a(static_cast<Eigen::Index>(r), var) += power;
  }
  return out;
}

// log-sum-exp(G z + h) after eliminating the equality constraints.
struct ReducedLse {
  Eigen::MatrixXd g;
  Eigen::VectorXd h;

  double value(const Eigen::VectorXd& z) const { return log_sum_exp(g * z + h); }

  double eval(const Eigen::VectorXd& z, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const {
    const Eigen::VectorXd v = g * z + h;
    const double m = v.maxCoeff();
    const Eigen::ArrayXd e = (v.array() - m).exp();
    const double s = e.sum();
    const double val = m + std::log(s);
    if (grad || hess) {
      const Eigen::VectorXd p = e.matrix() / s;
      const Eigen::VectorXd gr = g.transpose() * p;
      if (grad) *grad = gr;
      if (hess) {
        const Eigen::MatrixXd gp = p.cwiseSqrt().asDiagonal() * g;
        *hess = gp.transpose() * gp - gr * gr.transpose();
      }
    }
    return val;
  }
};

struct Reduced {
  Eigen::VectorXd y0;
  Eigen::MatrixXd basis;  // orthonormal null space of E
  ReducedLse objective;
  std::vector<ReducedLse> inequalities;
  bool consistent = true;
  double equality_residual = 0.0;

  Eigen::VectorXd lift(const Eigen::VectorXd& z) const { return y0 + basis * z; }
  double max_constraint(const Eigen::VectorXd& z) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : inequalities) worst = std::max(worst, f.value(z));
    return worst;
  }
};

Reduced reduce(const LogConvexProgram& lcp) {
  const int m = lcp.num_variables;
  Reduced red;
  if (lcp.e.rows() == 0) {
    red.y0 = Eigen::VectorXd::Zero(m);
    red.basis = Eigen::MatrixXd::Identity(m, m);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(lcp.e);
    cod.setThreshold(1e-10);
    red.y0 = cod.solve(lcp.g);
    red.equality_residual = (lcp.e * red.y0 - lcp.g).cwiseAbs().maxCoeff();
    red.consistent = red.equality_residual <= 1e-9 * (1.0 + lcp.g.cwiseAbs().maxCoeff());

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(lcp.e.transpose());
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    red.basis = q.rightCols(m - rank);
  }
  auto reduce_lse = [&](const LogSumExp& f) {
    ReducedLse r;
    r.g = f.a * red.basis;
    r.h = f.c + f.a * red.y0;
    return r;
  };
  red.objective = reduce_lse(lcp.objective);
  for (const auto& f : lcp.inequalities) red.inequalities.push_back(reduce_lse(f));
  return red;
}

// Returns false outside the domain.
using Barrier = std::function<bool(const Eigen::VectorXd&, double*, Eigen::VectorXd*, Eigen::MatrixXd*)>;

enum class Centering { converged, step_cap, stalled, stopped };

Centering center(Eigen::VectorXd& w, const Barrier& barrier, int& steps, int max_steps,
                 const std::function<bool(const Eigen::VectorXd&)>& stop) {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  while (true) {
    if (!barrier(w, &value, &grad, &hess)) return Centering::stalled;
    if (steps >= max_steps) return Centering::step_cap;

    Eigen::VectorXd dir;
    const auto k = w.size();
    double shift = 0.0;
    const double diag_scale = 1.0 + (k > 0 ? hess.diagonal().cwiseAbs().maxCoeff() : 0.0);
    while (true) {
      Eigen::LLT<Eigen::MatrixXd> llt(shift == 0.0 ? hess : Eigen::MatrixXd(hess + shift * Eigen::MatrixXd::Identity(k, k)));
      if (llt.info() == Eigen::Success) {
        dir = -llt.solve(grad);
        if (dir.allFinite()) break;
      }
      shift = shift == 0.0 ? 1e-12 * diag_scale : shift * 10.0;
      if (shift > 1e8 * diag_scale) return Centering::stalled;
    }
    const double decrement = -grad.dot(dir);
    // Below the roundoff in the barrier value no further decrease is measurable.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(value);
    if (decrement / 2.0 <= std::max(1e-10, floor)) return Centering::converged;

    double alpha = 1.0;
    double trial_value = 0.0;
    Eigen::VectorXd trial;
    while (true) {
      trial = w + alpha * dir;
      if (barrier(trial, &trial_value, nullptr, nullptr) && trial_value <= value - 0.01 * alpha * decrement) break;
      alpha *= 0.5;
      if (alpha < 1e-14) return Centering::stalled;
    }
    w = trial;
    ++steps;
    if (stop && stop(w)) return Centering::stopped;
  }
}

constexpr double kBarrierGrowth = 20.0;
constexpr double kUnboundedLog = 700.0;
// Phase one stops early once strictly feasible and drifting this far in log space.
constexpr double kPhaseOneSpread = 50.0;
constexpr double kPhaseOneFloor = -1.0;

struct PhaseOne {
  enum class Outcome { strictly_feasible, boundary, infeasible, unbounded, numerical } outcome;
  Eigen::VectorXd z;
  double sigma = 0.0;
};

PhaseOne phase_one(const Reduced& red, Eigen::VectorXd z, double tol, int& steps) {
  const auto k = z.size();
  const auto count = static_cast<double>(red.inequalities.size());
  Eigen::VectorXd w(k + 1);
  w.head(k) = z;
  w(k) = red.max_constraint(z) + 1.0;
  const double gap_target = tol * 1e-2;
  double t = 1.0;
  int local_steps = 0;

  while (true) {
    Barrier barrier = [&](const Eigen::VectorXd& v, double* value, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
      const Eigen::VectorXd zz = v.head(k);
      const double s = v(k);
      // s > -1 keeps the slack bounded when the feasible set is unbounded.
      if (!(s > kPhaseOneFloor)) return false;
      double total = t * s - std::log(s - kPhaseOneFloor);
      if (grad) {
        grad->setZero(k + 1);
        (*grad)(k) = t - 1.0 / (s - kPhaseOneFloor);
      }
      if (hess) {
        hess->setZero(k + 1, k + 1);
        (*hess)(k, k) = 1.0 / ((s - kPhaseOneFloor) * (s - kPhaseOneFloor));
      }
      Eigen::VectorXd gf;
      Eigen::MatrixXd hf;
      for (const auto& f : red.inequalities) {
        const double fv = f.eval(zz, grad ? &gf : nullptr, hess ? &hf : nullptr);
        const double slack = s - fv;
        if (!(slack > 0.0) || !std::isfinite(slack)) return false;
        // -log(1 - exp(f - s)) stays bounded below as f -> -inf, unlike -log(s - f).
        const double em1 = std::expm1(slack);
        total -= std::log(-std::expm1(-slack));
        const double d1 = 1.0 / em1;
        if (grad) {
          grad->head(k) += d1 * gf;
          (*grad)(k) -= d1;
        }
        if (hess) {
          Eigen::VectorXd dg(k + 1);
          dg.head(k) = gf;
          dg(k) = -1.0;
          const double d2 = std::isfinite(em1) ? (em1 + 1.0) / (em1 * em1) : 0.0;
          *hess += d2 * (dg * dg.transpose());
          hess->topLeftCorner(k, k) += d1 * hf;
        }
      }
      *value = total;
      return std::isfinite(total);
    };
    auto good_enough = [&](const Eigen::VectorXd& v) {
      const double spread = red.lift(v.head(k)).cwiseAbs().maxCoeff();
      return v(k) <= -0.1 || (v(k) < -tol && spread > kPhaseOneSpread);
    };
    const Centering c = center(w, barrier, local_steps, kGpMaxNewtonSteps, good_enough);
    steps = local_steps;
    const double sigma = red.max_constraint(w.head(k));
    if (sigma < -tol && (c == Centering::stopped || c == Centering::converged || c == Centering::stalled)) {
      return {PhaseOne::Outcome::strictly_feasible, w.head(k), sigma};
    }
    const bool cut_short = c == Centering::step_cap;
    if (cut_short && t == 1.0) return {PhaseOne::Outcome::numerical, w.head(k), sigma};
    // A centering cut short still leaves the previous center's gap as a valid bound.
    const double gap = cut_short ? (count + 1.0) * kBarrierGrowth / t : (count + 1.0) / t;
    if (sigma - gap > tol) return {PhaseOne::Outcome::infeasible, w.head(k), sigma};
    if (gap <= gap_target || c == Centering::stalled || cut_short) {
      if (sigma - gap > tol) return {PhaseOne::Outcome::infeasible, w.head(k), sigma};
      if (sigma <= tol) return {PhaseOne::Outcome::boundary, w.head(k), sigma};
      return {PhaseOne::Outcome::numerical, w.head(k), sigma};
    }
    t *= kBarrierGrowth;
  }
}

Eigen::VectorXd initial_z(const Reduced& red, int m, const std::optional<Eigen::VectorXd>& start) {
  if (!start) return Eigen::VectorXd::Zero(red.basis.cols()) - red.basis.transpose() * red.y0;
  if (start->size() != m || (start->array() <= 0.0).any()) {
    throw std::invalid_argument("solve_gp: start must be a strictly positive vector of the right size");
  }
  const Eigen::VectorXd y = start->array().log().matrix();
  return red.basis.transpose() * (y - red.y0);
}

Eigen::VectorXd to_x(const Reduced& red, const Eigen::VectorXd& z) { return red.lift(z).array().exp().matrix(); }

}  // namespace

double LogSumExp::value(const Eigen::VectorXd& y) const { return log_sum_exp(a * y + c); }

Eigen::VectorXd LogSumExp::weights(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd v = a * y + c;
  const Eigen::ArrayXd e = (v.array() - v.maxCoeff()).exp();
  return e.matrix() / e.sum();
}

double LogConvexProgram::objective_value(const Eigen::VectorXd& y) const { return std::exp(objective.value(y)); }

LogConvexProgram to_log_convex(const GeometricProgram& gp) {
  validate(gp);
  const int m = gp.num_variables;
  LogConvexProgram out;
  out.num_variables = m;
  out.objective = lse_of(gp.objective, m);
  for (const auto& f : gp.inequalities) out.inequalities.push_back(lse_of(f, m));
  out.e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gp.equalities.size()), m);
  out.g.resize(static_cast<Eigen::Index>(gp.equalities.size()));
  for (std::size_t r = 0; r < gp.equalities.size(); ++r) {
    const auto& mono = gp.equalities[r];
    for (const auto& [var, power] : mono.exponents) out.e(static_cast<Eigen::Index>(r), var) += power;
    out.g(static_cast<Eigen::Index>(r)) = -std::log(mono.coefficient);
  }
  return out;
}

double evaluate(const Monomial& m, const Eigen::VectorXd& x) {
  double v = m.coefficient;
  for (const auto& [var, power] : m.exponents) v *= std::pow(x(var), power);
  return v;
}

double evaluate(const Posynomial& f, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (const auto& m : f) s += evaluate(m, x);
  return s;
}

GPSolution solve_gp(const GeometricProgram& gp, double tol, const std::optional<Eigen::VectorXd>& start) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_gp: tolerance must be positive");
  if (gp.objective.empty()) throw std::invalid_argument("solve_gp: empty objective");
  const LogConvexProgram lcp = to_log_convex(gp);
  const Reduced red = reduce(lcp);
  GPSolution sol;
  if (!red.consistent) {
    sol.status = GpStatus::infeasible;
    sol.kkt_residual = red.equality_residual;
    return sol;
  }
  Eigen::VectorXd z = initial_z(red, gp.num_variables, start);
  const auto k = z.size();
  const auto count = static_cast<double>(red.inequalities.size());

  if (!red.inequalities.empty() && !(red.max_constraint(z) < 0.0)) {
    int steps = 0;
    const PhaseOne po = phase_one(red, z, tol, steps);
    sol.newton_steps += steps;
    sol.phase_one_sigma = po.sigma;
    switch (po.outcome) {
      case PhaseOne::Outcome::strictly_feasible: z = po.z; break;
      case PhaseOne::Outcome::infeasible:
        sol.status = GpStatus::infeasible;
        sol.kkt_residual = po.sigma;
        return sol;
      case PhaseOne::Outcome::boundary:
        sol.status = GpStatus::inaccurate;
        sol.interior_empty = true;
        sol.x = to_x(red, po.z);
        sol.value = std::exp(red.objective.value(po.z));
        sol.kkt_residual = std::max(po.sigma, 0.0);
        return sol;
      case PhaseOne::Outcome::unbounded:
      case PhaseOne::Outcome::numerical:
        sol.status = GpStatus::failed;
        sol.kkt_residual = po.sigma;
        return sol;
    }
  } else if (!red.inequalities.empty()) {
    sol.phase_one_sigma = red.max_constraint(z);
  }

  const double gap_target = tol * 1e-2;
  double t = 1.0;
  int steps = 0;
  std::optional<std::pair<Eigen::VectorXd, double>> centered;
  bool unbounded = false;
  Centering last = Centering::converged;
  while (true) {
    Barrier barrier = [&](const Eigen::VectorXd& v, double* value, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
      Eigen::VectorXd gf;
      Eigen::MatrixXd hf;
      double total = t * red.objective.eval(v, grad ? &gf : nullptr, hess ? &hf : nullptr);
      if (grad) *grad = t * gf;
      if (hess) *hess = t * hf;
      for (const auto& f : red.inequalities) {
        const double fv = f.eval(v, grad ? &gf : nullptr, hess ? &hf : nullptr);
        if (!(fv < 0.0)) return false;
        total -= std::log(-fv);
        if (grad) *grad += gf / (-fv);
        if (hess) *hess += gf * gf.transpose() / (fv * fv) + hf / (-fv);
      }
      *value = total;
      return std::isfinite(total);
    };
    // The objective heading to zero is unboundedness of the log problem; drifting variables alone are not.
    auto diverging = [&](const Eigen::VectorXd& v) { return red.objective.value(v) < -kUnboundedLog; };
    last = center(z, barrier, steps, kGpMaxNewtonSteps - sol.newton_steps, diverging);
    if (last == Centering::stopped) {
      unbounded = true;
      break;
    }
    if (last != Centering::converged) {
      // Later centerings can stall on roundoff; the previous center is still a valid answer.
      if (centered) {
        z = centered->first;
        t = centered->second;
      }
      break;
    }
    if (count == 0.0 || count / t <= gap_target) break;
    centered.emplace(z, t);
    t *= kBarrierGrowth;
  }
  sol.newton_steps += steps;
  sol.x = to_x(red, z);
  sol.value = std::exp(red.objective.value(z));
  if (unbounded) {
    sol.status = GpStatus::unbounded;
    return sol;
  }

  // Newton-decrement estimate of the centering suboptimality, in the same units as the gap.
  double lag_res = 0.0;
  if (k > 0) {
    Eigen::VectorXd lagrangian, gf;
    Eigen::MatrixXd hess, hf;
    red.objective.eval(z, &lagrangian, &hess);
    for (const auto& f : red.inequalities) {
      const double fv = f.eval(z, &gf, &hf);
      const double w = 1.0 / (t * -fv);
      lagrangian += w * gf;
      hess += w * hf + gf * gf.transpose() / (t * fv * fv);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    const Eigen::VectorXd step = ldlt.solve(lagrangian);
    lag_res = step.allFinite() ? std::max(0.0, lagrangian.dot(step)) / 2.0 : lagrangian.cwiseAbs().maxCoeff();
  }
  const Eigen::VectorXd y = red.lift(z);
  const double eq_res = lcp.e.rows() > 0 ? (lcp.e * y - lcp.g).cwiseAbs().maxCoeff() : 0.0;
  sol.kkt_residual = std::max({count / t, eq_res, lag_res});
  if (sol.kkt_residual <= tol) {
    sol.status = GpStatus::optimal;
  } else if (sol.kkt_residual <= kGpInaccurateLimit) {
    sol.status = GpStatus::inaccurate;
  } else {
    sol.status = GpStatus::failed;
  }
  return sol;
}

FeasibilityResult check_feasibility(const GeometricProgram& gp, double tol, const std::optional<Eigen::VectorXd>& start) {
  if (!(tol > 0.0)) throw std::invalid_argument("check_feasibility: tolerance must be positive");
  const LogConvexProgram lcp = to_log_convex(gp);
  const Reduced red = reduce(lcp);
  FeasibilityResult res;
  if (!red.consistent) {
    res.status = GpStatus::infeasible;
    res.sigma = red.equality_residual;
    return res;
  }
  Eigen::VectorXd z = initial_z(red, gp.num_variables, start);
  if (red.inequalities.empty() || red.max_constraint(z) < 0.0) {
    res.status = GpStatus::optimal;
    res.strictly_feasible = true;
    res.sigma = red.inequalities.empty() ? -std::numeric_limits<double>::infinity() : red.max_constraint(z);
    res.x = to_x(red, z);
    return res;
  }
  int steps = 0;
  const PhaseOne po = phase_one(red, z, tol, steps);
  res.sigma = po.sigma;
  res.x = to_x(red, po.z);
  switch (po.outcome) {
    case PhaseOne::Outcome::strictly_feasible:
      res.status = GpStatus::optimal;
      res.strictly_feasible = true;
      break;
    case PhaseOne::Outcome::boundary: res.status = GpStatus::optimal; break;
    case PhaseOne::Outcome::infeasible: res.status = GpStatus::infeasible; break;
    case PhaseOne::Outcome::unbounded:
    case PhaseOne::Outcome::numerical: res.status = GpStatus::failed; break;
  }
  return res;
}

}  // namespace sonc
