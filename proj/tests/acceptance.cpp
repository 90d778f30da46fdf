// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [path-to-cli]

#include "sonc/bench.hpp"
#include "sonc/certifier.hpp"
#include "sonc/generator.hpp"
#include "sonc/json_io.hpp"
#include "sonc/sos_export.hpp"

#include <boost/math/special_functions/binomial.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace sonc;
namespace fs = std::filesystem;

namespace {

const char* kFiveVariable =
    "1.9450715782850738 + 4.267736494409075*x3^2*x4^2 + 0.8128309873524124*x2^8 + "
    "0.3863534030996798*x1^4*x2^2*x3^2 + 1.5114805777890852*x1^6*x4^2 + 1.07826527350598*x0^6*x1^2 - "
    "0.7496903447028966*x0*x1^2*x2*x3*x4 + 0.0328087476137118*x0*x1^3*x2*x3*x4 - "
    "2.5827966329699446*x0*x1*x2^2*x3*x4 - 1.1539503636520094*x0^2*x1*x2*x3*x4";
const char* kSevenTerm = "1 + 3*x0^2*x1^6 + 2*x0^6*x1^2 + 6*x0^2*x1^2 - x0*x1^2 - 2*x0^2*x1 - 3*x0^3*x1^3";
const char* kDegenerate = "x0^2 - 2*x0*x1 + x1^2 - 2*x0 - 2*x1 + 1";
const char* kShift = "1 + x0^4 + x1^4 - 3*x0*x1";

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& what, const std::string& detail) {
  std::printf("[INFO]    %s: %s\n", what.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::set<std::vector<int>> exponent_set(const SparsePolynomial& p, const std::vector<int>& idx) {
  std::set<std::vector<int>> out;
  for (int i : idx) {
    const Exponent e = p.exponent(i);
    out.insert({e.data(), e.data() + e.size()});
  }
  return out;
}

// Smallest value over random points: half in [-1,1]^n, half in [-2,2]^n.
double sampled_minimum(const SparsePolynomial& p, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p.num_variables());
  double best = evaluate(p, x);
  for (int s = 0; s < samples; ++s) {
    const double r = s % 2 ? 2.0 : 1.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = r * u(rng);
    best = std::min(best, evaluate(p, x));
  }
  return best;
}

struct Instance {
  GenSpec spec;
  SparsePolynomial p;
  BoundResult even;
  BoundResult variable;
};

// Cycles through shapes, n, d and t; failed generations retry with fresh seeds
// and then move on to the next parameter combination.
std::vector<Instance> build_suite(int count, int& skipped_combinations, int& seed_retries) {
  std::vector<Instance> out;
  const GenShape shapes[] = {GenShape::standard_simplex, GenShape::simplex, GenShape::arbitrary};
  std::uint64_t seed = 1000;
  for (int combo = 0; static_cast<int>(out.size()) < count; ++combo) {
    GenSpec spec;
    spec.shape = shapes[combo % 3];
    spec.n = 2 + (combo / 3) % 3;
    spec.d = 6 + 2 * ((combo / 9) % 3);
    spec.t = std::max(spec.n + 2, 6 + (combo * 7) % 25);
    spec.inner = spec.shape == GenShape::arbitrary ? (spec.t - spec.n - 1) / 2 : 0;
    bool made = false;
    for (int attempt = 0; attempt < 100 && !made; ++attempt) {
      spec.seed = seed++;
      try {
        Instance inst;
        inst.spec = spec;
        inst.p = generate(spec);
        out.push_back(std::move(inst));
        made = true;
      } catch (const GenerationFailed&) {
        ++seed_retries;
      }
    }
    if (!made) ++skipped_combinations;
  }
  return out;
}

bool ok_status(const BoundResult& r) { return r.status == BoundStatus::bounded || r.status == BoundStatus::trivial; }

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  // 1: five-variable instance on a simplex Newton polytope
  {
    const auto p = parse_polynomial(kFiveVariable);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = bound(p);
    const double elapsed = seconds_since(t0);
    const double p0 = p.constant_term();
    bool ok = r.status == BoundStatus::bounded && r.certificate;
    double l = std::nan("");
    bool verified = false;
    if (ok) {
      l = *r.lower_bound;
      verified = verify_certificate(p, *r.certificate).valid;
    }
    const bool magnitude = std::abs(std::abs(l) - 4.24914) <= 1e-3;
    const bool sane = l <= p0;
    report(1, ok && magnitude && sane && verified && elapsed < 1.0, "five-variable simplex fixture",
           fmt("L = %.9g (|L| target 4.24914 +- 1e-3, %s), L <= p(0) = %.16g: %s, verified: %s, shortcut: %s, %.4f s",
               l, magnitude ? "match" : "mismatch", p0, sane ? "yes" : "no", verified ? "yes" : "no",
               r.diagnostics.simplex_shortcut ? "yes" : "no", elapsed));
  }

  // 2: seven-term instance against a dense grid
  {
    const auto p = parse_polynomial(kSevenTerm);
    double grid_min = evaluate(p, Eigen::Vector2d::Zero());
    const int side = 1000;
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j < side; ++j) {
        const Eigen::Vector2d x(-3.0 + 6.0 * i / (side - 1), -3.0 + 6.0 * j / (side - 1));
        grid_min = std::min(grid_min, evaluate(p, x));
      }
    }
    const auto r = bound(p);
    const bool bounded = r.status == BoundStatus::bounded && r.certificate;
    const double l = bounded ? *r.lower_bound : std::nan("");
    const bool verified = bounded && verify_certificate(p, *r.certificate).valid;
    bool single = false;
    if (r.cover.simplices.size() == 1) {
      const auto& s = r.cover.simplices[0];
      single = exponent_set(p, s.vertex_indices) == std::set<std::vector<int>>{{0, 0}, {2, 6}, {6, 2}} &&
               s.covered_indices.size() == 3;
    }
    const bool match = !single || std::abs(l - 0.693158) <= 1e-3;
    report(2, bounded && verified && l >= 0.55 && l <= grid_min && match, "seven-term fixture",
           fmt("L = %.9g (need >= 0.55), grid minimum = %.9g, verified: %s, gap to 0.693158 = %.6g, cover size %zu%s",
               l, grid_min, verified ? "yes" : "no", 0.693158 - l, r.cover.simplices.size(),
               single ? " (single simplex on (0,0),(2,6),(6,2): exact match required)" : ""));

    auto idx = [&](int a, int b) { return *p.find((Exponent(2) << a, b).finished()); };
    const auto alt = bound_with_cover(
        p, {{idx(0, 0), idx(2, 2), idx(2, 6)}, {idx(0, 0), idx(2, 2), idx(6, 2)}, {idx(2, 2), idx(2, 6), idx(6, 2)}});
    if (alt.status == BoundStatus::bounded) {
      info("seven-term fixture, cover through (2,2)",
           fmt("L = %.9g, verified: %s", *alt.lower_bound,
               verify_certificate(p, *alt.certificate).valid ? "yes" : "no"));
    } else {
      info("seven-term fixture, cover through (2,2)", to_string(alt.status));
    }
  }

  // 3: degenerate square
  {
    const auto p = parse_polynomial(kDegenerate);
    bool ok = true;
    std::string detail;
    for (auto split : {SplitStrategy::even, SplitStrategy::variable}) {
      const auto r = bound(p, {split});
      std::set<std::set<std::vector<int>>> got;
      for (const auto& s : r.cover.simplices) {
        auto pts = exponent_set(p, s.vertex_indices);
        for (const auto& e : exponent_set(p, s.covered_indices)) pts.insert(e);
        got.insert(pts);
      }
      const std::set<std::set<std::vector<int>>> want{
          {{0, 2}, {1, 1}, {2, 0}}, {{2, 0}, {1, 0}, {0, 0}}, {{0, 2}, {0, 1}, {0, 0}}};
      const bool flagged = exponent_set(p, r.diagnostics.degenerate_indices) == std::set<std::vector<int>>{{1, 1}};
      ok = ok && r.status == BoundStatus::failed && flagged && got == want && r.cover.simplices.size() == 3;
      detail += fmt("%s%s: %s, degenerate (1,1) flagged: %s, cover matches: %s", detail.empty() ? "" : "; ",
                    to_string(split), to_string(r.status), flagged ? "yes" : "no", got == want ? "yes" : "no");
    }
    report(3, ok, "degenerate fixture", detail);
  }

  // 4: closed form
  {
    const auto p = parse_polynomial(kShift);
    bool ok = true;
    std::string detail;
    for (auto split : {SplitStrategy::even, SplitStrategy::variable}) {
      const auto r = bound(p, {split});
      const double l = r.lower_bound ? *r.lower_bound : std::nan("");
      ok = ok && r.status == BoundStatus::bounded && std::abs(l + 0.125) <= 1e-6;
      detail += fmt("%s%s L = %.10g", detail.empty() ? "" : ", ", to_string(split), l);
    }
    report(4, ok, "closed-form circuit", detail + " (target -0.125 +- 1e-6)");
  }

  // 5-8: generated suite
  int skipped = 0, retries = 0;
  const auto t_suite = std::chrono::steady_clock::now();
  std::vector<Instance> suite = build_suite(200, skipped, retries);
  for (auto& inst : suite) {
    inst.even = bound(inst.p, {SplitStrategy::even});
    inst.variable = bound(inst.p, {SplitStrategy::variable});
  }
  info("suite wall time", fmt("%.2f s for generation and %zu x 2 certifications", seconds_since(t_suite), suite.size()));
  {
    int bounded_runs = 0, verified = 0, oracle_bad = 0, nondegenerate = 0, nondegenerate_ok = 0;
    std::set<int> shapes, ns, ds;
    int tmin = 1000, tmax = 0;
    std::string worst;
    for (std::size_t i = 0; i < suite.size(); ++i) {
      const auto& inst = suite[i];
      shapes.insert(static_cast<int>(inst.spec.shape));
      ns.insert(inst.spec.n);
      ds.insert(inst.spec.d);
      tmin = std::min(tmin, inst.spec.t);
      tmax = std::max(tmax, inst.spec.t);
      const double sample_min = sampled_minimum(inst.p, 100000, 77 + i);
      for (const BoundResult* r : {&inst.even, &inst.variable}) {
        if (r->diagnostics.degenerate_count() == 0) {
          ++nondegenerate;
          if (ok_status(*r)) ++nondegenerate_ok;
        }
        if (!ok_status(*r)) continue;
        ++bounded_runs;
        if (verify_certificate(inst.p, *r->certificate, 1e-6).valid) ++verified;
        if (sample_min < *r->lower_bound - 1e-6) {
          ++oracle_bad;
          worst = fmt(" (instance %zu: sample %.9g < L %.9g)", i, sample_min, *r->lower_bound);
        }
      }
    }
    const double rate = nondegenerate ? static_cast<double>(nondegenerate_ok) / nondegenerate : 0.0;
    const bool spans = shapes.size() == 3 && ns.size() == 3 && ds.size() == 3 && tmin <= 6 && tmax >= 28;
    report(5, suite.size() == 200 && spans && verified == bounded_runs && oracle_bad == 0 && rate >= 0.95,
           "soundness suite",
           fmt("%zu instances (%d seed retries, %d parameter sets skipped), t in [%d, %d]; %d certified runs, %d "
               "verified, %d sampling violations%s; certified rate on non-degenerate runs %.1f%% (%d/%d)",
               suite.size(), retries, skipped, tmin, tmax, bounded_runs, verified, oracle_bad, worst.c_str(),
               100.0 * rate, nondegenerate_ok, nondegenerate));
  }
  {
    int both = 0, violations = 0;
    double worst = 0.0;
    for (const auto& inst : suite) {
      if (inst.even.status != BoundStatus::bounded || inst.variable.status != BoundStatus::bounded) continue;
      ++both;
      const double diff = *inst.variable.lower_bound - *inst.even.lower_bound;
      worst = std::min(worst, diff);
      if (diff < -1e-7) ++violations;
    }
    report(6, both > 0 && violations == 0, "split dominance",
           fmt("%d instances with both splits bounded, %d violations, min L(variable) - L(even) = %.3g", both,
               violations, worst));
  }
  {
    // Doubling turns odd exponents even, so a positive odd term would become a
    // square; only instances whose classification survives are comparable.
    int pool_skipped = 0, pool_retries = 0;
    std::vector<Instance> pool = build_suite(1000, pool_skipped, pool_retries);
    std::vector<const Instance*> picked;
    for (auto& inst : pool) {
      if (picked.size() == 50) break;
      const auto c = classify_support(inst.p);
      const auto cs = classify_support(scale_exponents(inst.p, 2));
      if (c.non_squares != cs.non_squares) continue;
      inst.variable = bound(inst.p);
      if (inst.variable.status == BoundStatus::bounded) picked.push_back(&inst);
    }
    int mismatched_bound = 0, mismatched_size = 0;
    double worst = 0.0;
    for (const auto* inst : picked) {
      const auto q = scale_exponents(inst->p, 2);
      const auto rq = bound(q);
      const auto& rp = inst->variable;
      if (rq.status != rp.status || !rq.lower_bound || std::abs(*rq.lower_bound - *rp.lower_bound) > 1e-6) {
        ++mismatched_bound;
      }
      if (rq.lower_bound) worst = std::max(worst, std::abs(*rq.lower_bound - *rp.lower_bound));
      const auto& a = rp.diagnostics;
      const auto& b = rq.diagnostics;
      if (a.gp_variables != b.gp_variables || a.gp_inequalities != b.gp_inequalities ||
          a.gp_equalities != b.gp_equalities || a.cover_size != b.cover_size) {
        ++mismatched_size;
      }
    }
    // Timing: per-instance best of interleaved repetitions after a warm-up, summed.
    std::vector<SparsePolynomial> doubled;
    for (const auto* inst : picked) doubled.push_back(scale_exponents(inst->p, 2));
    std::vector<double> best1(picked.size(), 1e300), best2(picked.size(), 1e300);
    for (int rep = 0; rep < 31; ++rep) {
      for (std::size_t i = 0; i < picked.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        (void)bound(picked[i]->p);
        if (rep > 0) best1[i] = std::min(best1[i], seconds_since(t0));
        t0 = std::chrono::steady_clock::now();
        (void)bound(doubled[i]);
        if (rep > 0) best2[i] = std::min(best2[i], seconds_since(t0));
      }
    }
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < picked.size(); ++i) {
      t1 += best1[i];
      t2 += best2[i];
    }
    const double rel = std::abs(t2 - t1) / t1;
    report(7, picked.size() == 50 && mismatched_bound == 0 && mismatched_size == 0 && rel < 0.25, "degree invariance",
           fmt("%zu instances, %d bound mismatches (max |dL| = %.3g), %d GP size mismatches, time d: %.4f s, 2d: %.4f "
               "s (%.1f%% apart)",
               picked.size(), mismatched_bound, worst, mismatched_size, t1, t2, 100.0 * rel));
  }
  {
    int cover_bad = 0, vars_bad = 0, checked = 0;
    for (const auto& inst : suite) {
      const auto c = classify_support(inst.p);
      const int h = static_cast<int>(compute_vertices(inst.p).size());
      for (const BoundResult* r : {&inst.even, &inst.variable}) {
        if (r->status == BoundStatus::unbounded || r->status == BoundStatus::trivial) continue;
        ++checked;
        const int l = r->diagnostics.cover_size;
        if (l > static_cast<int>(c.non_squares.size())) ++cover_bad;
        if (r->diagnostics.gp_variables > (inst.p.num_variables() + 1) * (inst.p.num_terms() - h) * l) ++vars_bad;
      }
    }
    report(8, checked > 0 && cover_bad == 0 && vars_bad == 0, "size law",
           fmt("%d runs checked, %d with cover longer than the non-squares, %d with too many GP variables", checked,
               cover_bad, vars_bad));
  }

  // 9: SOS export
  {
    const auto sdp = build_sos_sdp(parse_polynomial("1 + 2*x0 + x0^2"));
    const std::string text = write_sdpa(to_sdpa(sdp));
    const bool round_trip = write_sdpa(parse_sdpa(text)) == text;
    const double residual = sos_constraint_residual(sdp, Eigen::Matrix2d::Ones(), 0.0);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> nd(1, 4);
    int dims_bad = 0;
    for (int k = 0; k < 20; ++k) {
      const int n = nd(rng), d = nd(rng);
      std::vector<std::pair<std::vector<int>, double>> terms{{std::vector<int>(n, 0), 1.0}};
      for (int v = 0; v < n; ++v) {
        std::vector<int> e(n, 0);
        e[v] = 2 * d;
        terms.push_back({e, 1.0});
      }
      const auto s = build_sos_sdp(from_terms(n, terms), false);
      const auto want_basis = boost::math::binomial_coefficient<double>(n + d, d);
      const auto want_rows = boost::math::binomial_coefficient<double>(n + 2 * d, 2 * d);
      if (s.matrix_size() != static_cast<int>(want_basis) || s.num_constraints() != static_cast<int>(want_rows)) {
        ++dims_bad;
      }
    }
    report(9, round_trip && sdp.num_constraints() == 3 && residual == 0.0 && dims_bad == 0, "SOS export",
           fmt("round trip: %s, %d constraints, planted residual %.3g, %d of 20 dimension checks wrong",
               round_trip ? "identical" : "differs", sdp.num_constraints(), residual, dims_bad));
  }

  // 10: bench throughput
  {
    const fs::path dir = fs::temp_directory_path() / ("sonc_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (std::size_t i = 0; i < suite.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "%04zu.json", i);
      write_text_file((dir / name).string(), polynomial_to_json(suite[i].p, suite[i].spec).dump() + "\n");
    }
    const fs::path csv = dir / "bench.csv";
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<RunRecord> records;
    std::string how;
    if (!cli.empty()) {
      const std::string cmd = "\"" + cli + "\" bench \"" + dir.string() + "\" --csv \"" + csv.string() +
                              "\" --summary \"" + (dir / "summary.txt").string() + "\"";
      const int rc = std::system(cmd.c_str());
      how = fmt("sonc bench (exit %d)", rc);
    } else {
      write_text_file(csv.string(), records_to_csv(run_bench(dir.string(), {})));
      how = "run_bench";
    }
    const double elapsed = seconds_since(t0);
    int rows = 0, timed = 0;
    {
      std::istringstream is(fs::exists(csv) ? read_text_file(csv.string()) : "");
      std::string line;
      std::getline(is, line);
      const bool header = line == kCsvHeader;
      while (std::getline(is, line)) {
        ++rows;
        std::vector<std::string> cols;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cols.push_back(cell);
        if (header && cols.size() >= 11 && !cols[10].empty() && std::strtod(cols[10].c_str(), nullptr) >= 0.0) ++timed;
      }
    }
    report(10, rows == 200 && timed == 200 && elapsed < 600.0, "bench throughput",
           fmt("%s: %d rows, %d with wall time, %.2f s total", how.c_str(), rows, timed, elapsed));
    fs::remove_all(dir);
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
