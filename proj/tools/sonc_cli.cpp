// sonc: lower bounds for sparse polynomials via sums of nonnegative circuits.

#include "sonc/bench.hpp"
#include "sonc/certifier.hpp"
#include "sonc/generator.hpp"
#include "sonc/json_io.hpp"
#include "sonc/sos_export.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>

using namespace sonc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnbounded = 2;
constexpr int kExitFailed = 3;

double default_tol() {
  if (const char* env = std::getenv("SONC_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
    std::cerr << "warning: ignoring invalid SONC_TOL='" << env << "'\n";
  }
  return kGpTolerance;
}

int exit_code(BoundStatus s) {
  switch (s) {
    case BoundStatus::bounded:
    case BoundStatus::trivial: return kExitOk;
    case BoundStatus::unbounded: return kExitUnbounded;
    case BoundStatus::failed: return kExitFailed;
  }
  return kExitFailed;
}

void print_result(const BoundResult& r) {
  const auto& d = r.diagnostics;
  if (r.status == BoundStatus::bounded || r.status == BoundStatus::trivial) {
    std::printf("%s, L = %.7g, gamma = %.7g\n", to_string(r.status), *r.lower_bound, *r.gamma);
  } else if (r.status == BoundStatus::failed && d.degenerate_count() > 0) {
    std::printf("failed (degenerate)\n");
  } else {
    std::printf("%s\n", to_string(r.status));
  }
  std::printf("  split: %s, cover size: %d, degenerate points: %d, solver: %s, time: %.6f s\n", to_string(d.split),
              d.cover_size, d.degenerate_count(), d.solver_status ? to_string(*d.solver_status) : "none", d.wall_time);
  if (!d.failure_reason.empty()) std::printf("  reason: %s\n", d.failure_reason.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SONC lower-bound certifier"};
  app.require_subcommand(1);

  std::string poly_path, split = "variable", cert_out;
  double tol = default_tol();
  bool as_json = false;
  auto* certify = app.add_subcommand("certify", "certify a lower bound for a polynomial file (text or JSON)");
  certify->add_option("path", poly_path, "polynomial file")->required();
  certify->add_option("--split", split, "coefficient split")->check(CLI::IsMember({"even", "variable", "both"}));
  certify->add_option("--tol", tol, "GP tolerance (default $SONC_TOL or 1e-7)")->check(CLI::PositiveNumber);
  certify->add_flag("--json", as_json, "print a JSON report");
  certify->add_option("--cert-out", cert_out, "write the certificate JSON here");

  GenSpec spec;
  std::string shape = "standard_simplex", gen_out;
  auto* gen = app.add_subcommand("generate", "generate a random instance");
  gen->add_option("--shape", shape, "standard_simplex | simplex | arbitrary")
      ->check(CLI::IsMember({"standard", "standard_simplex", "simplex", "arbitrary"}));
  gen->add_option("--n", spec.n, "variables")->required();
  gen->add_option("--d", spec.d, "degree (even)")->required();
  gen->add_option("--t", spec.t, "terms")->required();
  gen->add_option("--inner", spec.inner, "minimum non-vertex terms (arbitrary shape)");
  gen->add_option("--seed", spec.seed, "seed");
  gen->add_option("--out", gen_out, "output path (stdout if omitted)");

  std::string cert_path, verify_poly;
  double verify_tol = 1e-6;
  auto* ver = app.add_subcommand("verify", "re-check a certificate against a polynomial");
  ver->add_option("cert", cert_path, "certificate JSON")->required();
  ver->add_option("poly", verify_poly, "polynomial file")->required();
  ver->add_option("--tol", verify_tol, "verification tolerance")->check(CLI::PositiveNumber);

  std::string sos_poly, sos_out;
  bool prune = true;
  auto* sos = app.add_subcommand("export-sos", "write the SOS Gram-matrix SDP in sparse SDPA format");
  sos->add_option("poly", sos_poly, "polynomial file")->required();
  sos->add_flag("--prune,!--no-prune", prune, "restrict the basis to half the Newton polytope (default on)");
  sos->add_option("--out", sos_out, "output .dat-s path")->required();

  std::string bench_dir, csv_path, summary_path, bench_split = "variable";
  int jobs = 1;
  auto* bench = app.add_subcommand("bench", "certify every instance in a directory");
  bench->add_option("dir", bench_dir, "instance directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--csv", csv_path, "CSV output path (stdout if omitted)");
  bench->add_option("--summary", summary_path, "summary output path (stderr if omitted)");
  bench->add_option("--split", bench_split, "coefficient split")->check(CLI::IsMember({"even", "variable", "both"}));
  bench->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--tol", tol, "GP tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto splits_of = [](const std::string& s) {
    if (s == "both") return std::vector<SplitStrategy>{SplitStrategy::even, SplitStrategy::variable};
    return std::vector<SplitStrategy>{s == "even" ? SplitStrategy::even : SplitStrategy::variable};
  };

  try {
    if (*certify) {
      const SparsePolynomial p = read_polynomial_file(poly_path);
      std::vector<BoundResult> results;
      for (SplitStrategy s : splits_of(split)) results.push_back(bound(p, {s, tol}));

      const BoundResult* best = &results.back();
      for (const auto& r : results) {
        if (r.lower_bound && (!best->lower_bound || *r.lower_bound > *best->lower_bound)) best = &r;
      }
      if (as_json) {
        nlohmann::json j;
        j["input"] = poly_path;
        j["n"] = p.num_variables();
        j["t"] = p.num_terms();
        j["results"] = nlohmann::json::array();
        for (const auto& r : results) j["results"].push_back(bound_result_to_json(r));
        std::cout << j.dump(2) << "\n";
      } else {
        for (const auto& r : results) print_result(r);
      }
      if (!cert_out.empty()) {
        if (!best->certificate) {
          std::cerr << "no certificate to write\n";
        } else {
          write_text_file(cert_out, certificate_to_json(*best->certificate).dump(2) + "\n");
        }
      }
      return exit_code(best->status);
    }

    if (*gen) {
      spec.shape = parse_shape(shape);
      std::string text;
      int code = kExitOk;
      try {
        text = polynomial_to_json(generate(spec), spec).dump() + "\n";
      } catch (const GenerationFailed& e) {
        std::cerr << "generation failed: " << e.what() << "\n";
        nlohmann::json j = polynomial_to_json(SparsePolynomial(spec.n), spec);
        j["generation_failed"] = true;
        j["reason"] = e.what();
        text = j.dump() + "\n";
        code = kExitFailed;
      }
      if (gen_out.empty()) {
        if (code == kExitOk) std::cout << text;
      } else {
        write_text_file(gen_out, text);
      }
      return code;
    }

    if (*ver) {
      const SparsePolynomial p = read_polynomial_file(verify_poly);
      const Certificate cert = certificate_from_json(nlohmann::json::parse(read_text_file(cert_path)));
      const VerificationReport rep = verify_certificate(p, cert, verify_tol);
      std::printf("%s, L = %.7g, max coefficient residual %.3g, %zu circuits\n", rep.valid ? "valid" : "invalid",
                  -cert.gamma, rep.max_coeff_residual, cert.circuits.size());
      for (const auto& problem : rep.problems) std::printf("  %s\n", problem.c_str());
      return rep.valid ? kExitOk : kExitFailed;
    }

    if (*sos) {
      const SparsePolynomial p = read_polynomial_file(sos_poly);
      const SosSdp sdp = build_sos_sdp(p, prune);
      export_sdpa(sdp, sos_out);
      write_text_file(sos_out + ".basis.json", basis_sidecar_json(sdp));
      std::printf("%d constraints, block size %d\n", sdp.num_constraints(), sdp.matrix_size());
      return kExitOk;
    }

    if (*bench) {
      const auto records = run_bench(bench_dir, {splits_of(bench_split), tol, jobs});
      const std::string csv = records_to_csv(records);
      if (csv_path.empty()) {
        std::cout << csv;
      } else {
        write_text_file(csv_path, csv);
      }
      const std::string summary = bench_summary(records);
      if (summary_path.empty()) {
        std::cerr << summary;
      } else {
        write_text_file(summary_path, summary);
      }
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
