#pragma once

#include "sonc/certifier.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sonc {

struct RunRecord {
  std::string instance_id;
  int n = 0;
  int d = 0;
  int t = 0;
  std::string shape;
  std::optional<std::uint64_t> seed;
  std::string strategy;
  std::string status;  ///< bounded, unbounded, trivial, failed, generation_failed
  std::optional<double> lower_bound;
  std::optional<double> gamma;
  double wall_time = 0.0;
  int cover_size = 0;
  int degenerate_count = 0;
  std::string error;  ///< not part of the CSV
};

struct BenchOptions {
  std::vector<SplitStrategy> splits{SplitStrategy::variable};
  double tol = kGpTolerance;
  int jobs = 1;
};

/// Certifies every regular file in `dir` (sorted by name) with each split.
/// Records come back in input order whatever the worker count.
std::vector<RunRecord> run_bench(const std::string& dir, const BenchOptions& options);

/// One record for one file; never throws.
std::vector<RunRecord> bench_file(const std::string& path, const BenchOptions& options);

inline constexpr const char* kCsvHeader =
    "instance_id,n,d,t,shape,seed,strategy,status,lower_bound,gamma,wall_time,cover_size,degenerate_count";

std::string records_to_csv(const std::vector<RunRecord>& records);
/// Status counts and median wall time per (n, t).
std::string bench_summary(const std::vector<RunRecord>& records);

}  // namespace sonc
