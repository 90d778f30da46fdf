#include "sonc/bench.hpp"

#include "sonc/json_io.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <thread>

namespace sonc {

namespace fs = std::filesystem;

std::vector<RunRecord> bench_file(const std::string& path, const BenchOptions& options) {
  RunRecord base;
  base.instance_id = fs::path(path).stem().string();
  std::optional<SparsePolynomial> p;
  std::string error;
  bool generation_failed = false;
  try {
    const std::string text = read_text_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      const auto j = nlohmann::json::parse(text);
      if (auto meta = read_generator_meta(j)) {
        base.n = meta->n;
        base.d = meta->d;
        base.t = meta->t;
        base.shape = to_string(meta->shape);
        base.seed = meta->seed;
      }
      if (j.value("generation_failed", false)) {
        generation_failed = true;
      } else {
        p = polynomial_from_json(j);
      }
    } else {
      p = parse_polynomial(text);
    }
    if (p && base.shape.empty()) {
      base.n = p->num_variables();
      base.d = degree(*p);
      base.t = p->num_terms();
    }
  } catch (const std::exception& e) {
    error = e.what();
  }

  std::vector<RunRecord> out;
  for (SplitStrategy split : options.splits) {
    RunRecord r = base;
    r.strategy = to_string(split);
    if (generation_failed) {
      r.status = "generation_failed";
    } else if (!p) {
      r.status = "failed";
      r.error = error;
    } else {
      try {
        const BoundResult br = bound(*p, {split, options.tol});
        r.status = to_string(br.status);
        r.lower_bound = br.lower_bound;
        r.gamma = br.gamma;
        r.wall_time = br.diagnostics.wall_time;
        r.cover_size = br.diagnostics.cover_size;
        r.degenerate_count = br.diagnostics.degenerate_count();
        r.error = br.diagnostics.failure_reason;
      } catch (const std::exception& e) {
        r.status = "failed";
        r.error = e.what();
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunRecord> run_bench(const std::string& dir, const BenchOptions& options) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::vector<RunRecord>> slots(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < files.size(); i = next++) slots[i] = bench_file(files[i], options);
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<RunRecord> records;
  for (auto& s : slots) records.insert(records.end(), s.begin(), s.end());
  return records;
}

namespace {

std::string num(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << csv_field(r.instance_id) << ',' << r.n << ',' << r.d << ',' << r.t << ',' << csv_field(r.shape) << ','
       << (r.seed ? std::to_string(*r.seed) : "") << ',' << r.strategy << ',' << r.status << ',' << num(r.lower_bound)
       << ',' << num(r.gamma) << ',' << num(r.wall_time) << ',' << r.cover_size << ',' << r.degenerate_count << '\n';
  }
  return os.str();
}

std::string bench_summary(const std::vector<RunRecord>& records) {
  std::map<std::string, int> counts;
  std::map<std::pair<int, int>, std::vector<double>> times;
  double total = 0.0;
  for (const auto& r : records) {
    ++counts[r.status];
    times[{r.n, r.t}].push_back(r.wall_time);
    total += r.wall_time;
  }
  std::ostringstream os;
  os << "runs: " << records.size() << "\n";
  for (const auto& [status, c] : counts) os << "  " << status << ": " << c << "\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "total certifier time: %.3f s\n", total);
  os << buf << "median wall time by (n, t):\n";
  for (auto& [key, v] : times) {
    std::sort(v.begin(), v.end());
    const double med = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    std::snprintf(buf, sizeof(buf), "  n=%d t=%d: %.6f s (%zu runs)\n", key.first, key.second, med, v.size());
    os << buf;
  }
  return os.str();
}

}  // namespace sonc
