#include "sonc/sos_export.hpp"

#include "sonc/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sonc {

namespace {

std::vector<int> key(const Exponent& e) { return {e.data(), e.data() + e.size()}; }

// All exponents of N^n with total degree <= d, graded lex.
std::vector<Exponent> monomials_up_to(int n, int d) {
  std::vector<Exponent> out;
  Exponent cur = Exponent::Zero(n);
  for (int deg = 0; deg <= d; ++deg) {
    // Enumerate compositions of deg in lexicographic order of the entry vector.
    std::vector<Exponent> level;
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == n - 1) {
        cur(pos) = left;
        level.push_back(cur);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        cur(pos) = v;
        rec(pos + 1, left - v);
      }
    };
    if (n == 0) {
      if (deg == 0) level.push_back(cur);
    } else {
      rec(0, deg);
    }
    std::sort(level.begin(), level.end(), [](const Exponent& a, const Exponent& b) { return lex_less(a, b); });
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SosSdp build_sos_sdp(const SparsePolynomial& p, bool prune) {
  const int deg = degree(p);
  if (deg % 2 != 0) throw std::invalid_argument("build_sos_sdp: polynomial degree is odd");
  SosSdp sdp;
  sdp.num_variables = p.num_variables();
  sdp.half_degree = deg / 2;
  const int n = p.num_variables();

  std::vector<Exponent> candidates = monomials_up_to(n, sdp.half_degree);
  if (prune) {
    const Eigen::MatrixXd support = to_real(p.exponents());
    for (const auto& beta : candidates) {
      if (in_convex_hull(support, 2.0 * beta.cast<double>())) sdp.basis.push_back(beta);
    }
  } else {
    sdp.basis = std::move(candidates);
  }

  auto glex = [](const std::vector<int>& a, const std::vector<int>& b) {
    int da = 0, db = 0;
    for (int v : a) da += v;
    for (int v : b) db += v;
    return da != db ? da < db : a < b;
  };
  std::map<std::vector<int>, std::vector<SdpEntry>, decltype(glex)> rows(glex);
  const int m = sdp.matrix_size();
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) rows[key(sdp.basis[i] + sdp.basis[j])].push_back({i, j, 1.0});
  }
  rows[std::vector<int>(static_cast<std::size_t>(n), 0)];
  for (int i = 0; i < p.num_terms(); ++i) rows[key(p.exponent(i))];

  sdp.rhs.resize(static_cast<Eigen::Index>(rows.size()));
  Eigen::Index r = 0;
  for (auto& [alpha, entries] : rows) {
    Exponent e(n);
    for (int k = 0; k < n; ++k) e(k) = alpha[static_cast<std::size_t>(k)];
    const auto idx = p.find(e);
    sdp.rhs(r++) = idx ? p.coefficient(*idx) : 0.0;
    sdp.moments.push_back(e);
    sdp.constraints.push_back(std::move(entries));
  }
  return sdp;
}

double sos_constraint_residual(const SosSdp& sdp, const Eigen::MatrixXd& x, double gamma) {
  double worst = 0.0;
  for (int c = 0; c < sdp.num_constraints(); ++c) {
    double lhs = 0.0;
    for (const auto& e : sdp.constraints[static_cast<std::size_t>(c)]) {
      lhs += e.i == e.j ? e.value * x(e.i, e.j) : e.value * (x(e.i, e.j) + x(e.j, e.i));
    }
    if ((sdp.moments[static_cast<std::size_t>(c)].array() == 0).all()) lhs -= gamma;
    worst = std::max(worst, std::abs(lhs - sdp.rhs(c)));
  }
  return worst;
}

SdpaProblem to_sdpa(const SosSdp& sdp) {
  SdpaProblem out;
  out.comments = {
      "\"SOS Gram-matrix SDP, sparse SDPA dual form: maximize F0.Y s.t. Fk.Y = ck, Y psd",
      "\"block 1: Gram matrix X over the monomial basis (see sidecar JSON)",
      "\"block 2: diagonal (gamma_plus, gamma_minus), gamma = gamma_plus - gamma_minus is the free shift",
      "\"constraint for alpha = 0 reads X_00 - gamma_plus + gamma_minus = b_0",
  };
  out.block_struct = {sdp.matrix_size(), -2};
  out.c = sdp.rhs;
  out.entries.push_back({0, 2, 1, 1, 1.0});
  out.entries.push_back({0, 2, 2, 2, -1.0});
  for (int c = 0; c < sdp.num_constraints(); ++c) {
    for (const auto& e : sdp.constraints[static_cast<std::size_t>(c)]) {
      out.entries.push_back({c + 1, 1, e.i + 1, e.j + 1, e.value});
    }
    if ((sdp.moments[static_cast<std::size_t>(c)].array() == 0).all()) {
      out.entries.push_back({c + 1, 2, 1, 1, -1.0});
      out.entries.push_back({c + 1, 2, 2, 2, 1.0});
    }
  }
  return out;
}

std::string write_sdpa(const SdpaProblem& problem) {
  std::ostringstream os;
  for (const auto& c : problem.comments) os << c << '\n';
  os << problem.c.size() << " = mDIM\n";
  os << problem.block_struct.size() << " = nBLOCK\n";
  for (std::size_t b = 0; b < problem.block_struct.size(); ++b) {
    os << (b ? " " : "") << problem.block_struct[b];
  }
  os << " = bLOCKsTRUCT\n";
  for (Eigen::Index k = 0; k < problem.c.size(); ++k) os << (k ? " " : "") << format_double(problem.c(k));
  os << '\n';
  for (const auto& e : problem.entries) {
    os << e.matrix << ' ' << e.block << ' ' << e.i << ' ' << e.j << ' ' << format_double(e.value) << '\n';
  }
  return os.str();
}

SdpaProblem parse_sdpa(std::string_view text) {
  SdpaProblem out;
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur += ch;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  std::size_t li = 0;
  while (li < lines.size() && !lines[li].empty() && (lines[li][0] == '"' || lines[li][0] == '*')) {
    out.comments.push_back(lines[li++]);
  }
  // Remaining tokens; separators per the format are blanks, commas and braces.
  std::string rest;
  for (std::size_t k = li; k < lines.size(); ++k) {
    std::string l = lines[k];
    const auto eq = l.find('=');
    if (eq != std::string::npos) l = l.substr(0, eq);
    for (char& ch : l) {
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    }
    rest += l + '\n';
  }
  std::istringstream is(rest);
  int m = 0, nblocks = 0;
  if (!(is >> m >> nblocks) || m < 0 || nblocks < 0) throw std::runtime_error("parse_sdpa: malformed header");
  out.block_struct.resize(static_cast<std::size_t>(nblocks));
  for (auto& b : out.block_struct) {
    if (!(is >> b)) throw std::runtime_error("parse_sdpa: malformed block structure");
  }
  out.c.resize(m);
  for (int k = 0; k < m; ++k) {
    if (!(is >> out.c(k))) throw std::runtime_error("parse_sdpa: malformed objective vector");
  }
  SdpaProblem::Entry e;
  while (is >> e.matrix >> e.block >> e.i >> e.j >> e.value) {
    if (e.matrix < 0 || e.matrix > m || e.block < 1 || e.block > nblocks) {
      throw std::runtime_error("parse_sdpa: entry index out of range");
    }
    out.entries.push_back(e);
  }
  if (!is.eof()) throw std::runtime_error("parse_sdpa: trailing garbage");
  return out;
}

void export_sdpa(const SosSdp& sdp, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << write_sdpa(to_sdpa(sdp));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string basis_sidecar_json(const SosSdp& sdp) {
  nlohmann::json j;
  j["n"] = sdp.num_variables;
  j["half_degree"] = sdp.half_degree;
  j["basis"] = nlohmann::json::array();
  for (const auto& b : sdp.basis) j["basis"].push_back(key(b));
  j["constraints"] = nlohmann::json::array();
  for (const auto& m : sdp.moments) j["constraints"].push_back(key(m));
  return j.dump(2) + "\n";
}

}  // namespace sonc
