#include "sonc/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sonc {

using nlohmann::json;

namespace {

json exponent_json(const Exponent& e) { return std::vector<int>(e.data(), e.data() + e.size()); }

Exponent exponent_from(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw DimensionError("exponent row must have " + std::to_string(n) + " entries");
  }
  Exponent e(n);
  for (int k = 0; k < n; ++k) {
    if (!j[static_cast<std::size_t>(k)].is_number_integer()) throw std::invalid_argument("exponent entries must be integers");
    e(k) = j[static_cast<std::size_t>(k)].get<int>();
    if (e(k) < 0) throw std::invalid_argument("negative exponent");
  }
  return e;
}

json term_json(const Term& t) { return json::array({exponent_json(t.exponent), t.coefficient}); }

Term term_from(const json& j, int n) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("term must be [exponent, coefficient]");
  return {exponent_from(j[0], n), j[1].get<double>()};
}

json number_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json polynomial_to_json(const SparsePolynomial& p) {
  json j;
  j["n"] = p.num_variables();
  j["A"] = json::array();
  j["b"] = json::array();
  for (int i = 0; i < p.num_terms(); ++i) {
    j["A"].push_back(exponent_json(p.exponent(i)));
    j["b"].push_back(p.coefficient(i));
  }
  return j;
}

json polynomial_to_json(const SparsePolynomial& p, const GenSpec& meta) {
  json j = polynomial_to_json(p);
  j["meta"] = {{"shape", to_string(meta.shape)}, {"n", meta.n},         {"d", meta.d},
               {"t", meta.t},                    {"inner", meta.inner}, {"seed", meta.seed}};
  return j;
}

SparsePolynomial polynomial_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("A") || !j.contains("b")) {
    throw std::invalid_argument("polynomial JSON needs fields n, A, b");
  }
  const int n = j.at("n").get<int>();
  if (n < 0) throw DimensionError("negative variable count");
  const auto& a = j.at("A");
  const auto& b = j.at("b");
  if (!a.is_array() || !b.is_array() || a.size() != b.size()) throw DimensionError("A and b must have equal length");
  ExponentMatrix m(n, static_cast<Eigen::Index>(a.size()));
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = exponent_from(a[i], n);
    coeffs(static_cast<Eigen::Index>(i)) = b[i].get<double>();
  }
  return SparsePolynomial(std::move(m), std::move(coeffs));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SparsePolynomial read_polynomial_file(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return polynomial_from_json(json::parse(text));
  return parse_polynomial(text);
}

std::optional<GenSpec> read_generator_meta(const json& j) {
  if (!j.is_object() || !j.contains("meta")) return std::nullopt;
  const auto& m = j.at("meta");
  GenSpec s;
  s.shape = parse_shape(m.at("shape").get<std::string>());
  s.n = m.at("n").get<int>();
  s.d = m.at("d").get<int>();
  s.t = m.at("t").get<int>();
  s.inner = m.value("inner", 0);
  s.seed = m.at("seed").get<std::uint64_t>();
  return s;
}

json certificate_to_json(const Certificate& cert) {
  json j;
  j["gamma"] = cert.gamma;
  j["lower_bound"] = -cert.gamma;
  j["circuits"] = json::array();
  for (const auto& c : cert.circuits) {
    json cj;
    cj["outer"] = json::array();
    for (const auto& t : c.outer) cj["outer"].push_back(term_json(t));
    cj["inner"] = term_json(c.inner);
    cj["lambda"] = std::vector<double>(c.lambda.data(), c.lambda.data() + c.lambda.size());
    cj["theta"] = c.theta;
    j["circuits"].push_back(std::move(cj));
  }
  j["residual_squares"] = json::array();
  for (const auto& t : cert.residual_squares) j["residual_squares"].push_back(term_json(t));
  return j;
}

Certificate certificate_from_json(const json& j) {
  Certificate cert;
  cert.gamma = j.at("gamma").get<double>();
  int n = -1;
  auto dim_of = [&](const json& term) {
    if (n < 0) n = static_cast<int>(term.at(0).size());
    return n;
  };
  for (const auto& cj : j.at("circuits")) {
    CircuitPolynomial c;
    for (const auto& t : cj.at("outer")) c.outer.push_back(term_from(t, dim_of(t)));
    c.inner = term_from(cj.at("inner"), dim_of(cj.at("inner")));
    const auto l = cj.at("lambda").get<std::vector<double>>();
    c.lambda = Eigen::Map<const Eigen::VectorXd>(l.data(), static_cast<Eigen::Index>(l.size()));
    c.theta = cj.at("theta").get<double>();
    cert.circuits.push_back(std::move(c));
  }
  for (const auto& t : j.at("residual_squares")) cert.residual_squares.push_back(term_from(t, dim_of(t)));
  return cert;
}

json bound_result_to_json(const BoundResult& r) {
  const auto& d = r.diagnostics;
  json j;
  j["status"] = to_string(r.status);
  j["lower_bound"] = number_or_null(r.lower_bound);
  j["gamma"] = number_or_null(r.gamma);
  j["split"] = to_string(d.split);
  j["solver_status"] = d.solver_status ? json(to_string(*d.solver_status)) : json(nullptr);
  j["wall_time"] = d.wall_time;
  j["cover_size"] = d.cover_size;
  j["degenerate_count"] = d.degenerate_count();
  j["degenerate_indices"] = d.degenerate_indices;
  j["simplex_shortcut"] = d.simplex_shortcut;
  j["gp"] = {{"variables", d.gp_variables}, {"inequalities", d.gp_inequalities}, {"equalities", d.gp_equalities}};
  j["failure_reason"] = d.failure_reason.empty() ? json(nullptr) : json(d.failure_reason);
  return j;
}

}  // namespace sonc
