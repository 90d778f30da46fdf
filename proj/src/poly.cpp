#include "sonc/poly.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <numeric>

namespace sonc {

bool lex_less(const Exponent& a, const Exponent& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

int total_degree(const Exponent& alpha) { return alpha.sum(); }

bool graded_lex_less(const Exponent& a, const Exponent& b) {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return lex_less(a, b);
}

namespace {

struct GradedLex {
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    const int da = std::accumulate(a.begin(), a.end(), 0);
    const int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return a < b;
  }
};

}  // namespace

SparsePolynomial::SparsePolynomial(int num_variables)
    : exponents_(ExponentMatrix::Zero(num_variables, 1)), coefficients_(Eigen::VectorXd::Zero(1)) {
  if (num_variables < 0) throw DimensionError("negative variable count");
}

SparsePolynomial::SparsePolynomial(ExponentMatrix exponents, Eigen::VectorXd coefficients) {
  if (exponents.cols() != coefficients.size()) {
    throw DimensionError("exponent matrix has " + std::to_string(exponents.cols()) + " columns but " +
                         std::to_string(coefficients.size()) + " coefficients were given");
  }
  if ((exponents.array() < 0).any()) throw std::invalid_argument("negative exponent");

  const int n = static_cast<int>(exponents.rows());
  std::map<std::vector<int>, double, GradedLex> merged;
  merged[std::vector<int>(n, 0)] += 0.0;
  for (Eigen::Index i = 0; i < exponents.cols(); ++i) {
    std::vector<int> key(exponents.col(i).data(), exponents.col(i).data() + n);
    merged[key] += coefficients(i);
  }

  std::vector<std::pair<std::vector<int>, double>> kept;
  kept.reserve(merged.size());
  for (const auto& [alpha, b] : merged) {
    const bool origin = std::all_of(alpha.begin(), alpha.end(), [](int e) { return e == 0; });
    if (origin) {
      kept.emplace_back(alpha, std::abs(b) < kZeroCoefficient ? 0.0 : b);
    } else if (std::abs(b) >= kZeroCoefficient) {
      kept.emplace_back(alpha, b);
    }
  }

  exponents_.resize(n, static_cast<Eigen::Index>(kept.size()));
  coefficients_.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (int k = 0; k < n; ++k) exponents_(k, static_cast<Eigen::Index>(i)) = kept[i].first[k];
    coefficients_(static_cast<Eigen::Index>(i)) = kept[i].second;
  }
}

std::optional<int> SparsePolynomial::find(const Exponent& alpha) const {
  if (alpha.size() != num_variables()) return std::nullopt;
  for (int i = 0; i < num_terms(); ++i) {
    if (exponents_.col(i) == alpha) return i;
  }
  return std::nullopt;
}

bool SparsePolynomial::operator==(const SparsePolynomial& other) const {
  return exponents_.rows() == other.exponents_.rows() && exponents_.cols() == other.exponents_.cols() &&
         exponents_ == other.exponents_ && coefficients_ == other.coefficients_;
}

SparsePolynomial from_terms(int num_variables, const std::vector<std::pair<std::vector<int>, double>>& terms) {
  ExponentMatrix a(num_variables, static_cast<Eigen::Index>(terms.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (static_cast<int>(terms[i].first.size()) != num_variables) {
      throw DimensionError("term " + std::to_string(i) + " has " + std::to_string(terms[i].first.size()) +
                           " exponent entries, expected " + std::to_string(num_variables));
    }
    for (int k = 0; k < num_variables; ++k) a(k, static_cast<Eigen::Index>(i)) = terms[i].first[k];
    b(static_cast<Eigen::Index>(i)) = terms[i].second;
  }
  return SparsePolynomial(std::move(a), std::move(b));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct ParsedTerm {
  double coefficient = 1.0;
  std::map<int, int> powers;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<ParsedTerm> parse() {
    std::vector<ParsedTerm> terms;
    skip_space();
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
    }
    terms.push_back(term(sign));
    while (true) {
      skip_space();
      if (at_end()) break;
      const char c = peek();
      if (c != '+' && c != '-') fail("expected '+' or '-'");
      ++pos_;
      terms.push_back(term(c == '-' ? -1.0 : 1.0));
    }
    return terms;
  }

 private:
  ParsedTerm term(double sign) {
    skip_space();
    ParsedTerm t;
    t.coefficient = sign;
    if (at_end()) fail("expected a term");
    if (peek() == 'x') {
      factor(t);
    } else {
      t.coefficient *= number();
      skip_space();
      if (peek() != '*') return t;
      ++pos_;
      skip_space();
      factor(t);
    }
    while (true) {
      skip_space();
      if (peek() != '*') break;
      ++pos_;
      skip_space();
      factor(t);
    }
    return t;
  }

  void factor(ParsedTerm& t) {
    if (peek() != 'x') fail("expected variable 'x<index>'");
    ++pos_;
    const int index = integer("variable index");
    int power = 1;
    skip_space();
    if (peek() == '^') {
      ++pos_;
      skip_space();
      if (peek() == '-') fail("negative exponent");
      power = integer("exponent");
    }
    t.powers[index] += power;
  }

  int integer(const char* what) {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc()) {
      pos_ = start;
      fail(std::string(what) + " out of range");
    }
    return value;
  }

  double number() {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      const bool exponent_sign = (c == '+' || c == '-') && pos_ > start && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exponent_sign) {
        ++pos_;
      } else {
        break;
      }
    }
    if (start == pos_) fail("expected coefficient or variable");
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed coefficient");
    }
    return value;
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SparsePolynomial parse_polynomial(std::string_view text, std::optional<int> num_variables) {
  const auto terms = Parser(text).parse();
  int max_index = -1;
  for (const auto& t : terms) {
    if (!t.powers.empty()) max_index = std::max(max_index, t.powers.rbegin()->first);
  }
  const int n = num_variables.value_or(max_index + 1);
  if (max_index >= n) {
    throw DimensionError("variable x" + std::to_string(max_index) + " exceeds declared variable count " +
                         std::to_string(n));
  }
  ExponentMatrix a = ExponentMatrix::Zero(n, static_cast<Eigen::Index>(terms.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (const auto& [var, power] : terms[i].powers) a(var, static_cast<Eigen::Index>(i)) = power;
    b(static_cast<Eigen::Index>(i)) = terms[i].coefficient;
  }
  return SparsePolynomial(std::move(a), std::move(b));
}

std::string to_string(const SparsePolynomial& p) {
  std::string out;
  char buffer[64];
  for (int i = 0; i < p.num_terms(); ++i) {
    const double b = p.coefficient(i);
    if (i > 0 && b == 0.0) continue;
    if (i == 0) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", b);
    } else {
      std::snprintf(buffer, sizeof(buffer), " %c %.17g", b < 0 ? '-' : '+', std::abs(b));
    }
    out += buffer;
    for (int k = 0; k < p.num_variables(); ++k) {
      const int e = p.exponents()(k, i);
      if (e == 0) continue;
      out += "*x" + std::to_string(k);
      if (e != 1) out += "^" + std::to_string(e);
    }
  }
  return out;
}

bool is_even(const Exponent& alpha) {
  return (alpha.array().unaryExpr([](int v) { return v % 2; }) == 0).all();
}

SupportClassification classify_support(const SparsePolynomial& p) {
  SupportClassification c;
  for (int i = 0; i < p.num_terms(); ++i) {
    const bool square = i == 0 || (p.coefficient(i) > 0.0 && is_even(p.exponent(i)));
    (square ? c.mono_squares : c.non_squares).push_back(i);
  }
  return c;
}

int degree(const SparsePolynomial& p) {
  int d = 0;
  for (int i = 0; i < p.num_terms(); ++i) d = std::max(d, total_degree(p.exponent(i)));
  return d;
}

SparsePolynomial scale_exponents(const SparsePolynomial& p, int factor) {
  if (factor < 1) throw std::invalid_argument("scale_exponents: factor must be positive");
  return SparsePolynomial(p.exponents() * factor, p.coefficients());
}

SparsePolynomial operator+(const SparsePolynomial& p, const SparsePolynomial& q) {
  if (p.num_variables() != q.num_variables()) throw DimensionError("operator+: variable counts differ");
  ExponentMatrix a(p.num_variables(), p.num_terms() + q.num_terms());
  a << p.exponents(), q.exponents();
  Eigen::VectorXd b(p.num_terms() + q.num_terms());
  b << p.coefficients(), q.coefficients();
  return SparsePolynomial(std::move(a), std::move(b));
}

}  // namespace sonc
