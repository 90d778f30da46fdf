#include "sonc/generator.hpp"

#include "sonc/geometry.hpp"
#include "sonc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace sonc {

const char* to_string(GenShape s) {
  switch (s) {
    case GenShape::standard_simplex: return "standard_simplex";
    case GenShape::simplex: return "simplex";
    case GenShape::arbitrary: return "arbitrary";
  }
  return "unknown";
}

GenShape parse_shape(const std::string& s) {
  if (s == "standard_simplex" || s == "standard") return GenShape::standard_simplex;
  if (s == "simplex") return GenShape::simplex;
  if (s == "arbitrary") return GenShape::arbitrary;
  throw std::invalid_argument("unknown shape '" + s + "'");
}

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kSiteVertices = 0x76657274ULL;
constexpr std::uint64_t kSiteInterior = 0x696e7472ULL;
constexpr std::uint64_t kSiteCoefficients = 0x636f6566ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

u128 limit_for(int bits) {
  bits = std::clamp(bits, 1, 127);
  return (static_cast<u128>(1) << bits) - 1;
}

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

// Binomial C(a, k) or nullopt if it exceeds the limit.
std::optional<u128> binomial(int a, int k, u128 limit) {
  if (k < 0 || k > a) return static_cast<u128>(0);
  k = std::min(k, a - k);
  u128 c = 1;
  for (int i = 1; i <= k; ++i) {
    // C_i = C_{i-1} * num / i; with g = gcd(C_{i-1}, i), i/g divides num.
    const u128 num = static_cast<u128>(a - k + i);
    const u128 g = gcd128(c, static_cast<u128>(i));
    const u128 lhs = c / g;
    const u128 rhs = num / (static_cast<u128>(i) / g);
    if (lhs > limit / rhs) return std::nullopt;
    c = lhs * rhs;
  }
  return c;
}

u128 uniform_below(u128 bound, std::mt19937_64& rng) {
  if (bound <= 1) return 0;
  const u128 max = ~static_cast<u128>(0);
  const u128 reject_from = max - max % bound;
  while (true) {
    const u128 r = (static_cast<u128>(rng()) << 64) | static_cast<u128>(rng());
    if (r < reject_from) return r % bound;
  }
}

bool is_strict_simplex_interior(const Eigen::MatrixXd& verts, const Eigen::VectorXd& v) {
  return barycentric_coordinates(verts, v).interior;
}

// Uniform on the probability simplex (normalized exponentials).
std::vector<double> random_weights(std::size_t count, std::mt19937_64& rng) {
  std::exponential_distribution<double> u(1.0);
  std::vector<double> w(count);
  double s = 0.0;
  for (auto& x : w) {
    x = u(rng);
    s += x;
  }
  if (s <= 0.0) s = 1.0;
  for (auto& x : w) x /= s;
  return w;
}

Exponent rounded_combination(const std::vector<Exponent>& pts, const std::vector<double>& w) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) v += w[i] * pts[i].cast<double>();
  Exponent out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out(k) = static_cast<int>(std::nearbyint(v(k)));
  return out;
}

std::vector<int> key(const Exponent& e) { return {e.data(), e.data() + e.size()}; }

Eigen::MatrixXd as_matrix(const std::vector<Exponent>& pts) {
  Eigen::MatrixXd m(pts.front().size(), static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i].cast<double>();
  return m;
}

void validate(const GenSpec& s) {
  if (s.n < 1) throw std::invalid_argument("generate: n must be at least 1");
  if (s.d < 2 || s.d % 2 != 0) throw std::invalid_argument("generate: d must be even and positive");
  if (s.t < s.n + 2) throw std::invalid_argument("generate: t must be at least n+2");
  if (s.shape == GenShape::arbitrary && (s.inner < 0 || s.inner > s.t - s.n - 1)) {
    throw std::invalid_argument("generate: inner must lie in [0, t-n-1]");
  }
}

}  // namespace

std::optional<unsigned __int128> lattice_point_count(int n, int m, int bits) {
  if (n < 0 || m < 0) throw std::invalid_argument("lattice_point_count: negative argument");
  return binomial(n + m, n, limit_for(bits));
}

Exponent uniform_simplex_lattice_point(int n, int m, std::mt19937_64& rng, int bits) {
  const u128 limit = limit_for(bits);
  const auto total = binomial(n + m, n, limit);
  if (!total) {
    throw GenerationFailed("lattice point count C(" + std::to_string(n + m) + "," + std::to_string(n) +
                           ") exceeds the " + std::to_string(bits) + "-bit counting budget");
  }
  u128 index = uniform_below(*total, rng);
  Exponent alpha = Exponent::Zero(n);
  int remaining = m;
  for (int i = 0; i < n; ++i) {
    const int rest = n - i - 1;
    for (int v = 0; v <= remaining; ++v) {
      // points with alpha_i = v: remaining coordinates sum to at most remaining - v
      const u128 block = *binomial(rest + remaining - v, rest, limit);
      if (index < block) {
        alpha(i) = v;
        remaining -= v;
        break;
      }
      index -= block;
    }
  }
  return alpha;
}

std::mt19937_64 site_rng(std::uint64_t seed, std::uint64_t site) { return std::mt19937_64(splitmix64(seed ^ site)); }

SparsePolynomial generate(const GenSpec& spec, const GeneratorOptions& options) {
  validate(spec);
  const int n = spec.n;
  const int t = spec.t;
  const int max_attempts = 50 * t;
  auto vrng = site_rng(spec.seed, kSiteVertices);
  auto irng = site_rng(spec.seed, kSiteInterior);
  auto crng = site_rng(spec.seed, kSiteCoefficients);

  std::vector<Exponent> points;
  std::set<std::vector<int>> seen;
  auto add = [&](const Exponent& e) {
    if (seen.insert(key(e)).second) {
      points.push_back(e);
      return true;
    }
    return false;
  };
  add(Exponent::Zero(n));

  if (spec.shape == GenShape::standard_simplex) {
    for (int i = 0; i < n; ++i) add(Exponent::Unit(n, i) * spec.d);
    const int slack = spec.d - 1 - n;
    if (slack < 0) throw GenerationFailed("scaled standard simplex has no interior lattice points");
    const auto available = lattice_point_count(n, slack, options.count_bits);
    if (available && *available < static_cast<u128>(t - n - 1)) {
      throw GenerationFailed("not enough interior lattice points for t=" + std::to_string(t));
    }
    int attempts = 0;
    while (static_cast<int>(points.size()) < t) {
      if (++attempts > max_attempts) throw GenerationFailed("interior sampling exceeded the retry threshold");
      add(uniform_simplex_lattice_point(n, slack, irng, options.count_bits) + Exponent::Ones(n));
    }
  } else {
    const int outer = spec.shape == GenShape::simplex ? n : t - spec.inner - 1;
    int attempts = 0;
    while (true) {
      points.resize(1);
      seen.clear();
      seen.insert(key(points.front()));
      int guard = 0;
      while (static_cast<int>(points.size()) < outer + 1) {
        if (++guard > max_attempts) throw GenerationFailed("could not draw distinct hull points");
        add(uniform_simplex_lattice_point(n, spec.d / 2, vrng, options.count_bits) * 2);
      }
      if (spec.shape == GenShape::arbitrary || affine_rank(as_matrix(points)) == n + 1) break;
      if (++attempts > max_attempts) throw GenerationFailed("could not draw an affinely independent simplex");
    }
    const std::vector<Exponent> base = points;
    const Eigen::MatrixXd base_m = as_matrix(base);
    int tries = 0;
    while (static_cast<int>(points.size()) < t) {
      if (++tries > max_attempts) throw GenerationFailed("interior sampling exceeded the retry threshold");
      const Exponent v = rounded_combination(base, random_weights(base.size(), irng));
      if (seen.count(key(v))) continue;
      const bool inside = spec.shape == GenShape::simplex ? is_strict_simplex_interior(base_m, v.cast<double>())
                                                           : in_relative_interior(base_m, v.cast<double>());
      if (inside) add(v);
    }
  }

  ExponentMatrix a(n, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = points[i];
  const SparsePolynomial shape(a, Eigen::VectorXd::Ones(a.cols()));
  const std::vector<int> vertices = compute_vertices(shape);
  const int h = static_cast<int>(vertices.size());

  std::normal_distribution<double> wide(0.0, static_cast<double>(t) / n);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> hull_coeffs(static_cast<std::size_t>(h));
  for (auto& b : hull_coeffs) b = std::abs(wide(crng));
  std::vector<double> rest_coeffs(static_cast<std::size_t>(shape.num_terms() - h));
  for (auto& b : rest_coeffs) b = unit(crng);

  Eigen::VectorXd b(shape.num_terms());
  std::size_t hv = 0, rv = 0;
  for (int i = 0; i < shape.num_terms(); ++i) {
    const bool is_vertex = std::find(vertices.begin(), vertices.end(), i) != vertices.end();
    b(i) = is_vertex ? hull_coeffs[hv++] : rest_coeffs[rv++];
  }
  return SparsePolynomial(shape.exponents(), b);
}

}  // namespace sonc
