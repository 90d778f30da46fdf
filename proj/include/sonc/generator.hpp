#pragma once

#include "sonc/poly.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace sonc {

enum class GenShape { standard_simplex, simplex, arbitrary };

const char* to_string(GenShape s);
/// Accepts "standard_simplex" (or "standard"), "simplex", "arbitrary".
GenShape parse_shape(const std::string& s);

struct GenSpec {
  GenShape shape = GenShape::standard_simplex;
  int n = 2;
  int d = 6;
  int t = 6;
  int inner = 0;  ///< arbitrary shape only
  std::uint64_t seed = 0;
};

class GenerationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratorOptions {
  /// Lattice counts must stay below 2^bits; at most 127.
  int count_bits = 127;
};

/// Number of points of {alpha in N^n : |alpha| <= m}, i.e. C(n+m, n), or
/// nullopt if it does not fit in `bits` bits.
std::optional<unsigned __int128> lattice_point_count(int n, int m, int bits = 127);

/// Uniform sample from {alpha in N^n : |alpha| <= m} by unranking a uniform index.
Exponent uniform_simplex_lattice_point(int n, int m, std::mt19937_64& rng, int bits = 127);

/// Per-draw-site stream: mt19937_64 seeded with splitmix64(seed ^ site).
std::mt19937_64 site_rng(std::uint64_t seed, std::uint64_t site);

SparsePolynomial generate(const GenSpec& spec, const GeneratorOptions& options = {});

}  // namespace sonc
