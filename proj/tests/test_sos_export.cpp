#include "sonc/geometry.hpp"
#include "sonc/sos_export.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/binomial.hpp>

#include <random>

using namespace sonc;

namespace {

int choose(int n, int k) { return static_cast<int>(boost::math::binomial_coefficient<double>(n, k)); }

// p = z^T G z over the full monomial basis, expanded term by term.
SparsePolynomial gram_polynomial(const std::vector<Exponent>& basis, const Eigen::MatrixXd& g, int n) {
  std::vector<std::pair<std::vector<int>, double>> terms;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const Exponent e = basis[i] + basis[j];
      terms.push_back({{e.data(), e.data() + e.size()}, g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    }
  }
  return from_terms(n, terms);
}

}  // namespace

TEST(Sos, SquareOfALinearForm) {
  const auto p = parse_polynomial("1 + 2*x0 + x0^2");
  const auto sdp = build_sos_sdp(p);
  ASSERT_EQ(sdp.matrix_size(), 2);
  ASSERT_EQ(sdp.num_constraints(), 3);
  EXPECT_EQ(sdp.rhs, Eigen::Vector3d(1, 2, 1));
  // moment x0 gets X_{0,1} + X_{1,0}, stored once in the upper triangle
  ASSERT_EQ(sdp.constraints[1].size(), 1u);
  EXPECT_EQ(sdp.constraints[1][0].i, 0);
  EXPECT_EQ(sdp.constraints[1][0].j, 1);
  EXPECT_NEAR(sos_constraint_residual(sdp, Eigen::Matrix2d::Ones(), 0.0), 0.0, 1e-15);
  EXPECT_GT(sos_constraint_residual(sdp, Eigen::Matrix2d::Identity(), 0.0), 0.5);
}

TEST(Sos, FullBasisDimensions) {
  for (int n = 1; n <= 3; ++n) {
    for (int d = 1; d <= 3; ++d) {
      std::vector<std::pair<std::vector<int>, double>> terms{{std::vector<int>(n, 0), 1.0}};
      for (int k = 0; k < n; ++k) {
        std::vector<int> e(n, 0);
        e[k] = 2 * d;
        terms.push_back({e, 1.0});
      }
      const auto p = from_terms(n, terms);
      const auto sdp = build_sos_sdp(p, false);
      EXPECT_EQ(sdp.matrix_size(), choose(n + d, d));
      EXPECT_EQ(sdp.num_constraints(), choose(n + 2 * d, 2 * d));
    }
  }
  const auto p = parse_polynomial("1 + x0^6 + x1^6 - x0*x1");
  EXPECT_EQ(build_sos_sdp(p, false).num_constraints(), 28);
}

TEST(Sos, PruningKeepsHalfNewtonPolytope) {
  const auto p = parse_polynomial("1 + x0^4*x1^2 + x0^2*x1^4 - 3*x0^2*x1^2");
  const auto sdp = build_sos_sdp(p, true);
  const Eigen::MatrixXd support = p.exponents().cast<double>();
  for (const auto& b : sdp.basis) EXPECT_TRUE(in_convex_hull(support, 2.0 * b.cast<double>()));
  EXPECT_LT(sdp.matrix_size(), build_sos_sdp(p, false).matrix_size());
}

TEST(Sos, RandomGramMatricesSatisfyTheirConstraints) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<std::pair<std::vector<int>, double>> top{{std::vector<int>(n, 0), 1.0}};
    for (int k = 0; k < n; ++k) {
      std::vector<int> e(n, 0);
      e[k] = 4;
      top.push_back({e, 1.0});
    }
    const auto full = build_sos_sdp(from_terms(n, top), false);
    const int m = full.matrix_size();
    const Eigen::MatrixXd r = Eigen::MatrixXd::NullaryExpr(m, m, [&]() { return g(rng); });
    const Eigen::MatrixXd gram = r * r.transpose();
    const auto p = gram_polynomial(full.basis, gram, n);
    const auto sdp = build_sos_sdp(p, false);
    ASSERT_EQ(sdp.basis.size(), full.basis.size());
    EXPECT_LE(sos_constraint_residual(sdp, gram, 0.0), 1e-10 * gram.cwiseAbs().maxCoeff());
    const double shift = 0.75;
    Eigen::MatrixXd shifted = gram;
    shifted(0, 0) += shift;
    EXPECT_LE(sos_constraint_residual(sdp, shifted, shift), 1e-10 * gram.cwiseAbs().maxCoeff());
  }
}

TEST(Sos, ZeroPolynomial) {
  const auto sdp = build_sos_sdp(SparsePolynomial(2));
  EXPECT_EQ(sdp.matrix_size(), 1);
  EXPECT_EQ(sdp.num_constraints(), 1);
  EXPECT_EQ(sdp.rhs(0), 0.0);
  const auto sdpa = to_sdpa(sdp);
  EXPECT_EQ(sdpa.block_struct, (std::vector<int>{1, -2}));
}

TEST(Sos, OddDegreeIsRejected) {
  EXPECT_THROW(build_sos_sdp(parse_polynomial("1 + x0^3")), std::invalid_argument);
}

TEST(Sdpa, RoundTripIsByteIdentical) {
  const auto p = parse_polynomial("1 + 3*x0^2*x1^6 + 2*x0^6*x1^2 + 6*x0^2*x1^2 - 1*x0^1*x1^2 - 2*x0^2*x1^1 - 3*x0^3*x1^3");
  const std::string text = write_sdpa(to_sdpa(build_sos_sdp(p)));
  EXPECT_EQ(write_sdpa(parse_sdpa(text)), text);
  const auto back = parse_sdpa(text);
  EXPECT_EQ(back.block_struct.size(), 2u);
  EXPECT_EQ(back.block_struct[1], -2);
}

TEST(Sdpa, LayoutOfTheSquareExample) {
  const auto sdpa = to_sdpa(build_sos_sdp(parse_polynomial("1 + 2*x0 + x0^2")));
  EXPECT_EQ(sdpa.block_struct, (std::vector<int>{2, -2}));
  EXPECT_EQ(sdpa.c, Eigen::Vector3d(1, 2, 1));
  // F0 maximizes gamma_plus - gamma_minus
  int f0 = 0;
  for (const auto& e : sdpa.entries) {
    if (e.matrix != 0) continue;
    ++f0;
    EXPECT_EQ(e.block, 2);
    EXPECT_EQ(e.value, e.i == 1 ? 1.0 : -1.0);
  }
  EXPECT_EQ(f0, 2);
}

TEST(Sdpa, ParsesCommasAndBraces) {
  const std::string text = "\"c\n1 = mDIM\n1 = nBLOCK\n{2}\n{3.5}\n0,1,1,1,1.0\n1,1,1,2,0.5\n";
  const auto s = parse_sdpa(text);
  EXPECT_EQ(s.block_struct, std::vector<int>{2});
  EXPECT_EQ(s.c(0), 3.5);
  ASSERT_EQ(s.entries.size(), 2u);
  EXPECT_EQ(s.entries[1].j, 2);
  EXPECT_THROW(parse_sdpa("1 = mDIM\n1 = nBLOCK\n2\n1\n5 1 1 1 1\n"), std::runtime_error);
}
