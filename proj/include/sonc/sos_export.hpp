#pragma once

#include "sonc/poly.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace sonc {

/// Entry (i, j), i <= j, of a symmetric constraint matrix with the given value.
struct SdpEntry {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// Gram-matrix SDP for p + gamma = z^T X z with monomial vector z = basis.
///
/// One equality per moment alpha: sum over ordered pairs (beta, beta') with
/// beta + beta' = alpha of X_{beta,beta'} equals b_alpha; the alpha = 0 row
/// additionally carries -gamma.
struct SosSdp {
  int num_variables = 0;
  int half_degree = 0;
  std::vector<Exponent> basis;
  std::vector<Exponent> moments;
  Eigen::VectorXd rhs;
  std::vector<std::vector<SdpEntry>> constraints;  ///< upper triangle of each constraint matrix

  int matrix_size() const { return static_cast<int>(basis.size()); }
  int num_constraints() const { return static_cast<int>(moments.size()); }
};

/// Throws std::invalid_argument for odd degree. With `prune`, basis elements
/// beta are kept only when 2 beta lies in New(p).
SosSdp build_sos_sdp(const SparsePolynomial& p, bool prune = true);

/// max |<F_alpha, X> - gamma [alpha = 0] - b_alpha| over all constraints.
double sos_constraint_residual(const SosSdp& sdp, const Eigen::MatrixXd& x, double gamma);

/// Sparse SDPA data in dual form: maximize F0 . Y  s.t.  Fc . Y = c_c, Y psd.
struct SdpaProblem {
  std::vector<std::string> comments;
  std::vector<int> block_struct;  ///< negative size marks a diagonal block
  Eigen::VectorXd c;
  struct Entry {
    int matrix = 0;  ///< 0 is F0
    int block = 1;
    int i = 1;
    int j = 1;
    double value = 0.0;
  };
  std::vector<Entry> entries;
};

/// Y = diag(X, gamma_plus, gamma_minus) with gamma = gamma_plus - gamma_minus.
SdpaProblem to_sdpa(const SosSdp& sdp);
std::string write_sdpa(const SdpaProblem& problem);
SdpaProblem parse_sdpa(std::string_view text);

void export_sdpa(const SosSdp& sdp, const std::string& path);
/// JSON mapping basis index (1-based, as in the SDPA file) to exponent.
std::string basis_sidecar_json(const SosSdp& sdp);

}  // namespace sonc
