#pragma once

#include <Eigen/Dense>
#include <complex>

namespace decaylab::linalg {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

enum class ExpmMethod : unsigned char { eigen, pade };

struct ExpmResult {
  CMat value;
  ExpmMethod method = ExpmMethod::eigen;
  double condition = 1.0;  // eigenvector condition number (inf when not formed)
};

/// Eigenvector condition number above which the Pade path is taken.
inline constexpr double kEigenConditionLimit = 1e6;

/// exp(A) for a small dense matrix. Hermitian input goes through the
/// self-adjoint solver; other input through a complex eigendecomposition when
/// its eigenvector basis is well conditioned, else Pade-13 scaling and
/// squaring.
ExpmResult expm(const CMat& a, double condition_limit = kEigenConditionLimit);

/// Degree-13 Pade approximant with scaling and squaring.
CMat expm_pade13(const CMat& a);

[[nodiscard]] bool is_hermitian(const CMat& a, double rel_tol = 1e-14);

}  // namespace decaylab::linalg
