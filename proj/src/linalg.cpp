#include "decaylab/linalg.hpp"

#include <cmath>
#include <limits>

namespace decaylab::linalg {

bool is_hermitian(const CMat& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

CMat expm_pade13(const CMat& a) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const CMat as = a * std::ldexp(1.0, -s);

  const CMat id = CMat::Identity(n, n);
  const CMat a2 = as * as;
  const CMat a4 = a2 * a2;
  const CMat a6 = a4 * a2;
  const CMat u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                       b[3] * a2 + b[1] * id);
  const CMat v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  CMat r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

ExpmResult expm(const CMat& a, double condition_limit) {
  ExpmResult out;
  if (is_hermitian(a)) {
    const CMat h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    if (es.info() == Eigen::Success) {
      const Eigen::VectorXd lam = es.eigenvalues();
      const CMat& vec = es.eigenvectors();
      out.value = vec * lam.array().exp().matrix().cast<std::complex<double>>().asDiagonal() *
                  vec.adjoint();
      out.method = ExpmMethod::eigen;
      out.condition = 1.0;
      return out;
    }
  }
  Eigen::ComplexEigenSolver<CMat> es(a);
  if (es.info() == Eigen::Success) {
    const CMat& vec = es.eigenvectors();
    Eigen::JacobiSVD<CMat> svd(vec);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    out.condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (out.condition < condition_limit) {
      const CVec e = es.eigenvalues().array().exp();
      out.value = vec * e.asDiagonal() * vec.inverse();
      out.method = ExpmMethod::eigen;
      return out;
    }
  } else {
    out.condition = std::numeric_limits<double>::infinity();
  }
  out.value = expm_pade13(a);
  out.method = ExpmMethod::pade;
  return out;
}

}  // namespace decaylab::linalg
