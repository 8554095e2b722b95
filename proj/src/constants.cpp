#include "decaylab/constants.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace decaylab::constants {

namespace {
constexpr double kDeltaLo = 1e-8;
constexpr double kDeltaHi = 1e8;
constexpr double kBracketTol = 1e-10;
}  // namespace

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  if (!(lo < hi)) throw std::invalid_argument("golden section needs lo < hi");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double k_objective_log(double alpha, int m, double delta) {
  double acc = -0.5 * std::log(delta);
  for (int j = 0; j <= m; ++j) acc += 0.5 * std::log(alpha + 0.5 * j + delta);
  return acc;
}

ConstantReport k_alpha_m(double alpha, int m) {
  if (alpha < 0.0 || m < 0) throw std::invalid_argument("K_{alpha,m} needs alpha >= 0 and m >= 0");
  if (alpha > 10.0 || m > 12) throw std::invalid_argument("K_{alpha,m} evaluated only for alpha <= 10, m <= 12");
  ConstantReport r;
  r.name = "K(" + std::to_string(alpha) + "," + std::to_string(m) + ")";

  if (alpha == 0.0 && m == 0) {
    r.value = 1.0;
    r.attained_delta = 1.0;
    r.case_label = "identically one";
    return r;
  }
  if (alpha == 0.0) {
    // the j = 0 factor cancels delta^{-1/2}; the rest decreases to prod j/2
    double prod = 1.0;
    for (int j = 1; j <= m; ++j) prod *= 0.5 * j;
    r.value = std::sqrt(prod);
    r.case_label = "infimum as delta -> 0+";
    return r;
  }
  if (m == 0) {
    r.value = 1.0;
    r.case_label = "infimum as delta -> infinity";
    return r;
  }

  const double lo = std::log(kDeltaLo), hi = std::log(kDeltaHi);
  const double x = golden_section_minimize(
      [&](double s) { return k_objective_log(alpha, m, std::exp(s)); }, lo, hi, kBracketTol);
  const double delta = std::exp(x);
  r.value = std::exp(k_objective_log(alpha, m, delta));
  if (x - lo > 10 * kBracketTol && hi - x > 10 * kBracketTol) {
    r.attained_delta = delta;
    r.case_label = "minimum attained";
  } else {
    r.case_label = "minimum at search boundary";
  }
  return r;
}

double k_tilde(double alpha, int m) {
  if (m < 0) throw std::invalid_argument("k_tilde needs m >= 0");
  std::vector<double> k(static_cast<std::size_t>(m) + 3);
  for (int l = 0; l <= m + 2; ++l) k[l] = k_alpha_m(alpha, l).value;
  double sum = 0.0;
  for (int l = 0; l <= m; ++l) {
    sum += std::pow(k[l], 0.25) * std::pow(k[l + 1], 0.75) * std::pow(k[m - l + 1], 0.25) *
           std::pow(k[m - l + 2], 0.75);
  }
  return sum;
}

double beta_of_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.25)) {
    throw std::invalid_argument("beta(alpha) is defined for 0 <= alpha < 5/4");
  }
  if (alpha < 0.5) return alpha + 0.25;
  if (alpha < 1.0) return 0.25;
  return 1.25 - alpha;
}

ConstantReport error_constant(const SystemParams& params, const AlphaParams& ap, int m, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("comparison rate c must be > 0");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const double alpha = ap.alpha;
  const double beta = beta_of_alpha(alpha);
  if (!ap.lambda0) throw std::invalid_argument("error constant needs lambda0");
  const double lambda0 = *ap.lambda0;
  const double e = 0.5 * m + 1.25;
  const double nu = params.nu_min();
  const double ktil = k_tilde(alpha, m);
  const double two_pow = std::pow(2.0, alpha + beta + 0.5 * m);
  const double linear_part = std::pow(nu, -e) * ktil * lambda0 * lambda0;

  ConstantReport r;
  r.name = "C(nu,chi," + std::to_string(alpha) + "," + std::to_string(m) + ")";
  if (alpha < 0.5) {
    r.value = (std::pow(nu, -e) * ktil + std::pow(c, -e) * two_pow) * lambda0 * lambda0;
    r.case_label = "0 <= alpha < 1/2";
    return r;
  }
  if (!ap.z0_norm) throw std::invalid_argument("error constant for alpha >= 1/2 needs ||z0||");
  const double z0 = *ap.z0_norm;
  if (alpha < 1.0) {
    r.value = linear_part + std::pow(c, -e) * z0 * two_pow * lambda0;
    r.case_label = "1/2 <= alpha < 1";
  } else {
    r.value = linear_part + std::pow(c, -e) * z0 * two_pow;
    r.case_label = "1 <= alpha < 5/4";
  }
  return r;
}

double regularity_time_bound(double nu, double z0_norm, RegularityVariant variant) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
  const double coeff = variant == RegularityVariant::improved
                           ? kImprovedRegularityCoefficient
                           : 1.0 / (128.0 * std::numbers::pi);
  const double z2 = z0_norm * z0_norm;
  return coeff * std::pow(nu, -5.0) * z2 * z2;
}

double predicted_exponent(const AlphaParams& ap, int m, NormField field, double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("p must lie in [2, infinity]");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const double lp_shift = std::isinf(p) ? 0.75 : 3.0 * (p - 2.0) / (4.0 * p);
  const double a = ap.alpha;
  switch (field) {
    case NormField::z:
      return a + 0.5 * m + lp_shift;
    case NormField::w:
      return a + 0.5 * (m + 1) + lp_shift;
    case NormField::Ez:
      return a + beta_of_alpha(a) + 0.5 * m + lp_shift;
    case NormField::Ew:
      return a + beta_of_alpha(a) + 0.5 * (m + 1) + lp_shift;
    case NormField::pressure:
      if (p != 2.0) throw std::invalid_argument("pressure exponent is stated for p = 2 only");
      return 2.0 * a + 0.5 * m + 0.75;
  }
  return 0.0;
}

}  // namespace decaylab::constants
