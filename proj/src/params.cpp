#include "decaylab/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decaylab {

namespace {
void positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
}
void nonnegative(double v, const char* name) {
  if (!(v >= 0.0)) throw std::invalid_argument(std::string(name) + " must be >= 0");
}
}  // namespace

void validate(const SystemParams& p, SystemId id) {
  switch (id) {
    case SystemId::micropolar:
    case SystemId::magneto_micropolar:
      positive(p.mu, "mu");
      positive(p.gamma, "gamma");
      nonnegative(p.chi, "chi");
      nonnegative(p.kappa, "kappa");
      if (id == SystemId::magneto_micropolar) positive(p.magnetic_nu, "magnetic_nu");
      break;
    case SystemId::navier_stokes:
    case SystemId::rotating_ns:
      positive(p.mu, "mu");
      if (!std::isfinite(p.omega)) throw std::invalid_argument("omega must be finite");
      break;
    case SystemId::tropical:
      nonnegative(p.tropical.mu, "tropical.mu");
      nonnegative(p.tropical.nu, "tropical.nu");
      nonnegative(p.tropical.eta, "tropical.eta");
      break;
    case SystemId::generic_linear: {
      for (double c : p.generic_ci) positive(c, "generic c_i");
      if (!(p.generic_gamma_exponent > 0.0 && p.generic_gamma_exponent <= 1.0)) {
        throw std::invalid_argument("generic gamma exponent must lie in (0, 1]");
      }
      // orthogonality of the constant rotation
      const auto& r = p.generic_rotation;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double dot = 0.0;
          for (int k = 0; k < 3; ++k) dot += r[3 * i + k] * r[3 * j + k];
          if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-12) {
            throw std::invalid_argument("generic rotation must be orthogonal");
          }
        }
      break;
    }
    case SystemId::generic_parabolic:
      positive(p.parabolic_c, "parabolic c");
      if (p.parabolic_components < 2 || p.parabolic_components > 4) {
        throw std::invalid_argument("parabolic components must be 2, 3 or 4");
      }
      break;
  }
}

double dissipation_floor(const SystemParams& p, SystemId id) {
  switch (id) {
    case SystemId::micropolar:
      return p.nu_min();
    case SystemId::magneto_micropolar:
      return std::min(p.nu_min(), p.magnetic_nu);
    case SystemId::navier_stokes:
    case SystemId::rotating_ns:
      return p.mu;
    case SystemId::tropical:
      return std::min({p.tropical.mu, p.tropical.nu, p.tropical.eta});
    case SystemId::generic_linear:
      return *std::min_element(p.generic_ci.begin(), p.generic_ci.end());
    case SystemId::generic_parabolic:
      return p.parabolic_c;
  }
  return 0.0;
}

}  // namespace decaylab
