#pragma once

#include <array>
#include <string>

#include "decaylab/state.hpp"

namespace decaylab {

/// Viscosities and couplings for every supported system. Fields that a
/// system does not use are ignored by it.
struct SystemParams {
  double mu = 1.0;     // kinematic viscosity
  double chi = 1.0;    // vortex viscosity
  double gamma = 1.0;  // spin viscosity
  double kappa = 1.0;  // Lame coefficient of grad(div w)

  double magnetic_nu = 1.0;  // magneto-micropolar
  double omega = 0.0;        // rotating Navier-Stokes (Coriolis)

  struct Tropical {
    double mu = 1.0;
    double nu = 1.0;
    double eta = 1.0;
  } tropical;

  // generic dissipative linear system: symbol R^T diag(-c_i |xi|^{2 s}) R
  double generic_gamma_exponent = 1.0;
  std::array<double, 3> generic_ci{1.0, 1.0, 1.0};
  std::array<double, 9> generic_rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};  // row major, orthogonal

  // generic anti-symmetric parabolic system
  int parabolic_components = 3;
  double parabolic_c = 1.0;
  std::string flux_library = "gradient_quadratic";

  /// nu = min{mu, gamma}; always recomputed.
  [[nodiscard]] double nu_min() const { return mu < gamma ? mu : gamma; }
};

/// Rejects parameter sets that are invalid for the given system.
void validate(const SystemParams& p, SystemId id);

/// Smallest dissipation coefficient multiplying ||D z||^2 in the energy
/// balance of each system.
double dissipation_floor(const SystemParams& p, SystemId id);

/// 32 chi (mu + chi + gamma) > 1
[[nodiscard]] inline bool eigen_hypothesis(const SystemParams& p) {
  return 32.0 * p.chi * (p.mu + p.chi + p.gamma) > 1.0;
}

}  // namespace decaylab
