#pragma once

#include <cstdint>
#include <string>

#include "decaylab/linear_semigroup.hpp"
#include "decaylab/params.hpp"
#include "decaylab/state.hpp"

namespace decaylab {

/// Recipe for the initial state.
///   bumps:        sum of `bumps` Gaussian bumps of width sigma with random
///                 vector amplitudes and centres in [-spread, spread]^3,
///                 projected for solenoidal blocks, each block normalized
///                 (first block to norm_u, the others to norm_other);
///   gaussian:     the R^3 profile u0 = P[a_u g], w0 = a_w g sampled on the
///                 lattice without normalization (matches the quadrature);
///   taylor_green: the classical vortex in the u block, amplitude norm_u in L^2;
///   zero:         all blocks zero.
struct InitialDataSpec {
  std::string kind = "bumps";
  int bumps = 4;
  double sigma = 2.0;
  double spread = 3.0;
  double norm_u = 1.0;
  double norm_other = 1.0;
  Vec3 u_amplitude{1.0, 0.0, 0.0};
  Vec3 w_amplitude{0.0, 1.0, 0.0};
  std::uint64_t seed = 1;
};

State make_initial_state(SystemId id, const SystemParams& p, const Lattice& lat,
                         const InitialDataSpec& spec);

/// Lattice coefficients of a Gaussian exp(-|x - c|^2 / (2 sigma^2)) times a
/// constant vector, from its continuous Fourier transform divided by L^3.
SpectralField gaussian_field(const Lattice& lat, double sigma, const Vec3& centre,
                             const std::vector<double>& amplitude);

}  // namespace decaylab
