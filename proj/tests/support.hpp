#pragma once

// Shared fixtures for the unit tests.

#include <cmath>
#include <random>

#include "decaylab/spectral_ops.hpp"
#include "decaylab/state.hpp"

namespace decaylab::testing {

/// Random real state of a system: band-limited blocks, solenoidal blocks
/// projected, zero mean, inside the 2/3-rule band when kmax <= n/3.
inline State random_state(SystemId id, const Lattice& lat, int kmax, std::mt19937_64& rng,
                          int parabolic_components = 3) {
  State s = make_state(id, lat, parabolic_components);
  const auto layout = block_layout(id, parabolic_components);
  for (std::size_t b = 0; b < layout.size(); ++b) {
    SpectralField f = spectral::random_band_limited(lat, layout[b].components, kmax, rng);
    if (layout[b].solenoidal) f = spectral::leray_project(f);
    s.blocks[b].field = f;
  }
  return s;
}

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
  const double denom = spectral::hs_norm(a, 0.0);
  return spectral::hs_norm(a - b, 0.0) / (denom > 0.0 ? denom : 1.0);
}

inline double rel_diff(const State& a, const State& b) {
  State d = a;
  d -= b;
  const double denom = state_hs_norm(a, 0.0);
  return state_hs_norm(d, 0.0) / (denom > 0.0 ? denom : 1.0);
}

/// Single real Fourier mode a cos(k.x) e_c, k in integer frequencies.
inline SpectralField cosine_mode(const Lattice& lat, int comps, int c, std::array<int, 3> k,
                                 double a) {
  SpectralField f(lat, comps);
  const int n = lat.n;
  auto wrap = [n](int v) { return ((v % n) + n) % n; };
  f.at(c, lat.index(wrap(k[0]), wrap(k[1]), wrap(k[2]))) += 0.5 * a;
  f.at(c, lat.index(wrap(-k[0]), wrap(-k[1]), wrap(-k[2]))) += 0.5 * a;
  return f;
}

}  // namespace decaylab::testing
