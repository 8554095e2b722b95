#pragma once

#include <vector>

#include "decaylab/lattice.hpp"

namespace decaylab::detail {

/// Per-axis wavenumbers for a lattice. `k` is the full table used for
/// |xi|^2 weights and symbols; `kd` zeroes the Nyquist entry and is used
/// for odd (first-order) derivatives so that real data stays real.
struct WaveTable {
  std::vector<double> k;
  std::vector<double> kd;
  std::vector<int> freq;

  explicit WaveTable(const Lattice& lat) : k(lat.n), kd(lat.n), freq(lat.n) {
    for (int i = 0; i < lat.n; ++i) {
      freq[i] = lat.signed_freq(i);
      k[i] = lat.wavenumber(i);
      kd[i] = lat.is_nyquist(i) ? 0.0 : k[i];
    }
  }
};

/// Calls fn(mode_index, i, j, k) in storage order.
template <class Fn>
void for_each_mode(const Lattice& lat, Fn&& fn) {
  const int n = lat.n;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k, ++idx) fn(idx, i, j, k);
}

}  // namespace decaylab::detail
