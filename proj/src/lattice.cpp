#include "decaylab/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace decaylab {

int Lattice::max_abs_freq(std::size_t idx) const {
  const auto [i, j, k] = unravel(idx);
  return std::max({std::abs(signed_freq(i)), std::abs(signed_freq(j)), std::abs(signed_freq(k))});
}

Lattice make_lattice_unchecked(int n, double box_length) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("lattice size must be a power of two, got " + std::to_string(n));
  }
  if (!(box_length > 0.0)) {
    throw std::invalid_argument("box length must be positive");
  }
  return Lattice{n, box_length};
}

Lattice make_lattice(int n, double box_length) {
  if (n < 8 || n > 512) {
    throw std::invalid_argument("lattice size must lie in [8, 512], got " + std::to_string(n));
  }
  return make_lattice_unchecked(n, box_length);
}

}  // namespace decaylab
