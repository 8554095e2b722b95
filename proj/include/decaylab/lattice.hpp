#pragma once

#include <array>
#include <cstddef>
#include <numbers>

namespace decaylab {

using Vec3 = std::array<double, 3>;

/// Periodic cubic lattice with n points per axis on a box of side L.
///
/// Modes are stored in FFT order: index k along an axis carries the signed
/// integer frequency k for k < n/2 and k - n otherwise, so the wavenumber is
/// (2 pi / L) * signed_freq(k). The last index varies fastest.
struct Lattice {
  int n = 0;
  double box_length = 0.0;
  static constexpr int dim = 3;

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(n) * n * n;
  }
  [[nodiscard]] double dk() const { return 2.0 * std::numbers::pi / box_length; }
  [[nodiscard]] double cell() const { return box_length / n; }
  [[nodiscard]] double volume() const {
    return box_length * box_length * box_length;
  }

  [[nodiscard]] int signed_freq(int idx) const { return idx < n / 2 ? idx : idx - n; }
  [[nodiscard]] double wavenumber(int idx) const { return dk() * signed_freq(idx); }
  [[nodiscard]] bool is_nyquist(int idx) const { return idx == n / 2; }

  [[nodiscard]] std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  [[nodiscard]] std::array<int, 3> unravel(std::size_t idx) const {
    const int k = static_cast<int>(idx % n);
    const int j = static_cast<int>((idx / n) % n);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
    return {i, j, k};
  }
  /// Index of the mode carrying -xi.
  [[nodiscard]] std::size_t partner(std::size_t idx) const {
    const auto [i, j, k] = unravel(idx);
    return index((n - i) % n, (n - j) % n, (n - k) % n);
  }
  [[nodiscard]] Vec3 xi(std::size_t idx) const {
    const auto [i, j, k] = unravel(idx);
    return {wavenumber(i), wavenumber(j), wavenumber(k)};
  }
  [[nodiscard]] double xi2(std::size_t idx) const {
    const Vec3 x = xi(idx);
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  }
  /// True when any axis sits on the Nyquist frequency -n/2.
  [[nodiscard]] bool touches_nyquist(std::size_t idx) const {
    const auto [i, j, k] = unravel(idx);
    return is_nyquist(i) || is_nyquist(j) || is_nyquist(k);
  }
  /// Largest |signed frequency| over the three axes.
  [[nodiscard]] int max_abs_freq(std::size_t idx) const;

  bool operator==(const Lattice&) const = default;
};

/// Validates n (power of two in [8, 512]) and L > 0.
Lattice make_lattice(int n, double box_length);

/// Same checks without the lower size bound; used by oracles that need 2n
/// grids and by padded norm evaluation.
Lattice make_lattice_unchecked(int n, double box_length);

}  // namespace decaylab
