#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

#include "decaylab/lattice.hpp"

namespace decaylab {

using cplx = std::complex<double>;

/// 64-byte aligned storage so FFTW can use its SIMD kernels on our buffers.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t count) {
    return static_cast<T*>(::operator new(count * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

template <class T>
using aligned_vector = std::vector<T, AlignedAllocator<T>>;

/// Fourier coefficients of a scalar or vector field on a periodic lattice.
///
/// Convention: f(x) = sum_xi fhat(xi) exp(i xi.x), so synthesis carries no
/// prefactor and analysis carries 1/n^3. With this choice
/// ||f||_{L^2}^2 = L^3 sum_xi |fhat(xi)|^2.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(const Lattice& lattice, int components);

  [[nodiscard]] const Lattice& lattice() const { return lattice_; }
  [[nodiscard]] int components() const { return components_; }
  [[nodiscard]] std::size_t modes() const { return lattice_.size(); }

  std::span<cplx> component(int c) {
    return {coeffs_.data() + static_cast<std::size_t>(c) * modes(), modes()};
  }
  [[nodiscard]] std::span<const cplx> component(int c) const {
    return {coeffs_.data() + static_cast<std::size_t>(c) * modes(), modes()};
  }
  cplx& at(int c, std::size_t mode) { return coeffs_[static_cast<std::size_t>(c) * modes() + mode]; }
  [[nodiscard]] const cplx& at(int c, std::size_t mode) const {
    return coeffs_[static_cast<std::size_t>(c) * modes() + mode];
  }
  std::span<cplx> data() { return coeffs_; }
  [[nodiscard]] std::span<const cplx> data() const { return coeffs_; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  void set_zero();
  [[nodiscard]] bool same_shape(const SpectralField& other) const {
    return lattice_ == other.lattice_ && components_ == other.components_;
  }

 private:
  Lattice lattice_{};
  int components_ = 0;
  aligned_vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Real samples of a field on the lattice grid (or a refined grid).
struct GridField {
  Lattice lattice;
  int components = 0;
  aligned_vector<double> values;

  std::span<double> component(int c) {
    return {values.data() + static_cast<std::size_t>(c) * lattice.size(), lattice.size()};
  }
  [[nodiscard]] std::span<const double> component(int c) const {
    return {values.data() + static_cast<std::size_t>(c) * lattice.size(), lattice.size()};
  }
};

}  // namespace decaylab
