#include "decaylab/spectral_field.hpp"

#include <algorithm>
#include <stdexcept>

namespace decaylab {

SpectralField::SpectralField(const Lattice& lattice, int components)
    : lattice_(lattice), components_(components) {
  if (components <= 0) throw std::invalid_argument("field needs at least one component");
  coeffs_.assign(static_cast<std::size_t>(components) * lattice.size(), cplx{});
}

namespace {
void require_same(const SpectralField& a, const SpectralField& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("field shapes differ");
}
}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same(*this, other);
  auto src = other.data();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += src[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same(*this, other);
  auto src = other.data();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= src[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  require_same(*this, other);
  auto src = other.data();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * src[i];
  return *this;
}

void SpectralField::set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), cplx{}); }

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

}  // namespace decaylab
