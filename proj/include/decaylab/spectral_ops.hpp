#pragma once

#include <array>
#include <limits>
#include <random>

#include "decaylab/spectral_field.hpp"

namespace decaylab::spectral {

using MultiIndex = std::array<int, 3>;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Transforms ---------------------------------------------------------------

/// Synthesis onto the n^3 grid (or an r*n refined grid when refine > 1, by
/// zero padding). Imaginary parts are dropped: fields are real data.
GridField to_physical(const SpectralField& f, int refine = 1);
/// Analysis with the 1/n^3 prefactor.
SpectralField from_physical(const GridField& g);

// Differential operators -----------------------------------------------------

/// Multiplies by (i xi)^beta. Along an axis where beta is odd the Nyquist
/// plane is zeroed so that real data stays real.
SpectralField derivative(const SpectralField& f, const MultiIndex& beta);
/// Scalar -> vector.
SpectralField gradient(const SpectralField& f);
/// Vector -> scalar.
SpectralField divergence(const SpectralField& v);
SpectralField curl(const SpectralField& v);
SpectralField laplacian(const SpectralField& f);
/// Removes the gradient part; the xi = 0 mode is set to zero.
SpectralField leray_project(const SpectralField& v);
/// 2/3 rule: zeroes every mode with some |k| > n/3.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);
[[nodiscard]] bool is_retained(const Lattice& lat, std::size_t mode);
void zero_mean(SpectralField& f);

// Norms ------------------------------------------------------------------------

/// (L^3 sum |xi|^{2s} |fhat|^2)^{1/2}, summed over components.
double hs_norm(const SpectralField& f, double s);
/// L^2 inner product L^3 sum Re(conj(f) g).
double inner(const SpectralField& f, const SpectralField& g);
/// Discrete L^p norm of the pointwise Euclidean magnitude, cell weight
/// (L/n)^3 on the sampled grid; p = kInfinity gives the max norm.
double lp_norm(const SpectralField& f, double p, int refine = 1);
/// L^p norm of the full order-m derivative tensor: pointwise magnitude
/// sqrt(sum_{|beta|=m} m!/beta! |d^beta f|^2). For p = 2 this equals
/// hs_norm(f, m).
double derivative_lp_norm(const SpectralField& f, int m, double p, int refine = 1);

/// All multi-indices of total order m with their multinomial weights m!/beta!.
std::vector<std::pair<MultiIndex, double>> multi_indices(int m);

// Structural checks ------------------------------------------------------------

/// max over modes of |fhat(-xi) - conj(fhat(xi))|, Nyquist-touching modes
/// excluded.
double hermitian_defect(const SpectralField& f);
void enforce_hermitian(SpectralField& f);
/// max |xi . vhat| / max |xi| |vhat|; zero for the zero field.
double divergence_ratio(const SpectralField& v);

// Generators (tests and initial data) ------------------------------------------

/// Real random field whose modes satisfy max |k| <= kmax (integer frequency),
/// zero mean, Gaussian coefficients.
SpectralField random_band_limited(const Lattice& lat, int components, int kmax,
                                  std::mt19937_64& rng);

}  // namespace decaylab::spectral
