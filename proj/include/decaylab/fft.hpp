#pragma once

#include <span>

#include "decaylab/spectral_field.hpp"

namespace decaylab::fft {

/// In-place 3-D complex transforms of an n^3 buffer. Plans are created once
/// per size and cached; planning is serialized, execution is thread safe.
/// The buffer must come from an aligned_vector (64-byte aligned).
void forward(std::span<cplx> buffer, int n);   // sum_x f(x) e^{-i xi x}, no prefactor
void backward(std::span<cplx> buffer, int n);  // sum_xi f(xi) e^{+i xi x}, no prefactor

}  // namespace decaylab::fft
