#pragma once

#include <span>

#include "sigobf/types.hpp"

namespace sigobf::fft {

// Unnormalized forward DFT: X[k] = sum_n x[n] e^{-j2pi kn/N}.
cvec forward(std::span<const cplx> x);

// Unnormalized inverse DFT: x[n] = sum_k X[k] e^{+j2pi kn/N}.
cvec inverse(std::span<const cplx> x);

} // namespace sigobf::fft
