#pragma once

#include <complex>
#include <span>
#include <vector>

#include "aggfield/grid.hpp"

namespace aggfield::fft {

using Complex = std::complex<double>;

/// Unnormalized 2-D transforms on row-major n1 x n2 data (FFTW conventions:
/// forward uses e^{-i}, backward e^{+i}). Plans are cached per shape; all
/// functions are safe to call concurrently.
std::vector<Complex> forward(std::span<const Complex> in, LatticeSpec lattice);
std::vector<Complex> backward(std::span<const Complex> in, LatticeSpec lattice);

/// Real input, full complex output (every bin, not the half spectrum).
std::vector<Complex> forward_real(std::span<const double> in, LatticeSpec lattice);

/// Half-spectrum transforms: n1 x (n2/2 + 1) complex coefficients.
std::vector<Complex> forward_r2c(std::span<const double> in, LatticeSpec lattice);
/// Consumes a half spectrum and returns the real (unnormalized) inverse.
std::vector<double> backward_c2r(std::vector<Complex> half, LatticeSpec lattice);

}  // namespace aggfield::fft
