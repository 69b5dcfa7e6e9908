#pragma once

#include <complex>
#include <cstddef>

namespace sparsect::fft {

/// Half-spectrum size of a real-to-complex transform along a length-n axis.
inline std::size_t half_spectrum(std::size_t n) { return n / 2 + 1; }

/// 2D real-to-complex DFT of a row-major width x height grid (height rows).
/// Output is row-major height x (width/2 + 1), unnormalized.
void forward2d(std::size_t width, std::size_t height, const double* in, std::complex<double>* out);

/// Inverse of forward2d, normalized by 1/(width*height). `in` is copied
/// internally; callers may reuse it.
void inverse2d(std::size_t width, std::size_t height, const std::complex<double>* in, double* out);

/// 1D real-to-complex DFT of length n (unnormalized) and its normalized
/// inverse.
void forward1d(std::size_t n, const double* in, std::complex<double>* out);
void inverse1d(std::size_t n, const std::complex<double>* in, double* out);

}  // namespace sparsect::fft
