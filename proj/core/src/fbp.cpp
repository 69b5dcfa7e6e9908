#include "sparsect/fbp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sparsect/errors.hpp"
#include "sparsect/fft.hpp"

namespace sparsect {
namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Frequency response of the band-limited ramp at unit detector spacing:
// the DFT of the kernel h(0) = 1/4, h(odd n) = -1/(pi^2 n^2), h(even n) = 0,
// laid out circularly on a grid of length m (m >= 2*n_det avoids wrap-around
// in the linear convolution region).
std::vector<double> ramp_response(std::size_t m) {
  std::vector<double> kernel(m, 0.0);
  kernel[0] = 0.25;
  const double inv_pi2 = 1.0 / (std::numbers::pi * std::numbers::pi);
  for (std::size_t n = 1; n <= m / 2; ++n) {
    if (n % 2 == 1) {
      const double v = -inv_pi2 / static_cast<double>(n * n);
      kernel[n] = v;
      kernel[m - n] = v;
    }
  }
  std::vector<std::complex<double>> spec(fft::half_spectrum(m));
  fft::forward1d(m, kernel.data(), spec.data());
  std::vector<double> response(spec.size());
  // symmetric real kernel: the spectrum is real up to rounding
  for (std::size_t i = 0; i < spec.size(); ++i) response[i] = spec[i].real();
  return response;
}

}  // namespace

Sinogram ramp_filter(const Sinogram& sino) {
  const std::size_t n_det = sino.n_det;
  const std::size_t m = next_pow2(2 * n_det);
  const std::vector<double> response = ramp_response(m);

  Sinogram out = sino;
  std::vector<double> padded(m);
  std::vector<std::complex<double>> spec(fft::half_spectrum(m));
  std::vector<double> filtered(m);
  for (std::size_t view = 0; view < sino.n_view(); ++view) {
    std::fill(padded.begin(), padded.end(), 0.0);
    for (std::size_t d = 0; d < n_det; ++d) padded[d] = sino.at(view, d);
    fft::forward1d(m, padded.data(), spec.data());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= response[i];
    fft::inverse1d(m, spec.data(), filtered.data());
    for (std::size_t d = 0; d < n_det; ++d) out.at(view, d) = filtered[d];
  }
  return out;
}

Image2D fbp_reconstruct(const Sinogram& sino, std::size_t width, std::size_t height) {
  if (sino.n_view() == 0) throw ValidationError("fbp_reconstruct: empty sinogram");
  ProjectionOperator op(width, height, sino.angles, sino.n_det);
  Image2D img = op.adjoint(ramp_filter(sino));
  const double scale = std::numbers::pi / static_cast<double>(sino.n_view());
  for (double& v : img.data) v *= scale;
  return img;
}

}  // namespace sparsect
