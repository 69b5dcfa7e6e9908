#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sparsect/image.hpp"

namespace sparsect {

/// Peak signal-to-noise ratio 10*log10(peak^2 / MSE) in dB; identical inputs
/// (MSE = 0) return +infinity.
double psnr(const Image2D& a, const Image2D& b, double peak);

inline constexpr std::size_t kSsimWindow = 11;

/// Mean structural similarity with an 11x11 Gaussian window (sigma = 1.5),
/// K1 = 0.01, K2 = 0.03, evaluated only where the window fits entirely
/// inside the image. Throws if either dimension is smaller than the window.
double ssim(const Image2D& a, const Image2D& b, double peak);

/// Stack of axial slices, row-major within each slice:
/// data[(s * height + y) * width + x]. `peak` is the data-range descriptor
/// used as the metric peak L.
struct Volume3D {
  Volume3D() = default;
  Volume3D(std::size_t w, std::size_t h, std::size_t s, double peak_value = 1.0,
           double fill = 0.0);

  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t slices = 0;
  double peak = 1.0;
  std::vector<double> data;

  std::size_t size() const { return data.size(); }
  double vx(std::size_t x, std::size_t y, std::size_t s) const {
    return data[(s * height + y) * width + x];
  }
  double& vx(std::size_t x, std::size_t y, std::size_t s) {
    return data[(s * height + y) * width + x];
  }
  Image2D slice(std::size_t s) const;
  void set_slice(std::size_t s, const Image2D& img);
  bool same_dims(const Volume3D& o) const {
    return width == o.width && height == o.height && slices == o.slices;
  }
};

/// Volume-wide PSNR over all voxels.
double psnr(const Volume3D& a, const Volume3D& b, double peak);

/// Per-plane-family metrics. `ssim_valid` is false (and `ssim` NaN) when the
/// SSIM window does not fit the slices of that family.
struct PlaneMetrics {
  std::string plane;  // "axial", "coronal", "sagittal"
  double psnr = 0.0;
  double ssim = 0.0;
  bool ssim_valid = false;
};

/// Slice-wise mean PSNR/SSIM for the axial (stored), coronal (fixed y), and
/// sagittal (fixed x) slice families. Resliced images put the slice index on
/// the vertical axis: coronal slices are width x slices, sagittal slices are
/// height x slices. Uses truth.peak as the metric peak.
std::vector<PlaneMetrics> evaluate_volume(const Volume3D& recon, const Volume3D& truth);

}  // namespace sparsect
