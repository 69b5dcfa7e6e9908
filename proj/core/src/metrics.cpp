#include "sparsect/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "sparsect/errors.hpp"

namespace sparsect {

namespace {

double mse(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double psnr_from_mse(double m, double peak) {
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

// 11x11 outer product of a sigma = 1.5 Gaussian, normalized to unit sum.
const std::array<double, kSsimWindow * kSsimWindow>& ssim_window_weights() {
  static const auto weights = [] {
    std::array<double, kSsimWindow * kSsimWindow> w{};
    std::array<double, kSsimWindow> g{};
    const double sigma = 1.5;
    const double half = (kSsimWindow - 1) / 2.0;
    for (std::size_t i = 0; i < kSsimWindow; ++i) {
      const double d = static_cast<double>(i) - half;
      g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < kSsimWindow; ++j)
      for (std::size_t i = 0; i < kSsimWindow; ++i) {
        w[j * kSsimWindow + i] = g[j] * g[i];
        sum += w[j * kSsimWindow + i];
      }
    for (double& v : w) v /= sum;
    return w;
  }();
  return weights;
}

}  // namespace

double psnr(const Image2D& a, const Image2D& b, double peak) {
  if (!a.same_dims(b)) throw ValidationError("psnr: image dims do not match");
  if (!(peak > 0.0)) throw ValidationError("psnr: peak must be > 0");
  return psnr_from_mse(mse(a.data, b.data), peak);
}

double ssim(const Image2D& a, const Image2D& b, double peak) {
  if (!a.same_dims(b)) throw ValidationError("ssim: image dims do not match");
  if (!(peak > 0.0)) throw ValidationError("ssim: peak must be > 0");
  if (a.width < kSsimWindow || a.height < kSsimWindow)
    throw ValidationError("ssim: image smaller than the 11x11 window");

  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const auto& w = ssim_window_weights();

  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t y0 = 0; y0 + kSsimWindow <= a.height; ++y0) {
    for (std::size_t x0 = 0; x0 + kSsimWindow <= a.width; ++x0) {
      double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
      for (std::size_t dy = 0; dy < kSsimWindow; ++dy) {
        for (std::size_t dx = 0; dx < kSsimWindow; ++dx) {
          const double wv = w[dy * kSsimWindow + dx];
          const double va = a.px(x0 + dx, y0 + dy);
          const double vb = b.px(x0 + dx, y0 + dy);
          mu_a += wv * va;
          mu_b += wv * vb;
          aa += wv * va * va;
          bb += wv * vb * vb;
          ab += wv * va * vb;
        }
      }
      const double var_a = aa - mu_a * mu_a;
      const double var_b = bb - mu_b * mu_b;
      const double cov = ab - mu_a * mu_b;
      const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
      const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

Volume3D::Volume3D(std::size_t w, std::size_t h, std::size_t s, double peak_value, double fill)
    : width(w), height(h), slices(s), peak(peak_value), data(w * h * s, fill) {
  if (w == 0 || h == 0 || s == 0) throw ValidationError("Volume3D: dims must be >= 1");
  if (!(peak_value > 0.0)) throw ValidationError("Volume3D: peak must be > 0");
}

Image2D Volume3D::slice(std::size_t s) const {
  if (s >= slices) throw ValidationError("Volume3D::slice: index out of range");
  Image2D img(width, height);
  const double* src = data.data() + s * width * height;
  std::copy(src, src + width * height, img.data.begin());
  return img;
}

void Volume3D::set_slice(std::size_t s, const Image2D& img) {
  if (s >= slices) throw ValidationError("Volume3D::set_slice: index out of range");
  if (img.width != width || img.height != height)
    throw ValidationError("Volume3D::set_slice: slice dims do not match volume");
  std::copy(img.data.begin(), img.data.end(), data.begin() + s * width * height);
}

double psnr(const Volume3D& a, const Volume3D& b, double peak) {
  if (!a.same_dims(b)) throw ValidationError("psnr: volume dims do not match");
  if (!(peak > 0.0)) throw ValidationError("psnr: peak must be > 0");
  return psnr_from_mse(mse(a.data, b.data), peak);
}

namespace {

// Fixed-y reslice: width x slices image, slice index on the vertical axis.
Image2D coronal_slice(const Volume3D& v, std::size_t y) {
  Image2D img(v.width, v.slices);
  for (std::size_t s = 0; s < v.slices; ++s)
    for (std::size_t x = 0; x < v.width; ++x) img.px(x, s) = v.vx(x, y, s);
  return img;
}

// Fixed-x reslice: height x slices image.
Image2D sagittal_slice(const Volume3D& v, std::size_t x) {
  Image2D img(v.height, v.slices);
  for (std::size_t s = 0; s < v.slices; ++s)
    for (std::size_t y = 0; y < v.height; ++y) img.px(y, s) = v.vx(x, y, s);
  return img;
}

template <typename SliceFn>
PlaneMetrics plane_family(const char* name, std::size_t n, double peak, SliceFn&& get,
                          std::size_t slice_w, std::size_t slice_h) {
  PlaneMetrics pm;
  pm.plane = name;
  pm.ssim_valid = slice_w >= kSsimWindow && slice_h >= kSsimWindow;
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [ra, rb] = get(i);
    psnr_sum += psnr(ra, rb, peak);
    if (pm.ssim_valid) ssim_sum += ssim(ra, rb, peak);
  }
  pm.psnr = psnr_sum / static_cast<double>(n);
  pm.ssim = pm.ssim_valid ? ssim_sum / static_cast<double>(n)
                          : std::numeric_limits<double>::quiet_NaN();
  return pm;
}

}  // namespace

std::vector<PlaneMetrics> evaluate_volume(const Volume3D& recon, const Volume3D& truth) {
  if (!recon.same_dims(truth)) throw ValidationError("evaluate_volume: volume dims do not match");
  const double peak = truth.peak;
  std::vector<PlaneMetrics> out;
  out.push_back(plane_family(
      "axial", recon.slices, peak,
      [&](std::size_t s) { return std::pair{recon.slice(s), truth.slice(s)}; }, recon.width,
      recon.height));
  out.push_back(plane_family(
      "coronal", recon.height, peak,
      [&](std::size_t y) { return std::pair{coronal_slice(recon, y), coronal_slice(truth, y)}; },
      recon.width, recon.slices));
  out.push_back(plane_family(
      "sagittal", recon.width, peak,
      [&](std::size_t x) {
        return std::pair{sagittal_slice(recon, x), sagittal_slice(truth, x)};
      },
      recon.height, recon.slices));
  return out;
}

}  // namespace sparsect
