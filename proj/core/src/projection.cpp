#include "sparsect/projection.hpp"

#include <cmath>
#include <numbers>

#include "sparsect/errors.hpp"
#include "sparsect/random.hpp"

namespace sparsect {

std::size_t default_detector_count(std::size_t side) {
  if (side < 2) throw ValidationError("default_detector_count: side must be >= 2");
  return static_cast<std::size_t>(std::ceil(static_cast<double>(side) * std::numbers::sqrt2));
}

AngleSet make_angles(std::size_t n_view) {
  if (n_view == 0) throw ValidationError("make_angles: n_view must be >= 1");
  AngleSet set;
  set.n_view = n_view;
  set.angles.resize(n_view);
  for (std::size_t k = 0; k < n_view; ++k) {
    set.angles[k] = static_cast<double>(k) * std::numbers::pi / static_cast<double>(n_view);
  }
  return set;
}

ProjectionOperator::ProjectionOperator(std::size_t width, std::size_t height, AngleSet angles,
                                       std::size_t n_det)
    : width_(width), height_(height), angles_(std::move(angles)), n_det_(n_det) {
  if (width_ < 2 || height_ < 2) throw ValidationError("ProjectionOperator: image dims must be >= 2");
  if (angles_.n_view == 0 || angles_.angles.size() != angles_.n_view)
    throw ValidationError("ProjectionOperator: empty or inconsistent angle set");
  if (n_det_ == 0) throw ValidationError("ProjectionOperator: n_det must be >= 1");
  geom_.reserve(angles_.n_view);
  for (double a : angles_.angles) {
    const double s = std::sin(a);
    const double c = std::cos(a);
    const bool x_dom = std::abs(s) >= std::abs(c);
    geom_.push_back({s, c, x_dom, 1.0 / std::max(std::abs(s), std::abs(c))});
  }
}

// Shared gather/scatter kernel. The ray for (angle a, detector offset s) is
// the line { (x, y) : x cos a + y sin a = s } in coordinates centered on the
// image. Stepping across columns ix solves for the fractional row
// fy = (s - x cos a)/sin a and splits the sample between the two neighboring
// rows; the row-stepping case is symmetric. Identical weight enumeration on
// both paths keeps the adjoint exact.
template <bool Adjoint>
void ProjectionOperator::traverse(double* img_data, double* sino_data) const {
  const double cx = 0.5 * static_cast<double>(width_ - 1);
  const double cy = 0.5 * static_cast<double>(height_ - 1);
  const double det_c = 0.5 * static_cast<double>(n_det_ - 1);
  const auto w = static_cast<std::ptrdiff_t>(width_);
  const auto h = static_cast<std::ptrdiff_t>(height_);

  for (std::size_t view = 0; view < angles_.n_view; ++view) {
    const RayGeometry& g = geom_[view];
    double* row = sino_data + view * n_det_;
    for (std::size_t det = 0; det < n_det_; ++det) {
      const double s = static_cast<double>(det) - det_c;
      double accum = 0.0;
      if (g.x_dominant) {
        const double inv_sin = 1.0 / g.sin_a;
        for (std::ptrdiff_t ix = 0; ix < w; ++ix) {
          const double x = static_cast<double>(ix) - cx;
          const double fy = (s - x * g.cos_a) * inv_sin + cy;
          const double fl = std::floor(fy);
          const std::ptrdiff_t iy0 = static_cast<std::ptrdiff_t>(fl);
          const double frac = fy - fl;
          const double w0 = (1.0 - frac) * g.step_len;
          const double w1 = frac * g.step_len;
          if (iy0 >= 0 && iy0 < h) {
            if constexpr (Adjoint)
              img_data[iy0 * w + ix] += w0 * row[det];
            else
              accum += w0 * img_data[iy0 * w + ix];
          }
          if (iy0 + 1 >= 0 && iy0 + 1 < h) {
            if constexpr (Adjoint)
              img_data[(iy0 + 1) * w + ix] += w1 * row[det];
            else
              accum += w1 * img_data[(iy0 + 1) * w + ix];
          }
        }
      } else {
        const double inv_cos = 1.0 / g.cos_a;
        for (std::ptrdiff_t iy = 0; iy < h; ++iy) {
          const double y = static_cast<double>(iy) - cy;
          const double fx = (s - y * g.sin_a) * inv_cos + cx;
          const double fl = std::floor(fx);
          const std::ptrdiff_t ix0 = static_cast<std::ptrdiff_t>(fl);
          const double frac = fx - fl;
          const double w0 = (1.0 - frac) * g.step_len;
          const double w1 = frac * g.step_len;
          if (ix0 >= 0 && ix0 < w) {
            if constexpr (Adjoint)
              img_data[iy * w + ix0] += w0 * row[det];
            else
              accum += w0 * img_data[iy * w + ix0];
          }
          if (ix0 + 1 >= 0 && ix0 + 1 < w) {
            if constexpr (Adjoint)
              img_data[iy * w + ix0 + 1] += w1 * row[det];
            else
              accum += w1 * img_data[iy * w + ix0 + 1];
          }
        }
      }
      if constexpr (!Adjoint) row[det] = accum;
    }
  }
}

Sinogram ProjectionOperator::forward(const Image2D& img) const {
  if (img.width != width_ || img.height != height_)
    throw ValidationError("forward: image dims do not match operator");
  Sinogram sino;
  sino.angles = angles_;
  sino.n_det = n_det_;
  sino.data.assign(angles_.n_view * n_det_, 0.0);
  traverse<false>(const_cast<double*>(img.data.data()), sino.data.data());
  return sino;
}

Image2D ProjectionOperator::adjoint(const Sinogram& sino) const {
  if (sino.n_view() != angles_.n_view || sino.n_det != n_det_)
    throw ValidationError("adjoint: sinogram dims do not match operator");
  Image2D img(width_, height_, 0.0);
  traverse<true>(img.data.data(), const_cast<double*>(sino.data.data()));
  return img;
}

Sinogram add_projection_noise(const Sinogram& sino, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ValidationError("add_projection_noise: sigma must be >= 0");
  Sinogram out = sino;
  if (sigma == 0.0) return out;
  std::vector<double> z(out.data.size());
  fill_standard_normal(z.data(), z.size(), seed);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += sigma * z[i];
  return out;
}

}  // namespace sparsect
