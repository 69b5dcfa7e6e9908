#include "sparsect/regularizers.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "sparsect/errors.hpp"

namespace sparsect {

Image2D grad_x(const Image2D& img) {
  Image2D g(img.width, img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const std::size_t xn = (x + 1 == img.width) ? 0 : x + 1;
      g.px(x, y) = img.px(xn, y) - img.px(x, y);
    }
  }
  return g;
}

Image2D grad_y(const Image2D& img) {
  Image2D g(img.width, img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    const std::size_t yn = (y + 1 == img.height) ? 0 : y + 1;
    for (std::size_t x = 0; x < img.width; ++x) {
      g.px(x, y) = img.px(x, yn) - img.px(x, y);
    }
  }
  return g;
}

Image2D grad_x_adjoint(const Image2D& field) {
  Image2D out(field.width, field.height);
  for (std::size_t y = 0; y < field.height; ++y) {
    for (std::size_t x = 0; x < field.width; ++x) {
      const std::size_t xp = (x == 0) ? field.width - 1 : x - 1;
      out.px(x, y) = field.px(xp, y) - field.px(x, y);
    }
  }
  return out;
}

Image2D grad_y_adjoint(const Image2D& field) {
  Image2D out(field.width, field.height);
  for (std::size_t y = 0; y < field.height; ++y) {
    const std::size_t yp = (y == 0) ? field.height - 1 : y - 1;
    for (std::size_t x = 0; x < field.width; ++x) {
      out.px(x, y) = field.px(x, yp) - field.px(x, y);
    }
  }
  return out;
}

GradientField grad(const Image2D& img) { return {grad_x(img), grad_y(img)}; }

Image2D shrink(const Image2D& field, double tau) {
  if (tau < 0.0) throw ValidationError("shrink: tau must be >= 0");
  Image2D out = field;
  if (tau == 0.0) return out;
  for (double& v : out.data) {
    const double mag = std::abs(v) - tau;
    v = (mag > 0.0) ? std::copysign(mag, v) : 0.0;
  }
  return out;
}

PatchLayout::PatchLayout(std::size_t pw, std::size_t ph, std::size_t sx, std::size_t sy,
                         std::size_t iw, std::size_t ih)
    : patch_w(pw), patch_h(ph), stride_x(sx), stride_y(sy), image_w(iw), image_h(ih) {
  if (pw == 0 || ph == 0) throw ValidationError("PatchLayout: patch dims must be >= 1");
  if (sx == 0 || sy == 0) throw ValidationError("PatchLayout: strides must be >= 1");
  if (iw == 0 || ih == 0) throw ValidationError("PatchLayout: image dims must be >= 1");
  const auto grid = [](std::size_t image, std::size_t patch, std::size_t stride) {
    if (image <= patch) return std::size_t{1};
    return (image - patch + stride - 1) / stride + 1;
  };
  patches_x = grid(iw, pw, sx);
  patches_y = grid(ih, ph, sy);
  padded_w = (patches_x - 1) * stride_x + patch_w;
  padded_h = (patches_y - 1) * stride_y + patch_h;
}

PatchMatrix patch_unfold(const Image2D& img, const PatchLayout& layout) {
  if (img.width != layout.image_w || img.height != layout.image_h)
    throw ValidationError("patch_unfold: image dims do not match layout");
  PatchMatrix m(layout.patch_size(), layout.n_patches());
  for (std::size_t py = 0; py < layout.patches_y; ++py) {
    for (std::size_t px = 0; px < layout.patches_x; ++px) {
      const std::size_t col = py * layout.patches_x + px;
      const std::size_t x0 = px * layout.stride_x;
      const std::size_t y0 = py * layout.stride_y;
      for (std::size_t dy = 0; dy < layout.patch_h; ++dy) {
        for (std::size_t dx = 0; dx < layout.patch_w; ++dx) {
          const std::size_t x = x0 + dx;
          const std::size_t y = y0 + dy;
          const double v = (x < img.width && y < img.height) ? img.px(x, y) : 0.0;
          m.at(dy * layout.patch_w + dx, col) = v;
        }
      }
    }
  }
  return m;
}

Image2D patch_fold(const PatchMatrix& m, const PatchLayout& layout) {
  if (m.rows != layout.patch_size() || m.cols != layout.n_patches())
    throw ValidationError("patch_fold: matrix shape does not match layout");
  Image2D accum(layout.padded_w, layout.padded_h, 0.0);
  std::vector<double> coverage(accum.size(), 0.0);
  for (std::size_t py = 0; py < layout.patches_y; ++py) {
    for (std::size_t px = 0; px < layout.patches_x; ++px) {
      const std::size_t col = py * layout.patches_x + px;
      const std::size_t x0 = px * layout.stride_x;
      const std::size_t y0 = py * layout.stride_y;
      for (std::size_t dy = 0; dy < layout.patch_h; ++dy) {
        for (std::size_t dx = 0; dx < layout.patch_w; ++dx) {
          const std::size_t idx = (y0 + dy) * accum.width + (x0 + dx);
          accum.data[idx] += m.at(dy * layout.patch_w + dx, col);
          coverage[idx] += 1.0;
        }
      }
    }
  }
  for (std::size_t i = 0; i < accum.size(); ++i) {
    if (coverage[i] > 0.0) accum.data[i] /= coverage[i];
  }
  Image2D out(layout.image_w, layout.image_h, 0.0);
  for (std::size_t y = 0; y < out.height; ++y)
    for (std::size_t x = 0; x < out.width; ++x) out.px(x, y) = accum.px(x, y);
  return out;
}

namespace {

Eigen::Map<const Eigen::MatrixXd> as_eigen(const PatchMatrix& m) {
  return {m.data.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols)};
}

}  // namespace

PatchMatrix svt(const PatchMatrix& m, double tau) {
  if (tau < 0.0) throw ValidationError("svt: tau must be >= 0");
  if (tau == 0.0) return m;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalError("svt: SVD failed on " + std::to_string(m.rows) + "x" +
                         std::to_string(m.cols) + " matrix");
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = std::max(s[i] - tau, 0.0);
  Eigen::MatrixXd rec = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  PatchMatrix out(m.rows, m.cols);
  Eigen::Map<Eigen::MatrixXd>(out.data.data(), rec.rows(), rec.cols()) = rec;
  return out;
}

double nuclear_norm(const PatchMatrix& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(m));
  if (svd.info() != Eigen::Success)
    throw NumericalError("nuclear_norm: SVD failed on " + std::to_string(m.rows) + "x" +
                         std::to_string(m.cols) + " matrix");
  return svd.singularValues().sum();
}

}  // namespace sparsect
