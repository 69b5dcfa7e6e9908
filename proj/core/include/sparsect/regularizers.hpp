#pragma once

#include <cstddef>
#include <vector>

#include "sparsect/image.hpp"

namespace sparsect {

/// Forward differences with periodic boundary: g[i] = x[i+1 mod n] - x[i]
/// along the width (grad_x) or height (grad_y) axis. Periodic boundaries
/// make D^T D exactly circulant, which the FFT preconditioner relies on.
Image2D grad_x(const Image2D& img);
Image2D grad_y(const Image2D& img);

/// Exact algebraic transposes of grad_x / grad_y.
Image2D grad_x_adjoint(const Image2D& field);
Image2D grad_y_adjoint(const Image2D& field);

GradientField grad(const Image2D& img);

/// Elementwise soft threshold sign(v)*max(|v|-tau, 0): the proximal
/// operator of tau*||.||_1.
Image2D shrink(const Image2D& field, double tau);

/// Patch-unfolding geometry. Patches are sampled on a stride grid; image
/// sides that the grid does not cover exactly are zero-padded on the
/// right/bottom before unfolding and cropped after folding.
struct PatchLayout {
  PatchLayout() = default;
  PatchLayout(std::size_t patch_w, std::size_t patch_h, std::size_t stride_x,
              std::size_t stride_y, std::size_t image_w, std::size_t image_h);

  std::size_t patch_w = 16, patch_h = 16;
  std::size_t stride_x = 16, stride_y = 16;
  std::size_t image_w = 0, image_h = 0;
  std::size_t padded_w = 0, padded_h = 0;
  std::size_t patches_x = 0, patches_y = 0;

  std::size_t n_patches() const { return patches_x * patches_y; }
  std::size_t patch_size() const { return patch_w * patch_h; }
};

/// Column-major block matrix: column j is the row-major flattening of patch
/// j, patches ordered row-major over the patch grid.
struct PatchMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // column-major: data[col * rows + row]

  PatchMatrix() = default;
  PatchMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}
  double at(std::size_t r, std::size_t c) const { return data[c * rows + r]; }
  double& at(std::size_t r, std::size_t c) { return data[c * rows + r]; }
};

PatchMatrix patch_unfold(const Image2D& img, const PatchLayout& layout);

/// Scatters patch columns back to the image; pixels covered by several
/// patches are averaged by coverage count. Left inverse of patch_unfold
/// whenever stride <= patch size.
Image2D patch_fold(const PatchMatrix& m, const PatchLayout& layout);

/// Singular value thresholding U diag(max(s_i - tau, 0)) V^T: the proximal
/// operator of tau*||.||_*. tau = 0 returns the input unchanged.
PatchMatrix svt(const PatchMatrix& m, double tau);

/// Sum of singular values.
double nuclear_norm(const PatchMatrix& m);

}  // namespace sparsect
