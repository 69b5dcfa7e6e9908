#pragma once

#include <cstddef>
#include <vector>

namespace sparsect {

/// Row-major 2D grid of double intensities, nominal range [0,1].
/// data[y * width + x], x = column index, y = row index.
struct Image2D {
  Image2D() = default;
  Image2D(std::size_t w, std::size_t h, double fill = 0.0);

  /// Validating constructor: checks length and finiteness of `values`.
  static Image2D from_data(std::size_t w, std::size_t h, std::vector<double> values);

  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> data;

  std::size_t size() const { return data.size(); }
  double px(std::size_t x, std::size_t y) const { return data[y * width + x]; }
  double& px(std::size_t x, std::size_t y) { return data[y * width + x]; }
  bool same_dims(const Image2D& other) const {
    return width == other.width && height == other.height;
  }
};

/// Throws ValidationError unless every sample is finite.
void require_finite(const Image2D& img, const char* what);

/// Pair of gradient component fields (d/dx and d/dy samples).
struct GradientField {
  Image2D gx;
  Image2D gy;
};

}  // namespace sparsect
