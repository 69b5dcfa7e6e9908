#include "sparsect/image.hpp"

#include <cmath>

#include "sparsect/errors.hpp"

namespace sparsect {

Image2D::Image2D(std::size_t w, std::size_t h, double fill) : width(w), height(h) {
  if (w == 0 || h == 0) throw ValidationError("Image2D: zero dimension");
  data.assign(w * h, fill);
}

Image2D Image2D::from_data(std::size_t w, std::size_t h, std::vector<double> values) {
  if (w == 0 || h == 0) throw ValidationError("Image2D: zero dimension");
  if (values.size() != w * h) throw ValidationError("Image2D: data length != width*height");
  Image2D img;
  img.width = w;
  img.height = h;
  img.data = std::move(values);
  require_finite(img, "Image2D");
  return img;
}

void require_finite(const Image2D& img, const char* what) {
  for (double v : img.data) {
    if (!std::isfinite(v)) throw ValidationError(std::string(what) + ": non-finite sample");
  }
}

}  // namespace sparsect
