#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sparsect/image.hpp"

namespace sparsect {

/// Detector pixel count giving full coverage of a side x side image under
/// rotation: ceil(side * sqrt(2)).
std::size_t default_detector_count(std::size_t side);

/// Projection angles theta_k = k*pi/n_view, k = 0..n_view-1, all in [0, pi).
struct AngleSet {
  std::size_t n_view = 0;
  std::vector<double> angles;
};

AngleSet make_angles(std::size_t n_view);

/// Angle-major parallel-beam projection data: data[view * n_det + det].
struct Sinogram {
  AngleSet angles;
  std::size_t n_det = 0;
  std::vector<double> data;

  std::size_t n_view() const { return angles.n_view; }
  double at(std::size_t view, std::size_t det) const { return data[view * n_det + det]; }
  double& at(std::size_t view, std::size_t det) { return data[view * n_det + det]; }
};

/// Matrix-free parallel-beam Radon transform and its exact algebraic
/// adjoint.
///
/// Rays are traced with linear interpolation along the dominant axis of the
/// ray direction: for each image column (or row) crossed, the two nearest
/// pixels perpendicular to the stepping axis contribute with hat weights,
/// and every sample is scaled by the path length per step, 1/max(|sin a|,
/// |cos a|). The adjoint scatters with the same weights, so the pair passes
/// the dot-product test to rounding error.
///
/// Detector spacing is 1 pixel and the detector array is centered on the
/// image center. Immutable after construction; safe to share across threads.
class ProjectionOperator {
 public:
  ProjectionOperator(std::size_t width, std::size_t height, AngleSet angles, std::size_t n_det);

  Sinogram forward(const Image2D& img) const;
  Image2D adjoint(const Sinogram& sino) const;

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t n_view() const { return angles_.n_view; }
  std::size_t n_det() const { return n_det_; }
  const AngleSet& angles() const { return angles_; }

 private:
  struct RayGeometry {
    double sin_a;
    double cos_a;
    bool x_dominant;   // |sin a| >= |cos a|: step across image columns
    double step_len;   // path length per unit step along the dominant axis
  };

  template <bool Adjoint>
  void traverse(double* img_data, double* sino_data) const;

  std::size_t width_;
  std::size_t height_;
  AngleSet angles_;
  std::size_t n_det_;
  std::vector<RayGeometry> geom_;
};

/// Adds i.i.d. N(0, sigma^2) noise to every sample; deterministic per seed.
Sinogram add_projection_noise(const Sinogram& sino, double sigma, std::uint64_t seed);

}  // namespace sparsect
