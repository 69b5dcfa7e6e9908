#pragma once

#include "sparsect/image.hpp"
#include "sparsect/projection.hpp"

namespace sparsect {

/// Ram-Lak filtered back-projection baseline: each projection row is
/// convolved with the band-limited ramp kernel (applied in the frequency
/// domain on a zero-padded grid), back-projected with the exact adjoint,
/// and scaled by pi/n_view.
Image2D fbp_reconstruct(const Sinogram& sino, std::size_t width, std::size_t height);

/// Ramp-filters every row of the sinogram in place (no back-projection).
Sinogram ramp_filter(const Sinogram& sino);

}  // namespace sparsect
