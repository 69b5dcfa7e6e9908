#pragma once

#include <cstdint>
#include <string>

#include "sparsect/image.hpp"
#include "sparsect/metrics.hpp"

namespace sparsect {

enum class PhantomKind { SheppLogan, Disks, UniformDisk };

PhantomKind parse_phantom_kind(const std::string& name);  // "shepp-logan" etc.

/// Deterministic analytic test image in [0,1], side >= 16. `seed` only
/// affects the random-disks phantom.
///
///  - shepp-logan: the usual ten-ellipse head phantom (high-contrast
///    variant), unit circle mapped to the pixel grid.
///  - disks: a dozen seeded random disks, intensities summed then clamped.
///  - uniform-disk: centered disk of radius 0.35*side, value 1, edge
///    anti-aliased by 8x8 supersampling so the pixel sum tracks pi r^2.
Image2D gen_phantom(PhantomKind kind, std::size_t side, std::uint64_t seed = 0);

/// Axial stack with a depth profile: uniform-disk becomes a ball (slice
/// radius follows sqrt(1 - z^2)), shepp-logan fades parabolically toward
/// the ends, disks redraws per slice from a per-slice seed.
Volume3D gen_phantom_volume(PhantomKind kind, std::size_t side, std::size_t slices,
                            std::uint64_t seed = 0);

enum class ElementType { U8, U16LE, F32LE, F64LE };

ElementType parse_element_type(const std::string& name);  // "u8", "u16le", ...
std::size_t element_size(ElementType t);

/// Raw little-endian voxel load; values divided by `peak` (so a full-range
/// u16 file with peak 65535 becomes all ones). File length must equal
/// W*H*S*element_size exactly; non-finite samples are rejected. The result
/// has peak 1.
Volume3D ingest_volume(const std::string& path, std::size_t width, std::size_t height,
                       std::size_t slices, ElementType type, double peak);

/// Inverse of ingest_volume: multiplies by `peak` and writes raw samples
/// (integer types round to nearest and clamp). ingest -> export -> ingest
/// round-trips bit-identically.
void export_volume_raw(const std::string& path, const Volume3D& vol, ElementType type,
                       double peak);

}  // namespace sparsect
