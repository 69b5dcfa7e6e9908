#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsect/admm.hpp"
#include "sparsect/image.hpp"
#include "sparsect/metrics.hpp"
#include "sparsect/projection.hpp"

// File containers: a short text header (one "key value" line per field,
// terminated by an "end" line) followed by a raw little-endian payload.
// The exact byte layout of every container is documented in
// docs/FORMATS.md; writers emit keys in a fixed order and readers require
// that order.
namespace sparsect::io {

/// Raw little-endian payload helpers (f32le payloads are written from and
/// widened back to double).
void write_f32le(std::ostream& os, const double* src, std::size_t n);
void write_f64le(std::ostream& os, const double* src, std::size_t n);
void read_f32le(std::istream& is, double* dst, std::size_t n, const std::string& context);
void read_f64le(std::istream& is, double* dst, std::size_t n, const std::string& context);

void save_image(const std::string& path, const Image2D& img);
Image2D load_image(const std::string& path);

/// Sinogram container carries the source image dims so reconstruction can
/// rebuild the projector without extra inputs.
struct SinogramFile {
  Sinogram sinogram;
  std::size_t width = 0;
  std::size_t height = 0;
};
void save_sinogram(const std::string& path, const Sinogram& sino, std::size_t width,
                   std::size_t height);
SinogramFile load_sinogram(const std::string& path);

void save_volume(const std::string& path, const Volume3D& vol);
Volume3D load_volume(const std::string& path);

/// Per-sigma score-field tables consumed by TabulatedScorePrior.
struct PriorFile {
  std::vector<double> sigmas;
  std::vector<Image2D> fields;
};
void save_prior(const std::string& path, const std::vector<double>& sigmas,
                const std::vector<Image2D>& fields);
PriorFile load_prior(const std::string& path);

/// Full solver state (including history) in f64le, enabling bit-exact
/// resume.
void save_state(const std::string& path, const AdmmState& state);
AdmmState load_state(const std::string& path);

/// 16-bit binary PGM preview (P5, maxval 65535, big-endian samples); input
/// clamped to [0, peak] and scaled.
void write_pgm16(const std::string& path, const Image2D& img, double peak);

/// CSV cell formatting: "%.10g"; +inf -> "inf", -inf -> "-inf", NaN -> "n/a".
std::string format_metric(double v);

/// iteration,objective,r_vx,r_vy,r_z,psnr,t_denoise,t_x,t_v,t_z,t_u rows.
void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history);

}  // namespace sparsect::io
