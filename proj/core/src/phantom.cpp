#include "sparsect/phantom.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include "sparsect/errors.hpp"
#include "sparsect/random.hpp"

namespace sparsect {

PhantomKind parse_phantom_kind(const std::string& name) {
  if (name == "shepp-logan") return PhantomKind::SheppLogan;
  if (name == "disks") return PhantomKind::Disks;
  if (name == "uniform-disk") return PhantomKind::UniformDisk;
  throw ValidationError("unknown phantom kind '" + name +
                        "' (expected shepp-logan, disks or uniform-disk)");
}

namespace {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

// High-contrast ten-ellipse head phantom on the unit square.
constexpr Ellipse kHeadEllipses[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

Image2D shepp_logan(std::size_t side) {
  Image2D img(side, side, 0.0);
  const double half = static_cast<double>(side) / 2.0;
  const double c = (static_cast<double>(side) - 1.0) / 2.0;
  for (const Ellipse& e : kHeadEllipses) {
    const double phi = e.phi_deg * std::numbers::pi / 180.0;
    const double cp = std::cos(phi), sp = std::sin(phi);
    for (std::size_t j = 0; j < side; ++j) {
      const double v = (c - static_cast<double>(j)) / half;
      for (std::size_t i = 0; i < side; ++i) {
        const double u = (static_cast<double>(i) - c) / half;
        const double xr = cp * (u - e.x0) + sp * (v - e.y0);
        const double yr = -sp * (u - e.x0) + cp * (v - e.y0);
        if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0) img.px(i, j) += e.value;
      }
    }
  }
  for (double& p : img.data) p = std::min(1.0, std::max(0.0, p));
  return img;
}

Image2D random_disks(std::size_t side, std::uint64_t seed) {
  Image2D img(side, side, 0.0);
  auto eng = seeded_engine(seed);
  std::uniform_real_distribution<double> pos(0.15, 0.85);
  std::uniform_real_distribution<double> rad(0.05, 0.18);
  std::uniform_real_distribution<double> val(0.2, 1.0);
  const double s = static_cast<double>(side);
  for (int d = 0; d < 12; ++d) {
    const double cx = pos(eng) * s;
    const double cy = pos(eng) * s;
    const double r = rad(eng) * s;
    const double a = val(eng);
    for (std::size_t j = 0; j < side; ++j)
      for (std::size_t i = 0; i < side; ++i) {
        const double dx = static_cast<double>(i) + 0.5 - cx;
        const double dy = static_cast<double>(j) + 0.5 - cy;
        if (dx * dx + dy * dy <= r * r) img.px(i, j) += a;
      }
  }
  for (double& p : img.data) p = std::min(1.0, p);
  return img;
}

Image2D uniform_disk(std::size_t side, double radius) {
  Image2D img(side, side, 0.0);
  const double cx = static_cast<double>(side) / 2.0;
  const double cy = cx;
  const double r2 = radius * radius;
  constexpr int ss = 8;  // supersampling grid per pixel side
  for (std::size_t j = 0; j < side; ++j)
    for (std::size_t i = 0; i < side; ++i) {
      int hits = 0;
      for (int sy = 0; sy < ss; ++sy)
        for (int sx = 0; sx < ss; ++sx) {
          const double x = static_cast<double>(i) + (sx + 0.5) / ss - cx;
          const double y = static_cast<double>(j) + (sy + 0.5) / ss - cy;
          if (x * x + y * y <= r2) ++hits;
        }
      img.px(i, j) = static_cast<double>(hits) / (ss * ss);
    }
  return img;
}

}  // namespace

Image2D gen_phantom(PhantomKind kind, std::size_t side, std::uint64_t seed) {
  if (side < 16) throw ValidationError("gen_phantom: side must be >= 16");
  switch (kind) {
    case PhantomKind::SheppLogan:
      return shepp_logan(side);
    case PhantomKind::Disks:
      return random_disks(side, seed);
    case PhantomKind::UniformDisk:
      return uniform_disk(side, 0.35 * static_cast<double>(side));
  }
  throw ValidationError("gen_phantom: unknown phantom kind");
}

Volume3D gen_phantom_volume(PhantomKind kind, std::size_t side, std::size_t slices,
                            std::uint64_t seed) {
  if (slices < 1) throw ValidationError("gen_phantom_volume: slices must be >= 1");
  Volume3D vol(side, side, slices, 1.0);
  for (std::size_t s = 0; s < slices; ++s) {
    // depth coordinate in (-1, 1), 0 at the stack center
    const double z =
        slices == 1 ? 0.0
                    : (2.0 * static_cast<double>(s) + 1.0 - static_cast<double>(slices)) /
                          static_cast<double>(slices);
    Image2D img;
    switch (kind) {
      case PhantomKind::SheppLogan: {
        img = shepp_logan(side);
        const double fade = 1.0 - 0.5 * z * z;
        for (double& p : img.data) p *= fade;
        break;
      }
      case PhantomKind::Disks:
        img = random_disks(side, mix_seed(seed, s));
        break;
      case PhantomKind::UniformDisk: {
        const double r = 0.35 * static_cast<double>(side) * std::sqrt(std::max(0.0, 1.0 - z * z));
        img = r > 0.0 ? uniform_disk(side, r) : Image2D(side, side, 0.0);
        break;
      }
    }
    vol.set_slice(s, img);
  }
  return vol;
}

ElementType parse_element_type(const std::string& name) {
  if (name == "u8") return ElementType::U8;
  if (name == "u16le") return ElementType::U16LE;
  if (name == "f32le") return ElementType::F32LE;
  if (name == "f64le") return ElementType::F64LE;
  throw ValidationError("unknown element type '" + name +
                        "' (expected u8, u16le, f32le or f64le)");
}

std::size_t element_size(ElementType t) {
  switch (t) {
    case ElementType::U8:
      return 1;
    case ElementType::U16LE:
      return 2;
    case ElementType::F32LE:
      return 4;
    case ElementType::F64LE:
      return 8;
  }
  throw ValidationError("element_size: unknown element type");
}

Volume3D ingest_volume(const std::string& path, std::size_t width, std::size_t height,
                       std::size_t slices, ElementType type, double peak) {
  if (width == 0 || height == 0 || slices == 0)
    throw ValidationError("ingest_volume: dims must be >= 1");
  if (!(peak > 0.0)) throw ValidationError("ingest_volume: peak must be > 0");
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw IoError("cannot open " + path + " for reading");
  const std::size_t n = width * height * slices;
  const auto expected = static_cast<std::streamoff>(n * element_size(type));
  if (is.tellg() != expected)
    throw IoError(path + ": file length " + std::to_string(static_cast<long long>(is.tellg())) +
                  " does not match " + std::to_string(width) + "x" + std::to_string(height) +
                  "x" + std::to_string(slices) + " samples (" + std::to_string(expected) +
                  " bytes)");
  is.seekg(0);
  std::vector<unsigned char> raw(n * element_size(type));
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size())
    throw IoError(path + ": short read");

  Volume3D vol(width, height, slices, 1.0);
  const unsigned char* p = raw.data();
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    switch (type) {
      case ElementType::U8:
        v = static_cast<double>(p[i]);
        break;
      case ElementType::U16LE:
        v = static_cast<double>(static_cast<std::uint16_t>(p[2 * i]) |
                                (static_cast<std::uint16_t>(p[2 * i + 1]) << 8));
        break;
      case ElementType::F32LE: {
        std::uint32_t bits = 0;
        for (int b = 3; b >= 0; --b) bits = (bits << 8) | p[4 * i + b];
        v = static_cast<double>(std::bit_cast<float>(bits));
        break;
      }
      case ElementType::F64LE: {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[8 * i + b];
        v = std::bit_cast<double>(bits);
        break;
      }
    }
    if (!std::isfinite(v)) throw IoError(path + ": non-finite sample at index " + std::to_string(i));
    vol.data[i] = v / peak;
  }
  return vol;
}

void export_volume_raw(const std::string& path, const Volume3D& vol, ElementType type,
                       double peak) {
  if (!(peak > 0.0)) throw ValidationError("export_volume_raw: peak must be > 0");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  std::vector<unsigned char> raw(vol.size() * element_size(type));
  unsigned char* p = raw.data();
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const double v = vol.data[i] * peak;
    switch (type) {
      case ElementType::U8: {
        const double q = std::llround(std::min(255.0, std::max(0.0, v)));
        p[i] = static_cast<unsigned char>(q);
        break;
      }
      case ElementType::U16LE: {
        const auto q =
            static_cast<std::uint16_t>(std::llround(std::min(65535.0, std::max(0.0, v))));
        p[2 * i] = static_cast<unsigned char>(q & 0xff);
        p[2 * i + 1] = static_cast<unsigned char>(q >> 8);
        break;
      }
      case ElementType::F32LE: {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int b = 0; b < 4; ++b) p[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
        break;
      }
      case ElementType::F64LE: {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) p[8 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
        break;
      }
    }
  }
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  os.flush();
  if (!os) throw IoError("write failed for " + path);
}

}  // namespace sparsect
