#include "sparsect/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sparsect/errors.hpp"

namespace sparsect::io {

namespace {

void put_u32le(unsigned char* dst, std::uint32_t v) {
  dst[0] = static_cast<unsigned char>(v);
  dst[1] = static_cast<unsigned char>(v >> 8);
  dst[2] = static_cast<unsigned char>(v >> 16);
  dst[3] = static_cast<unsigned char>(v >> 24);
}

void put_u64le(unsigned char* dst, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) dst[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint32_t get_u32le(const unsigned char* src) {
  return static_cast<std::uint32_t>(src[0]) | (static_cast<std::uint32_t>(src[1]) << 8) |
         (static_cast<std::uint32_t>(src[2]) << 16) | (static_cast<std::uint32_t>(src[3]) << 24);
}

std::uint64_t get_u64le(const unsigned char* src) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | src[i];
  return v;
}

void read_exact(std::istream& is, unsigned char* dst, std::size_t bytes,
                const std::string& context) {
  is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(is.gcount()) != bytes)
    throw IoError(context + ": truncated payload");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path + " for reading");
  return is;
}

void finish_write(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write failed for " + path);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string next_line(std::istream& is, const std::string& path) {
  std::string line;
  if (!std::getline(is, line)) throw IoError(path + ": unexpected end of header");
  return line;
}

void expect_line(std::istream& is, const std::string& expected, const std::string& path) {
  const std::string line = next_line(is, path);
  if (line != expected)
    throw IoError(path + ": expected header line '" + expected + "', got '" + line + "'");
}

// "key value" line with the given key; returns the value text.
std::string field_text(std::istream& is, const std::string& key, const std::string& path) {
  const std::string line = next_line(is, path);
  if (line.size() <= key.size() + 1 || line.compare(0, key.size(), key) != 0 ||
      line[key.size()] != ' ')
    throw IoError(path + ": expected header field '" + key + "', got '" + line + "'");
  return line.substr(key.size() + 1);
}

std::uint64_t field_uint(std::istream& is, const std::string& key, const std::string& path) {
  const std::string text = field_text(is, key, path);
  std::uint64_t v = 0;
  std::size_t pos = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    throw IoError(path + ": field '" + key + "' is not an unsigned integer: '" + text + "'");
  }
  if (pos != text.size())
    throw IoError(path + ": field '" + key + "' has trailing characters: '" + text + "'");
  return v;
}

double field_double(std::istream& is, const std::string& key, const std::string& path) {
  const std::string text = field_text(is, key, path);
  double v = 0.0;
  std::size_t pos = 0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw IoError(path + ": field '" + key + "' is not a number: '" + text + "'");
  }
  if (pos != text.size())
    throw IoError(path + ": field '" + key + "' has trailing characters: '" + text + "'");
  return v;
}

void check_finite_payload(const std::vector<double>& data, const std::string& path) {
  for (double v : data)
    if (!std::isfinite(v)) throw IoError(path + ": payload contains non-finite samples");
}

}  // namespace

void write_f32le(std::ostream& os, const double* src, std::size_t n) {
  std::vector<unsigned char> buf(n * 4);
  for (std::size_t i = 0; i < n; ++i)
    put_u32le(buf.data() + i * 4, std::bit_cast<std::uint32_t>(static_cast<float>(src[i])));
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void write_f64le(std::ostream& os, const double* src, std::size_t n) {
  std::vector<unsigned char> buf(n * 8);
  for (std::size_t i = 0; i < n; ++i)
    put_u64le(buf.data() + i * 8, std::bit_cast<std::uint64_t>(src[i]));
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void read_f32le(std::istream& is, double* dst, std::size_t n, const std::string& context) {
  std::vector<unsigned char> buf(n * 4);
  read_exact(is, buf.data(), buf.size(), context);
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = static_cast<double>(std::bit_cast<float>(get_u32le(buf.data() + i * 4)));
}

void read_f64le(std::istream& is, double* dst, std::size_t n, const std::string& context) {
  std::vector<unsigned char> buf(n * 8);
  read_exact(is, buf.data(), buf.size(), context);
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = std::bit_cast<double>(get_u64le(buf.data() + i * 8));
}

void save_image(const std::string& path, const Image2D& img) {
  auto os = open_out(path);
  os << "sparsect-image-v1\n"
     << "width " << img.width << "\n"
     << "height " << img.height << "\n"
     << "dtype f32le\n"
     << "end\n";
  write_f32le(os, img.data.data(), img.size());
  finish_write(os, path);
}

Image2D load_image(const std::string& path) {
  auto is = open_in(path);
  expect_line(is, "sparsect-image-v1", path);
  const auto w = field_uint(is, "width", path);
  const auto h = field_uint(is, "height", path);
  expect_line(is, "dtype f32le", path);
  expect_line(is, "end", path);
  if (w == 0 || h == 0) throw IoError(path + ": zero image dimension");
  std::vector<double> data(w * h);
  read_f32le(is, data.data(), data.size(), path);
  check_finite_payload(data, path);
  return Image2D::from_data(w, h, std::move(data));
}

void save_sinogram(const std::string& path, const Sinogram& sino, std::size_t width,
                   std::size_t height) {
  auto os = open_out(path);
  os << "sparsect-sinogram-v1\n"
     << "width " << width << "\n"
     << "height " << height << "\n"
     << "n_view " << sino.n_view() << "\n"
     << "n_det " << sino.n_det << "\n";
  for (double a : sino.angles.angles) os << "angle " << fmt_double(a) << "\n";
  os << "dtype f32le\n"
     << "end\n";
  write_f32le(os, sino.data.data(), sino.data.size());
  finish_write(os, path);
}

SinogramFile load_sinogram(const std::string& path) {
  auto is = open_in(path);
  expect_line(is, "sparsect-sinogram-v1", path);
  SinogramFile file;
  file.width = field_uint(is, "width", path);
  file.height = field_uint(is, "height", path);
  const auto n_view = field_uint(is, "n_view", path);
  const auto n_det = field_uint(is, "n_det", path);
  if (file.width == 0 || file.height == 0 || n_view == 0 || n_det == 0)
    throw IoError(path + ": zero sinogram dimension");
  AngleSet angles;
  angles.n_view = n_view;
  angles.angles.reserve(n_view);
  for (std::size_t k = 0; k < n_view; ++k) {
    const double a = field_double(is, "angle", path);
    if (!std::isfinite(a)) throw IoError(path + ": non-finite angle");
    angles.angles.push_back(a);
  }
  expect_line(is, "dtype f32le", path);
  expect_line(is, "end", path);
  file.sinogram.angles = std::move(angles);
  file.sinogram.n_det = n_det;
  file.sinogram.data.resize(n_view * n_det);
  read_f32le(is, file.sinogram.data.data(), file.sinogram.data.size(), path);
  check_finite_payload(file.sinogram.data, path);
  return file;
}

void save_volume(const std::string& path, const Volume3D& vol) {
  auto os = open_out(path);
  os << "sparsect-volume-v1\n"
     << "width " << vol.width << "\n"
     << "height " << vol.height << "\n"
     << "slices " << vol.slices << "\n"
     << "peak " << fmt_double(vol.peak) << "\n"
     << "dtype f32le\n"
     << "end\n";
  write_f32le(os, vol.data.data(), vol.size());
  finish_write(os, path);
}

Volume3D load_volume(const std::string& path) {
  auto is = open_in(path);
  expect_line(is, "sparsect-volume-v1", path);
  const auto w = field_uint(is, "width", path);
  const auto h = field_uint(is, "height", path);
  const auto s = field_uint(is, "slices", path);
  const double peak = field_double(is, "peak", path);
  expect_line(is, "dtype f32le", path);
  expect_line(is, "end", path);
  if (w == 0 || h == 0 || s == 0) throw IoError(path + ": zero volume dimension");
  if (!(peak > 0.0) || !std::isfinite(peak)) throw IoError(path + ": peak must be > 0");
  Volume3D vol(w, h, s, peak);
  read_f32le(is, vol.data.data(), vol.size(), path);
  check_finite_payload(vol.data, path);
  return vol;
}

void save_prior(const std::string& path, const std::vector<double>& sigmas,
                const std::vector<Image2D>& fields) {
  if (sigmas.empty() || sigmas.size() != fields.size())
    throw ValidationError("save_prior: need one score field per sigma");
  const std::size_t w = fields.front().width;
  const std::size_t h = fields.front().height;
  for (const Image2D& f : fields)
    if (f.width != w || f.height != h)
      throw ValidationError("save_prior: score fields must share dimensions");
  auto os = open_out(path);
  os << "sparsect-prior-v1\n"
     << "width " << w << "\n"
     << "height " << h << "\n"
     << "n_sigmas " << sigmas.size() << "\n";
  for (double s : sigmas) os << "sigma " << fmt_double(s) << "\n";
  os << "dtype f32le\n"
     << "end\n";
  for (const Image2D& f : fields) write_f32le(os, f.data.data(), f.size());
  finish_write(os, path);
}

PriorFile load_prior(const std::string& path) {
  auto is = open_in(path);
  expect_line(is, "sparsect-prior-v1", path);
  const auto w = field_uint(is, "width", path);
  const auto h = field_uint(is, "height", path);
  const auto k = field_uint(is, "n_sigmas", path);
  if (w == 0 || h == 0 || k == 0) throw IoError(path + ": zero prior dimension");
  PriorFile file;
  file.sigmas.reserve(k);
  for (std::size_t i = 0; i < k; ++i) file.sigmas.push_back(field_double(is, "sigma", path));
  expect_line(is, "dtype f32le", path);
  expect_line(is, "end", path);
  file.fields.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> data(w * h);
    read_f32le(is, data.data(), data.size(), path);
    check_finite_payload(data, path);
    file.fields.push_back(Image2D::from_data(w, h, std::move(data)));
  }
  return file;
}

namespace {

constexpr std::size_t kHistoryCols = 10;

void history_to_doubles(const IterationRecord& r, double* out) {
  out[0] = r.objective;
  out[1] = r.r_vx;
  out[2] = r.r_vy;
  out[3] = r.r_z;
  out[4] = r.psnr;
  out[5] = r.t_denoise;
  out[6] = r.t_x;
  out[7] = r.t_v;
  out[8] = r.t_z;
  out[9] = r.t_u;
}

IterationRecord history_from_doubles(const double* in) {
  IterationRecord r;
  r.objective = in[0];
  r.r_vx = in[1];
  r.r_vy = in[2];
  r.r_z = in[3];
  r.psnr = in[4];
  r.t_denoise = in[5];
  r.t_x = in[6];
  r.t_v = in[7];
  r.t_z = in[8];
  r.t_u = in[9];
  return r;
}

}  // namespace

void save_state(const std::string& path, const AdmmState& state) {
  if (state.history.size() != state.iteration)
    throw ValidationError("save_state: history length does not match iteration count");
  auto os = open_out(path);
  os << "sparsect-checkpoint-v1\n"
     << "width " << state.x.width << "\n"
     << "height " << state.x.height << "\n"
     << "iteration " << state.iteration << "\n"
     << "patch_rows " << state.z.rows << "\n"
     << "patch_cols " << state.z.cols << "\n"
     << "history_cols " << kHistoryCols << "\n"
     << "dtype f64le\n"
     << "end\n";
  write_f64le(os, state.x.data.data(), state.x.size());
  write_f64le(os, state.v.gx.data.data(), state.v.gx.size());
  write_f64le(os, state.v.gy.data.data(), state.v.gy.size());
  write_f64le(os, state.u12.gx.data.data(), state.u12.gx.size());
  write_f64le(os, state.u12.gy.data.data(), state.u12.gy.size());
  write_f64le(os, state.z.data.data(), state.z.data.size());
  write_f64le(os, state.u3.data.data(), state.u3.data.size());
  std::vector<double> hist(state.history.size() * kHistoryCols);
  for (std::size_t i = 0; i < state.history.size(); ++i)
    history_to_doubles(state.history[i], hist.data() + i * kHistoryCols);
  write_f64le(os, hist.data(), hist.size());
  finish_write(os, path);
}

AdmmState load_state(const std::string& path) {
  auto is = open_in(path);
  expect_line(is, "sparsect-checkpoint-v1", path);
  const auto w = field_uint(is, "width", path);
  const auto h = field_uint(is, "height", path);
  const auto iteration = field_uint(is, "iteration", path);
  const auto rows = field_uint(is, "patch_rows", path);
  const auto cols = field_uint(is, "patch_cols", path);
  const auto hist_cols = field_uint(is, "history_cols", path);
  expect_line(is, "dtype f64le", path);
  expect_line(is, "end", path);
  if (w == 0 || h == 0 || rows == 0 || cols == 0) throw IoError(path + ": zero state dimension");
  if (hist_cols != kHistoryCols)
    throw IoError(path + ": unsupported history layout (" + std::to_string(hist_cols) +
                  " columns)");
  AdmmState state;
  state.iteration = iteration;
  state.x = Image2D(w, h);
  state.v.gx = Image2D(w, h);
  state.v.gy = Image2D(w, h);
  state.u12.gx = Image2D(w, h);
  state.u12.gy = Image2D(w, h);
  state.z = PatchMatrix(rows, cols);
  state.u3 = PatchMatrix(rows, cols);
  read_f64le(is, state.x.data.data(), state.x.size(), path);
  read_f64le(is, state.v.gx.data.data(), state.v.gx.size(), path);
  read_f64le(is, state.v.gy.data.data(), state.v.gy.size(), path);
  read_f64le(is, state.u12.gx.data.data(), state.u12.gx.size(), path);
  read_f64le(is, state.u12.gy.data.data(), state.u12.gy.size(), path);
  read_f64le(is, state.z.data.data(), state.z.data.size(), path);
  read_f64le(is, state.u3.data.data(), state.u3.data.size(), path);
  std::vector<double> hist(iteration * kHistoryCols);
  read_f64le(is, hist.data(), hist.size(), path);
  state.history.reserve(iteration);
  for (std::size_t i = 0; i < iteration; ++i)
    state.history.push_back(history_from_doubles(hist.data() + i * kHistoryCols));
  return state;
}

void write_pgm16(const std::string& path, const Image2D& img, double peak) {
  if (!(peak > 0.0)) throw ValidationError("write_pgm16: peak must be > 0");
  auto os = open_out(path);
  os << "P5\n" << img.width << " " << img.height << "\n65535\n";
  std::vector<unsigned char> buf(img.size() * 2);
  for (std::size_t i = 0; i < img.size(); ++i) {
    double v = img.data[i];
    if (!(v > 0.0)) v = 0.0;  // also maps NaN to 0
    if (v > peak) v = peak;
    const auto q = static_cast<std::uint16_t>(std::lround(v / peak * 65535.0));
    buf[i * 2] = static_cast<unsigned char>(q >> 8);  // big-endian per PGM
    buf[i * 2 + 1] = static_cast<unsigned char>(q & 0xff);
  }
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  finish_write(os, path);
}

std::string format_metric(double v) {
  if (std::isnan(v)) return "n/a";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history) {
  auto os = open_out(path);
  os << "iteration,objective,r_vx,r_vy,r_z,psnr,t_denoise,t_x,t_v,t_z,t_u\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const IterationRecord& r = history[i];
    os << (i + 1) << ',' << format_metric(r.objective) << ',' << format_metric(r.r_vx) << ','
       << format_metric(r.r_vy) << ',' << format_metric(r.r_z) << ',' << format_metric(r.psnr)
       << ',' << format_metric(r.t_denoise) << ',' << format_metric(r.t_x) << ','
       << format_metric(r.t_v) << ',' << format_metric(r.t_z) << ',' << format_metric(r.t_u)
       << '\n';
  }
  finish_write(os, path);
}

}  // namespace sparsect::io
