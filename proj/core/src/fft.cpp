#include "sparsect/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace sparsect::fft {
namespace {

// FFTW's planner is not thread-safe; plan creation is serialized and plans
// are cached per shape. Plans are created with FFTW_UNALIGNED so the
// new-array execute functions accept arbitrary caller buffers.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

enum class Kind { R2C1D, C2R1D, R2C2D, C2R2D };

fftw_plan cached_plan(Kind kind, std::size_t n0, std::size_t n1) {
  static std::map<std::tuple<Kind, std::size_t, std::size_t>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_tuple(kind, n0, n1);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const std::size_t real_len = (kind == Kind::R2C1D || kind == Kind::C2R1D) ? n0 : n0 * n1;
  const std::size_t cplx_len = (kind == Kind::R2C1D || kind == Kind::C2R1D)
                                   ? half_spectrum(n0)
                                   : n0 * half_spectrum(n1);
  std::vector<double> real_buf(real_len);
  std::vector<fftw_complex> cplx_buf(cplx_len);

  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  switch (kind) {
    case Kind::R2C1D:
      plan = fftw_plan_dft_r2c_1d(static_cast<int>(n0), real_buf.data(), cplx_buf.data(), flags);
      break;
    case Kind::C2R1D:
      plan = fftw_plan_dft_c2r_1d(static_cast<int>(n0), cplx_buf.data(), real_buf.data(), flags);
      break;
    case Kind::R2C2D:
      plan = fftw_plan_dft_r2c_2d(static_cast<int>(n0), static_cast<int>(n1), real_buf.data(),
                                  cplx_buf.data(), flags);
      break;
    case Kind::C2R2D:
      plan = fftw_plan_dft_c2r_2d(static_cast<int>(n0), static_cast<int>(n1), cplx_buf.data(),
                                  real_buf.data(), flags);
      break;
  }
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void forward2d(std::size_t width, std::size_t height, const double* in,
               std::complex<double>* out) {
  fftw_plan plan = cached_plan(Kind::R2C2D, height, width);
  fftw_execute_dft_r2c(plan, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void inverse2d(std::size_t width, std::size_t height, const std::complex<double>* in,
               double* out) {
  fftw_plan plan = cached_plan(Kind::C2R2D, height, width);
  // c2r destroys its input; work on a scratch copy
  std::vector<std::complex<double>> scratch(in, in + height * half_spectrum(width));
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(scratch.data()), out);
  const double inv = 1.0 / (static_cast<double>(width) * static_cast<double>(height));
  for (std::size_t i = 0; i < width * height; ++i) out[i] *= inv;
}

void forward1d(std::size_t n, const double* in, std::complex<double>* out) {
  fftw_plan plan = cached_plan(Kind::R2C1D, n, 0);
  fftw_execute_dft_r2c(plan, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void inverse1d(std::size_t n, const std::complex<double>* in, double* out) {
  fftw_plan plan = cached_plan(Kind::C2R1D, n, 0);
  std::vector<std::complex<double>> scratch(in, in + half_spectrum(n));
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(scratch.data()), out);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] *= inv;
}

}  // namespace sparsect::fft
