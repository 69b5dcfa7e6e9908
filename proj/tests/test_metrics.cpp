#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsect/errors.hpp"
#include "sparsect/metrics.hpp"
#include "sparsect/phantom.hpp"
#include "test_util.hpp"

using namespace sparsect;

namespace {

Image2D box_blur(const Image2D& img, int radius, int passes) {
  Image2D cur = img;
  for (int p = 0; p < passes; ++p) {
    Image2D next(img.width, img.height);
    for (std::size_t y = 0; y < img.height; ++y) {
      for (std::size_t x = 0; x < img.width; ++x) {
        double acc = 0.0;
        int n = 0;
        for (int dy = -radius; dy <= radius; ++dy) {
          for (int dx = -radius; dx <= radius; ++dx) {
            const long xx = static_cast<long>(x) + dx;
            const long yy = static_cast<long>(y) + dy;
            if (xx < 0 || yy < 0 || xx >= static_cast<long>(img.width) ||
                yy >= static_cast<long>(img.height))
              continue;
            acc += cur.px(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy));
            ++n;
          }
        }
        next.px(x, y) = acc / n;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

TEST_CASE("psnr closed-form cases") {
  Image2D a(8, 8, 0.0);
  Image2D b(8, 8, 0.5);
  CHECK(std::isinf(psnr(a, a, 1.0)));
  CHECK(psnr(a, b, 1.0) == doctest::Approx(6.0206).epsilon(1e-4));
  CHECK(psnr(a, b, 1.0) == doctest::Approx(10.0 * std::log10(1.0 / 0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(psnr(a, Image2D(8, 9), 1.0), ValidationError);
}

TEST_CASE("psnr matches an independent recomputation") {
  auto a = testutil::random_image(13, 9, 1);
  auto b = testutil::random_image(13, 9, 2);
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  const double expected = 10.0 * std::log10(1.0 * 1.0 / mse);
  CHECK(psnr(a, b, 1.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("psnr is symmetric and peak-covariant") {
  auto a = testutil::random_image(16, 16, 3);
  auto b = testutil::random_image(16, 16, 4);
  CHECK(psnr(a, b, 1.0) == psnr(b, a, 1.0));

  const double alpha = 7.5;
  Image2D sa(16, 16), sb(16, 16);
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa.data[i] = alpha * a.data[i];
    sb.data[i] = alpha * b.data[i];
  }
  CHECK(psnr(sa, sb, alpha) == doctest::Approx(psnr(a, b, 1.0)).epsilon(1e-12));
}

TEST_CASE("ssim of identical images is 1") {
  auto a = gen_phantom(PhantomKind::SheppLogan, 32);
  CHECK(ssim(a, a, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim is symmetric and bounded by 1") {
  auto a = testutil::random_image(24, 24, 5);
  auto b = testutil::random_image(24, 24, 6);
  CHECK(ssim(a, b, 1.0) == doctest::Approx(ssim(b, a, 1.0)).epsilon(1e-14));
  for (std::uint64_t t = 0; t < 10; ++t) {
    auto x = testutil::random_image(16, 16, 100 + t);
    auto y = testutil::random_image(16, 16, 200 + t);
    CHECK(ssim(x, y, 1.0) <= 1.0 + 1e-12);
  }
}

TEST_CASE("ssim rejects images smaller than its window") {
  Image2D small(10, 16, 0.5);
  CHECK_THROWS_AS(ssim(small, small, 1.0), ValidationError);
}

TEST_CASE("ssim is near zero for inverted structure") {
  // random binary pattern vs its negation: structure anti-correlates
  Image2D a(32, 32);
  std::mt19937_64 eng(17);
  for (auto& v : a.data) v = (eng() & 1) ? 1.0 : 0.0;
  Image2D inv(32, 32);
  for (std::size_t i = 0; i < a.size(); ++i) inv.data[i] = 1.0 - a.data[i];
  CHECK(ssim(a, inv, 1.0) < 0.1);
}

TEST_CASE("ssim ranks a luminance shift above heavy blur, unlike psnr") {
  auto a = gen_phantom(PhantomKind::SheppLogan, 64);
  Image2D shifted(64, 64);
  for (std::size_t i = 0; i < a.size(); ++i) shifted.data[i] = a.data[i] + 0.2;
  auto blurred = box_blur(a, 2, 3);

  const double ssim_shift = ssim(a, shifted, 1.0);
  const double ssim_blur = ssim(a, blurred, 1.0);
  const double psnr_shift = psnr(a, shifted, 1.0);
  const double psnr_blur = psnr(a, blurred, 1.0);

  CHECK(ssim_shift > 0.0);
  CHECK(ssim_shift < 1.0);
  INFO("ssim shift ", ssim_shift, " blur ", ssim_blur, "; psnr shift ", psnr_shift, " blur ",
       psnr_blur);
  CHECK(ssim_shift > ssim_blur);   // structure preserved beats structure lost
  CHECK(psnr_shift < psnr_blur);   // even though psnr says the opposite
}

TEST_CASE("volume psnr covers all voxels") {
  Volume3D a(6, 5, 4, 1.0, 0.0);
  Volume3D b(6, 5, 4, 1.0, 0.5);
  CHECK(psnr(a, b, 1.0) == doctest::Approx(6.0206).epsilon(1e-4));
  CHECK(std::isinf(psnr(a, a, 1.0)));
}

TEST_CASE("volume slice accessors round-trip") {
  Volume3D vol(5, 4, 3, 1.0);
  auto img = testutil::random_image(5, 4, 7);
  vol.set_slice(1, img);
  auto back = vol.slice(1);
  CHECK(back.data == img.data);
  CHECK(vol.vx(2, 3, 1) == img.px(2, 3));
}

TEST_CASE("perfect reconstruction evaluates to inf psnr and unit ssim") {
  // 16 slices keep the resliced coronal/sagittal images above the ssim window
  Volume3D truth(32, 32, 16, 1.0);
  for (std::size_t s = 0; s < 16; ++s)
    truth.set_slice(s, testutil::random_image(32, 32, 300 + s));
  auto rows = evaluate_volume(truth, truth);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].plane == "axial");
  CHECK(rows[1].plane == "coronal");
  CHECK(rows[2].plane == "sagittal");
  for (const auto& r : rows) {
    CHECK(std::isinf(r.psnr));
    REQUIRE(r.ssim_valid);
    CHECK(r.ssim == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("isotropic noise volume scores the three planes alike") {
  const std::size_t n = 32;
  Volume3D truth(n, n, n, 1.0), recon(n, n, n, 1.0);
  std::mt19937_64 eng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : truth.data) v = u(eng);
  for (std::size_t i = 0; i < recon.data.size(); ++i) recon.data[i] = u(eng);

  auto rows = evaluate_volume(recon, truth);
  REQUIRE(rows.size() == 3);
  double lo = rows[0].psnr, hi = rows[0].psnr;
  for (const auto& r : rows) {
    lo = std::min(lo, r.psnr);
    hi = std::max(hi, r.psnr);
  }
  CHECK(hi - lo <= 0.5);
}

TEST_CASE("single-slice volume reports ssim as not applicable off-axis") {
  Volume3D truth(32, 32, 1, 1.0), recon(32, 32, 1, 1.0);
  truth.set_slice(0, testutil::random_image(32, 32, 8));
  recon.set_slice(0, testutil::random_image(32, 32, 9));
  auto rows = evaluate_volume(recon, truth);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ssim_valid);          // axial 32x32 fits the window
  CHECK_FALSE(rows[1].ssim_valid);    // coronal slices are 32x1
  CHECK_FALSE(rows[2].ssim_valid);
  CHECK(std::isnan(rows[1].ssim));
  CHECK(std::isnan(rows[2].ssim));
  CHECK(rows[1].psnr > 0.0);          // psnr is still defined
}

TEST_CASE("evaluate_volume rejects mismatched dims") {
  Volume3D a(8, 8, 2, 1.0), b(8, 8, 3, 1.0);
  CHECK_THROWS_AS(evaluate_volume(a, b), ValidationError);
}
