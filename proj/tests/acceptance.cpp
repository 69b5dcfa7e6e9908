// Acceptance gate: nine standalone checks, one [PASS]/[FAIL] line each with
// the measured quantity and its pinned limit. Run without arguments for the
// whole gate, or with a single criterion number to run just that one (the
// ctest harness registers the criteria individually).

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sparsect/admm.hpp"
#include "sparsect/fbp.hpp"
#include "sparsect/image.hpp"
#include "sparsect/linsolve.hpp"
#include "sparsect/metrics.hpp"
#include "sparsect/phantom.hpp"
#include "sparsect/priors.hpp"
#include "sparsect/projection.hpp"
#include "sparsect/regularizers.hpp"
#include "test_util.hpp"

using namespace sparsect;

namespace {

bool report(bool ok, int criterion, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  return ok;
}

void note(const std::string& text) {
  std::printf("       %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// --- 1. adjoint correctness -------------------------------------------------
// <A x, y> == <x, A^T y> on 20 random 32x32 instances, relative error 1e-10.

bool criterion_1() {
  constexpr double kLimit = 1e-10;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n_view = 2 + static_cast<std::size_t>(trial) % 7;
    const std::size_t n_det = default_detector_count(32) + static_cast<std::size_t>(trial) % 3;
    const ProjectionOperator op(32, 32, make_angles(n_view), n_det);
    Image2D x(32, 32);
    for (double& v : x.data) v = uni(rng);
    Sinogram y;
    y.angles = op.angles();
    y.n_det = n_det;
    y.data.resize(n_view * n_det);
    for (double& v : y.data) v = uni(rng);

    const Sinogram ax = op.forward(x);
    const Image2D aty = op.adjoint(y);
    const double lhs = dot(ax.data, y.data);
    const double rhs = dot(x.data, aty.data);
    const double scale = norm(ax.data) * norm(y.data);
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return report(worst <= kLimit, 1,
                fmt("radon adjoint dot-product mismatch %.3e (limit %.0e, 20 random 32x32 "
                    "instances)",
                    worst, kLimit));
}

// --- 2. prox oracles ---------------------------------------------------------
// shrink and svt minimize their objectives against 100 perturbations per
// instance (100 instances each) and are non-expansive on 100 random pairs.

Image2D random_signed(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Image2D img(w, h);
  for (double& v : img.data) v = uni(rng);
  return img;
}

PatchMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  PatchMatrix m(r, c);
  for (double& v : m.data) v = uni(rng);
  return m;
}

bool criterion_2() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double eps_scales[3] = {1e-3, 1e-2, 1e-1};

  double min_margin_shrink = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 100; ++inst) {
    const Image2D v = random_signed(8, 8, rng);
    const double tau = 0.02 + 0.4 * std::abs(uni(rng));
    const Image2D p = shrink(v, tau);
    const auto obj = [&](const Image2D& w) {
      double s = 0.0;
      for (std::size_t i = 0; i < w.data.size(); ++i) {
        const double d = w.data[i] - v.data[i];
        s += 0.5 * d * d + tau * std::abs(w.data[i]);
      }
      return s;
    };
    const double fp = obj(p);
    for (int j = 0; j < 100; ++j) {
      Image2D cand = p;
      const double eps = eps_scales[j % 3];
      for (double& w : cand.data) w += eps * uni(rng);
      min_margin_shrink = std::min(min_margin_shrink, obj(cand) - fp);
    }
  }

  double min_margin_svt = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 100; ++inst) {
    const PatchMatrix v = random_matrix(6, 5, rng);
    const double tau = 0.05 + 0.6 * std::abs(uni(rng));
    const PatchMatrix p = svt(v, tau);
    const auto obj = [&](const PatchMatrix& w) {
      double s = 0.0;
      for (std::size_t i = 0; i < w.data.size(); ++i) {
        const double d = w.data[i] - v.data[i];
        s += 0.5 * d * d;
      }
      return s + tau * nuclear_norm(w);
    };
    const double fp = obj(p);
    for (int j = 0; j < 100; ++j) {
      PatchMatrix cand = p;
      const double eps = eps_scales[j % 3];
      for (double& w : cand.data) w += eps * uni(rng);
      min_margin_svt = std::min(min_margin_svt, obj(cand) - fp);
    }
  }

  double worst_expansion = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const double tau = 0.05 + 0.5 * std::abs(uni(rng));
    const Image2D a = random_signed(8, 8, rng);
    const Image2D b = random_signed(8, 8, rng);
    const Image2D pa = shrink(a, tau);
    const Image2D pb = shrink(b, tau);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      const double dp = pa.data[i] - pb.data[i];
      const double d = a.data[i] - b.data[i];
      num += dp * dp;
      den += d * d;
    }
    worst_expansion = std::max(worst_expansion, std::sqrt(num / den));

    const PatchMatrix ma = random_matrix(6, 5, rng);
    const PatchMatrix mb = random_matrix(6, 5, rng);
    const PatchMatrix sa = svt(ma, tau);
    const PatchMatrix sb = svt(mb, tau);
    num = den = 0.0;
    for (std::size_t i = 0; i < ma.data.size(); ++i) {
      const double dp = sa.data[i] - sb.data[i];
      const double d = ma.data[i] - mb.data[i];
      num += dp * dp;
      den += d * d;
    }
    worst_expansion = std::max(worst_expansion, std::sqrt(num / den));
  }

  const bool ok = min_margin_shrink >= 0.0 && min_margin_svt >= 0.0 &&
                  worst_expansion <= 1.0 + 1e-12;
  return report(ok, 2,
                fmt("prox optimality margins shrink %.3e / svt %.3e (limit >= 0, 100x100 "
                    "perturbations), non-expansiveness ratio %.12f (limit 1)",
                    min_margin_shrink, min_margin_svt, worst_expansion));
}

// --- 3. convex-mode convergence ----------------------------------------------
// 64x64 phantom, 8 views, tuned preset, prior disabled. The x-step is solved
// accurately (25 PCG iterations, tol 1e-10) so the run exposes the splitting
// behaviour rather than inner-solver error: objective non-increasing after
// iteration 5, every split residual down 100x by iteration 200, and
// k*(f_k - f_final) bounded on k in [20,200].

bool criterion_3() {
  const Image2D truth = gen_phantom(PhantomKind::SheppLogan, 64, 0);
  const ProjectionOperator op(64, 64, make_angles(8), default_detector_count(64));
  const Sinogram b = op.forward(truth);
  AdmmConfig cfg = preset_for_views(8);
  cfg.n_outer = 200;
  cfg.pcg_inner = 25;
  cfg.pcg_tol = 1e-10;
  const NoOpPrior noop;
  const AdmmSolver solver(op, b, cfg, noop, &truth);
  const ReconReport rep = solver.reconstruct();
  if (rep.history.size() != 200)
    return report(false, 3, fmt("expected 200 history rows, got %zu", rep.history.size()));

  double worst_uptick = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 5; k < 200; ++k) {
    const double slack = 1e-9 * std::max(1.0, std::abs(rep.history[k - 1].objective));
    worst_uptick = std::max(worst_uptick, rep.history[k].objective -
                                              rep.history[k - 1].objective - slack);
  }

  const IterationRecord& first = rep.history.front();
  const IterationRecord& last = rep.history.back();
  const double drop_vx = first.r_vx / last.r_vx;
  const double drop_vy = first.r_vy / last.r_vy;
  const double drop_z = first.r_z / last.r_z;

  const double f_final = last.objective;
  double bound = 0.0;
  for (std::size_t k = 20; k <= 200; ++k)
    bound = std::max(bound, static_cast<double>(k) * (rep.history[k - 1].objective - f_final));

  const bool ok = worst_uptick <= 0.0 && drop_vx >= 100.0 && drop_vy >= 100.0 &&
                  drop_z >= 100.0 && bound <= 100.0;
  return report(ok, 3,
                fmt("monotone after iter 5 (worst uptick beyond slack %.2e), residual drops "
                    "%.0fx/%.0fx/%.0fx (limit 100x), max k*(f_k - f_200) = %.1f (limit 100)",
                    worst_uptick, drop_vx, drop_vy, drop_z, bound));
}

// --- 4. relative quality ordering ---------------------------------------------
// Noiseless 64x64 phantom at 2/4/8 views, per-view tuned preset, accurate
// x-step: PSNR(TV + patch low-rank) > PSNR(TV) > PSNR(FBP) at every view
// count, and both gaps >= 0.5 dB at 2 views.

bool criterion_4() {
  const Image2D truth = gen_phantom(PhantomKind::SheppLogan, 64, 0);
  bool ordering = true;
  double gap_lora_2 = 0.0, gap_tv_2 = 0.0;
  std::string detail;
  for (const std::size_t views : {std::size_t{2}, std::size_t{4}, std::size_t{8}}) {
    const ProjectionOperator op(64, 64, make_angles(views), default_detector_count(64));
    const Sinogram b = op.forward(truth);
    const double p_fbp = psnr(fbp_reconstruct(b, 64, 64), truth, 1.0);

    AdmmConfig cfg = preset_for_views(views);
    cfg.n_outer = 200;
    cfg.pcg_inner = 10;
    cfg.pcg_tol = 1e-8;
    const NoOpPrior noop;

    AdmmConfig tv_cfg = cfg;
    tv_cfg.beta = 0.0;
    const double p_tv =
        psnr(AdmmSolver(op, b, tv_cfg, noop, &truth).reconstruct().image, truth, 1.0);
    const double p_lora =
        psnr(AdmmSolver(op, b, cfg, noop, &truth).reconstruct().image, truth, 1.0);

    ordering = ordering && p_lora > p_tv && p_tv > p_fbp;
    if (views == 2) {
      gap_lora_2 = p_lora - p_tv;
      gap_tv_2 = p_tv - p_fbp;
    }
    note(fmt("%zu views: fbp %.2f dB, tv %.2f dB, tv+low-rank %.2f dB (gaps %+.3f / %+.3f)",
             views, p_fbp, p_tv, p_lora, p_lora - p_tv, p_tv - p_fbp));
  }
  const bool gaps = gap_lora_2 >= 0.5 && gap_tv_2 >= 0.5;
  return report(ordering && gaps, 4,
                fmt("ordering %s at 2/4/8 views; 2-view gaps low-rank-over-tv %+.3f dB, "
                    "tv-over-fbp %+.3f dB (limit >= 0.5 dB each)",
                    ordering ? "holds" : "VIOLATED", gap_lora_2, gap_tv_2));
}

// --- 5. ablation directions ---------------------------------------------------
// (a) dropping the patch low-rank term (beta = 0) must not increase SSIM on a
//     noisy 8-view problem where the term is doing real work;
// (b) dropping the score prior must not increase PSNR on a matched synthetic
//     task where the analytic Gaussian prior is centered on the truth.

bool criterion_5() {
  const Image2D truth = gen_phantom(PhantomKind::SheppLogan, 64, 0);

  // (a) heavy noise, strong low-rank weight; both arms see the same data.
  const ProjectionOperator op8(64, 64, make_angles(8), default_detector_count(64));
  const Sinogram noisy = add_projection_noise(op8.forward(truth), 5.0, 0);
  AdmmConfig full = preset_for_views(8);
  full.alpha = 12.8;
  full.beta = 30.0;
  full.rho3 = 3.0;
  full.n_outer = 600;
  full.patch_w = full.patch_h = 8;
  full.stride_x = full.stride_y = 4;
  AdmmConfig nolora = full;
  nolora.beta = 0.0;
  const NoOpPrior noop;
  const double ssim_full =
      ssim(AdmmSolver(op8, noisy, full, noop, &truth).reconstruct().image, truth, 1.0);
  const double ssim_nolora =
      ssim(AdmmSolver(op8, noisy, nolora, noop, &truth).reconstruct().image, truth, 1.0);

  // (b) truth-centered Gaussian prior against the prior-free run. sigma_max
  // is kept moderate: the prior run starts from N(0, sigma_max^2), and a
  // huge start leaves multiplier transients that 60 iterations cannot wash
  // out.
  const ProjectionOperator op4(64, 64, make_angles(4), default_detector_count(64));
  const Sinogram noisy4 = add_projection_noise(op4.forward(truth), 2.0, 1);
  AdmmConfig pcfg = preset_for_views(4);
  pcfg.n_outer = 60;
  pcfg.n_steps = 60;
  pcfg.pcg_inner = 4;
  pcfg.sigma_max = 2.0;
  pcfg.inject_noise = false;
  const GaussianAnalyticPrior gauss(truth, 0.5);
  const double psnr_prior =
      psnr(AdmmSolver(op4, noisy4, pcfg, gauss, &truth).reconstruct().image, truth, 1.0);
  const double psnr_noprior =
      psnr(AdmmSolver(op4, noisy4, pcfg, noop, &truth).reconstruct().image, truth, 1.0);

  const bool ok = ssim_full >= ssim_nolora && psnr_prior >= psnr_noprior;
  return report(ok, 5,
                fmt("low-rank removal: ssim %.4f -> %.4f (must not increase); prior removal: "
                    "psnr %.2f -> %.2f dB (must not increase)",
                    ssim_full, ssim_nolora, psnr_prior, psnr_noprior));
}

// --- 6. fft-preconditioned x-step efficiency -----------------------------------
// Iterations to a 1e-6 relative residual on the tuned 64x64 8-view x-step
// system, circulant-preconditioned vs plain CG; pinned ratio 0.5.

bool criterion_6() {
  const Image2D truth = gen_phantom(PhantomKind::SheppLogan, 64, 0);
  const ProjectionOperator op(64, 64, make_angles(8), default_detector_count(64));
  const Sinogram b = op.forward(truth);
  const Image2D rhs = op.adjoint(b);
  const Image2D x0(64, 64, 0.0);
  const double c_a = estimate_ata_scale(op);

  const auto run = [&](double r1, double r2, double r3, bool precond, double& seconds) {
    const XStepOperator xop(&op, r1, r2, r3, 64, 64);
    const CirculantPreconditioner pre(64, 64, c_a, r1, r2, r3);
    const auto t0 = std::chrono::steady_clock::now();
    const PcgResult res = pcg_solve(xop, rhs, x0, 10000, 1e-6, precond ? &pre : nullptr);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res.iterations;
  };

  double t_pre = 0.0, t_plain = 0.0, t_ignore = 0.0;
  const std::size_t it_pre = run(10.0, 10.0, 1.0, true, t_pre);
  const std::size_t it_plain = run(10.0, 10.0, 1.0, false, t_plain);
  const double ratio = static_cast<double>(it_pre) / static_cast<double>(it_plain);

  const std::size_t it_pre_hi = run(400.0, 400.0, 1.0, true, t_ignore);
  const std::size_t it_plain_hi = run(400.0, 400.0, 1.0, false, t_ignore);
  note(fmt("wall clock: preconditioned %.1f ms, plain %.1f ms", 1e3 * t_pre, 1e3 * t_plain));
  note(fmt("gradient-dominated system (rho1=rho2=400): %zu vs %zu iterations (ratio %.2f) -- "
           "the circulant part is exact, the data term is only scalar-absorbed",
           it_pre_hi, it_plain_hi,
           static_cast<double>(it_pre_hi) / static_cast<double>(it_plain_hi)));

  return report(ratio <= 0.5, 6,
                fmt("preconditioned %zu vs plain %zu iterations to 1e-6, ratio %.3f (limit "
                    "0.5)",
                    it_pre, it_plain, ratio));
}

// --- 7. reverse-step correctness ------------------------------------------------
// Zero score and suppressed noise leave the iterate untouched; the full
// stochastic chain with the analytic Gaussian prior reproduces the
// closed-form terminal moments within Monte-Carlo 3-sigma over 256 runs.

bool criterion_7() {
  const NoiseSchedule sched = make_schedule(0.01, 50.0, 1000);
  const NoOpPrior noop;
  const Image2D x = testutil::random_image(6, 6, 7, -1.0, 1.0);
  double identity_diff = 0.0;
  for (const std::size_t i : {std::size_t{1}, std::size_t{500}, std::size_t{1000}}) {
    const Image2D stepped = reverse_em_step(x, i, sched, noop, 9, false);
    for (std::size_t p = 0; p < x.data.size(); ++p)
      identity_diff = std::max(identity_diff, std::abs(stepped.data[p] - x.data[p]));
  }

  const double mu = 0.8, gamma = 0.6;
  const GaussianAnalyticPrior prior(Image2D(1, 1, mu), gamma);
  const int runs = 256;
  std::vector<double> finals(runs);
  for (int r = 0; r < runs; ++r) {
    std::mt19937_64 init(5000 + static_cast<std::uint64_t>(r));
    std::normal_distribution<double> gaussian(0.0, 1.0);
    Image2D xi(1, 1, sched.sigma_max * gaussian(init));
    for (std::size_t i = sched.n_steps; i >= 1; --i)
      xi = reverse_em_step(xi, i, sched, prior,
                           static_cast<std::uint64_t>(r) * 100000 + i, true);
    finals[r] = xi.data[0];
  }
  double mean = 0.0;
  for (double v : finals) mean += v;
  mean /= runs;
  double var = 0.0;
  for (double v : finals) var += (v - mean) * (v - mean);
  var /= runs - 1;
  const double sd = std::sqrt(var);

  const double sd_target = std::sqrt(gamma * gamma + sched.sigma_min * sched.sigma_min);
  const double mean_tol = 3.0 * sd_target / std::sqrt(static_cast<double>(runs));
  const double sd_tol = 3.0 * sd_target / std::sqrt(2.0 * (runs - 1));

  const bool ok = identity_diff == 0.0 && std::abs(mean - mu) <= mean_tol &&
                  std::abs(sd - sd_target) <= sd_tol;
  return report(ok, 7,
                fmt("zero-score/zero-noise step diff %.1e (exact); chain moments mean %.4f "
                    "(target %.4f +- %.4f), sd %.4f (target %.4f +- %.4f), 256 runs",
                    identity_diff, mean, mu, mean_tol, sd, sd_target, sd_tol));
}

// --- 8. end-to-end determinism ---------------------------------------------------
// Two identical simulate/recon/eval pipelines (fixed seeds) must produce
// byte-identical metric CSVs (and, stronger, identical volumes).

bool criterion_8() {
#ifndef SPARSECT_CLI_PATH
  return report(false, 8, "cli binary path not compiled in");
#else
  testutil::TempDir tmp;
  const auto run_once = [&](const std::string& tag) {
    const std::string dir = tmp.str(tag);
    int rc = testutil::run_cli("simulate --size 32 --views 4 --noise-sigma 0.5 --seed 7 --out " +
                               dir);
    if (rc != 0) return rc;
    rc = testutil::run_cli("recon --prior gaussian --iters 5 --inner 4 --patch 8 --stride 8 "
                           "--steps 50 --seed 7 --in " + dir + " --out " + dir);
    if (rc != 0) return rc;
    return testutil::run_cli("eval --in " + dir + " --out " + dir);
  };
  const int rc_a = run_once("a");
  const int rc_b = run_once("b");
  if (rc_a != 0 || rc_b != 0)
    return report(false, 8, fmt("pipeline runs exited %d / %d", rc_a, rc_b));

  const std::string csv_a = testutil::slurp(tmp.str("a") + "/metrics.csv");
  const std::string csv_b = testutil::slurp(tmp.str("b") + "/metrics.csv");
  const bool csv_same = !csv_a.empty() && csv_a == csv_b;
  const bool vol_same = testutil::slurp(tmp.str("a") + "/recon.vol") ==
                        testutil::slurp(tmp.str("b") + "/recon.vol");
  return report(csv_same && vol_same, 8,
                fmt("metrics.csv %s (%zu bytes), recon.vol %s",
                    csv_same ? "byte-identical" : "DIFFERS", csv_a.size(),
                    vol_same ? "byte-identical" : "DIFFERS"));
#endif
}

// --- 9. geometry constants --------------------------------------------------------

bool criterion_9() {
  bool ok = default_detector_count(256) == 363;
  for (const std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{8}, std::size_t{180}}) {
    const AngleSet set = make_angles(n);
    ok = ok && set.n_view == n && set.angles.size() == n;
    for (std::size_t k = 0; k < n; ++k) {
      const double expect =
          static_cast<double>(k) * std::numbers::pi / static_cast<double>(n);
      ok = ok && set.angles[k] == expect && set.angles[k] >= 0.0 &&
           set.angles[k] < std::numbers::pi;
    }
  }
  return report(ok, 9,
                fmt("default_detector_count(256) = %zu (want 363); angles k*pi/n exact for "
                    "n in {1,2,8,180}",
                    default_detector_count(256)));
}

}  // namespace

int main(int argc, char** argv) {
  bool (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                          criterion_6, criterion_7, criterion_8, criterion_9};
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > 9) {
      std::fprintf(stderr, "usage: %s [criterion 1-9]\n", argv[0]);
      return 2;
    }
    return criteria[n - 1]() ? 0 : 1;
  }
  int failures = 0;
  for (const auto& c : criteria) failures += c() ? 0 : 1;
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
