#include "sparsect/admm.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sparsect/errors.hpp"
#include "sparsect/fbp.hpp"
#include "sparsect/metrics.hpp"
#include "sparsect/random.hpp"
#include "sparsect/vecmath.hpp"

namespace sparsect {

namespace {

constexpr std::uint64_t kInitStream = 0xfeed0001ULL;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_finite_phase(const std::vector<double>& v, const char* phase) {
  for (double x : v)
    if (!std::isfinite(x))
      throw NumericalError(std::string("admm: non-finite state after ") + phase);
}

double diff_norm(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

void AdmmConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0)
    throw ValidationError("AdmmConfig: alpha and beta must be >= 0");
  if (!(rho1 > 0.0) || !(rho2 > 0.0) || !(rho3 > 0.0))
    throw ValidationError("AdmmConfig: penalties rho1, rho2, rho3 must be > 0");
  if (pcg_inner < 1) throw ValidationError("AdmmConfig: pcg_inner must be >= 1");
  if (!(pcg_tol > 0.0)) throw ValidationError("AdmmConfig: pcg_tol must be > 0");
  if (patch_w < 1 || patch_h < 1) throw ValidationError("AdmmConfig: patch dims must be >= 1");
  if (stride_x < 1 || stride_y < 1) throw ValidationError("AdmmConfig: strides must be >= 1");
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
    throw ValidationError("AdmmConfig: need 0 < sigma_min < sigma_max");
  if (n_steps < 1) throw ValidationError("AdmmConfig: n_steps must be >= 1");
  if (early_stop_residual < 0.0)
    throw ValidationError("AdmmConfig: early_stop_residual must be >= 0");
  if (!(psnr_peak > 0.0)) throw ValidationError("AdmmConfig: psnr_peak must be > 0");
}

AdmmConfig preset_for_views(std::size_t n_view) {
  AdmmConfig cfg;
  cfg.rho1 = 10.0;
  cfg.rho2 = 10.0;
  cfg.alpha = 0.04;
  cfg.beta = 0.02;
  switch (n_view) {
    case 8:
      cfg.rho3 = 1.0;
      break;
    case 4:
    case 2:
      cfg.rho3 = 3.0;
      break;
    default:
      throw ValidationError("preset_for_views: tuned presets exist for 2, 4 or 8 views only");
  }
  return cfg;
}

double objective(const Image2D& x, const Sinogram& sino, const ProjectionOperator& op,
                 const AdmmConfig& cfg) {
  Sinogram ax = op.forward(x);
  double fid = 0.0;
  for (std::size_t i = 0; i < ax.data.size(); ++i) {
    const double d = ax.data[i] - sino.data[i];
    fid += d * d;
  }
  fid *= 0.5;

  double tv = 0.0;
  if (cfg.alpha != 0.0) {
    const Image2D gx = grad_x(x);
    const Image2D gy = grad_y(x);
    for (double v : gx.data) tv += std::abs(v);
    for (double v : gy.data) tv += std::abs(v);
  }

  double nuc = 0.0;
  if (cfg.beta != 0.0) {
    const PatchLayout layout(cfg.patch_w, cfg.patch_h, cfg.stride_x, cfg.stride_y, x.width,
                             x.height);
    nuc = nuclear_norm(patch_unfold(x, layout));
  }
  return fid + cfg.alpha * tv + cfg.beta * nuc;
}

AdmmSolver::AdmmSolver(const ProjectionOperator& op, const Sinogram& sino, AdmmConfig cfg,
                       const ScorePrior& prior, const Image2D* reference)
    : op_(op),
      sino_(sino),
      cfg_(cfg),
      prior_(prior),
      reference_(reference),
      layout_(cfg.patch_w, cfg.patch_h, cfg.stride_x, cfg.stride_y, op.width(), op.height()),
      xop_(&op, cfg.rho1, cfg.rho2, cfg.rho3, op.width(), op.height()) {
  cfg_.validate();
  if (sino_.n_view() != op_.n_view() || sino_.n_det != op_.n_det())
    throw ValidationError("AdmmSolver: sinogram shape does not match projector");
  if (reference_ && (reference_->width != op_.width() || reference_->height != op_.height()))
    throw ValidationError("AdmmSolver: reference dims do not match grid");
  sched_ = make_schedule(cfg_.sigma_min, cfg_.sigma_max, cfg_.n_steps);
  atb_ = op_.adjoint(sino_);
  if (cfg_.use_fft_precond)
    precond_.emplace(op_.width(), op_.height(), estimate_ata_scale(op_), cfg_.rho1, cfg_.rho2,
                     cfg_.rho3);
}

AdmmState AdmmSolver::initial_state() const {
  AdmmState s;
  if (prior_.is_noop()) {
    s.x = fbp_reconstruct(sino_, op_.width(), op_.height());
  } else {
    s.x = Image2D(op_.width(), op_.height());
    fill_standard_normal(s.x.data.data(), s.x.size(), mix_seed(cfg_.seed, kInitStream));
    scale(s.x.data, cfg_.sigma_max);
  }
  s.v.gx = Image2D(op_.width(), op_.height(), 0.0);
  s.v.gy = Image2D(op_.width(), op_.height(), 0.0);
  s.u12.gx = Image2D(op_.width(), op_.height(), 0.0);
  s.u12.gy = Image2D(op_.width(), op_.height(), 0.0);
  s.z = PatchMatrix(layout_.patch_size(), layout_.n_patches(), 0.0);
  s.u3 = PatchMatrix(layout_.patch_size(), layout_.n_patches(), 0.0);
  return s;
}

void AdmmSolver::iterate(AdmmState& state) const {
  if (state.x.width != op_.width() || state.x.height != op_.height())
    throw ValidationError("AdmmSolver::iterate: state dims do not match solver grid");
  if (state.z.rows != layout_.patch_size() || state.z.cols != layout_.n_patches())
    throw ValidationError("AdmmSolver::iterate: state patch shape does not match layout");

  using clock = std::chrono::steady_clock;
  const std::size_t k = state.iteration;
  IterationRecord rec;

  auto t0 = clock::now();
  Image2D x_prime = state.x;
  if (!prior_.is_noop() && k < cfg_.n_outer)
    x_prime =
        diffusion_denoise(state.x, k, cfg_.n_outer, sched_, prior_, cfg_.seed, cfg_.inject_noise);
  check_finite_phase(x_prime.data, "denoise");
  rec.t_denoise = seconds_since(t0);

  t0 = clock::now();
  Image2D rhs = atb_;
  {
    Image2D tmp(op_.width(), op_.height());
    for (std::size_t i = 0; i < tmp.size(); ++i)
      tmp.data[i] = state.v.gx.data[i] + state.u12.gx.data[i];
    Image2D adj = grad_x_adjoint(tmp);
    axpy(cfg_.rho1, adj.data, rhs.data);
    for (std::size_t i = 0; i < tmp.size(); ++i)
      tmp.data[i] = state.v.gy.data[i] + state.u12.gy.data[i];
    adj = grad_y_adjoint(tmp);
    axpy(cfg_.rho2, adj.data, rhs.data);
    PatchMatrix zsum(state.z.rows, state.z.cols);
    for (std::size_t i = 0; i < zsum.data.size(); ++i)
      zsum.data[i] = state.z.data[i] + state.u3.data[i];
    Image2D folded = patch_fold(zsum, layout_);
    axpy(cfg_.rho3, folded.data, rhs.data);
  }
  PcgResult pr = pcg_solve(xop_, rhs, x_prime, cfg_.pcg_inner, cfg_.pcg_tol,
                           precond_ ? &*precond_ : nullptr);
  state.x = std::move(pr.x);
  check_finite_phase(state.x.data, "x-step");
  rec.t_x = seconds_since(t0);

  t0 = clock::now();
  const Image2D gx = grad_x(state.x);
  const Image2D gy = grad_y(state.x);
  {
    Image2D arg(op_.width(), op_.height());
    for (std::size_t i = 0; i < arg.size(); ++i) arg.data[i] = gx.data[i] - state.u12.gx.data[i];
    state.v.gx = shrink(arg, cfg_.alpha / cfg_.rho1);
    for (std::size_t i = 0; i < arg.size(); ++i) arg.data[i] = gy.data[i] - state.u12.gy.data[i];
    state.v.gy = shrink(arg, cfg_.alpha / cfg_.rho2);
  }
  check_finite_phase(state.v.gx.data, "v-step");
  check_finite_phase(state.v.gy.data, "v-step");
  rec.t_v = seconds_since(t0);

  t0 = clock::now();
  const PatchMatrix px = patch_unfold(state.x, layout_);
  {
    PatchMatrix arg(px.rows, px.cols);
    for (std::size_t i = 0; i < arg.data.size(); ++i)
      arg.data[i] = px.data[i] - state.u3.data[i];
    state.z = svt(arg, cfg_.beta / cfg_.rho3);
  }
  check_finite_phase(state.z.data, "z-step");
  rec.t_z = seconds_since(t0);

  t0 = clock::now();
  for (std::size_t i = 0; i < state.u12.gx.size(); ++i)
    state.u12.gx.data[i] += state.v.gx.data[i] - gx.data[i];
  for (std::size_t i = 0; i < state.u12.gy.size(); ++i)
    state.u12.gy.data[i] += state.v.gy.data[i] - gy.data[i];
  for (std::size_t i = 0; i < state.u3.data.size(); ++i)
    state.u3.data[i] += state.z.data[i] - px.data[i];
  check_finite_phase(state.u12.gx.data, "u-step");
  check_finite_phase(state.u12.gy.data, "u-step");
  check_finite_phase(state.u3.data, "u-step");
  rec.t_u = seconds_since(t0);

  rec.r_vx = diff_norm(state.v.gx.data, gx.data);
  rec.r_vy = diff_norm(state.v.gy.data, gy.data);
  rec.r_z = diff_norm(state.z.data, px.data);
  rec.objective = objective(state.x, sino_, op_, cfg_);
  rec.psnr = reference_ ? psnr(state.x, *reference_, cfg_.psnr_peak)
                        : std::numeric_limits<double>::quiet_NaN();

  state.iteration = k + 1;
  state.history.push_back(rec);
}

ReconReport AdmmSolver::reconstruct() const { return run_from(initial_state()); }

ReconReport AdmmSolver::run_from(AdmmState state) const {
  while (state.iteration < cfg_.n_outer) {
    iterate(state);
    if (cfg_.early_stop_residual > 0.0) {
      const IterationRecord& rec = state.history.back();
      if (rec.r_vx < cfg_.early_stop_residual && rec.r_vy < cfg_.early_stop_residual &&
          rec.r_z < cfg_.early_stop_residual)
        break;
    }
  }
  ReconReport rep;
  rep.image = std::move(state.x);
  rep.iterations = state.iteration;
  rep.history = std::move(state.history);
  return rep;
}

}  // namespace sparsect
