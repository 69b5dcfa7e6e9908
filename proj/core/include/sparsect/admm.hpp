#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sparsect/image.hpp"
#include "sparsect/linsolve.hpp"
#include "sparsect/priors.hpp"
#include "sparsect/projection.hpp"
#include "sparsect/regularizers.hpp"

namespace sparsect {

/// Solver hyperparameters. alpha weights the anisotropic TV term, beta the
/// patch nuclear-norm term; rho1/rho2 penalize the two gradient splits and
/// rho3 the patch split. Defaults follow the 8-view tuning.
struct AdmmConfig {
  double alpha = 0.04;
  double beta = 0.02;
  double rho1 = 10.0;
  double rho2 = 10.0;
  double rho3 = 1.0;
  std::size_t n_outer = 200;
  std::size_t pcg_inner = 1;  // x-step PCG iterations per outer iteration
  double pcg_tol = 1e-6;
  std::size_t patch_w = 16;
  std::size_t patch_h = 16;
  std::size_t stride_x = 16;
  std::size_t stride_y = 16;
  double sigma_min = 0.01;
  double sigma_max = 50.0;
  std::size_t n_steps = 2000;  // reverse-diffusion steps spread over the run
  std::uint64_t seed = 0;
  bool use_fft_precond = true;
  bool inject_noise = true;      // z = 0 in every stochastic step when false
  double early_stop_residual = 0.0;  // > 0: stop once all residuals fall below
  double psnr_peak = 1.0;            // peak for the history PSNR column

  void validate() const;
};

/// Tuned (rho, weight) presets by view count: 8 views -> rho3 = 1,
/// 4 and 2 views -> rho3 = 3; rho1 = rho2 = 10, alpha = 0.04, beta = 0.02
/// throughout. Other fields keep their defaults.
AdmmConfig preset_for_views(std::size_t n_view);

/// One history row per outer iteration. psnr is NaN when no reference image
/// was supplied; timings are wall-clock seconds per phase.
struct IterationRecord {
  double objective = 0.0;
  double r_vx = 0.0;  // |v_x - D_x x|
  double r_vy = 0.0;  // |v_y - D_y x|
  double r_z = 0.0;   // |Z - P(x)|_F
  double psnr = 0.0;
  double t_denoise = 0.0;
  double t_x = 0.0;
  double t_v = 0.0;
  double t_z = 0.0;
  double t_u = 0.0;
};

struct AdmmState {
  Image2D x;
  GradientField v;    // split gradient fields v_x, v_y
  GradientField u12;  // multipliers u_1, u_2
  PatchMatrix z;
  PatchMatrix u3;
  std::size_t iteration = 0;
  std::vector<IterationRecord> history;
};

struct ReconReport {
  Image2D image;
  std::size_t iterations = 0;
  std::vector<IterationRecord> history;
};

/// Convex part of the composite objective,
///   1/2 |Ax - b|^2 + alpha (|D_x x|_1 + |D_y x|_1) + beta |P(x)|_*.
/// The generative prior enters the solver only through the denoise phase and
/// has no tractable density, so it is not part of this value.
double objective(const Image2D& x, const Sinogram& sino, const ProjectionOperator& op,
                 const AdmmConfig& cfg);

/// Proximal-splitting solver: each outer iteration runs denoise -> x-step
/// (PCG on the normal equations, warm-started at the denoised iterate) ->
/// gradient shrinkage -> patch SVT -> multiplier updates.
///
/// The projection operator, sinogram, prior, and optional reference must
/// outlive the solver. Instances are immutable after construction; distinct
/// AdmmState objects may be advanced concurrently.
class AdmmSolver {
 public:
  AdmmSolver(const ProjectionOperator& op, const Sinogram& sino, AdmmConfig cfg,
             const ScorePrior& prior, const Image2D* reference = nullptr);

  /// Noise-prior runs start from N(0, sigma_max^2 I); with a no-op prior the
  /// start switches to the filtered back-projection estimate.
  AdmmState initial_state() const;

  /// Advances one outer iteration and appends a history record.
  void iterate(AdmmState& state) const;

  /// initial_state() advanced until n_outer iterations (or early stop).
  ReconReport reconstruct() const;

  /// Continues a checkpointed state to n_outer total iterations.
  ReconReport run_from(AdmmState state) const;

  const AdmmConfig& config() const { return cfg_; }
  const PatchLayout& layout() const { return layout_; }
  const CirculantPreconditioner* preconditioner() const {
    return precond_ ? &*precond_ : nullptr;
  }

 private:
  const ProjectionOperator& op_;
  const Sinogram& sino_;
  AdmmConfig cfg_;
  const ScorePrior& prior_;
  const Image2D* reference_;
  PatchLayout layout_;
  XStepOperator xop_;
  std::optional<CirculantPreconditioner> precond_;
  NoiseSchedule sched_;
  Image2D atb_;
};

}  // namespace sparsect
