#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sparsect/image.hpp"

namespace sparsect {

/// Variance-exploding noise ladder. sigmas[i] for i = 0..n_steps, geometric
/// from sigma_min up to sigma_max:
///
///   sigma_i = sigma_min * (sigma_max / sigma_min)^(i/N).
struct NoiseSchedule {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  std::size_t n_steps = 0;
  std::vector<double> sigmas;  // size n_steps + 1, strictly increasing
};

NoiseSchedule make_schedule(double sigma_min, double sigma_max, std::size_t n_steps);

/// Estimate of the noise-conditional score grad_x log p_sigma(x).
/// Implementations are immutable after construction and safe to share across
/// threads.
class ScorePrior {
 public:
  virtual ~ScorePrior() = default;
  virtual Image2D score(const Image2D& x, double sigma) const = 0;
  /// True when score() is identically zero; lets callers skip the denoise
  /// phase entirely (convex mode).
  virtual bool is_noop() const { return false; }
};

class NoOpPrior final : public ScorePrior {
 public:
  Image2D score(const Image2D& x, double sigma) const override;
  bool is_noop() const override { return true; }
};

/// Closed-form prior for x ~ N(mu, gamma^2 I): after perturbation with noise
/// scale sigma the marginal is N(mu, (gamma^2 + sigma^2) I), so
///
///   score(x, sigma) = -(x - mu) / (gamma^2 + sigma^2).
class GaussianAnalyticPrior final : public ScorePrior {
 public:
  GaussianAnalyticPrior(Image2D mean, double gamma);

  Image2D score(const Image2D& x, double sigma) const override;
  const Image2D& mean() const { return mean_; }
  double gamma() const { return gamma_; }

 private:
  Image2D mean_;
  double gamma_;
};

/// Frozen per-sigma score lookup loaded from a prior file: one W x H score
/// field per tabulated sigma, selected by nearest log-sigma. Stands in for an
/// externally trained score network.
class TabulatedScorePrior final : public ScorePrior {
 public:
  TabulatedScorePrior(std::vector<double> sigmas, std::vector<Image2D> fields);

  static TabulatedScorePrior load(const std::string& path);

  Image2D score(const Image2D& x, double sigma) const override;
  const std::vector<double>& sigmas() const { return sigmas_; }

 private:
  std::vector<double> sigmas_;  // ascending, > 0
  std::vector<Image2D> fields_;
};

/// x0 + sigma * z with z ~ N(0, I); deterministic per seed.
Image2D forward_perturb(const Image2D& x0, double sigma, std::uint64_t seed);

/// One reverse-time Euler-Maruyama step from noise level sigma_i down to
/// sigma_{i-1} (1 <= i <= N):
///
///   x_{i-1} = x_i + (sigma_i^2 - sigma_{i-1}^2) * score(x_i, sigma_i)
///                 + sqrt(sigma_i^2 - sigma_{i-1}^2) * z.
///
/// `inject_noise = false` sets z = 0 (deterministic test hook).
Image2D reverse_em_step(const Image2D& x_i, std::size_t i, const NoiseSchedule& sched,
                        const ScorePrior& prior, std::uint64_t seed, bool inject_noise = true);

/// Contiguous block of reverse steps assigned to outer iteration k of
/// `total`: the N steps (highest noise first) are split into `total` blocks
/// whose sizes differ by at most one, earlier blocks taking the extra step.
/// Returns (offset, count) in the descending sequence i = N, N-1, ..., 1;
/// the blocks partition all N steps exactly once over a full run.
std::pair<std::size_t, std::size_t> denoise_step_range(std::size_t k, std::size_t total,
                                                       std::size_t n_steps);

/// Runs the reverse steps allocated to outer iteration k; deterministic per
/// seed.
Image2D diffusion_denoise(const Image2D& x, std::size_t k, std::size_t total,
                          const NoiseSchedule& sched, const ScorePrior& prior, std::uint64_t seed,
                          bool inject_noise = true);

}  // namespace sparsect
