#include "sparsect/priors.hpp"

#include <cmath>
#include <string>

#include "sparsect/errors.hpp"
#include "sparsect/io.hpp"
#include "sparsect/random.hpp"

namespace sparsect {

NoiseSchedule make_schedule(double sigma_min, double sigma_max, std::size_t n_steps) {
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
    throw ValidationError("make_schedule: need 0 < sigma_min < sigma_max");
  if (n_steps < 1) throw ValidationError("make_schedule: n_steps must be >= 1");
  NoiseSchedule sched;
  sched.sigma_min = sigma_min;
  sched.sigma_max = sigma_max;
  sched.n_steps = n_steps;
  sched.sigmas.resize(n_steps + 1);
  const double ratio = sigma_max / sigma_min;
  const double inv_n = 1.0 / static_cast<double>(n_steps);
  for (std::size_t i = 0; i <= n_steps; ++i)
    sched.sigmas[i] = sigma_min * std::pow(ratio, static_cast<double>(i) * inv_n);
  sched.sigmas.front() = sigma_min;
  sched.sigmas.back() = sigma_max;
  return sched;
}

Image2D NoOpPrior::score(const Image2D& x, double) const {
  return Image2D(x.width, x.height, 0.0);
}

GaussianAnalyticPrior::GaussianAnalyticPrior(Image2D mean, double gamma)
    : mean_(std::move(mean)), gamma_(gamma) {
  if (!(gamma > 0.0)) throw ValidationError("GaussianAnalyticPrior: gamma must be > 0");
  require_finite(mean_, "GaussianAnalyticPrior mean");
}

Image2D GaussianAnalyticPrior::score(const Image2D& x, double sigma) const {
  if (!x.same_dims(mean_))
    throw ValidationError("GaussianAnalyticPrior: input dims do not match mean image");
  const double inv_var = 1.0 / (gamma_ * gamma_ + sigma * sigma);
  Image2D s(x.width, x.height);
  for (std::size_t i = 0; i < s.size(); ++i) s.data[i] = (mean_.data[i] - x.data[i]) * inv_var;
  return s;
}

TabulatedScorePrior::TabulatedScorePrior(std::vector<double> sigmas, std::vector<Image2D> fields)
    : sigmas_(std::move(sigmas)), fields_(std::move(fields)) {
  if (sigmas_.empty()) throw ValidationError("TabulatedScorePrior: need at least one sigma");
  if (sigmas_.size() != fields_.size())
    throw ValidationError("TabulatedScorePrior: sigma count does not match field count");
  for (std::size_t i = 0; i < sigmas_.size(); ++i) {
    if (!(sigmas_[i] > 0.0)) throw ValidationError("TabulatedScorePrior: sigmas must be > 0");
    if (i > 0 && !(sigmas_[i] > sigmas_[i - 1]))
      throw ValidationError("TabulatedScorePrior: sigmas must be strictly increasing");
    if (!fields_[i].same_dims(fields_.front()))
      throw ValidationError("TabulatedScorePrior: score fields must share dimensions");
    require_finite(fields_[i], "TabulatedScorePrior field");
  }
}

TabulatedScorePrior TabulatedScorePrior::load(const std::string& path) {
  io::PriorFile file = io::load_prior(path);
  return TabulatedScorePrior(std::move(file.sigmas), std::move(file.fields));
}

Image2D TabulatedScorePrior::score(const Image2D& x, double sigma) const {
  if (!x.same_dims(fields_.front()))
    throw ValidationError("TabulatedScorePrior: input dims do not match tabulated fields");
  if (!(sigma > 0.0)) throw ValidationError("TabulatedScorePrior: sigma must be > 0");
  const double target = std::log(sigma);
  std::size_t best = 0;
  double best_dist = std::abs(std::log(sigmas_[0]) - target);
  for (std::size_t i = 1; i < sigmas_.size(); ++i) {
    const double d = std::abs(std::log(sigmas_[i]) - target);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return fields_[best];
}

Image2D forward_perturb(const Image2D& x0, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ValidationError("forward_perturb: sigma must be >= 0");
  Image2D out = x0;
  if (sigma == 0.0) return out;
  std::vector<double> z(out.size());
  fill_standard_normal(z.data(), z.size(), seed);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += sigma * z[i];
  return out;
}

Image2D reverse_em_step(const Image2D& x_i, std::size_t i, const NoiseSchedule& sched,
                        const ScorePrior& prior, std::uint64_t seed, bool inject_noise) {
  if (i < 1 || i > sched.n_steps)
    throw ValidationError("reverse_em_step: step index " + std::to_string(i) +
                          " outside 1.." + std::to_string(sched.n_steps));
  const double s_hi = sched.sigmas[i];
  const double s_lo = sched.sigmas[i - 1];
  const double dvar = s_hi * s_hi - s_lo * s_lo;
  Image2D score = prior.score(x_i, s_hi);
  if (!score.same_dims(x_i)) throw NumericalError("reverse_em_step: score dims mismatch");
  Image2D out = x_i;
  for (std::size_t p = 0; p < out.size(); ++p) out.data[p] += dvar * score.data[p];
  if (inject_noise) {
    const double amp = std::sqrt(dvar);
    std::vector<double> z(out.size());
    fill_standard_normal(z.data(), z.size(), seed);
    for (std::size_t p = 0; p < out.size(); ++p) out.data[p] += amp * z[p];
  }
  require_finite(out, "reverse_em_step output");
  return out;
}

std::pair<std::size_t, std::size_t> denoise_step_range(std::size_t k, std::size_t total,
                                                       std::size_t n_steps) {
  if (total == 0) throw ValidationError("denoise_step_range: total must be >= 1");
  if (k >= total) throw ValidationError("denoise_step_range: iteration index out of range");
  const std::size_t base = n_steps / total;
  const std::size_t rem = n_steps % total;
  const std::size_t offset = k * base + std::min(k, rem);
  const std::size_t count = base + (k < rem ? 1 : 0);
  return {offset, count};
}

Image2D diffusion_denoise(const Image2D& x, std::size_t k, std::size_t total,
                          const NoiseSchedule& sched, const ScorePrior& prior, std::uint64_t seed,
                          bool inject_noise) {
  const auto [offset, count] = denoise_step_range(k, total, sched.n_steps);
  Image2D out = x;
  for (std::size_t j = offset; j < offset + count; ++j) {
    const std::size_t i = sched.n_steps - j;  // descending: N, N-1, ..., 1
    out = reverse_em_step(out, i, sched, prior, mix_seed(seed, j), inject_noise);
  }
  return out;
}

}  // namespace sparsect
