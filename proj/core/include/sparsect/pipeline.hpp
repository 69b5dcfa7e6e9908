#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sparsect/admm.hpp"

namespace sparsect {

/// Resolved settings for one CLI command, merged from a flat key-value
/// config file and command-line flag overrides (flags win). Every key is
/// validated on parse; unknown keys are rejected. The full key list is
/// documented in the README.
struct PipelineConfig {
  // geometry / simulation
  std::size_t size = 64;
  std::size_t views = 8;
  std::size_t n_det = 0;  // 0 = ceil(side * sqrt(2))
  std::size_t slices = 1;
  std::string phantom = "shepp-logan";
  std::string input;  // raw volume to ingest; empty = synthesize phantom
  std::size_t input_width = 0, input_height = 0, input_slices = 0;
  std::string input_dtype = "u16le";
  double input_peak = 65535.0;
  double noise_sigma = 0.0;

  // solver
  double alpha = 0.04;
  double beta = 0.02;
  double rho1 = 10.0, rho2 = 10.0, rho3 = 1.0;
  std::size_t iters = 200;
  std::size_t inner = 1;
  double pcg_tol = 1e-6;
  std::size_t patch = 16;
  std::size_t stride = 16;
  double sigma_min = 0.01, sigma_max = 50.0;
  std::size_t steps = 2000;
  bool preset = false;  // start from the tuned per-view preset, then override
  double early_stop = 0.0;

  // prior / ablation switches
  std::string prior = "none";  // none | gaussian | file:PATH
  double gaussian_gamma = 0.1;
  bool no_lora = false;
  bool no_prior = false;
  bool no_fft_precond = false;

  // execution / io
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::string out = "out";
  std::string in;      // recon/eval input dir; empty = `out`
  std::string truth;   // eval truth volume; empty = <in>/truth.vol
  std::string recon;   // eval recon volume; empty = <out>/recon.vol
  std::string dataset = "synthetic";
  std::string state_in;   // checkpoint prefix to resume each slice from
  std::string state_out;  // checkpoint prefix to write each slice to

  void validate() const;
};

/// Parses a config file into key-value pairs (blank lines and '#' comments
/// skipped, duplicate keys rejected).
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Builds the resolved config: defaults, then the tuned preset when
/// requested, then file entries, then flag overrides. Unknown or malformed
/// keys throw.
PipelineConfig resolve_config(const std::map<std::string, std::string>& file_entries,
                              const std::map<std::string, std::string>& flag_overrides);

/// Fixed-order (key, value) rendering of a resolved config; the manifest
/// and tests rely on it being deterministic.
std::vector<std::pair<std::string, std::string>> config_key_values(const PipelineConfig& cfg);

/// Solver settings implied by the pipeline config (per-slice seed is filled
/// in by the caller); applies no_lora and no_fft_precond.
AdmmConfig admm_config_from(const PipelineConfig& cfg);

/// Commands. Each writes its outputs plus a manifest_<command>.txt holding
/// the resolved config into the output directory.
void run_simulate(const PipelineConfig& cfg);
void run_recon(const PipelineConfig& cfg);
void run_eval(const PipelineConfig& cfg);
void run_bench(const PipelineConfig& cfg);

}  // namespace sparsect
