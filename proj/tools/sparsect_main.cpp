// sparsect: sparse-view CT reconstruction CLI.
//
// Every numeric/string flag is forwarded as a textual override into the
// same key-value resolver the config file goes through, so a value is
// parsed and validated in exactly one place. Exit codes: 0 success,
// 1 validation/usage, 2 numerical failure, 3 io failure.

#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsect/errors.hpp"
#include "sparsect/pipeline.hpp"

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* desc;
};

constexpr FlagSpec kValueFlags[] = {
    {"--size", "size", "phantom side length in pixels"},
    {"--views", "views", "number of projection angles"},
    {"--n-det", "n_det", "detector count (0 = ceil(side*sqrt(2)))"},
    {"--slices", "slices", "number of phantom slices"},
    {"--phantom", "phantom", "shepp-logan | disks | uniform-disk"},
    {"--input", "input", "raw volume file to ingest instead of a phantom"},
    {"--input-width", "input_width", "raw input width"},
    {"--input-height", "input_height", "raw input height"},
    {"--input-slices", "input_slices", "raw input slice count"},
    {"--input-dtype", "input_dtype", "raw input element type (u8|u16le|f32le|f64le)"},
    {"--input-peak", "input_peak", "raw input value mapped to intensity 1.0"},
    {"--noise-sigma", "noise_sigma", "gaussian noise level added to projections"},
    {"--alpha", "alpha", "TV weight"},
    {"--beta", "beta", "patch nuclear-norm weight"},
    {"--rho1", "rho1", "penalty for the horizontal-gradient split"},
    {"--rho2", "rho2", "penalty for the vertical-gradient split"},
    {"--rho3", "rho3", "penalty for the patch split"},
    {"--iters", "iters", "outer iterations"},
    {"--inner", "inner", "PCG iterations per x-step"},
    {"--pcg-tol", "pcg_tol", "PCG relative-residual tolerance"},
    {"--patch", "patch", "patch side length"},
    {"--stride", "stride", "patch stride"},
    {"--sigma-min", "sigma_min", "noise schedule lower endpoint"},
    {"--sigma-max", "sigma_max", "noise schedule upper endpoint"},
    {"--steps", "steps", "noise schedule step count"},
    {"--early-stop", "early_stop", "stop when all split residuals drop below this"},
    {"--prior", "prior", "score prior: none | gaussian | file:PATH"},
    {"--gaussian-gamma", "gaussian_gamma", "width of the gaussian prior"},
    {"--seed", "seed", "root RNG seed (slice s uses seed+s)"},
    {"--threads", "threads", "worker threads (0 = hardware concurrency)"},
    {"--out", "out", "output directory"},
    {"--in", "in", "input directory for recon/eval (default: --out)"},
    {"--truth", "truth", "truth volume for eval (default: <in>/truth.vol)"},
    {"--recon", "recon", "recon volume for eval (default: <out>/recon.vol)"},
    {"--dataset", "dataset", "dataset label written into metrics.csv"},
    {"--state-in", "state_in", "checkpoint prefix to resume slices from"},
    {"--state-out", "state_out", "checkpoint prefix to write slices to"},
};

constexpr FlagSpec kBoolFlags[] = {
    {"--preset", "preset", "start from the tuned per-view-count parameters"},
    {"--no-lora", "no_lora", "disable the patch low-rank term (beta = 0)"},
    {"--no-prior", "no_prior", "disable the score prior"},
    {"--no-fft-precond", "no_fft_precond", "disable the circulant PCG preconditioner"},
};

constexpr std::size_t kNumValueFlags = std::size(kValueFlags);
constexpr std::size_t kNumBoolFlags = std::size(kBoolFlags);

struct Command {
  CLI::App* sub = nullptr;
  void (*run)(const sparsect::PipelineConfig&) = nullptr;
  std::string config;
  std::vector<std::string> values;
  std::vector<CLI::Option*> value_opts;
  std::vector<CLI::Option*> bool_opts;
};

void bind_flags(Command& cmd) {
  cmd.sub->add_option("--config", cmd.config, "flat key-value config file");
  cmd.values.resize(kNumValueFlags);
  cmd.value_opts.reserve(kNumValueFlags);
  for (std::size_t i = 0; i < kNumValueFlags; ++i)
    cmd.value_opts.push_back(
        cmd.sub->add_option(kValueFlags[i].flag, cmd.values[i], kValueFlags[i].desc));
  cmd.bool_opts.reserve(kNumBoolFlags);
  for (const FlagSpec& f : kBoolFlags) cmd.bool_opts.push_back(cmd.sub->add_flag(f.flag, f.desc));
}

std::map<std::string, std::string> collect_overrides(const Command& cmd) {
  std::map<std::string, std::string> overrides;
  for (std::size_t i = 0; i < kNumValueFlags; ++i)
    if (cmd.value_opts[i]->count() > 0) overrides[kValueFlags[i].key] = cmd.values[i];
  for (std::size_t i = 0; i < kNumBoolFlags; ++i)
    if (cmd.bool_opts[i]->count() > 0) overrides[kBoolFlags[i].key] = "true";
  return overrides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-view CT reconstruction: TV + patch low-rank + diffusion-prior ADMM"};
  app.require_subcommand(1);

  Command commands[4];
  commands[0].sub = app.add_subcommand("simulate", "synthesize or ingest a volume and project it");
  commands[0].run = sparsect::run_simulate;
  commands[1].sub = app.add_subcommand("recon", "reconstruct every slice_*.sino in the input directory");
  commands[1].run = sparsect::run_recon;
  commands[2].sub = app.add_subcommand("eval", "compare a reconstruction against the truth volume");
  commands[2].run = sparsect::run_eval;
  commands[3].sub = app.add_subcommand("bench", "time the solver variants and the x-step solvers");
  commands[3].run = sparsect::run_bench;
  for (Command& cmd : commands) bind_flags(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const Command& cmd : commands) {
    if (!cmd.sub->parsed()) continue;
    try {
      std::map<std::string, std::string> file_entries;
      if (!cmd.config.empty()) file_entries = sparsect::parse_config_file(cmd.config);
      const sparsect::PipelineConfig cfg =
          sparsect::resolve_config(file_entries, collect_overrides(cmd));
      cmd.run(cfg);
      return 0;
    } catch (const sparsect::ValidationError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const sparsect::NumericalError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const sparsect::IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
