#include "sparsect/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "sparsect/errors.hpp"
#include "sparsect/fbp.hpp"
#include "sparsect/io.hpp"
#include "sparsect/metrics.hpp"
#include "sparsect/phantom.hpp"
#include "sparsect/priors.hpp"

namespace fs = std::filesystem;

namespace sparsect {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::size_t parse_size_value(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': expected an unsigned integer, got '" + text +
                          "'");
  }
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& text) {
  return parse_size_value(key, text);
}

double parse_double_value(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': expected a finite number, got '" + text +
                          "'");
  }
}

bool parse_bool_value(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError("config key '" + key + "': expected true/false, got '" + text + "'");
}

void apply_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "size") cfg.size = parse_size_value(key, value);
  else if (key == "views") cfg.views = parse_size_value(key, value);
  else if (key == "n_det") cfg.n_det = parse_size_value(key, value);
  else if (key == "slices") cfg.slices = parse_size_value(key, value);
  else if (key == "phantom") cfg.phantom = value;
  else if (key == "input") cfg.input = value;
  else if (key == "input_width") cfg.input_width = parse_size_value(key, value);
  else if (key == "input_height") cfg.input_height = parse_size_value(key, value);
  else if (key == "input_slices") cfg.input_slices = parse_size_value(key, value);
  else if (key == "input_dtype") cfg.input_dtype = value;
  else if (key == "input_peak") cfg.input_peak = parse_double_value(key, value);
  else if (key == "noise_sigma") cfg.noise_sigma = parse_double_value(key, value);
  else if (key == "alpha") cfg.alpha = parse_double_value(key, value);
  else if (key == "beta") cfg.beta = parse_double_value(key, value);
  else if (key == "rho1") cfg.rho1 = parse_double_value(key, value);
  else if (key == "rho2") cfg.rho2 = parse_double_value(key, value);
  else if (key == "rho3") cfg.rho3 = parse_double_value(key, value);
  else if (key == "iters") cfg.iters = parse_size_value(key, value);
  else if (key == "inner") cfg.inner = parse_size_value(key, value);
  else if (key == "pcg_tol") cfg.pcg_tol = parse_double_value(key, value);
  else if (key == "patch") cfg.patch = parse_size_value(key, value);
  else if (key == "stride") cfg.stride = parse_size_value(key, value);
  else if (key == "sigma_min") cfg.sigma_min = parse_double_value(key, value);
  else if (key == "sigma_max") cfg.sigma_max = parse_double_value(key, value);
  else if (key == "steps") cfg.steps = parse_size_value(key, value);
  else if (key == "preset") cfg.preset = parse_bool_value(key, value);
  else if (key == "early_stop") cfg.early_stop = parse_double_value(key, value);
  else if (key == "prior") cfg.prior = value;
  else if (key == "gaussian_gamma") cfg.gaussian_gamma = parse_double_value(key, value);
  else if (key == "no_lora") cfg.no_lora = parse_bool_value(key, value);
  else if (key == "no_prior") cfg.no_prior = parse_bool_value(key, value);
  else if (key == "no_fft_precond") cfg.no_fft_precond = parse_bool_value(key, value);
  else if (key == "seed") cfg.seed = parse_u64_value(key, value);
  else if (key == "threads") cfg.threads = parse_size_value(key, value);
  else if (key == "out") cfg.out = value;
  else if (key == "in") cfg.in = value;
  else if (key == "truth") cfg.truth = value;
  else if (key == "recon") cfg.recon = value;
  else if (key == "dataset") cfg.dataset = value;
  else if (key == "state_in") cfg.state_in = value;
  else if (key == "state_out") cfg.state_out = value;
  else throw ValidationError("unknown config key '" + key + "'");
}

std::string slice_path(const std::string& dir, std::size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "/slice_%04zu.sino", s);
  return dir + buf;
}

std::string history_path(const std::string& dir, std::size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "/history_%04zu.csv", s);
  return dir + buf;
}

std::string preview_path(const std::string& dir, std::size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "/preview_%04zu.pgm", s);
  return dir + buf;
}

std::string state_path(const std::string& prefix, std::size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04zu.ckpt", s);
  return prefix + buf;
}

void write_manifest(const std::string& dir, const std::string& command,
                    const PipelineConfig& cfg) {
  const std::string path = dir + "/manifest_" + command + ".txt";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "command " << command << "\n";
  for (const auto& [k, v] : config_key_values(cfg)) os << k << " " << v << "\n";
  os.flush();
  if (!os) throw IoError("write failed for " + path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void PipelineConfig::validate() const {
  if (views < 1) throw ValidationError("config: views must be >= 1");
  if (alpha < 0.0 || beta < 0.0) throw ValidationError("config: alpha and beta must be >= 0");
  if (!(rho1 > 0.0) || !(rho2 > 0.0) || !(rho3 > 0.0))
    throw ValidationError("config: rho1, rho2, rho3 must be > 0");
  if (inner < 1) throw ValidationError("config: inner must be >= 1");
  if (!(pcg_tol > 0.0)) throw ValidationError("config: pcg_tol must be > 0");
  if (patch < 1 || stride < 1) throw ValidationError("config: patch and stride must be >= 1");
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
    throw ValidationError("config: need 0 < sigma_min < sigma_max");
  if (steps < 1) throw ValidationError("config: steps must be >= 1");
  if (noise_sigma < 0.0) throw ValidationError("config: noise_sigma must be >= 0");
  if (!(gaussian_gamma > 0.0)) throw ValidationError("config: gaussian_gamma must be > 0");
  if (early_stop < 0.0) throw ValidationError("config: early_stop must be >= 0");
  if (!(input_peak > 0.0)) throw ValidationError("config: input_peak must be > 0");
  if (prior != "none" && prior != "gaussian" && prior.rfind("file:", 0) != 0)
    throw ValidationError("config: prior must be none, gaussian or file:PATH");
  if (prior.rfind("file:", 0) == 0 && prior.size() == 5)
    throw ValidationError("config: prior file path is empty");
  if (!input.empty()) {
    if (input_width < 1 || input_height < 1 || input_slices < 1)
      throw ValidationError("config: input_width/input_height/input_slices must be set for raw input");
    parse_element_type(input_dtype);
  } else {
    if (size < 16) throw ValidationError("config: size must be >= 16");
    if (slices < 1) throw ValidationError("config: slices must be >= 1");
    parse_phantom_kind(phantom);
  }
  if (dataset.empty()) throw ValidationError("config: dataset label must not be empty");
  if (out.empty()) throw ValidationError("config: out directory must not be empty");
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path);
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto sep = t.find_first_of(" \t");
    if (sep == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected 'key value'");
    const std::string key = t.substr(0, sep);
    const std::string value = trim(t.substr(sep + 1));
    if (value.empty())
      throw ValidationError(path + ":" + std::to_string(lineno) + ": empty value for '" + key +
                            "'");
    if (!entries.emplace(key, value).second)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                            "'");
  }
  return entries;
}

PipelineConfig resolve_config(const std::map<std::string, std::string>& file_entries,
                              const std::map<std::string, std::string>& flag_overrides) {
  std::map<std::string, std::string> merged = file_entries;
  for (const auto& [k, v] : flag_overrides) merged[k] = v;

  PipelineConfig cfg;
  bool use_preset = false;
  if (const auto it = merged.find("preset"); it != merged.end())
    use_preset = parse_bool_value("preset", it->second);
  if (use_preset) {
    std::size_t views = cfg.views;
    if (const auto it = merged.find("views"); it != merged.end())
      views = parse_size_value("views", it->second);
    const AdmmConfig p = preset_for_views(views);
    cfg.alpha = p.alpha;
    cfg.beta = p.beta;
    cfg.rho1 = p.rho1;
    cfg.rho2 = p.rho2;
    cfg.rho3 = p.rho3;
  }
  for (const auto& [k, v] : merged) apply_key(cfg, k, v);
  cfg.validate();
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_key_values(const PipelineConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  const auto add = [&kv](const char* k, std::string v) { kv.emplace_back(k, std::move(v)); };
  add("size", std::to_string(cfg.size));
  add("views", std::to_string(cfg.views));
  add("n_det", std::to_string(cfg.n_det));
  add("slices", std::to_string(cfg.slices));
  add("phantom", cfg.phantom);
  add("input", cfg.input);
  add("input_width", std::to_string(cfg.input_width));
  add("input_height", std::to_string(cfg.input_height));
  add("input_slices", std::to_string(cfg.input_slices));
  add("input_dtype", cfg.input_dtype);
  add("input_peak", fmt_double(cfg.input_peak));
  add("noise_sigma", fmt_double(cfg.noise_sigma));
  add("alpha", fmt_double(cfg.alpha));
  add("beta", fmt_double(cfg.beta));
  add("rho1", fmt_double(cfg.rho1));
  add("rho2", fmt_double(cfg.rho2));
  add("rho3", fmt_double(cfg.rho3));
  add("iters", std::to_string(cfg.iters));
  add("inner", std::to_string(cfg.inner));
  add("pcg_tol", fmt_double(cfg.pcg_tol));
  add("patch", std::to_string(cfg.patch));
  add("stride", std::to_string(cfg.stride));
  add("sigma_min", fmt_double(cfg.sigma_min));
  add("sigma_max", fmt_double(cfg.sigma_max));
  add("steps", std::to_string(cfg.steps));
  add("preset", cfg.preset ? "true" : "false");
  add("early_stop", fmt_double(cfg.early_stop));
  add("prior", cfg.prior);
  add("gaussian_gamma", fmt_double(cfg.gaussian_gamma));
  add("no_lora", cfg.no_lora ? "true" : "false");
  add("no_prior", cfg.no_prior ? "true" : "false");
  add("no_fft_precond", cfg.no_fft_precond ? "true" : "false");
  add("seed", std::to_string(cfg.seed));
  add("threads", std::to_string(cfg.threads));
  add("out", cfg.out);
  add("in", cfg.in);
  add("truth", cfg.truth);
  add("recon", cfg.recon);
  add("dataset", cfg.dataset);
  add("state_in", cfg.state_in);
  add("state_out", cfg.state_out);
  return kv;
}

AdmmConfig admm_config_from(const PipelineConfig& cfg) {
  AdmmConfig a;
  a.alpha = cfg.alpha;
  a.beta = cfg.no_lora ? 0.0 : cfg.beta;
  a.rho1 = cfg.rho1;
  a.rho2 = cfg.rho2;
  a.rho3 = cfg.rho3;
  a.n_outer = cfg.iters;
  a.pcg_inner = cfg.inner;
  a.pcg_tol = cfg.pcg_tol;
  a.patch_w = a.patch_h = cfg.patch;
  a.stride_x = a.stride_y = cfg.stride;
  a.sigma_min = cfg.sigma_min;
  a.sigma_max = cfg.sigma_max;
  a.n_steps = cfg.steps;
  a.seed = cfg.seed;
  a.use_fft_precond = !cfg.no_fft_precond;
  a.early_stop_residual = cfg.early_stop;
  return a;
}

void run_simulate(const PipelineConfig& cfg0) {
  PipelineConfig cfg = cfg0;
  Volume3D truth;
  if (cfg.input.empty()) {
    truth = gen_phantom_volume(parse_phantom_kind(cfg.phantom), cfg.size, cfg.slices, cfg.seed);
  } else {
    truth = ingest_volume(cfg.input, cfg.input_width, cfg.input_height, cfg.input_slices,
                          parse_element_type(cfg.input_dtype), cfg.input_peak);
  }
  cfg.size = truth.width;
  cfg.slices = truth.slices;
  if (cfg.n_det == 0) cfg.n_det = default_detector_count(std::max(truth.width, truth.height));
  const ProjectionOperator op(truth.width, truth.height, make_angles(cfg.views), cfg.n_det);

  fs::create_directories(cfg.out);
  io::save_volume(cfg.out + "/truth.vol", truth);
  for (std::size_t s = 0; s < truth.slices; ++s) {
    Sinogram sino = op.forward(truth.slice(s));
    if (cfg.noise_sigma > 0.0) sino = add_projection_noise(sino, cfg.noise_sigma, cfg.seed + s);
    io::save_sinogram(slice_path(cfg.out, s), sino, truth.width, truth.height);
  }
  write_manifest(cfg.out, "simulate", cfg);
  std::cout << "simulate: wrote " << truth.slices << " sinogram(s) (" << cfg.views << " views x "
            << cfg.n_det << " detectors) and truth volume to " << cfg.out << "\n";
}

void run_recon(const PipelineConfig& cfg) {
  const std::string in_dir = cfg.in.empty() ? cfg.out : cfg.in;
  std::vector<io::SinogramFile> sinos;
  for (std::size_t s = 0;; ++s) {
    const std::string p = slice_path(in_dir, s);
    if (!fs::exists(p)) break;
    sinos.push_back(io::load_sinogram(p));
  }
  if (sinos.empty())
    throw IoError("no sinogram files (slice_0000.sino, ...) found in " + in_dir);
  const io::SinogramFile& first = sinos.front();
  for (const io::SinogramFile& sf : sinos)
    if (sf.width != first.width || sf.height != first.height ||
        sf.sinogram.n_det != first.sinogram.n_det ||
        sf.sinogram.angles.angles != first.sinogram.angles.angles)
      throw ValidationError("sinogram slices in " + in_dir + " disagree on geometry");

  const ProjectionOperator op(first.width, first.height, first.sinogram.angles,
                              first.sinogram.n_det);

  std::optional<Volume3D> truth;
  const std::string truth_path = cfg.truth.empty() ? in_dir + "/truth.vol" : cfg.truth;
  if (!cfg.truth.empty() || fs::exists(truth_path)) truth = io::load_volume(truth_path);
  if (truth && (truth->width != first.width || truth->height != first.height ||
                truth->slices != sinos.size()))
    throw ValidationError("truth volume dims do not match the sinogram slices");

  std::optional<TabulatedScorePrior> tabulated;
  if (!cfg.no_prior && cfg.prior.rfind("file:", 0) == 0)
    tabulated.emplace(TabulatedScorePrior::load(cfg.prior.substr(5)));
  const NoOpPrior noop;

  fs::create_directories(cfg.out);
  const std::size_t n_slices = sinos.size();
  Volume3D recon(first.width, first.height, n_slices, 1.0);
  const AdmmConfig base = admm_config_from(cfg);

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  const auto work = [&]() {
    for (;;) {
      const std::size_t s = next.fetch_add(1);
      if (s >= n_slices) return;
      try {
        AdmmConfig acfg = base;
        acfg.seed = cfg.seed + s;
        const Sinogram& sino = sinos[s].sinogram;
        Image2D ref;
        const Image2D* refp = nullptr;
        if (truth) {
          ref = truth->slice(s);
          refp = &ref;
        }
        std::optional<GaussianAnalyticPrior> gauss;
        const ScorePrior* prior = &noop;
        if (!cfg.no_prior) {
          if (cfg.prior == "gaussian") {
            gauss.emplace(fbp_reconstruct(sino, first.width, first.height), cfg.gaussian_gamma);
            prior = &*gauss;
          } else if (tabulated) {
            prior = &*tabulated;
          }
        }
        const AdmmSolver solver(op, sino, acfg, *prior, refp);
        AdmmState state = cfg.state_in.empty() ? solver.initial_state()
                                               : io::load_state(state_path(cfg.state_in, s));
        while (state.iteration < acfg.n_outer) {
          solver.iterate(state);
          if (acfg.early_stop_residual > 0.0) {
            const IterationRecord& r = state.history.back();
            if (r.r_vx < acfg.early_stop_residual && r.r_vy < acfg.early_stop_residual &&
                r.r_z < acfg.early_stop_residual)
              break;
          }
        }
        if (!cfg.state_out.empty()) io::save_state(state_path(cfg.state_out, s), state);
        io::write_history_csv(history_path(cfg.out, s), state.history);
        io::write_pgm16(preview_path(cfg.out, s), state.x, 1.0);
        {
          const std::lock_guard<std::mutex> lk(mu);
          recon.set_slice(s, state.x);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lk(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::size_t n_workers = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  if (n_workers == 0) n_workers = 1;
  n_workers = std::min(n_workers, n_slices);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  io::save_volume(cfg.out + "/recon.vol", recon);
  write_manifest(cfg.out, "recon", cfg);
  std::cout << "recon: solved " << n_slices << " slice(s) x " << base.n_outer
            << " iteration(s), wrote " << cfg.out << "/recon.vol\n";
}

void run_eval(const PipelineConfig& cfg) {
  const std::string in_dir = cfg.in.empty() ? cfg.out : cfg.in;
  const std::string truth_path = cfg.truth.empty() ? in_dir + "/truth.vol" : cfg.truth;
  const std::string recon_path = cfg.recon.empty() ? cfg.out + "/recon.vol" : cfg.recon;
  const Volume3D truth = io::load_volume(truth_path);
  const Volume3D recon = io::load_volume(recon_path);
  const std::vector<PlaneMetrics> rows = evaluate_volume(recon, truth);

  fs::create_directories(cfg.out);
  const std::string csv_path = cfg.out + "/metrics.csv";
  std::ofstream os(csv_path, std::ios::binary);
  if (!os) throw IoError("cannot open " + csv_path + " for writing");
  os << "dataset,n_view,plane,psnr,ssim\n";
  for (const PlaneMetrics& pm : rows)
    os << cfg.dataset << ',' << cfg.views << ',' << pm.plane << ','
       << io::format_metric(pm.psnr) << ',' << io::format_metric(pm.ssim) << "\n";
  os.flush();
  if (!os) throw IoError("write failed for " + csv_path);
  write_manifest(cfg.out, "eval", cfg);
  for (const PlaneMetrics& pm : rows)
    std::cout << "eval: " << pm.plane << " psnr=" << io::format_metric(pm.psnr)
              << " ssim=" << io::format_metric(pm.ssim) << "\n";
}

void run_bench(const PipelineConfig& cfg0) {
  PipelineConfig cfg = cfg0;
  const Image2D truth = gen_phantom(parse_phantom_kind(cfg.phantom), cfg.size, cfg.seed);
  if (cfg.n_det == 0) cfg.n_det = default_detector_count(cfg.size);
  const ProjectionOperator op(cfg.size, cfg.size, make_angles(cfg.views), cfg.n_det);
  Sinogram sino = op.forward(truth);
  if (cfg.noise_sigma > 0.0) sino = add_projection_noise(sino, cfg.noise_sigma, cfg.seed);

  AdmmConfig base = admm_config_from(cfg);
  base.beta = cfg.beta;          // the variant matrix applies the ablations itself
  base.use_fft_precond = true;
  const Image2D fbp = fbp_reconstruct(sino, cfg.size, cfg.size);
  const GaussianAnalyticPrior gauss(fbp, cfg.gaussian_gamma);
  const NoOpPrior noop;

  struct Variant {
    const char* name;
    AdmmConfig acfg;
    const ScorePrior* prior;
  };
  std::vector<Variant> variants;
  variants.push_back({"full", base, &gauss});
  {
    AdmmConfig c = base;
    c.beta = 0.0;
    variants.push_back({"no_lora", c, &gauss});
  }
  variants.push_back({"no_prior", base, &noop});
  {
    AdmmConfig c = base;
    c.use_fft_precond = false;
    variants.push_back({"no_fft_precond", c, &gauss});
  }

  fs::create_directories(cfg.out);
  const std::string var_path = cfg.out + "/bench_variants.csv";
  std::ofstream vs(var_path, std::ios::binary);
  if (!vs) throw IoError("cannot open " + var_path + " for writing");
  vs << "variant,psnr,ssim,t_denoise_ms,t_x_ms,t_v_ms,t_z_ms,t_u_ms,total_s\n";
  for (const Variant& var : variants) {
    const auto t0 = std::chrono::steady_clock::now();
    const AdmmSolver solver(op, sino, var.acfg, *var.prior, &truth);
    const ReconReport rep = solver.reconstruct();
    const double total = seconds_since(t0);
    double td = 0, tx = 0, tv = 0, tz = 0, tu = 0;
    for (const IterationRecord& r : rep.history) {
      td += r.t_denoise;
      tx += r.t_x;
      tv += r.t_v;
      tz += r.t_z;
      tu += r.t_u;
    }
    const double n = rep.history.empty() ? 1.0 : static_cast<double>(rep.history.size());
    const double p = psnr(rep.image, truth, 1.0);
    const double s = ssim(rep.image, truth, 1.0);
    vs << var.name << ',' << io::format_metric(p) << ',' << io::format_metric(s) << ','
       << io::format_metric(1e3 * td / n) << ',' << io::format_metric(1e3 * tx / n) << ','
       << io::format_metric(1e3 * tv / n) << ',' << io::format_metric(1e3 * tz / n) << ','
       << io::format_metric(1e3 * tu / n) << ',' << io::format_metric(total) << "\n";
    std::cout << "bench: " << var.name << " psnr=" << io::format_metric(p)
              << " ssim=" << io::format_metric(s) << " total=" << io::format_metric(total)
              << "s\n";
  }
  vs.flush();
  if (!vs) throw IoError("write failed for " + var_path);

  // x-step solved to tolerance, preconditioned vs plain (best of 3 runs).
  const XStepOperator xop(&op, base.rho1, base.rho2, base.rho3, cfg.size, cfg.size);
  const CirculantPreconditioner precond(cfg.size, cfg.size, estimate_ata_scale(op), base.rho1,
                                        base.rho2, base.rho3);
  const Image2D rhs = op.adjoint(sino);
  const Image2D x0(cfg.size, cfg.size, 0.0);
  const auto time_solve = [&](const CirculantPreconditioner* pre, std::size_t& iters) {
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const PcgResult r = pcg_solve(xop, rhs, x0, 10000, base.pcg_tol, pre);
      best = std::min(best, seconds_since(t0));
      iters = r.iterations;
    }
    return best;
  };
  std::size_t it_fft = 0, it_plain = 0;
  const double t_fft = time_solve(&precond, it_fft);
  const double t_plain = time_solve(nullptr, it_plain);
  const std::string x_path = cfg.out + "/bench_xstep.csv";
  std::ofstream xs(x_path, std::ios::binary);
  if (!xs) throw IoError("cannot open " + x_path + " for writing");
  xs << "method,iterations,seconds\n";
  xs << "fft_pcg," << it_fft << ',' << io::format_metric(t_fft) << "\n";
  xs << "plain_cg," << it_plain << ',' << io::format_metric(t_plain) << "\n";
  xs.flush();
  if (!xs) throw IoError("write failed for " + x_path);
  std::cout << "bench: x-step to " << io::format_metric(base.pcg_tol) << ": fft_pcg " << it_fft
            << " iters / " << io::format_metric(t_fft) << "s, plain_cg " << it_plain
            << " iters / " << io::format_metric(t_plain) << "s\n";

  write_manifest(cfg.out, "bench", cfg);
}

}  // namespace sparsect
