#include "foe/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "foe/bench.hpp"
#include "foe/energy.hpp"
#include "foe/errors.hpp"
#include "foe/image.hpp"
#include "foe/model.hpp"
#include "foe/rng.hpp"
#include "foe/solver.hpp"

namespace foe {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spill(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void print_kv(const char* key, const std::string& value) {
  std::printf("%s %s\n", key, value.c_str());
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) items.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) items.push_back(current);
  return items;
}

struct ModelFlags {
  std::string file;
  std::string builtin;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  auto* file_opt = cmd->add_option("--model", flags.file, "Path to a model file");
  auto* builtin_opt =
      cmd->add_option("--builtin", flags.builtin, "Builtin filter bank name (diff2x2)");
  file_opt->excludes(builtin_opt);
  builtin_opt->excludes(file_opt);
}

FoeModel load_model(const ModelFlags& flags) {
  if (!flags.file.empty()) return parse_model(slurp(flags.file));
  if (!flags.builtin.empty()) return builtin_model(flags.builtin);
  throw std::invalid_argument("exactly one of --model or --builtin is required");
}

void add_lm_flags(CLI::App* cmd, LmOptions& lm) {
  cmd->add_option("--max-iters", lm.max_iterations, "Iteration cap (default 100)");
  cmd->add_option("--function-tol", lm.function_tolerance,
                  "Stop when an accepted step's relative decrease falls below this (default 1e-6)");
  cmd->add_option("--gradient-tol", lm.gradient_tolerance,
                  "Stop when the gradient max-norm falls below this fraction of its "
                  "initial value (default 1e-10)");
  cmd->add_option("--initial-damping", lm.initial_damping, "Starting damping (default 1e-4)");
  cmd->add_option("--linear-tol", lm.linear_tolerance,
                  "Inner linear-solver tolerance (default 1e-9)");
}

void add_threads_flag(CLI::App* cmd, int& threads) {
  cmd->add_option("--threads", threads,
                  "Thread count; accepted for interface stability, execution is single-threaded");
}

std::size_t count_out_of_range(const std::vector<double>& values) {
  std::size_t n = 0;
  for (double v : values) {
    if (v < -0.5 || v >= 255.5) ++n;
  }
  return n;
}

int cmd_add_noise(const std::string& in, const std::string& out, double sigma,
                  std::uint64_t seed, bool clamp) {
  const Image input = read_pgm_file(in);
  const Image noisy = add_gaussian_noise(input, {sigma, seed});
  const std::size_t clamped = count_out_of_range(noisy.data);
  if (clamped > 0 && !clamp) {
    std::fprintf(stderr, "warning: %zu pixel(s) outside [0,255]; clamped for PGM output\n",
                 clamped);
  }
  write_pgm_file(clamp_round(noisy), out);
  return 0;
}

int cmd_denoise(const std::string& in, const std::string& out, const FoeModel& model,
                double sigma, bool round_output, const LmOptions& lm,
                const std::string& report_path) {
  const Image noisy = read_pgm_file(in);
  const Problem problem{noisy, model, sigma};
  validate_problem(problem);

  const auto [solution, report] = lm_denoise(problem, noisy, lm);
  const Image rounded = clamp_round(solution);
  const double quantized = energy(problem, rounded).total;

  print_kv("initial_objective", fmt(report.initial_objective));
  print_kv("iterations", std::to_string(report.iterations.size()));
  print_kv("accepted", std::to_string(report.accepted_count()));
  print_kv("termination", termination_name(report.termination));
  print_kv("wall_seconds", fmt(report.wall_seconds, "%.6f"));
  if (round_output) {
    const double gap = (quantized - report.final_objective) /
                       std::max(std::fabs(report.final_objective), 1e-300);
    print_kv("continuous_objective", fmt(report.final_objective));
    print_kv("rounded_objective", fmt(quantized));
    print_kv("rounding_gap_rel", fmt(gap));
  } else {
    const std::size_t clamped = count_out_of_range(solution.data);
    if (clamped > 0) {
      std::fprintf(stderr, "warning: %zu pixel(s) outside [0,255]; clamped for PGM output\n",
                   clamped);
    }
  }
  // The written file is quantized, so the reported final objective is the
  // quantized image's energy: evaluating the output file reproduces it.
  print_kv("final_objective", fmt(quantized));

  write_pgm_file(rounded, out);
  if (!report_path.empty()) spill(report_path, report_to_csv(report));
  return 0;
}

int cmd_energy(const std::string& noisy_path, const std::string& candidate_path,
               const FoeModel& model, double sigma) {
  const Image noisy = read_pgm_file(noisy_path);
  const Image candidate = read_pgm_file(candidate_path);
  if (candidate.width != noisy.width || candidate.height != noisy.height) {
    throw std::invalid_argument("image dimensions differ");
  }
  const Problem problem{noisy, model, sigma};
  validate_problem(problem);
  const EnergyBreakdown e = energy(problem, candidate);
  print_kv("data", fmt(e.data_term));
  print_kv("prior", fmt(e.prior_term));
  print_kv("total", fmt(e.total));
  return 0;
}

int cmd_psnr(const std::string& a_path, const std::string& b_path) {
  const double value = psnr(read_pgm_file(a_path), read_pgm_file(b_path));
  print_kv("psnr_db", std::isinf(value) ? "inf" : fmt(value));
  return 0;
}

int cmd_benchmark(const std::string& in, const FoeModel& model, double sigma,
                  const std::vector<double>& scales, std::uint64_t seed, const LmOptions& lm,
                  const std::string& csv_path) {
  const Image base = read_pgm_file(in);
  std::string csv = "pixels,seconds,final_objective,iterations\n";
  std::vector<double> pixel_counts;
  std::vector<double> times;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const Image resized = resize_scale(base, scales[i]);
    const Image noisy = add_gaussian_noise(resized, {sigma, mix_seed(seed, i)});
    const Problem problem{noisy, model, sigma};
    const auto [solution, report] = lm_denoise(problem, noisy, lm);
    (void)solution;

    const long long pixels = static_cast<long long>(resized.width) * resized.height;
    pixel_counts.push_back(static_cast<double>(pixels));
    times.push_back(report.wall_seconds);
    csv += std::to_string(pixels) + ',';
    csv += fmt(report.wall_seconds, "%.6f") + ',';
    csv += fmt(report.final_objective, "%.17g") + ',';
    csv += std::to_string(report.iterations.size()) + '\n';
  }
  spill(csv_path, csv);

  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    mean_x += pixel_counts[i];
    mean_y += times[i];
  }
  mean_x /= static_cast<double>(times.size());
  mean_y /= static_cast<double>(times.size());
  double cov = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    cov += (pixel_counts[i] - mean_x) * (times[i] - mean_y);
    var += (pixel_counts[i] - mean_x) * (pixel_counts[i] - mean_x);
  }
  const double slope = var > 0.0 ? cov / var : times[0] / pixel_counts[0];

  double min_per_pixel = times[0] / pixel_counts[0];
  double max_per_pixel = min_per_pixel;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double per_pixel = times[i] / pixel_counts[i];
    min_per_pixel = std::min(min_per_pixel, per_pixel);
    max_per_pixel = std::max(max_per_pixel, per_pixel);
  }
  const double ratio = min_per_pixel > 0.0
                           ? max_per_pixel / min_per_pixel
                           : std::numeric_limits<double>::infinity();

  print_kv("slope_seconds_per_pixel", fmt(slope, "%.6g"));
  print_kv("per_pixel_ratio", std::isinf(ratio) ? "inf" : fmt(ratio, "%.6g"));
  return 0;
}

int cmd_check_grad(const FoeModel& model, int width, int height, int trials,
                   std::uint64_t seed, double sigma, double h, bool inject) {
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    Image noisy(width, height);
    for (double& v : noisy.data) v = rng.next_uniform(0.0, 255.0);
    Image x(width, height);
    for (double& v : x.data) v = rng.next_uniform(0.0, 255.0);
    const Problem problem{noisy, model, sigma};
    validate_problem(problem);

    double err;
    if (inject) {
      std::vector<double> analytic = gradient(problem, x);
      analytic[0] += 1.0 + std::fabs(analytic[0]);
      err = check_gradient_against(problem, x, h, analytic);
    } else {
      err = check_gradient(problem, x, h);
    }
    worst = std::max(worst, err);
  }
  print_kv("worst_relative_error", fmt(worst, "%.6g"));
  return worst > 1e-4 ? 1 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"MAP image denoising with a filter-bank prior, solved as robust least squares"};
  app.require_subcommand(1);

  struct {
    std::string in, out;
    double sigma = 20.0;
    std::uint64_t seed = 0;
    bool clamp = false;
  } an;
  auto* add_noise = app.add_subcommand("add-noise", "Add seeded Gaussian noise to a PGM image");
  add_noise->add_option("input", an.in, "Input PGM")->required();
  add_noise->add_option("output", an.out, "Output PGM")->required();
  add_noise->add_option("--sigma", an.sigma, "Noise standard deviation")
      ->required()
      ->check(CLI::PositiveNumber);
  add_noise->add_option("--seed", an.seed, "PRNG seed (default 0)");
  add_noise->add_flag("--clamp", an.clamp, "Clamp to [0,255] without warning");

  struct {
    std::string in, out, report;
    ModelFlags model;
    double sigma = 20.0;
    bool round = false;
    LmOptions lm;
    int threads = 1;
  } dn;
  auto* denoise = app.add_subcommand("denoise", "Denoise a PGM image");
  denoise->add_option("input", dn.in, "Noisy input PGM (also the initial point)")->required();
  denoise->add_option("output", dn.out, "Denoised output PGM")->required();
  add_model_flags(denoise, dn.model);
  denoise->add_option("--sigma", dn.sigma, "Noise standard deviation of the data term")
      ->required()
      ->check(CLI::PositiveNumber);
  denoise->add_flag("--round", dn.round,
                    "Report the pre/post-rounding objectives and their relative gap");
  denoise->add_option("--report", dn.report, "Write per-iteration CSV to this path");
  add_lm_flags(denoise, dn.lm);
  add_threads_flag(denoise, dn.threads);

  struct {
    std::string noisy, candidate;
    ModelFlags model;
    double sigma = 20.0;
  } en;
  auto* energy_cmd =
      app.add_subcommand("energy", "Evaluate the objective of a candidate image");
  energy_cmd->add_option("noisy", en.noisy, "Noisy reference PGM (the data term's u)")
      ->required();
  energy_cmd->add_option("candidate", en.candidate, "Candidate PGM to evaluate")->required();
  add_model_flags(energy_cmd, en.model);
  energy_cmd->add_option("--sigma", en.sigma, "Noise standard deviation")
      ->required()
      ->check(CLI::PositiveNumber);

  struct {
    std::string a, b;
  } ps;
  auto* psnr_cmd = app.add_subcommand("psnr", "Peak signal-to-noise ratio between two images");
  psnr_cmd->add_option("a", ps.a, "First PGM")->required();
  psnr_cmd->add_option("b", ps.b, "Second PGM")->required();

  struct {
    std::string in, csv, scales = "0.5,1,2";
    ModelFlags model;
    double sigma = 20.0;
    std::uint64_t seed = 0;
    LmOptions lm;
    int threads = 1;
  } bm;
  auto* benchmark =
      app.add_subcommand("benchmark", "Time the solver across rescaled copies of an image");
  benchmark->add_option("input", bm.in, "Base PGM image")->required();
  add_model_flags(benchmark, bm.model);
  benchmark->add_option("--sigma", bm.sigma, "Noise standard deviation")
      ->required()
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--scales", bm.scales, "Comma-separated resize factors (default 0.5,1,2)");
  benchmark->add_option("--seed", bm.seed, "Base PRNG seed (default 0)");
  benchmark->add_option("--csv", bm.csv, "Output CSV path (pixels,seconds,final_objective,iterations)")
      ->required();
  add_lm_flags(benchmark, bm.lm);
  add_threads_flag(benchmark, bm.threads);

  struct {
    ModelFlags model;
    std::string size = "8x8";
    int trials = 20;
    std::uint64_t seed = 0;
    double sigma = 20.0;
    double h = 1e-5;
    bool inject = false;
    int threads = 1;
  } cg;
  auto* check_grad = app.add_subcommand(
      "check-grad", "Compare the analytic gradient against central differences");
  add_model_flags(check_grad, cg.model);
  check_grad->add_option("--size", cg.size, "Instance size as WxH (default 8x8)");
  check_grad->add_option("--trials", cg.trials, "Number of random instances (default 20)")
      ->check(CLI::PositiveNumber);
  check_grad->add_option("--seed", cg.seed, "Base PRNG seed (default 0)");
  check_grad->add_option("--sigma", cg.sigma, "Noise standard deviation (default 20)")
      ->check(CLI::PositiveNumber);
  check_grad->add_option("--step", cg.h, "Central-difference step (default 1e-5)")
      ->check(CLI::PositiveNumber);
  check_grad->add_flag("--inject-gradient-error", cg.inject, "Corrupt the analytic gradient")
      ->group("");
  add_threads_flag(check_grad, cg.threads);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*add_noise) return cmd_add_noise(an.in, an.out, an.sigma, an.seed, an.clamp);
    if (*denoise) {
      return cmd_denoise(dn.in, dn.out, load_model(dn.model), dn.sigma, dn.round, dn.lm,
                         dn.report);
    }
    if (*energy_cmd) return cmd_energy(en.noisy, en.candidate, load_model(en.model), en.sigma);
    if (*psnr_cmd) return cmd_psnr(ps.a, ps.b);
    if (*benchmark) {
      std::vector<double> scales;
      for (const std::string& item : split_list(bm.scales)) {
        const double s = std::stod(item);
        if (!(s > 0.0)) throw std::invalid_argument("scales must be > 0");
        scales.push_back(s);
      }
      if (scales.empty()) throw std::invalid_argument("--scales needs at least one factor");
      return cmd_benchmark(bm.in, load_model(bm.model), bm.sigma, scales, bm.seed, bm.lm,
                           bm.csv);
    }
    if (*check_grad) {
      int width = 0;
      int height = 0;
      if (std::sscanf(cg.size.c_str(), "%dx%d", &width, &height) != 2 || width < 1 ||
          height < 1) {
        throw std::invalid_argument("--size must be WxH, e.g. 8x8");
      }
      return cmd_check_grad(load_model(cg.model), width, height, cg.trials, cg.seed, cg.sigma,
                            cg.h, cg.inject);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

int run_bench_suite(int argc, const char* const* argv) {
  CLI::App app{"Noise/denoise/report suite over a directory of PGM images"};
  std::string images;
  std::string models_arg;
  std::string out_csv;
  SuiteOptions opts;

  app.add_option("--images", images, "Directory containing *.pgm images")->required();
  app.add_option("--models", models_arg,
                 "Comma-separated model sources: builtin names or model file paths")
      ->required();
  app.add_option("--sigma", opts.sigma, "Noise standard deviation (default 20)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "Base PRNG seed (default 0)");
  app.add_option("--out", out_csv, "Results CSV path")->required();
  app.add_option("--outdir", opts.output_dir, "Emit denoised PGMs into this directory");
  app.add_flag("--clamp-input", opts.clamp_input,
               "Clamp the noisy image into [0,255] before solving");
  app.add_option("--max-iters", opts.lm.max_iterations, "Solver iteration cap (default 100)");
  app.add_option("--threads", opts.threads,
                 "Thread count; accepted for interface stability, runs are single-threaded");

  CLI11_PARSE(app, argc, argv);

  try {
    const std::vector<std::string> sources = split_list(models_arg);
    if (sources.empty()) throw std::invalid_argument("--models needs at least one source");
    const std::vector<BenchRow> rows = run_suite(images, sources, opts);
    spill(out_csv, suite_csv(rows));
    std::fputs(suite_markdown(rows).c_str(), stdout);
    std::size_t failed = 0;
    for (const BenchRow& row : rows) failed += row.ok ? 0 : 1;
    std::printf("rows %zu ok %zu failed %zu\n", rows.size(), rows.size() - failed, failed);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace foe
