#include "foe/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "foe/energy.hpp"
#include "foe/errors.hpp"
#include "foe/image.hpp"
#include "foe/rng.hpp"

namespace fs = std::filesystem;

namespace foe {

namespace {

std::string format_real(double v, const char* fmt = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

ModelEntry resolve_model_source(const std::string& source) {
  if (fs::exists(fs::path(source)) && fs::is_regular_file(fs::path(source))) {
    std::FILE* f = std::fopen(source.c_str(), "rb");
    if (!f) throw Error("cannot open model file: " + source);
    std::string bytes;
    char chunk[4096];
    std::size_t got;
    while ((got = std::fread(chunk, 1, sizeof chunk, f)) > 0) bytes.append(chunk, got);
    std::fclose(f);
    ModelEntry entry;
    entry.id = fs::path(source).stem().string();
    entry.model = parse_model(bytes);
    return entry;
  }
  return ModelEntry{source, builtin_model(source)};
}

std::uint64_t suite_image_seed(std::uint64_t base_seed, std::string_view image_id) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a, 64-bit
  for (unsigned char c : image_id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix_seed(base_seed, h);
}

std::vector<BenchRow> run_suite(const std::string& image_dir,
                                const std::vector<std::string>& model_sources,
                                const SuiteOptions& opts) {
  if (!(opts.sigma > 0.0)) throw std::invalid_argument("suite: sigma must be > 0");
  if (!fs::is_directory(image_dir)) throw Error("not a directory: " + image_dir);

  std::vector<ModelEntry> models;
  models.reserve(model_sources.size());
  for (const std::string& source : model_sources) models.push_back(resolve_model_source(source));

  std::vector<std::string> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(image_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());

  if (!opts.output_dir.empty()) fs::create_directories(opts.output_dir);

  std::vector<BenchRow> rows;
  rows.reserve(files.size() * models.size());
  for (const std::string& file : files) {
    const std::string image_id = fs::path(file).stem().string();

    Image clean;
    Image noisy;
    std::string load_error;
    try {
      clean = read_pgm_file(file);
      noisy = add_gaussian_noise(clean, {opts.sigma, suite_image_seed(opts.seed, image_id)});
      if (opts.clamp_input) {
        for (double& v : noisy.data) v = std::clamp(v, 0.0, 255.0);
      }
    } catch (const std::exception& e) {
      load_error = e.what();
    }

    for (const ModelEntry& entry : models) {
      BenchRow row;
      row.image_id = image_id;
      row.model_id = entry.id;
      row.patch_side = entry.model.patch_side;
      row.expert_count = entry.model.expert_count();
      row.sigma = opts.sigma;

      if (!load_error.empty()) {
        row.error = load_error;
        rows.push_back(std::move(row));
        continue;
      }
      row.pixels = clean.width * clean.height;

      try {
        const Problem problem{noisy, entry.model, opts.sigma};
        auto [solution, report] = lm_denoise(problem, noisy, opts.lm);
        const Image rounded = clamp_round(solution);
        const double continuous = report.final_objective;
        const double quantized = energy(problem, rounded).total;

        row.final_objective = quantized;
        row.wall_seconds = report.wall_seconds;
        row.psnr_db = psnr(rounded, clean);
        row.rounding_gap_rel =
            (quantized - continuous) / std::max(std::fabs(continuous), 1e-300);
        row.ok = true;

        if (!opts.output_dir.empty()) {
          const fs::path out =
              fs::path(opts.output_dir) / (image_id + "__" + entry.id + ".pgm");
          write_pgm_file(rounded, out.string());
        }
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string suite_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "image,pixels,m,K,model,sigma,final_objective,wall_seconds,psnr_db,"
      "rounding_gap_rel,ok,error\n";
  for (const BenchRow& row : rows) {
    out += csv_field(row.image_id) + ',';
    out += std::to_string(row.pixels) + ',';
    out += std::to_string(row.patch_side) + ',';
    out += std::to_string(row.expert_count) + ',';
    out += csv_field(row.model_id) + ',';
    out += format_real(row.sigma) + ',';
    out += format_real(row.final_objective) + ',';
    out += format_real(row.wall_seconds, "%.6f") + ',';
    out += format_real(row.psnr_db) + ',';
    out += format_real(row.rounding_gap_rel) + ',';
    out += row.ok ? "1," : "0,";
    out += csv_field(row.error) + '\n';
  }
  return out;
}

std::string suite_markdown(const std::vector<BenchRow>& rows) {
  std::string out =
      "| image | pixels | model | m | K | sigma | objective | seconds | PSNR (dB) "
      "| rounding gap | status |\n"
      "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const BenchRow& row : rows) {
    out += "| " + row.image_id;
    out += " | " + std::to_string(row.pixels);
    out += " | " + row.model_id;
    out += " | " + std::to_string(row.patch_side);
    out += " | " + std::to_string(row.expert_count);
    out += " | " + format_real(row.sigma);
    out += " | " + format_real(row.final_objective);
    out += " | " + format_real(row.wall_seconds, "%.3f");
    out += " | " + format_real(row.psnr_db, "%.3f");
    out += " | " + format_real(row.rounding_gap_rel, "%.3g");
    out += " | " + (row.ok ? std::string("ok") : row.error);
    out += " |\n";
  }
  return out;
}

}  // namespace foe
