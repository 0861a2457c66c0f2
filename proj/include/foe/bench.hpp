#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "foe/model.hpp"
#include "foe/solver.hpp"

namespace foe {

// One (image, model) experiment outcome. `final_objective` is the energy of
// the rounded image that gets emitted, so re-evaluating the energy of the
// written file reproduces it.
struct BenchRow {
  std::string image_id;
  int pixels = 0;
  int patch_side = 0;
  int expert_count = 0;
  std::string model_id;
  double sigma = 0.0;
  double final_objective = 0.0;
  double wall_seconds = 0.0;       // solver time, excluding I/O
  double psnr_db = 0.0;            // rounded output vs the clean source
  double rounding_gap_rel = 0.0;   // (rounded - continuous) / continuous
  bool ok = false;
  std::string error;               // failure description when !ok
};

struct SuiteOptions {
  double sigma = 20.0;
  std::uint64_t seed = 0;
  LmOptions lm{};
  bool clamp_input = false;   // clamp the noisy image into [0,255] before solving
  int threads = 1;            // accepted for interface stability; runs are single-threaded
  std::string output_dir;     // when non-empty, denoised PGMs are written here
};

// A model source is either a builtin name or a path to a model file; paths
// win when a file of that name exists. The id is the builtin name or the
// file's stem.
struct ModelEntry {
  std::string id;
  FoeModel model;
};
ModelEntry resolve_model_source(const std::string& source);

// Seed for one image's noise realization: a hash of the image id mixed with
// the base seed, so a row's noise does not depend on which other files are
// present in the directory.
std::uint64_t suite_image_seed(std::uint64_t base_seed, std::string_view image_id);

// Runs noise -> denoise -> round -> report for every (image, model) pair.
// Images are the *.pgm files directly inside `image_dir`, ordered by
// filename; each model in `model_sources` runs against each image. A failing
// pair produces a row with ok=false and the suite continues. Deterministic
// given (inputs, seed, options) apart from the timing column.
std::vector<BenchRow> run_suite(const std::string& image_dir,
                                const std::vector<std::string>& model_sources,
                                const SuiteOptions& opts);

std::string suite_csv(const std::vector<BenchRow>& rows);
std::string suite_markdown(const std::vector<BenchRow>& rows);

}  // namespace foe
