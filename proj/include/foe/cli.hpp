#pragma once

namespace foe {

// Entry point for the `foe` command-line tool (add-noise, denoise, energy,
// psnr, benchmark, check-grad). Returns the process exit status.
int run_cli(int argc, const char* const* argv);

// Entry point for the `bench-suite` tool: runs the full noise/denoise/report
// suite over a directory of images. Returns the process exit status.
int run_bench_suite(int argc, const char* const* argv);

}  // namespace foe
