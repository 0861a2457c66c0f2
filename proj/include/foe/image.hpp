#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace foe {

// Dense grayscale raster with double-precision intensities, row-major.
// Intensities live on the unconstrained real line; quantization to
// {0,...,255} happens only at output (clamp_round / write_pgm).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // row-major, size width*height

  Image() = default;
  Image(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0) {}
  Image(int w, int h, std::vector<double> values)
      : width(w), height(h), data(std::move(values)) {}

  std::size_t size() const { return data.size(); }
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width + col;
  }
  double& at(int row, int col) { return data[index(row, col)]; }
  double at(int row, int col) const { return data[index(row, col)]; }
};

// Throws std::invalid_argument if dimensions are non-positive, the data
// length disagrees with them, or any intensity is non-finite.
void validate_image(const Image& img);

struct NoiseSpec {
  double sigma = 0.0;       // standard deviation, intensity units, > 0
  std::uint64_t seed = 0;
};

// Parses a PGM file (binary P5 or ASCII P2, maxval <= 255). '#' comments are
// accepted in the header. Pixel values are converted to doubles unchanged.
// Throws ParseError naming the byte offset of the problem.
Image read_pgm(const std::string& bytes);

// Serializes to maxval-255 PGM, P5 by default, P2 when `ascii`. Every
// intensity must lie in [-0.5, 255.5); each is rounded half-up to the nearest
// integer. The P5 header ends with exactly one whitespace byte before the
// payload, so output is canonical and byte-deterministic.
// Throws RangeError if an intensity is out of range (clamp first).
std::string write_pgm(const Image& img, bool ascii = false);

// Convenience file wrappers; throw foe::Error on I/O failure.
Image read_pgm_file(const std::string& path);
void write_pgm_file(const Image& img, const std::string& path, bool ascii = false);

// Adds i.i.d. N(0, sigma^2) noise to every pixel in row-major order, drawn
// from GaussianStream(spec.seed). Output is NOT clamped. Pure function of
// (img, spec): identical inputs give bitwise-identical outputs.
Image add_gaussian_noise(const Image& img, const NoiseSpec& spec);

// Nearest integer in {0,...,255} per pixel; ties round half away from zero.
// Idempotent.
Image clamp_round(const Image& img);

// 10*log10(255^2 / MSE) in dB; +infinity when the images are identical.
// Throws std::invalid_argument on dimension mismatch.
double psnr(const Image& a, const Image& b);

// Resampling used by the scaling benchmark: nearest-neighbor for scale >= 1,
// box average over the source footprint for scale < 1. Output dimensions are
// round(width*scale) x round(height*scale), at least 1x1.
Image resize_scale(const Image& img, double scale);

}  // namespace foe
