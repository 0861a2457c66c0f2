#pragma once

#include <unistd.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "foe/grid_system.hpp"
#include "foe/image.hpp"
#include "foe/model.hpp"
#include "foe/rng.hpp"

namespace support {

// Natural-ish test image: smooth low-frequency field plus mild texture, all
// parameters drawn from the seed, values inside [0, 255].
inline foe::Image synthetic_image(int width, int height, std::uint64_t seed) {
  foe::SplitMix64 rng(seed);
  const double fx = rng.next_uniform(0.04, 0.25);
  const double fy = rng.next_uniform(0.04, 0.25);
  const double fd = rng.next_uniform(0.02, 0.12);
  const double phase = rng.next_uniform(0.0, 6.28318);
  const double amp = rng.next_uniform(40.0, 80.0);
  const double amp2 = rng.next_uniform(10.0, 35.0);
  foe::Image img(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = 128.0 + amp * std::sin(fx * c + phase) * std::cos(fy * r) +
                 amp2 * std::sin(fd * (r + c)) + rng.next_uniform(-4.0, 4.0);
      img.at(r, c) = std::min(255.0, std::max(0.0, v));
    }
  }
  return img;
}

// Uniform random pixels in [lo, hi].
inline foe::Image random_image(int width, int height, std::uint64_t seed, double lo = 0.0,
                               double hi = 255.0) {
  foe::SplitMix64 rng(seed);
  foe::Image img(width, height);
  for (double& v : img.data) v = rng.next_uniform(lo, hi);
  return img;
}

// Random filter bank: coefficients uniform in [-1, 1], weights uniform in
// [alpha_lo, alpha_hi].
inline foe::FoeModel random_model(int m, int k, std::uint64_t seed, double alpha_lo = 0.5,
                                  double alpha_hi = 2.0) {
  foe::SplitMix64 rng(seed);
  foe::FoeModel model;
  model.patch_side = m;
  model.experts.resize(static_cast<std::size_t>(k));
  for (foe::Expert& e : model.experts) {
    e.alpha = rng.next_uniform(alpha_lo, alpha_hi);
    e.filter.resize(static_cast<std::size_t>(m) * m);
    for (double& c : e.filter) c = rng.next_uniform(-1.0, 1.0);
  }
  return model;
}

// Dense reconstruction of the stencil matrix, for oracle comparisons on
// small grids.
inline Eigen::MatrixXd dense_of(const foe::GridSystem& system) {
  const auto n = static_cast<Eigen::Index>(system.pixel_count());
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
  const int w = system.width;
  const int h = system.height;
  const auto offsets = foe::GridSystem::stored_offsets(system.band);
  for (int k = 0; k < system.offset_count(); ++k) {
    const auto [dr, dc] = offsets[static_cast<std::size_t>(k)];
    const auto plane = system.plane(k);
    for (int r = 0; r + dr < h; ++r) {
      for (int c = std::max(0, -dc); c < std::min(w, w - dc); ++c) {
        const auto p = static_cast<Eigen::Index>(r) * w + c;
        const auto q = static_cast<Eigen::Index>(r + dr) * w + (c + dc);
        if (k == 0) {
          mat(p, p) = plane[static_cast<std::size_t>(p)];
        } else {
          mat(p, q) += plane[static_cast<std::size_t>(p)];
          mat(q, p) += plane[static_cast<std::size_t>(p)];
        }
      }
    }
  }
  return mat;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    namespace fs = std::filesystem;
    static std::uint64_t counter = 0;
    path_ = fs::temp_directory_path() /
            ("foe_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void spill(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace support
