#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace foe {

// Symmetric positive-(semi)definite matrix over a width x height pixel grid
// with translation-bounded sparsity: pixels i and j couple only when their
// row and column distances are both <= band. Storage holds one triangle as
// per-pixel stencil planes, one plane per offset (dr, dc) with
// (dr, dc) >= (0, 0) in lexicographic order:
//
//   (0,0), (0,1), ..., (0,band), (1,-band), ..., (1,band), ..., (band,band)
//
// plane[k][p] is the matrix entry between pixel p and the pixel at offset
// offsets()[k] from it; entries whose partner falls outside the grid are
// structurally zero and never touched. `rhs` carries the g vector of the
// normal equations H * step = -g.
struct GridSystem {
  int width = 0;
  int height = 0;
  int band = 0;
  std::vector<double> values;  // plane-major: values[k * n + p]
  std::vector<double> rhs;     // size n

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  static int offset_count(int band) {
    return band * (2 * band + 1) + band + 1;
  }
  int offset_count() const { return offset_count(band); }

  // Index of offset (dr, dc), which must be stored (lexicographically >= 0).
  static int offset_index(int band, int dr, int dc) {
    return dr == 0 ? dc : (band + 1) + (dr - 1) * (2 * band + 1) + (dc + band);
  }

  // The stored offsets in plane order.
  static std::vector<std::pair<int, int>> stored_offsets(int band);

  std::span<double> plane(int k) {
    return {values.data() + static_cast<std::size_t>(k) * pixel_count(), pixel_count()};
  }
  std::span<const double> plane(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * pixel_count(), pixel_count()};
  }
};

// Allocates a zeroed system for the given grid and band.
GridSystem make_grid_system(int width, int height, int band);

struct SolveOutcome {
  std::vector<double> solution;       // step solving H * step = -g
  long iterations_or_flops = 0;       // PCG iteration count here
  double residual_norm_rel = 0.0;     // ||H*solution + g|| / max(||g||, tiny), measured post-solve
};

// y = H * v. Throws std::invalid_argument on length mismatch.
std::vector<double> matvec(const GridSystem& system, std::span<const double> v);

// Solves H * step = -g by conjugate gradients with a Jacobi preconditioner.
// The diagonal must be strictly positive (std::invalid_argument otherwise).
// Non-positive curvature or hitting the 10*n iteration cap throws
// IndefiniteSystemError; the LM driver treats that as "increase damping and
// retry". The returned residual_norm_rel is re-measured with a fresh matvec
// and satisfies residual_norm_rel <= tol.
SolveOutcome solve_spd(const GridSystem& system, double tol);

// Copy of `base` (which must have been assembled with zero damping) with
// damping * clamp(diag, 1e-12, 1e32) added to the diagonal. Equals
// assemble_normal_system at the same damping, without re-evaluating the
// Jacobian.
GridSystem with_damping(const GridSystem& base, double damping);

}  // namespace foe
