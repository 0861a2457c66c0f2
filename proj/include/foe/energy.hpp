#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "foe/grid_system.hpp"
#include "foe/image.hpp"
#include "foe/model.hpp"
#include "foe/robust_loss.hpp"

namespace foe {

// A denoising instance: noisy observation u, filter bank, and noise level.
struct Problem {
  Image noisy;
  FoeModel model;
  double sigma = 0.0;
};

// Throws std::invalid_argument unless image and model are valid, sigma > 0,
// and (when K > 0) at least one m x m patch fits inside the image.
void validate_problem(const Problem& problem);

// Top-left corner of one m x m patch.
struct PatchIndex {
  int top = 0;
  int left = 0;
};

struct EnergyBreakdown {
  double data_term = 0.0;
  double prior_term = 0.0;
  double total = 0.0;
};

// All fully-interior m x m patch positions in row-major order (top outer,
// left inner); no padding or wraparound. Requires width >= m, height >= m.
std::vector<PatchIndex> patch_set(int width, int height, int m);

// The objective
//
//   data  = sum_i (x_i - u_i)^2 / (2 sigma^2)
//   prior = sum_P sum_k alpha_k * log(1 + (b_k . x_P)^2 / 2)
//
// accumulated in a fixed order: pixels row-major; patches row-major with
// experts innermost. Throws std::invalid_argument on dimension mismatch.
EnergyBreakdown energy(const Problem& problem, const Image& x);

// energy().total accumulated in long double, for finite-difference probes
// whose differences would otherwise drown in double roundoff.
long double energy_total_extended(const Problem& problem, const Image& x);

// One scalar residual block of the least-squares decomposition. Ids:
// data blocks are the pixel index; prior block ids are
// n + patch_ordinal * K + k.
struct ResidualBlock {
  std::int64_t id = 0;
  double value = 0.0;
  LossDescriptor loss;
};

// Streams the n data blocks (value (x_i - u_i)/(sqrt(2) sigma), identity
// loss) followed by the |P|*K prior blocks (value b_k . x_P, foe_log loss),
// in the same order energy() sums them.
void for_each_residual_block(const Problem& problem, const Image& x,
                             const std::function<void(const ResidualBlock&)>& visit);

std::vector<ResidualBlock> residual_blocks(const Problem& problem, const Image& x);

// Analytic gradient of energy().total:
//
//   df/dx_i = (x_i - u_i)/sigma^2
//           + sum_{(P,k): i in P} alpha_k (b_k . x_P) b_k[i - P] / (1 + (b_k . x_P)^2 / 2)
std::vector<double> gradient(const Problem& problem, const Image& x);

// Builds the corrected normal equations H = J~^T J~ + damping * D and
// g = J~^T r~, where (r~, J~) are the loss-corrected residuals/Jacobians of
// the blocks above and D = diag(J~^T J~) clamped to [1e-12, 1e32]. The LM
// step solves H * step = -g; by the corrector's gradient-preservation
// property, 2*g equals the analytic gradient. Throws NumericalError if any
// assembled entry is non-finite.
GridSystem assemble_normal_system(const Problem& problem, const Image& x, double damping);

}  // namespace foe
