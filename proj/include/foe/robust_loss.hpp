#pragma once

namespace foe {

// Loss applied to a squared residual s = ||f||^2. `identity` leaves the block
// a plain least-squares term; `foe_log` is rho(s) = alpha * log(1 + s/2),
// the per-expert penalty of the prior.
enum class LossKind { identity, foe_log };

struct LossDescriptor {
  LossKind kind = LossKind::identity;
  double alpha = 1.0;  // > 0; ignored for identity

  static LossDescriptor identity() { return {LossKind::identity, 1.0}; }
  static LossDescriptor foe_log(double alpha) { return {LossKind::foe_log, alpha}; }
};

struct RhoDerivatives {
  double rho1 = 1.0;  // d rho / d s
  double rho2 = 0.0;  // d^2 rho / d s^2
};

// A residual block after loss correction: the rescaled scalar residual and
// the factor to apply to the raw Jacobian row. Built so that the corrected
// plain least-squares gradient J~^T r~ equals rho'(s) * J^T r, i.e. half the
// gradient of rho(||r||^2).
struct CorrectedBlock {
  double residual = 0.0;
  double jacobian_scale = 1.0;
};

// rho(s). Throws std::invalid_argument for s < 0.
double rho(const LossDescriptor& desc, double s);

// First two derivatives of rho at s. identity -> (1, 0);
// foe_log -> (alpha/(2+s), -alpha/(2+s)^2). Throws for s < 0.
RhoDerivatives rho_derivatives(const LossDescriptor& desc, double s);

// Corrects one scalar residual block. foe_log has rho2 < 0 everywhere
// (globally concave loss), so the correction is always the first-order
// branch: both residual and Jacobian scaled by sqrt(rho1). identity blocks
// pass through unchanged.
CorrectedBlock correct(const LossDescriptor& desc, double residual);

// General scalar corrector for arbitrary (rho1, rho2), including the
// second-order curvature branch taken when rho2 > 0:
//
//   alpha = 1 - sqrt(1 + 2 s rho2 / rho1)
//   r~ = sqrt(rho1) / (1 - alpha) * r,   J~ = sqrt(rho1) * (1 - alpha) * J
//
// which makes the corrected Gauss-Newton curvature J~^2 equal
// rho1 + 2 s rho2, the exact second derivative of rho(r^2) in the scalar
// case, while preserving J~ r~ = rho1 * J * r. Requires rho1 > 0.
CorrectedBlock correct_general(double rho1, double rho2, double residual);

}  // namespace foe
