#include "foe/robust_loss.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace foe {

namespace {

void require_nonnegative(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("loss: squared norm must be >= 0");
}

}  // namespace

double rho(const LossDescriptor& desc, double s) {
  require_nonnegative(s);
  if (desc.kind == LossKind::identity) return s;
  return desc.alpha * std::log1p(0.5 * s);
}

RhoDerivatives rho_derivatives(const LossDescriptor& desc, double s) {
  require_nonnegative(s);
  if (desc.kind == LossKind::identity) return {1.0, 0.0};
  const double inv = 1.0 / (2.0 + s);
  return {desc.alpha * inv, -desc.alpha * inv * inv};
}

CorrectedBlock correct(const LossDescriptor& desc, double residual) {
  if (!std::isfinite(residual)) throw std::invalid_argument("loss: residual must be finite");
  if (desc.kind == LossKind::identity) return {residual, 1.0};

  const double s = residual * residual;
  const RhoDerivatives d = rho_derivatives(desc, s);
  // The log loss is globally concave (rho2 < 0 for every s >= 0), so the
  // second-order branch of correct_general is unreachable from here.
  assert(d.rho2 < 0.0);
  const double scale = std::sqrt(d.rho1);
  return {scale * residual, scale};
}

CorrectedBlock correct_general(double rho1, double rho2, double residual) {
  if (!std::isfinite(residual)) throw std::invalid_argument("loss: residual must be finite");
  if (!(rho1 > 0.0)) throw std::invalid_argument("loss: rho' must be > 0");

  const double sqrt_rho1 = std::sqrt(rho1);
  const double s = residual * residual;
  if (s == 0.0 || rho2 <= 0.0) {
    return {sqrt_rho1 * residual, sqrt_rho1};
  }
  // Curvature branch: pick the root of 0.5 a^2 - a - (rho2/rho1) s = 0 that
  // keeps the corrected system positive definite. In the scalar case the
  // corrected curvature J~^2 comes out as rho1 + 2 s rho2 exactly.
  const double discriminant = 1.0 + 2.0 * s * rho2 / rho1;
  const double alpha = 1.0 - std::sqrt(discriminant);
  return {sqrt_rho1 / (1.0 - alpha) * residual, sqrt_rho1 * (1.0 - alpha)};
}

}  // namespace foe
