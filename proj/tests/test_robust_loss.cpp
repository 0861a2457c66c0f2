#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "foe/robust_loss.hpp"

using foe::LossDescriptor;

TEST_CASE("rho evaluates both loss kinds") {
  CHECK(foe::rho(LossDescriptor::identity(), 3.5) == 3.5);
  CHECK(foe::rho(LossDescriptor::foe_log(2.0), 2.0) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(foe::rho(LossDescriptor::foe_log(1.0), 0.0) == 0.0);
  CHECK_THROWS_AS(foe::rho(LossDescriptor::foe_log(1.0), -0.1), std::invalid_argument);
}

TEST_CASE("rho_derivatives match the closed forms") {
  const auto id = foe::rho_derivatives(LossDescriptor::identity(), 7.0);
  CHECK(id.rho1 == 1.0);
  CHECK(id.rho2 == 0.0);

  const auto at0 = foe::rho_derivatives(LossDescriptor::foe_log(1.0), 0.0);
  CHECK(at0.rho1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(at0.rho2 == doctest::Approx(-0.25).epsilon(1e-15));

  const auto at2 = foe::rho_derivatives(LossDescriptor::foe_log(1.0), 2.0);
  CHECK(at2.rho1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(at2.rho2 == doctest::Approx(-0.0625).epsilon(1e-15));
}

TEST_CASE("rho_derivatives agree with finite differences of rho") {
  const LossDescriptor loss = LossDescriptor::foe_log(1.7);
  const double h = 1e-6;
  for (double s : {0.5, 2.0, 10.0, 100.0}) {
    const double fd1 = (foe::rho(loss, s + h) - foe::rho(loss, s - h)) / (2.0 * h);
    const auto d = foe::rho_derivatives(loss, s);
    CHECK(d.rho1 == doctest::Approx(fd1).epsilon(1e-7));
    const double fd2 = (foe::rho_derivatives(loss, s + h).rho1 -
                        foe::rho_derivatives(loss, s - h).rho1) /
                       (2.0 * h);
    CHECK(d.rho2 == doctest::Approx(fd2).epsilon(1e-7));
  }
}

TEST_CASE("correct rescales the concave log loss by sqrt(rho1)") {
  const double r = std::sqrt(2.0);
  const auto block = foe::correct(LossDescriptor::foe_log(1.0), r);
  CHECK(block.residual == doctest::Approx(0.5 * r).epsilon(1e-15));  // ~0.7071068
  CHECK(block.jacobian_scale == doctest::Approx(0.5).epsilon(1e-15));

  const auto passthrough = foe::correct(LossDescriptor::identity(), -3.25);
  CHECK(passthrough.residual == -3.25);
  CHECK(passthrough.jacobian_scale == 1.0);
}

TEST_CASE("corrected blocks preserve the gradient of rho(r^2)") {
  // d/dr rho(r^2) = 2 rho1 r; the plain least-squares gradient of the
  // corrected block is 2 r~ J~, which must match with raw Jacobian 1.
  for (double r : {-5.0, -1.0, 0.25, 2.0, 40.0}) {
    const LossDescriptor loss = LossDescriptor::foe_log(0.8);
    const auto block = foe::correct(loss, r);
    const double rho1 = foe::rho_derivatives(loss, r * r).rho1;
    CHECK(block.residual * block.jacobian_scale == doctest::Approx(rho1 * r).epsilon(1e-14));
  }
}

TEST_CASE("correct_general reproduces the curvature branch identities") {
  // A convex toy loss rho(s) = s + 0.3 s^2 exercises rho2 > 0.
  const auto rho1_of = [](double s) { return 1.0 + 0.6 * s; };
  const double rho2 = 0.6;
  for (double r : {0.5, 1.0, 3.0}) {
    const double s = r * r;
    const auto block = foe::correct_general(rho1_of(s), rho2, r);
    // Gradient preservation: r~ J~ = rho1 r.
    CHECK(block.residual * block.jacobian_scale ==
          doctest::Approx(rho1_of(s) * r).epsilon(1e-14));
    // Scalar Gauss-Newton curvature equals the exact second derivative
    // rho1 + 2 s rho2.
    CHECK(block.jacobian_scale * block.jacobian_scale ==
          doctest::Approx(rho1_of(s) + 2.0 * s * rho2).epsilon(1e-14));
  }

  // Concave and zero-residual inputs take the sqrt(rho1) branch.
  const auto flat = foe::correct_general(0.25, -0.1, 0.0);
  CHECK(flat.residual == 0.0);
  CHECK(flat.jacobian_scale == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(foe::correct_general(0.0, 0.0, 1.0), std::invalid_argument);
}
