#include "foe/grid_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "foe/errors.hpp"

namespace foe {

std::vector<std::pair<int, int>> GridSystem::stored_offsets(int band) {
  std::vector<std::pair<int, int>> offsets;
  offsets.reserve(static_cast<std::size_t>(offset_count(band)));
  for (int dc = 0; dc <= band; ++dc) offsets.emplace_back(0, dc);
  for (int dr = 1; dr <= band; ++dr) {
    for (int dc = -band; dc <= band; ++dc) offsets.emplace_back(dr, dc);
  }
  return offsets;
}

GridSystem make_grid_system(int width, int height, int band) {
  if (width <= 0 || height <= 0 || band < 0) {
    throw std::invalid_argument("grid system: bad dimensions");
  }
  GridSystem system;
  system.width = width;
  system.height = height;
  system.band = band;
  const std::size_t n = system.pixel_count();
  system.values.assign(static_cast<std::size_t>(system.offset_count()) * n, 0.0);
  system.rhs.assign(n, 0.0);
  return system;
}

std::vector<double> matvec(const GridSystem& system, std::span<const double> v) {
  const std::size_t n = system.pixel_count();
  if (v.size() != n) throw std::invalid_argument("matvec: length mismatch");

  std::vector<double> y(n, 0.0);
  const int w = system.width;
  const int h = system.height;

  // Diagonal plane.
  {
    std::span<const double> diag = system.plane(0);
    for (std::size_t p = 0; p < n; ++p) y[p] = diag[p] * v[p];
  }

  // Off-diagonal planes: each stored entry acts on both triangles.
  const auto offsets = GridSystem::stored_offsets(system.band);
  for (int k = 1; k < system.offset_count(); ++k) {
    const auto [dr, dc] = offsets[static_cast<std::size_t>(k)];
    std::span<const double> c = system.plane(k);
    const int row_end = h - dr;
    const int col_begin = std::max(0, -dc);
    const int col_end = std::min(w, w - dc);
    for (int r = 0; r < row_end; ++r) {
      const std::size_t base = static_cast<std::size_t>(r) * w;
      const std::size_t qbase = static_cast<std::size_t>(r + dr) * w + dc;
      for (int col = col_begin; col < col_end; ++col) {
        const std::size_t p = base + col;
        const std::size_t q = qbase + col;
        y[p] += c[p] * v[q];
        y[q] += c[p] * v[p];
      }
    }
  }
  return y;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

SolveOutcome solve_spd(const GridSystem& system, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("solve: tol must be in (0, 1)");
  const std::size_t n = system.pixel_count();
  std::span<const double> diag = system.plane(0);
  for (std::size_t p = 0; p < n; ++p) {
    if (!(diag[p] > 0.0)) {
      throw std::invalid_argument("solve: diagonal must be strictly positive");
    }
  }

  SolveOutcome outcome;
  outcome.solution.assign(n, 0.0);

  // b = -g.
  std::vector<double> b(n);
  for (std::size_t p = 0; p < n; ++p) b[p] = -system.rhs[p];
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    outcome.residual_norm_rel = 0.0;
    return outcome;
  }

  // Jacobi-preconditioned conjugate gradients.
  std::vector<double> r = b;
  std::vector<double> z(n), p(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);

  const long cap = 10 * static_cast<long>(n);
  long iter = 0;
  while (iter < cap) {
    ++iter;
    const std::vector<double> hp = matvec(system, p);
    const double php = dot(p, hp);
    if (!(php > 0.0) || !std::isfinite(php)) {
      throw IndefiniteSystemError("solve: non-positive curvature encountered");
    }
    const double step = rz / php;
    for (std::size_t i = 0; i < n; ++i) {
      outcome.solution[i] += step * p[i];
      r[i] -= step * hp[i];
    }
    if (norm2(r) <= tol * b_norm) {
      // Confirm with a true residual; the recurrence can drift.
      const std::vector<double> hx = matvec(system, outcome.solution);
      double true_norm_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double ri = b[i] - hx[i];
        true_norm_sq += ri * ri;
        r[i] = ri;
      }
      if (std::sqrt(true_norm_sq) <= tol * b_norm) break;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    if (iter == cap) {
      throw IndefiniteSystemError("solve: iteration cap reached without convergence");
    }
  }

  const std::vector<double> hx = matvec(system, outcome.solution);
  double res_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ri = hx[i] + system.rhs[i];
    res_sq += ri * ri;
  }
  outcome.iterations_or_flops = iter;
  outcome.residual_norm_rel =
      std::sqrt(res_sq) / std::max(b_norm, std::numeric_limits<double>::min());
  return outcome;
}

GridSystem with_damping(const GridSystem& base, double damping) {
  if (!(damping >= 0.0)) throw std::invalid_argument("damping must be >= 0");
  GridSystem damped = base;
  std::span<double> diag = damped.plane(0);
  for (std::size_t p = 0; p < damped.pixel_count(); ++p) {
    const double d = std::clamp(diag[p], 1e-12, 1e32);
    diag[p] += damping * d;
  }
  return damped;
}

}  // namespace foe
