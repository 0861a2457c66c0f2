#include "foe/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "foe/errors.hpp"

namespace foe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

std::string format_value(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::function_tol: return "function_tol";
    case Termination::gradient_tol: return "gradient_tol";
    case Termination::max_iter: return "max_iter";
    case Termination::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

int SolveReport::accepted_count() const {
  int count = 0;
  for (const IterationRecord& rec : iterations) count += rec.accepted ? 1 : 0;
  return count;
}

std::string report_to_csv(const SolveReport& report) {
  std::string out = "iter,objective,step_norm,damping,accepted,seconds\n";
  for (const IterationRecord& rec : report.iterations) {
    out += std::to_string(rec.iteration) + ',';
    out += format_value(rec.objective, "%.17g") + ',';
    out += format_value(rec.step_norm, "%.17g") + ',';
    out += format_value(rec.damping, "%.17g") + ',';
    out += rec.accepted ? "1," : "0,";
    out += format_value(rec.cumulative_seconds, "%.6f") + '\n';
  }
  return out;
}

namespace {

void validate_lm_options(const LmOptions& opts) {
  if (opts.max_iterations < 1) throw std::invalid_argument("lm: max_iterations must be >= 1");
  if (!(opts.function_tolerance > 0.0) || !(opts.gradient_tolerance > 0.0) ||
      !(opts.linear_tolerance > 0.0)) {
    throw std::invalid_argument("lm: tolerances must be > 0");
  }
  if (!(opts.initial_damping > 0.0) || !(opts.min_damping <= opts.max_damping)) {
    throw std::invalid_argument("lm: bad damping configuration");
  }
  if (!(opts.damping_increase > 1.0)) {
    throw std::invalid_argument("lm: damping_increase must be > 1");
  }
}

}  // namespace

std::pair<Image, SolveReport> lm_denoise(const Problem& problem, const Image& x0,
                                         const LmOptions& opts) {
  validate_problem(problem);
  validate_lm_options(opts);

  const auto start = Clock::now();
  SolveReport report;

  Image x = x0;
  double f = energy(problem, x).total;
  report.initial_objective = f;
  report.final_objective = f;
  if (!std::isfinite(f)) {
    report.termination = Termination::numerical_failure;
    report.wall_seconds = seconds_since(start);
    return {x, report};
  }

  const std::size_t n = x.data.size();
  GridSystem base;           // zero-damping normal equations at the current x
  std::vector<double> damping_diag(n);
  double gradient_inf = 0.0;

  const auto assemble_at_current = [&]() {
    base = assemble_normal_system(problem, x, 0.0);
    std::span<const double> diag = base.plane(0);
    for (std::size_t i = 0; i < n; ++i) damping_diag[i] = std::clamp(diag[i], 1e-12, 1e32);
    gradient_inf = 2.0 * inf_norm(base.rhs);
  };

  try {
    assemble_at_current();
  } catch (const NumericalError&) {
    report.termination = Termination::numerical_failure;
    report.wall_seconds = seconds_since(start);
    return {x, report};
  }

  const double initial_gradient_inf = gradient_inf;
  if (initial_gradient_inf == 0.0) {
    // Already stationary (e.g. K = 0 starting at the observation).
    report.termination = Termination::gradient_tol;
    report.wall_seconds = seconds_since(start);
    return {x, report};
  }

  double damping = std::clamp(opts.initial_damping, opts.min_damping, opts.max_damping);
  double nu = opts.damping_increase;
  report.termination = Termination::max_iter;

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    IterationRecord rec;
    rec.iteration = iter;
    rec.damping = damping;

    bool solver_failed = false;
    std::vector<double> step;
    try {
      const GridSystem damped = with_damping(base, damping);
      step = solve_spd(damped, opts.linear_tolerance).solution;
    } catch (const IndefiniteSystemError&) {
      solver_failed = true;
    }

    double f_candidate = std::numeric_limits<double>::quiet_NaN();
    Image candidate;
    if (!solver_failed) {
      candidate = x;
      for (std::size_t i = 0; i < n; ++i) candidate.data[i] += step[i];
      rec.step_norm = norm2(step);
      f_candidate = energy(problem, candidate).total;
    }

    const bool accepted = !solver_failed && std::isfinite(f_candidate) && f_candidate < f;
    rec.accepted = accepted;
    rec.objective = solver_failed ? f : f_candidate;
    rec.cumulative_seconds = seconds_since(start);
    report.iterations.push_back(rec);

    if (accepted) {
      // Gain ratio: actual decrease over the decrease predicted by the
      // corrected least-squares model, 0.5 * step^T (damping*D*step - g).
      double model_decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        model_decrease += step[i] * (damping * damping_diag[i] * step[i] - base.rhs[i]);
      }
      model_decrease *= 0.5;
      const double gain =
          model_decrease > 0.0 ? (f - f_candidate) / model_decrease : 1.0;
      const double shrink = std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * gain - 1.0, 3));
      damping = std::clamp(damping * shrink, opts.min_damping, opts.max_damping);
      nu = opts.damping_increase;

      const double previous = f;
      x = std::move(candidate);
      f = f_candidate;
      report.final_objective = f;

      try {
        assemble_at_current();
      } catch (const NumericalError&) {
        report.termination = Termination::numerical_failure;
        break;
      }

      if (previous - f <= opts.function_tolerance * previous) {
        report.termination = Termination::function_tol;
        break;
      }
      if (gradient_inf <= opts.gradient_tolerance * initial_gradient_inf) {
        report.termination = Termination::gradient_tol;
        break;
      }
    } else {
      if (damping >= opts.max_damping) {
        report.termination = Termination::numerical_failure;
        break;
      }
      damping = std::clamp(damping * nu, opts.min_damping, opts.max_damping);
      nu *= 2.0;
    }
  }

  report.wall_seconds = seconds_since(start);
  if (!report.iterations.empty()) {
    report.iterations.back().cumulative_seconds =
        std::max(report.iterations.back().cumulative_seconds, report.wall_seconds);
  }
  return {x, report};
}

std::pair<Image, SolveReport> gd_denoise(const Problem& problem, const Image& x0,
                                         const GdOptions& opts) {
  validate_problem(problem);
  if (opts.max_iterations < 1) throw std::invalid_argument("gd: max_iterations must be >= 1");
  if (!(opts.armijo_c > 0.0 && opts.armijo_c < 1.0) || !(opts.initial_step > 0.0) ||
      opts.max_backtracks < 0) {
    throw std::invalid_argument("gd: bad backtracking parameters");
  }

  const auto start = Clock::now();
  SolveReport report;

  Image x = x0;
  double f = energy(problem, x).total;
  report.initial_objective = f;
  report.final_objective = f;
  report.termination = Termination::max_iter;
  if (!std::isfinite(f)) {
    report.termination = Termination::numerical_failure;
    report.wall_seconds = seconds_since(start);
    return {x, report};
  }

  const std::size_t n = x.data.size();
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    const std::vector<double> grad = gradient(problem, x);
    const double grad_sq = [&grad] {
      double acc = 0.0;
      for (double g : grad) acc += g * g;
      return acc;
    }();
    if (grad_sq == 0.0) {
      report.termination = Termination::gradient_tol;
      break;
    }

    double step = opts.initial_step;
    bool found = false;
    Image candidate = x;
    double f_candidate = f;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) candidate.data[i] = x.data[i] - step * grad[i];
      f_candidate = energy(problem, candidate).total;
      if (std::isfinite(f_candidate) && f_candidate <= f - opts.armijo_c * step * grad_sq) {
        found = true;
        break;
      }
      step *= 0.5;
    }

    IterationRecord rec;
    rec.iteration = iter;
    rec.objective = found ? f_candidate : f;
    rec.step_norm = found ? step * std::sqrt(grad_sq) : 0.0;
    rec.damping = found ? step : 0.0;
    rec.accepted = found;
    rec.cumulative_seconds = seconds_since(start);
    report.iterations.push_back(rec);

    if (!found) {
      // Backtracking exhausted: no acceptable decrease at the smallest step.
      report.termination = Termination::function_tol;
      break;
    }
    x = std::move(candidate);
    f = f_candidate;
    report.final_objective = f;
  }

  report.wall_seconds = seconds_since(start);
  return {x, report};
}

double check_gradient_against(const Problem& problem, const Image& x, double h,
                              std::span<const double> analytic) {
  validate_problem(problem);
  if (!(h > 0.0)) throw std::invalid_argument("check_gradient: h must be > 0");
  if (analytic.size() != x.data.size()) {
    throw std::invalid_argument("check_gradient: gradient length mismatch");
  }

  Image probe = x;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const double original = x.data[i];
    const double plus = original + h;
    const double minus = original - h;

    probe.data[i] = plus;
    const long double f_plus = energy_total_extended(problem, probe);
    probe.data[i] = minus;
    const long double f_minus = energy_total_extended(problem, probe);
    probe.data[i] = original;

    // Divide by the spacing actually realized in double precision.
    const double fd = static_cast<double>((f_plus - f_minus) / (long double)(plus - minus));
    const double a = analytic[i];
    const double err = std::fabs(a - fd) / std::max({std::fabs(a), std::fabs(fd), 1e-8});
    worst = std::max(worst, err);
  }
  return worst;
}

double check_gradient(const Problem& problem, const Image& x, double h) {
  const std::vector<double> analytic = gradient(problem, x);
  return check_gradient_against(problem, x, h, analytic);
}

}  // namespace foe
