#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "foe/energy.hpp"
#include "foe/image.hpp"

namespace foe {

struct LmOptions {
  int max_iterations = 100;           // step attempts, accepted or not
  double function_tolerance = 1e-6;   // relative decrease between accepted iterates
  double gradient_tolerance = 1e-10;  // ||grad||_inf relative to the initial iterate
  double initial_damping = 1e-4;
  double damping_increase = 2.0;      // nu; doubles again on consecutive rejections
  double min_damping = 1e-32;
  double max_damping = 1e32;
  double linear_tolerance = 1e-9;     // relative residual bound for the inner solve
};

struct GdOptions {
  int max_iterations = 100;
  double armijo_c = 1e-4;
  double initial_step = 1.0;
  int max_backtracks = 40;
};

enum class Termination { function_tol, gradient_tol, max_iter, numerical_failure };

const char* termination_name(Termination t);

struct IterationRecord {
  int iteration = 0;            // 1-based attempt number
  double objective = 0.0;       // objective after this attempt (candidate's if rejected)
  double step_norm = 0.0;       // ||x' - x||_2 of the attempted step
  double damping = 0.0;
  bool accepted = false;
  double cumulative_seconds = 0.0;
};

struct SolveReport {
  std::vector<IterationRecord> iterations;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  Termination termination = Termination::max_iter;
  double wall_seconds = 0.0;

  int accepted_count() const;
};

// CSV form with header `iter,objective,step_norm,damping,accepted,seconds`.
std::string report_to_csv(const SolveReport& report);

// Levenberg-Marquardt on the robustified least-squares form of the energy.
// Each iteration assembles the corrected normal equations at the current
// iterate, solves (J~^T J~ + damping*D) step = -g, and accepts the candidate
// iff the objective strictly decreases. Damping follows the gain-ratio rule:
// on acceptance damping *= max(1/3, 1 - (2*gain - 1)^3) and nu resets; on
// rejection damping *= nu and nu doubles, reusing the already-assembled
// system. Wall time covers assembly and solves, no image I/O.
std::pair<Image, SolveReport> lm_denoise(const Problem& problem, const Image& x0,
                                         const LmOptions& opts = {});

// Steepest-descent baseline with Armijo backtracking (halving). Same report
// schema as lm_denoise; `damping` holds the accepted step length.
std::pair<Image, SolveReport> gd_denoise(const Problem& problem, const Image& x0,
                                         const GdOptions& opts = {});

// Max over coordinates of |analytic - fd| / max(|analytic|, |fd|, 1e-8),
// where fd is the central difference (f(x + h e_i) - f(x - h e_i)) / (2h)
// evaluated in extended precision. Requires h > 0.
double check_gradient(const Problem& problem, const Image& x, double h);

// Same, against a caller-supplied vector in place of the analytic gradient.
double check_gradient_against(const Problem& problem, const Image& x, double h,
                              std::span<const double> analytic);

}  // namespace foe
