#include "foe/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "foe/errors.hpp"

namespace foe {

void validate_problem(const Problem& problem) {
  validate_image(problem.noisy);
  validate_model(problem.model);
  if (!(problem.sigma > 0.0)) throw std::invalid_argument("problem: sigma must be > 0");
  if (problem.model.expert_count() > 0 &&
      (problem.noisy.width < problem.model.patch_side ||
       problem.noisy.height < problem.model.patch_side)) {
    throw std::invalid_argument(
        "problem: patch side exceeds image dimensions; the prior has no patches");
  }
}

std::vector<PatchIndex> patch_set(int width, int height, int m) {
  if (m < 1) throw std::invalid_argument("patch side must be >= 1");
  if (width < m || height < m) {
    throw std::invalid_argument("patch side exceeds image dimensions");
  }
  std::vector<PatchIndex> patches;
  patches.reserve(static_cast<std::size_t>(height - m + 1) * (width - m + 1));
  for (int top = 0; top + m <= height; ++top) {
    for (int left = 0; left + m <= width; ++left) {
      patches.push_back({top, left});
    }
  }
  return patches;
}

namespace {

void require_same_shape(const Problem& problem, const Image& x) {
  if (x.width != problem.noisy.width || x.height != problem.noisy.height) {
    throw std::invalid_argument("state image dimensions do not match the problem");
  }
}

// Shared accumulation core; long double instantiation backs the
// finite-difference probes in check_gradient.
template <typename T>
struct Accumulated {
  T data = 0;
  T prior = 0;
};

template <typename T>
Accumulated<T> accumulate_energy(const Problem& problem, const Image& x) {
  const Image& u = problem.noisy;
  const T inv_two_sigma_sq = T(1) / (T(2) * T(problem.sigma) * T(problem.sigma));

  Accumulated<T> acc;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const T d = T(x.data[i]) - T(u.data[i]);
    acc.data += d * d * inv_two_sigma_sq;
  }

  const FoeModel& model = problem.model;
  const int m = model.patch_side;
  const int k_count = model.expert_count();
  if (k_count == 0) return acc;

  for (int top = 0; top + m <= x.height; ++top) {
    for (int left = 0; left + m <= x.width; ++left) {
      for (const Expert& e : model.experts) {
        T t = 0;
        const double* coeff = e.filter.data();
        for (int pr = 0; pr < m; ++pr) {
          const double* row = x.data.data() + x.index(top + pr, left);
          for (int pc = 0; pc < m; ++pc) {
            t += T(*coeff++) * T(row[pc]);
          }
        }
        acc.prior += T(e.alpha) * std::log1p(T(0.5) * t * t);
      }
    }
  }
  return acc;
}

}  // namespace

EnergyBreakdown energy(const Problem& problem, const Image& x) {
  validate_problem(problem);
  require_same_shape(problem, x);
  const Accumulated<double> acc = accumulate_energy<double>(problem, x);
  return {acc.data, acc.prior, acc.data + acc.prior};
}

long double energy_total_extended(const Problem& problem, const Image& x) {
  validate_problem(problem);
  require_same_shape(problem, x);
  const Accumulated<long double> acc = accumulate_energy<long double>(problem, x);
  return acc.data + acc.prior;
}

void for_each_residual_block(const Problem& problem, const Image& x,
                             const std::function<void(const ResidualBlock&)>& visit) {
  validate_problem(problem);
  require_same_shape(problem, x);
  const Image& u = problem.noisy;
  const double inv_sqrt2_sigma = 1.0 / (std::sqrt(2.0) * problem.sigma);

  std::int64_t id = 0;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    visit({id++, (x.data[i] - u.data[i]) * inv_sqrt2_sigma, LossDescriptor::identity()});
  }

  const FoeModel& model = problem.model;
  const int m = model.patch_side;
  if (model.expert_count() == 0) return;

  for (int top = 0; top + m <= x.height; ++top) {
    for (int left = 0; left + m <= x.width; ++left) {
      for (const Expert& e : model.experts) {
        double t = 0.0;
        const double* coeff = e.filter.data();
        for (int pr = 0; pr < m; ++pr) {
          const double* row = x.data.data() + x.index(top + pr, left);
          for (int pc = 0; pc < m; ++pc) t += *coeff++ * row[pc];
        }
        visit({id++, t, LossDescriptor::foe_log(e.alpha)});
      }
    }
  }
}

std::vector<ResidualBlock> residual_blocks(const Problem& problem, const Image& x) {
  std::vector<ResidualBlock> blocks;
  const std::size_t n = x.data.size();
  const std::size_t patches =
      problem.model.expert_count() == 0
          ? 0
          : static_cast<std::size_t>(x.height - problem.model.patch_side + 1) *
                (x.width - problem.model.patch_side + 1);
  blocks.reserve(n + patches * problem.model.expert_count());
  for_each_residual_block(problem, x,
                          [&blocks](const ResidualBlock& b) { blocks.push_back(b); });
  return blocks;
}

std::vector<double> gradient(const Problem& problem, const Image& x) {
  validate_problem(problem);
  require_same_shape(problem, x);
  const Image& u = problem.noisy;
  const double inv_sigma_sq = 1.0 / (problem.sigma * problem.sigma);

  std::vector<double> grad(x.data.size());
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    grad[i] = (x.data[i] - u.data[i]) * inv_sigma_sq;
  }

  const FoeModel& model = problem.model;
  const int m = model.patch_side;
  if (model.expert_count() == 0) return grad;

  for (int top = 0; top + m <= x.height; ++top) {
    for (int left = 0; left + m <= x.width; ++left) {
      for (const Expert& e : model.experts) {
        double t = 0.0;
        const double* coeff = e.filter.data();
        for (int pr = 0; pr < m; ++pr) {
          const double* row = x.data.data() + x.index(top + pr, left);
          for (int pc = 0; pc < m; ++pc) t += *coeff++ * row[pc];
        }
        const double weight = e.alpha * t / (1.0 + 0.5 * t * t);
        coeff = e.filter.data();
        for (int pr = 0; pr < m; ++pr) {
          double* grow = grad.data() + x.index(top + pr, left);
          for (int pc = 0; pc < m; ++pc) grow[pc] += weight * *coeff++;
        }
      }
    }
  }
  return grad;
}

GridSystem assemble_normal_system(const Problem& problem, const Image& x, double damping) {
  validate_problem(problem);
  require_same_shape(problem, x);
  if (!(damping >= 0.0)) throw std::invalid_argument("damping must be >= 0");

  const Image& u = problem.noisy;
  const FoeModel& model = problem.model;
  const int m = model.patch_side;
  const int band = model.expert_count() == 0 ? 0 : m - 1;
  GridSystem system = make_grid_system(x.width, x.height, band);
  const std::size_t n = system.pixel_count();

  // Data blocks: residual (x_i - u_i)/(sqrt(2) sigma), Jacobian 1/(sqrt(2) sigma),
  // identity loss. Contributes 1/(2 sigma^2) to every diagonal entry.
  const double inv_two_sigma_sq = 1.0 / (2.0 * problem.sigma * problem.sigma);
  {
    std::span<double> diag = system.plane(0);
    for (std::size_t i = 0; i < n; ++i) {
      diag[i] += inv_two_sigma_sq;
      system.rhs[i] += (x.data[i] - u.data[i]) * inv_two_sigma_sq;
    }
  }

  if (model.expert_count() > 0) {
    // Precompute, per expert, the scatter table of coefficient pairs:
    // patch cell a couples patch cell b at stored offset plane[a][b].
    struct PairEntry {
      int plane = 0;
      int a = 0;  // flat index of cell a within the patch
      double product = 0.0;
    };
    const int area = m * m;
    std::vector<std::vector<PairEntry>> pair_tables(model.experts.size());
    for (std::size_t k = 0; k < model.experts.size(); ++k) {
      const std::vector<double>& b = model.experts[k].filter;
      auto& table = pair_tables[k];
      table.reserve(static_cast<std::size_t>(area) * area / 2 + area);
      for (int a = 0; a < area; ++a) {
        const int ar = a / m, ac = a % m;
        for (int cell = 0; cell < area; ++cell) {
          const int dr = cell / m - ar, dc = cell % m - ac;
          if (dr < 0 || (dr == 0 && dc < 0)) continue;
          table.push_back({GridSystem::offset_index(band, dr, dc), a, b[a] * b[cell]});
        }
      }
    }

    const int w = x.width;
    for (int top = 0; top + m <= x.height; ++top) {
      for (int left = 0; left + m <= x.width; ++left) {
        const std::size_t corner = static_cast<std::size_t>(top) * w + left;
        for (std::size_t k = 0; k < model.experts.size(); ++k) {
          const Expert& e = model.experts[k];
          double t = 0.0;
          const double* coeff = e.filter.data();
          for (int pr = 0; pr < m; ++pr) {
            const double* row = x.data.data() + x.index(top + pr, left);
            for (int pc = 0; pc < m; ++pc) t += *coeff++ * row[pc];
          }
          // Corrected block: scale^2 = rho1 = alpha/(2 + t^2). The Gram
          // contribution is rho1 * b b^T and the rhs picks up rho1 * t * b.
          const double rho1 = e.alpha / (2.0 + t * t);
          const double rt = rho1 * t;
          coeff = e.filter.data();
          for (int pr = 0; pr < m; ++pr) {
            double* rhs_row = system.rhs.data() + corner + static_cast<std::size_t>(pr) * w;
            for (int pc = 0; pc < m; ++pc) rhs_row[pc] += rt * *coeff++;
          }
          for (const PairEntry& entry : pair_tables[k]) {
            const std::size_t pixel =
                corner + static_cast<std::size_t>(entry.a / m) * w + entry.a % m;
            system.values[static_cast<std::size_t>(entry.plane) * n + pixel] +=
                rho1 * entry.product;
          }
        }
      }
    }
  }

  for (double v : system.values) {
    if (!std::isfinite(v)) throw NumericalError("assembly produced non-finite matrix entries");
  }
  for (double v : system.rhs) {
    if (!std::isfinite(v)) throw NumericalError("assembly produced non-finite gradient entries");
  }

  if (damping > 0.0) return with_damping(system, damping);
  return system;
}

}  // namespace foe
