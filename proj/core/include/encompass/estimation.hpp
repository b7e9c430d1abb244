#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "encompass/links.hpp"
#include "encompass/loss.hpp"

namespace enc {

struct FitOptions {
  int max_ils_rounds = 10;
  double perturb_scale = 0.1;  // fraction of each coordinate's search range
  double simplex_tol = 1e-9;
  int max_simplex_evals = 2000;
  int n_random_starts = 9;
  std::uint64_t seed = 1;
  std::vector<Vector> start_points;  // replaces the random starts when nonempty

  void validate() const;
};

struct FitResult {
  Vector theta_hat;
  double objective = 0.0;
  int rounds_used = 0;
  bool converged = false;
  int n_restarts_improved = 0;
  /// Final simplex has an objective spread below tolerance while its vertices
  /// are still more than 1e-3 apart: the optimum is not point-identified.
  bool flat = false;
  long evaluations = 0;
};

/// Clamp onto a box space; general polyhedra fall back to cyclic projection
/// onto the violated half-spaces.
Vector project_to_space(const Vector& theta, const ParamSpace& space);

/// Per-coordinate region around theta* from which starts and perturbations
/// are drawn.
struct SearchBox {
  Vector lower, upper;
};
SearchBox search_box(const LinkSpec& link, const ForecastPanel& panel);

/// M-estimate of theta minimizing the summed loss over the link parameter
/// space, via iterated local search around Nelder-Mead.
FitResult fit(const LinkSpec& link, const LossSpec& loss, const ForecastPanel& panel, double alpha,
              const FitOptions& options = {});

}  // namespace enc
