#pragma once

#include <cstdint>
#include <vector>

#include "encompass/links.hpp"

namespace enc {

/// Polyhedral cone {lambda : gamma_b lambda <= 0} in the beta coordinates.
struct Cone {
  Matrix gamma_b;  // b x p
  /// Rows taken from beta2 bounds declared binding at the estimate rather
  /// than fixed by the null.
  int plugin_rows = 0;

  Eigen::Index rows() const noexcept { return gamma_b.rows(); }
  Eigen::Index dim() const noexcept { return gamma_b.cols(); }
  static Cone unrestricted(Eigen::Index p) { return Cone{Matrix(0, p), 0}; }
};

/// Rows of the beta block of the parameter space that bind at the null.
/// beta1 rows bind when exact at beta1* (tolerance 1e-9); beta2 rows bind
/// when the estimate is within T^(-1/3) of the bound.
Cone binding_cone(const LinkSpec& link, const HypothesisSpec& hyp, const Vector& theta_hat,
                  std::size_t T);

/// argmin over the cone of (lambda - z)^T A (lambda - z) by a primal
/// active-set method started at the origin.
Vector solve_cone_qp(const Matrix& A, const Vector& z, const Cone& cone);

struct NullDistribution {
  std::vector<double> samples;  // ascending
  std::size_t n_draws = 0;
  std::uint64_t seed = 0;
  double point_mass_at_zero = 0.0;

  /// Empirical (1 - level) quantile, i.e. the critical value at `level`.
  double critical_value(double level) const;
};

/// Simulates W = lambda_b1^T V^-1 lambda_b1 where lambda_b is the cone
/// projection of the Gaussian limit of the beta block.
NullDistribution sample_wald_null(const Matrix& bread_gamma, const Matrix& meat_gamma,
                                  const SubvectorLayout& layout, const Cone& cone, const Matrix& V,
                                  std::size_t n_draws, std::uint64_t seed);

/// (1 + #{samples >= w_obs}) / (n + 1).
double pvalue(const NullDistribution& dist, double w_obs);

}  // namespace enc
