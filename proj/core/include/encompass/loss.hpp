#pragma once

#include <functional>

#include "encompass/links.hpp"
#include "encompass/types.hpp"

namespace enc {

/// A member of the strictly consistent joint (VaR, ES) loss family
///
///   rho(y, q, e) = (1{y<=q} - a) g(q) - 1{y<=q} g(y)
///                + phi'(e) (e - q + (q - y) 1{y<=q} / a) - phi(e)
///
/// with g increasing and phi strictly increasing and strictly convex.
struct LossSpec {
  enum class Tag { fz0, custom };

  Tag tag = Tag::fz0;
  std::function<double(double)> g;
  std::function<double(double)> dg;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> d2phi;

  /// g = 0, phi(z) = -log(-z); defined for e < 0.
  static LossSpec fz0();
  static LossSpec custom(std::function<double(double)> g, std::function<double(double)> dg,
                         std::function<double(double)> phi, std::function<double(double)> dphi,
                         std::function<double(double)> d2phi);

  /// Spot-checks monotonicity of g and phi' > 0, phi'' > 0 on a grid of
  /// [lo, hi]; returns false on the first failure.
  bool check_shape(double lo, double hi, int points = 101) const;

  bool is_fz0() const noexcept { return tag == Tag::fz0; }
};

double rho(const LossSpec& spec, double y, double q, double e, double alpha);

/// Score of rho with respect to theta, given the link values and gradients.
Vector psi(const LossSpec& spec, double y, double gq, double ge, const Vector& grad_q,
           const Vector& grad_e, double alpha);

/// Unscaled sum of rho over the panel at theta. Under FZ0 a combined ES at or
/// above -1e-10 on any row yields +infinity instead of an error.
double sample_objective(const LinkSpec& link, const LossSpec& spec, const ForecastPanel& panel,
                        const Vector& theta, double alpha);

/// Same as sample_objective on a precomputed design; no feasibility check.
double design_objective(const LinkDesign& design, const LossSpec& spec, std::span<const double> y,
                        const Vector& theta, double alpha);

}  // namespace enc
